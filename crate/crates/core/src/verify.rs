//! Harnesses for three families of bi-quadratic fields with `Po ≅ Z/2`:
//!
//! * T1: `Q(√p, √qr)`, `p ≡ 3 (4)`, `q ≡ r ≡ 1 (8)`, `(q/r) = -1`;
//! * T2: `Q(√p, √qr)`, `p ≡ q ≡ 3 (4)`, `r ≡ 1 (8)`, `(p/r) = 1`, `(q/r) = -1`;
//! * T3: `Q(√2, √pq)`, `p ≡ q ≡ 1 (4)`, `(p/q) = -1`.
//!
//! Each report recomputes the intermediate facts the hand proofs rely on
//! and lists every divergence as an anomaly rather than failing.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{exact_sqrt, is_prime, jacobi};
use crate::biquad::{polya_report, BiquadraticField, PolyaReport};
use crate::quadratic::{fundamental_unit, FundamentalUnit};
use crate::sqclass::{subgroup_order, SquareClass};
use crate::{Budget, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Theorem {
    T1,
    T2,
    T3,
}

impl Theorem {
    pub const ALL: [Theorem; 3] = [Theorem::T1, Theorem::T2, Theorem::T3];

    pub fn arity(self) -> usize {
        if self == Theorem::T3 { 2 } else { 3 }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Theorem::T1 => "t1",
            Theorem::T2 => "t2",
            Theorem::T3 => "t3",
        })
    }
}

impl FromStr for Theorem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "t1" => Ok(Theorem::T1),
            "t2" => Ok(Theorem::T2),
            "t3" => Ok(Theorem::T3),
            _ => Err(Error::InvalidInput(format!("unknown theorem {s:?} (expected t1, t2 or t3)"))),
        }
    }
}

/// `(p, q, r)`; `r` is absent for T3, whose fixed kernel is 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PrimeTriple {
    pub p: u64,
    pub q: u64,
    pub r: Option<u64>,
}

impl PrimeTriple {
    pub fn new(p: u64, q: u64, r: u64) -> Self {
        PrimeTriple { p, q, r: Some(r) }
    }

    pub fn pair(p: u64, q: u64) -> Self {
        PrimeTriple { p, q, r: None }
    }

    pub fn max_prime(&self) -> u64 {
        self.p.max(self.q).max(self.r.unwrap_or(0))
    }

    /// `Q(√p, √qr)`, or `Q(√2, √pq)` for pairs.
    pub fn field(&self) -> Result<BiquadraticField> {
        let (m, n) = match self.r {
            Some(r) => (self.p, self.q.checked_mul(r)),
            None => (2, self.p.checked_mul(self.q)),
        };
        let n = n
            .and_then(|n| i64::try_from(n).ok())
            .ok_or_else(|| Error::InvalidInput(format!("{self} is too large")))?;
        BiquadraticField::new(m as i64, n)
    }
}

impl fmt::Display for PrimeTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.r {
            Some(r) => write!(f, "({}, {}, {})", self.p, self.q, r),
            None => write!(f, "({}, {})", self.p, self.q),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HypothesisCheck {
    pub ok: bool,
    pub conditions: Vec<Condition>,
}

impl HypothesisCheck {
    fn from(conditions: Vec<(String, bool)>) -> Self {
        let conditions: Vec<Condition> =
            conditions.into_iter().map(|(name, holds)| Condition { name, holds }).collect();
        HypothesisCheck { ok: conditions.iter().all(|c| c.holds), conditions }
    }

    pub fn failed(&self) -> Vec<&str> {
        self.conditions.iter().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }
}

/// Legendre symbol `(a/n)` for an odd prime `n`; `None` otherwise.
fn legendre(a: u64, n: u64) -> Option<i8> {
    if n % 2 == 0 || !is_prime(n) {
        return None;
    }
    jacobi(i64::try_from(a).ok()?, n).ok()
}

fn basic_conditions(primes: &[u64]) -> Vec<(String, bool)> {
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    vec![
        ("distinct".into(), sorted.len() == primes.len()),
        ("all prime".into(), primes.iter().all(|&x| is_prime(x))),
    ]
}

pub fn hypotheses_t1(p: u64, q: u64, r: u64) -> HypothesisCheck {
    let mut c = basic_conditions(&[p, q, r]);
    c.push(("p ≡ 3 (mod 4)".into(), p % 4 == 3));
    c.push(("q ≡ 1 (mod 8)".into(), q % 8 == 1));
    c.push(("r ≡ 1 (mod 8)".into(), r % 8 == 1));
    c.push(("(q/r) = -1".into(), legendre(q, r) == Some(-1)));
    HypothesisCheck::from(c)
}

pub fn hypotheses_t2(p: u64, q: u64, r: u64) -> HypothesisCheck {
    let mut c = basic_conditions(&[p, q, r]);
    c.push(("p ≡ 3 (mod 4)".into(), p % 4 == 3));
    c.push(("q ≡ 3 (mod 4)".into(), q % 4 == 3));
    c.push(("r ≡ 1 (mod 8)".into(), r % 8 == 1));
    c.push(("(p/r) = 1".into(), legendre(p, r) == Some(1)));
    c.push(("(q/r) = -1".into(), legendre(q, r) == Some(-1)));
    HypothesisCheck::from(c)
}

pub fn hypotheses_t3(p: u64, q: u64) -> HypothesisCheck {
    let mut c = basic_conditions(&[p, q]);
    c.push(("p ≡ 1 (mod 4)".into(), p % 4 == 1));
    c.push(("q ≡ 1 (mod 4)".into(), q % 4 == 1));
    c.push(("(p/q) = -1".into(), legendre(p, q) == Some(-1)));
    HypothesisCheck::from(c)
}

pub fn hypotheses(theorem: Theorem, triple: &PrimeTriple) -> HypothesisCheck {
    match (theorem, triple.r) {
        (Theorem::T1, Some(r)) => hypotheses_t1(triple.p, triple.q, r),
        (Theorem::T2, Some(r)) => hypotheses_t2(triple.p, triple.q, r),
        (Theorem::T3, None) => hypotheses_t3(triple.p, triple.q),
        _ => HypothesisCheck::from(vec![(format!("{theorem} takes {} primes", theorem.arity()), false)]),
    }
}

/// `z + δ = g·m²·ε`, `z - δ = g·n²·η` for a norm +1 unit `(z + t√d)/δ`,
/// where `g = gcd(z - δ, z + δ)`, `εη = d`, `mn = t/g` and
/// `m²ε - n²η = 2δ/g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EpsilonWitness {
    pub d: u64,
    #[serde(serialize_with = "crate::serde_util::biguint_str")]
    pub z: BigUint,
    #[serde(serialize_with = "crate::serde_util::biguint_str")]
    pub t: BigUint,
    pub delta: u8,
    pub g: u8,
    #[serde(serialize_with = "crate::serde_util::biguint_str")]
    pub m: BigUint,
    #[serde(serialize_with = "crate::serde_util::biguint_str")]
    pub n: BigUint,
    pub epsilon: u64,
    pub eta: u64,
    pub case_label: String,
}

impl EpsilonWitness {
    /// Checks every identity of the decomposition from scratch.
    pub fn verify(&self) -> bool {
        let (delta, g) = (BigUint::from(self.delta), BigUint::from(self.g));
        let (eps, eta) = (BigUint::from(self.epsilon), BigUint::from(self.eta));
        let (m2, n2) = (&self.m * &self.m, &self.n * &self.n);
        self.z >= delta
            && &self.z + &delta == &g * &m2 * &eps
            && &self.z - &delta == &g * &n2 * &eta
            && self.epsilon.checked_mul(self.eta) == Some(self.d)
            && &self.m * &self.n * &g == self.t
            && self.m.gcd(&self.n).is_one()
            && &m2 * &eps == &n2 * &eta + BigUint::from(2 * self.delta / self.g)
    }

    /// `[N(u + 1)]`: `[2(z + 1)] = [2gε]` or `[z + 2] = [gε]`.
    pub fn a_class(&self) -> SquareClass {
        let k = self.g as i64 * if self.delta == 1 { 2 } else { 1 };
        SquareClass::of_i64(k).mul(&SquareClass::of_i64(self.epsilon as i64))
    }
}

pub fn epsilon_witness(d: u64) -> Result<EpsilonWitness> {
    let unit = fundamental_unit(i64::try_from(d).map_err(|_| Error::InvalidInput(format!("{d} too large")))?)?;
    epsilon_witness_of(&unit)
}

pub fn epsilon_witness_of(unit: &FundamentalUnit) -> Result<EpsilonWitness> {
    if unit.norm != 1 {
        return Err(Error::Inapplicable(unit.d));
    }
    let delta = BigUint::from(unit.denom);
    let (plus, minus) = (&unit.z + &delta, &unit.z - &delta);
    let g = plus.gcd(&minus);
    let (a, b) = (&plus / &g, &minus / &g);
    let d = BigUint::from(unit.d);
    let eps = a.gcd(&d);
    let eta = &d / &eps;
    let invariant = |what: &str| Error::Invariant(format!("{what} for d = {}", unit.d));
    let m = exact_sqrt(&(&a / &eps)).ok_or_else(|| invariant("(z + δ)/gε is not a square"))?;
    let n = if b.is_zero() {
        BigUint::zero()
    } else {
        exact_sqrt(&(&b / &eta)).ok_or_else(|| invariant("(z - δ)/gη is not a square"))?
    };
    let g = g.to_u8().ok_or_else(|| invariant("gcd exceeds 4"))?;
    let w = EpsilonWitness {
        d: unit.d,
        z: unit.z.clone(),
        t: unit.t.clone(),
        delta: unit.denom,
        g,
        m,
        n,
        epsilon: eps.to_u64().unwrap(),
        eta: eta.to_u64().unwrap(),
        case_label: format!("gcd(z - {0}, z + {0}) = {g}", unit.denom),
    };
    if !w.verify() {
        return Err(invariant("witness identities fail"));
    }
    Ok(w)
}

fn allowed_epsilons(theorem: Theorem, t: &PrimeTriple) -> [u64; 4] {
    match (theorem, t.r) {
        (Theorem::T3, _) | (_, None) => [1, 2, t.p * t.q, 2 * t.p * t.q],
        (_, Some(r)) => [1, t.p, t.q * r, t.p * t.q * r],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremReport {
    pub theorem: Theorem,
    pub triple: PrimeTriple,
    pub hypotheses_ok: bool,
    pub hypotheses: HypothesisCheck,
    pub field: Option<PolyaReport>,
    pub epsilon_witness: Option<EpsilonWitness>,
    pub epsilon_in_allowed_set: Option<bool>,
    pub claim_matches: bool,
    pub anomalies: Vec<String>,
    /// Self-consistency failures of the computation itself.
    pub violations: Vec<String>,
    pub undecided: Option<String>,
}

impl TheoremReport {
    pub fn po_order(&self) -> Option<u64> {
        self.field.as_ref().map(|f| f.po_order)
    }
}

pub fn verify_theorem(theorem: Theorem, triple: PrimeTriple, budget: &Budget) -> TheoremReport {
    verify_theorem_with(theorem, triple, budget, false)
}

/// As [`verify_theorem`]; with `force` the field is analyzed even when the
/// hypotheses fail.
pub fn verify_theorem_with(theorem: Theorem, triple: PrimeTriple, budget: &Budget, force: bool) -> TheoremReport {
    let hyp = hypotheses(theorem, &triple);
    let mut out = TheoremReport {
        theorem,
        triple,
        hypotheses_ok: hyp.ok,
        hypotheses: hyp,
        field: None,
        epsilon_witness: None,
        epsilon_in_allowed_set: None,
        claim_matches: false,
        anomalies: Vec::new(),
        violations: Vec::new(),
        undecided: None,
    };
    let arity_ok = triple.r.is_some() == (theorem != Theorem::T3);
    if !(out.hypotheses_ok || force && arity_ok) {
        return out;
    }
    let report = match triple.field().and_then(|f| polya_report(&f, budget)) {
        Ok(r) => r,
        Err(e) if e.is_undecided() => {
            out.undecided = Some(e.to_string());
            return out;
        }
        Err(e) => {
            out.violations.push(e.to_string());
            return out;
        }
    };
    if !report.exact() {
        out.violations.push(format!(
            "exactness fails: {} · {} ≠ {}",
            report.po_order, report.h1_order, report.profile.product
        ));
    }
    out.claim_matches = report.po_order == 2;
    if !out.claim_matches {
        out.anomalies.push(format!("Po order is {}, not 2", report.po_order));
    }
    check_claims(theorem, &triple, &report, &mut out);
    out.field = Some(report);
    out
}

fn kernel(x: u64) -> i64 {
    x as i64
}

fn check_claims(theorem: Theorem, t: &PrimeTriple, report: &PolyaReport, out: &mut TheoremReport) {
    let (p, q) = (t.p, t.q);
    let notes = &mut out.anomalies;
    let expect_norm = |k: u64, want: i8, notes: &mut Vec<String>| {
        if let Some(u) = report.unit_of(kernel(k)) {
            if u.norm != want {
                notes.push(format!("unit of Q(√{k}) has norm {}, expected {want}", u.norm));
            }
        }
    };
    let (ramified, main_kernel): (Vec<u64>, u64) = match t.r {
        Some(r) if theorem != Theorem::T3 => {
            expect_norm(p, 1, notes);
            expect_norm(q * r, -1, notes);
            expect_norm(p * q * r, 1, notes);
            (vec![2, p, q, r], p * q * r)
        }
        _ => {
            expect_norm(2, -1, notes);
            expect_norm(p * q, -1, notes);
            (vec![2, p, q], 2 * p * q)
        }
    };

    let mut want_entries: Vec<(u64, u32)> = ramified.iter().map(|&l| (l, 2)).collect();
    want_entries.sort_unstable();
    let got: Vec<(u64, u32)> = report.profile.entries.iter().map(|(&l, &e)| (l, e)).collect();
    if got != want_entries {
        notes.push(format!("ramification {got:?}, expected {want_entries:?}"));
    }
    if report.index_factor != 1 {
        notes.push("index of H in H¹ is 2".into());
    }

    let target: Vec<SquareClass> = match t.r {
        Some(r) if theorem != Theorem::T3 => vec![2, p as i64, (q * r) as i64],
        _ => vec![2, (p * q) as i64],
    }
    .into_iter()
    .map(SquareClass::of_i64)
    .collect();
    let target_span = subgroup_order(&target);
    let mut joint = target.clone();
    joint.extend(report.h_basis.iter().cloned());
    if report.h_order != target_span.order || subgroup_order(&joint).order != target_span.order {
        let names: Vec<String> = target.iter().map(|c| c.to_string()).collect();
        notes.push(format!("H has order {}, expected ⟨{}⟩ of order {}", report.h_order, names.join(", "), target_span.order));
    }

    if theorem != Theorem::T3 {
        if let Some(u) = report.unit_of(kernel(p)) {
            lemma_on_prime_unit(p, u, notes);
        }
    }

    if let Some(u) = report.unit_of(kernel(main_kernel)) {
        match epsilon_witness_of(u) {
            Ok(w) => {
                let allowed = allowed_epsilons(theorem, t).contains(&w.epsilon);
                if !allowed {
                    notes.push(format!("ε = {} lies outside the allowed set {:?}", w.epsilon, allowed_epsilons(theorem, t)));
                }
                if report.a_class_of(kernel(main_kernel)) != Some(&w.a_class()) {
                    out.violations.push(format!("witness class {} disagrees with a-value", w.a_class()));
                }
                out.epsilon_in_allowed_set = Some(allowed);
                out.epsilon_witness = Some(w);
            }
            Err(Error::Inapplicable(_)) => {}
            Err(e) => out.violations.push(e.to_string()),
        }
    }
}

/// For `p ≡ 3 (mod 4)` and unit `z + t√p`: `1 + z` and `t` odd, `1 + z` a
/// square when `p ≡ 7 (mod 8)`, `p` times a square when `p ≡ 3 (mod 8)`.
fn lemma_on_prime_unit(p: u64, u: &FundamentalUnit, notes: &mut Vec<String>) {
    if p % 4 != 3 {
        return;
    }
    let one_z = &u.z + 1u32;
    if one_z.is_even() || u.t.is_even() {
        notes.push(format!("Q(√{p}): 1 + z = {one_z} and t = {} not both odd", u.t));
    }
    let pb = BigUint::from(p);
    let shape_ok = match p % 8 {
        7 => exact_sqrt(&one_z).is_some(),
        _ => one_z.is_multiple_of(&pb) && exact_sqrt(&(&one_z / &pb)).is_some(),
    };
    if !shape_ok {
        let want = if p % 8 == 7 { "a square" } else { "p times a square" };
        notes.push(format!("Q(√{p}): 1 + z = {one_z} is not {want}"));
    }
}

pub fn verify_many(theorem: Theorem, triples: &[PrimeTriple], budget: &Budget) -> Vec<TheoremReport> {
    triples.par_iter().map(|&t| verify_theorem(theorem, t, budget)).collect()
}

fn primes_upto(bound: u64) -> Vec<u64> {
    (2..=bound).filter(|&n| is_prime(n)).collect()
}

/// Admissible instances with every prime ≤ `bound`, lexicographic.
pub fn admissible(theorem: Theorem, bound: u64) -> Vec<PrimeTriple> {
    let ps = primes_upto(bound);
    let mut out = Vec::new();
    for &p in &ps {
        for &q in &ps {
            if theorem == Theorem::T3 {
                if hypotheses_t3(p, q).ok {
                    out.push(PrimeTriple::pair(p, q));
                }
                continue;
            }
            for &r in &ps {
                if hypotheses(theorem, &PrimeTriple::new(p, q, r)).ok {
                    out.push(PrimeTriple::new(p, q, r));
                }
            }
        }
    }
    out
}

pub fn scan(theorem: Theorem, bound: u64, budget: &Budget) -> Result<Vec<TheoremReport>> {
    if bound < 3 {
        return Err(Error::InvalidInput(format!("scan bound must be at least 3, got {bound}")));
    }
    Ok(verify_many(theorem, &admissible(theorem, bound), budget))
}

/// The `count` smallest T2 instances, ordered by largest prime, then
/// lexicographically.
pub fn t2_smallest(count: usize) -> Vec<PrimeTriple> {
    let mut bound = 64;
    loop {
        let mut found = admissible(Theorem::T2, bound);
        found.sort_by_key(|t| (t.max_prime(), *t));
        if found.len() >= count {
            // every instance with max prime ≤ bound is present, so the
            // first `count` are final once they stay below the bound
            found.truncate(count);
            return found;
        }
        bound *= 2;
    }
}

/// Published admissible `(2, p, q)` rows for `Q(√2, √pq)`.
pub const TABLE_ROWS: [(u64, u64); 20] = [
    (5, 17), (5, 37), (5, 97), (5, 173),
    (5, 193), (13, 37), (13, 73), (13, 89),
    (13, 97), (13, 109), (13, 193), (13, 197),
    (17, 5), (17, 29), (17, 37), (17, 61),
    (17, 197), (29, 17), (29, 61), (29, 89),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TableRow {
    pub row: [u64; 3],
    pub ok: bool,
    pub report: TheoremReport,
}

pub fn verify_table(budget: &Budget) -> Vec<TableRow> {
    TABLE_ROWS
        .par_iter()
        .map(|&(p, q)| {
            let report = verify_theorem(Theorem::T3, PrimeTriple::pair(p, q), budget);
            TableRow { row: [2, p, q], ok: report.hypotheses_ok && report.po_order() == Some(2), report }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContrastReport {
    pub triple: PrimeTriple,
    pub field: PolyaReport,
    pub expected_po_order: u64,
    pub matches: bool,
    pub anomalies: Vec<String>,
}

/// `Q(√p, √qr)` with `p ≡ q ≡ 3 (mod 4)`, `r ≡ 5 (mod 8)` is expected to be
/// Pólya.
pub fn contrast_rajaei(p: u64, q: u64, r: u64, budget: &Budget) -> Result<ContrastReport> {
    let mut conds = basic_conditions(&[p, q, r]);
    conds.push(("p ≡ 3 (mod 4)".into(), p % 4 == 3));
    conds.push(("q ≡ 3 (mod 4)".into(), q % 4 == 3));
    conds.push(("r ≡ 5 (mod 8)".into(), r % 8 == 5));
    let check = HypothesisCheck::from(conds);
    if !check.ok {
        return Err(Error::InvalidInput(format!("({p}, {q}, {r}) fails: {}", check.failed().join(", "))));
    }
    let triple = PrimeTriple::new(p, q, r);
    let field = polya_report(&triple.field()?, budget)?;
    let matches = field.po_order == 1;
    let anomalies = if matches { vec![] } else { vec![format!("Po order is {}, expected 1", field.po_order)] };
    Ok(ContrastReport { triple, field, expected_po_order: 1, matches, anomalies })
}

pub fn contrast_triples(bound: u64) -> Vec<PrimeTriple> {
    let ps = primes_upto(bound);
    let mut out = Vec::new();
    for &p in ps.iter().filter(|&&p| p % 4 == 3) {
        for &q in ps.iter().filter(|&&q| q % 4 == 3 && q != p) {
            for &r in ps.iter().filter(|&&r| r % 8 == 5) {
                out.push(PrimeTriple::new(p, q, r));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PollackPair {
    pub r: u64,
    pub p: u64,
    pub q: u64,
}

/// Smallest primes `p ≡ 3 (mod 4)`, `q ≡ 1 (mod 4)` below `r` that are
/// both non-residues mod `r`.
pub fn pollack_search(r: u64) -> Result<PollackPair> {
    if r < 13 || !is_prime(r) {
        return Err(Error::InvalidInput(format!("need a prime r ≥ 13, got {r}")));
    }
    let nonresidue = |x: u64| legendre(x, r) == Some(-1);
    let first = |residue: u64| (2..r).find(|&x| x % 4 == residue && is_prime(x) && nonresidue(x));
    match (first(3), first(1)) {
        (Some(p), Some(q)) => Ok(PollackPair { r, p, q }),
        _ => Err(Error::Invariant(format!("no non-residue pair below {r}"))),
    }
}
