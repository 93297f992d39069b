//! Bi-quadratic fields `Q(√m, √n)` and their Pólya groups.
//!
//! For a totally real field with subfield kernels `Δ₁, Δ₂, Δ₃` and
//! fundamental units `u_i`:
//!
//! * `H` (the 2-torsion of `H¹(G, O_K*)`) is spanned in `Q*/(Q*)²` by the
//!   `[Δ_i]` and `[a_i]`, where `a_i = 1` if `N(u_i) = -1` and
//!   `a_i = N(u_i + 1)` otherwise;
//! * `[H¹ : H]` is 2 exactly when 2 is totally ramified and every subfield
//!   has an integer of norm ±2;
//! * `|Po(K)| = ∏ e_ℓ / |H¹|`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith::{factor_u64, is_prime, is_squarefree, squarefree_part_i64};
use crate::quadratic::{
    a_value_of, fundamental_unit, norm_equation, zantema_classify, FundamentalUnit,
    NormEquationSolution, Verdict,
};
use crate::sqclass::{subgroup_order, SquareClass};
use crate::{Budget, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct BiquadraticField {
    /// The three quadratic subfield kernels, ascending.
    pub kernels: [i64; 3],
    pub totally_real: bool,
}

impl BiquadraticField {
    pub fn new(m: i64, n: i64) -> Result<Self> {
        let (a, b, c) = subfields(m, n)?;
        let mut kernels = [a, b, c];
        kernels.sort_unstable();
        Ok(BiquadraticField { kernels, totally_real: kernels[0] > 0 })
    }

    pub fn contains_kernel(&self, k: i64) -> bool {
        self.kernels.contains(&k)
    }

    pub fn index_of(&self, k: i64) -> Option<usize> {
        self.kernels.iter().position(|&x| x == k)
    }
}

/// The three subfield kernels in presentation order `(m, n, sqf(mn))`.
pub fn subfields(m: i64, n: i64) -> Result<(i64, i64, i64)> {
    for x in [m, n] {
        if x == 0 || x == 1 || !is_squarefree(x) {
            return Err(Error::NotSquarefree(x));
        }
    }
    if m == n {
        return Err(Error::InvalidInput(format!("Q(√{m}) = Q(√{n}): degenerate field")));
    }
    let mn = m
        .checked_mul(n)
        .ok_or_else(|| Error::InvalidInput(format!("{m}·{n} overflows")))?;
    Ok((m, n, squarefree_part_i64(mn)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamificationProfile {
    /// Ramified prime → ramification index (2 or 4).
    pub entries: BTreeMap<u64, u32>,
    pub product: u64,
}

impl RamificationProfile {
    pub fn e(&self, prime: u64) -> u32 {
        self.entries.get(&prime).copied().unwrap_or(1)
    }

    pub fn two_totally_ramified(&self) -> bool {
        self.e(2) == 4
    }
}

/// Odd primes dividing a kernel ramify with index 2; 2 ramifies when some
/// kernel is ≡ 2, 3 (mod 4), totally so when none is ≡ 1 (mod 4).
pub fn ramification(field: &BiquadraticField) -> RamificationProfile {
    let mut entries = BTreeMap::new();
    for k in field.kernels {
        for (p, _) in factor_u64(k.unsigned_abs()) {
            if p != 2 {
                entries.insert(p, 2);
            }
        }
    }
    let residues = field.kernels.map(|k| k.rem_euclid(4));
    if residues.iter().any(|&r| r != 1) {
        let e2 = if residues.contains(&1) { 2 } else { 4 };
        entries.insert(2, e2);
    }
    let product = entries.values().map(|&e| e as u64).product();
    RamificationProfile { entries, product }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HGenerators {
    pub delta_classes: [SquareClass; 3],
    pub a_classes: [SquareClass; 3],
    pub units: [FundamentalUnit; 3],
}

impl HGenerators {
    pub fn all(&self) -> Vec<SquareClass> {
        self.delta_classes.iter().chain(&self.a_classes).cloned().collect()
    }
}

pub fn h_generators(field: &BiquadraticField, budget: &Budget) -> Result<HGenerators> {
    if !field.totally_real {
        return Err(Error::Signature(field.kernels[0]));
    }
    let units = field.kernels.map(fundamental_unit);
    let units: [FundamentalUnit; 3] = match units {
        [Ok(a), Ok(b), Ok(c)] => [a, b, c],
        [a, b, c] => return Err(a.and(b).and(c).unwrap_err()),
    };
    let a_classes = [
        a_value_of(&units[0], budget)?,
        a_value_of(&units[1], budget)?,
        a_value_of(&units[2], budget)?,
    ];
    Ok(HGenerators { delta_classes: field.kernels.map(SquareClass::of_i64), a_classes, units })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct H1Order {
    pub h_order: u64,
    pub h_basis: Vec<SquareClass>,
    pub index_factor: u8,
    pub h1_order: u64,
    /// Elements of norm ±2 per subfield, probed only when 2 is totally
    /// ramified.
    pub two_norm_elements: Option<Vec<Option<NormEquationSolution>>>,
}

fn norm_two_element(d: i64, budget: &Budget) -> Result<Option<NormEquationSolution>> {
    Ok(match norm_equation(d, 2, budget)? {
        Some(s) => Some(s),
        None => norm_equation(d, -2, budget)?,
    })
}

fn h1_from(field: &BiquadraticField, profile: &RamificationProfile, gens: &HGenerators, budget: &Budget) -> Result<H1Order> {
    let span = subgroup_order(&gens.all());
    let (index_factor, two_norm_elements) = if profile.two_totally_ramified() {
        let found = field
            .kernels
            .iter()
            .map(|&k| norm_two_element(k, budget))
            .collect::<Result<Vec<_>>>()?;
        (if found.iter().all(Option::is_some) { 2 } else { 1 }, Some(found))
    } else {
        (1, None)
    };
    Ok(H1Order {
        h_order: span.order,
        h_basis: span.basis,
        index_factor,
        h1_order: span.order * index_factor as u64,
        two_norm_elements,
    })
}

pub fn h1_order(field: &BiquadraticField, budget: &Budget) -> Result<H1Order> {
    let gens = h_generators(field, budget)?;
    h1_from(field, &ramification(field), &gens, budget)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PoStructure {
    /// `(Z/2)^rank`; forced when every `e_ℓ = 2`.
    ElementaryAbelian { rank: u32 },
    /// 2 totally ramified: the order alone does not pin the group down.
    OrderOnly,
}

impl std::fmt::Display for PoStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoStructure::ElementaryAbelian { rank: 0 } => write!(f, "trivial"),
            PoStructure::ElementaryAbelian { rank: 1 } => write!(f, "Z/2Z"),
            PoStructure::ElementaryAbelian { rank } => write!(f, "(Z/2Z)^{rank}"),
            PoStructure::OrderOnly => write!(f, "undetermined"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyaReport {
    pub field: BiquadraticField,
    pub profile: RamificationProfile,
    pub h_generators: Vec<SquareClass>,
    pub h_basis: Vec<SquareClass>,
    pub h_order: u64,
    pub index_factor: u8,
    pub h1_order: u64,
    pub po_order: u64,
    pub po_structure: PoStructure,
    pub unit_norms: [i8; 3],
    pub units: [FundamentalUnit; 3],
    pub two_norm_elements: Option<Vec<Option<NormEquationSolution>>>,
}

impl PolyaReport {
    pub fn is_polya(&self) -> bool {
        self.po_order == 1
    }

    pub fn unit_of(&self, kernel: i64) -> Option<&FundamentalUnit> {
        self.field.index_of(kernel).map(|i| &self.units[i])
    }

    pub fn a_class_of(&self, kernel: i64) -> Option<&SquareClass> {
        self.field.index_of(kernel).map(|i| &self.h_generators[3 + i])
    }

    /// `|Po|·|H¹| = ∏ e_ℓ` and `|H| ≤ |H¹| ≤ ∏ e_ℓ`.
    pub fn exact(&self) -> bool {
        self.po_order * self.h1_order == self.profile.product
            && self.h_order <= self.h1_order
            && self.h1_order <= self.profile.product
    }
}

pub fn polya_report(field: &BiquadraticField, budget: &Budget) -> Result<PolyaReport> {
    let profile = ramification(field);
    let gens = h_generators(field, budget)?;
    let h1 = h1_from(field, &profile, &gens, budget)?;
    if profile.product % h1.h1_order != 0 {
        return Err(Error::Invariant(format!(
            "|H¹| = {} does not divide ∏e = {} for {:?}",
            h1.h1_order, profile.product, field.kernels
        )));
    }
    let po_order = profile.product / h1.h1_order;
    let po_structure = if profile.two_totally_ramified() {
        PoStructure::OrderOnly
    } else {
        PoStructure::ElementaryAbelian { rank: po_order.trailing_zeros() }
    };
    Ok(PolyaReport {
        field: field.clone(),
        h_generators: gens.all(),
        h_basis: h1.h_basis,
        h_order: h1.h_order,
        index_factor: h1.index_factor,
        h1_order: h1.h1_order,
        po_order,
        po_structure,
        unit_norms: gens.units.each_ref().map(|u| u.norm),
        units: gens.units,
        two_norm_elements: h1.two_norm_elements,
        profile,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LericheVerdict {
    Polya,
    NotPolya,
    OutsideProposition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LericheRule {
    /// Fewer than two Pólya quadratic subfields.
    NotComposite,
    /// `Q(√-2, √p)`, `p ≡ 3 (mod 4)`
    MinusTwoWithPrime,
    /// `Q(√-1, √2q)`, `q` odd
    MinusOneWithTwicePrime,
    /// `Q(√p, √2q)` violating the congruence conditions
    PrimeWithTwicePrime,
    /// Everything else
    Default,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LericheClassification {
    pub verdict: LericheVerdict,
    pub rule: LericheRule,
}

fn odd_prime(k: i64) -> Option<u64> {
    (k > 2 && is_prime(k as u64)).then_some(k as u64)
}

fn twice_odd_prime(k: i64) -> Option<u64> {
    (k > 0 && k % 2 == 0).then(|| odd_prime(k / 2)).flatten()
}

/// Classification of composita of two Pólya quadratic fields. Exception
/// families are tested first; the `Q(√p, √2q)` congruence condition is a
/// necessary one, so its failure is conclusive.
pub fn leriche_classify(m: i64, n: i64) -> Result<LericheClassification> {
    let field = BiquadraticField::new(m, n)?;
    let polya_subfields = field
        .kernels
        .iter()
        .map(|&k| zantema_classify(k).map(|c| c.verdict == Verdict::Polya))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&p| p)
        .count();
    let verdict = |verdict, rule| Ok(LericheClassification { verdict, rule });
    if polya_subfields < 2 {
        return verdict(LericheVerdict::OutsideProposition, LericheRule::NotComposite);
    }
    let ks = field.kernels;
    if ks.contains(&-2) && ks.iter().any(|&k| odd_prime(k).is_some_and(|p| p % 4 == 3)) {
        return verdict(LericheVerdict::NotPolya, LericheRule::MinusTwoWithPrime);
    }
    if ks.contains(&-1) && ks.iter().any(|&k| twice_odd_prime(k).is_some()) {
        return verdict(LericheVerdict::NotPolya, LericheRule::MinusOneWithTwicePrime);
    }
    for &a in &ks {
        for &b in &ks {
            let (Some(p), Some(q)) = (odd_prime(a), twice_odd_prime(b)) else { continue };
            if p == q {
                continue;
            }
            let ok = (p % 8 == 7 && matches!(q % 8, 1 | 7)) || (p % 8 == 3 && matches!(q % 8, 1 | 3));
            if !ok {
                return verdict(LericheVerdict::NotPolya, LericheRule::PrimeWithTwicePrime);
            }
        }
    }
    verdict(LericheVerdict::Polya, LericheRule::Default)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(m: i64, n: i64) -> BiquadraticField {
        BiquadraticField::new(m, n).unwrap()
    }

    fn report(m: i64, n: i64) -> PolyaReport {
        polya_report(&field(m, n), &Budget::default()).unwrap()
    }

    #[test]
    fn subfield_examples() {
        assert_eq!(subfields(2, 85).unwrap(), (2, 85, 170));
        assert_eq!(subfields(3, 51).unwrap(), (3, 51, 17));
        assert_eq!(subfields(6, 10).unwrap(), (6, 10, 15));
        assert!(subfields(2, 2).is_err());
        assert!(subfields(2, 8).is_err());
        assert!(subfields(1, 5).is_err());
        assert_eq!(field(51, 3).kernels, [3, 17, 51]);
    }

    #[test]
    fn ramification_examples() {
        let p = ramification(&field(2, 85));
        assert_eq!(p.entries, BTreeMap::from([(2, 2), (5, 2), (17, 2)]));
        assert_eq!(p.product, 8);
        let p = ramification(&field(2, 3));
        assert_eq!(p.entries, BTreeMap::from([(2, 4), (3, 2)]));
        assert_eq!(p.product, 8);
        let p = ramification(&field(5, 13));
        assert_eq!(p.entries, BTreeMap::from([(5, 2), (13, 2)]));
        assert_eq!(p.product, 4);
    }

    #[test]
    fn generator_examples() {
        let b = Budget::default();
        let g = h_generators(&field(2, 85), &b).unwrap();
        assert_eq!(g.delta_classes, [2, 85, 170].map(SquareClass::of_i64));
        assert!(g.a_classes.iter().all(SquareClass::is_identity));
        let f = field(3, 17 * 41);
        let g = h_generators(&f, &b).unwrap();
        assert_eq!(g.a_classes[f.index_of(3).unwrap()], SquareClass::of_i64(6));
        assert_eq!(h_generators(&field(-1, 2), &b).unwrap_err(), Error::Signature(-2));
    }

    #[test]
    fn h1_examples() {
        let b = Budget::default();
        let h = h1_order(&field(2, 85), &b).unwrap();
        assert_eq!((h.h_order, h.index_factor, h.h1_order), (4, 1, 4));
        let h = h1_order(&field(3, 697), &b).unwrap();
        assert_eq!((h.h_order, h.index_factor), (8, 1));
        let h = h1_order(&field(2, 3), &b).unwrap();
        assert_eq!(h.index_factor, 2);
        assert!(h.two_norm_elements.unwrap().iter().all(|s| s.as_ref().unwrap().verify()));
    }

    #[test]
    fn report_examples() {
        let r = report(2, 85);
        assert_eq!((r.po_order, r.po_structure), (2, PoStructure::ElementaryAbelian { rank: 1 }));
        assert_eq!(report(2, 5).po_order, 1);
        assert_eq!(report(3, 91).po_order, 1);
        let r = report(2, 3);
        assert_eq!(r.po_structure, PoStructure::OrderOnly);
        assert!(r.exact());
    }

    #[test]
    fn reports_do_not_depend_on_presentation() {
        for (m, n) in [(2, 85), (3, 697), (6, 10), (7, 62), (5, 13)] {
            let base = report(m, n);
            let [a, b, c] = base.field.kernels;
            assert_eq!(report(n, m), base);
            assert_eq!(report(a, c), base);
            assert_eq!(report(c, b), base);
        }
    }

    #[test]
    fn leriche_examples() {
        let v = leriche_classify(-2, 7).unwrap();
        assert_eq!((v.verdict, v.rule), (LericheVerdict::NotPolya, LericheRule::MinusTwoWithPrime));
        let v = leriche_classify(-1, 6).unwrap();
        assert_eq!((v.verdict, v.rule), (LericheVerdict::NotPolya, LericheRule::MinusOneWithTwicePrime));
        assert_eq!(leriche_classify(2, 5).unwrap().verdict, LericheVerdict::Polya);
        assert_eq!(leriche_classify(10, 15).unwrap().verdict, LericheVerdict::OutsideProposition);
    }
}
