//! Pólya classification of quadratic fields, twice: Zantema's list of cases
//! and an independent check that every ramified prime ideal is principal.

use serde::Serialize;

use super::norm::norm_equation;
use super::unit::fundamental_unit;
use super::QuadraticField;
use crate::arith::{factor_u64, is_prime, jacobi};
use crate::{Budget, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Polya,
    NotPolya,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleVerdict {
    Polya,
    NotPolya,
    Undecided,
}

impl OracleVerdict {
    pub fn decided(self) -> Option<Verdict> {
        match self {
            OracleVerdict::Polya => Some(Verdict::Polya),
            OracleVerdict::NotPolya => Some(Verdict::NotPolya),
            OracleVerdict::Undecided => None,
        }
    }
}

/// Shapes of `d` in Zantema's list.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZantemaCase {
    /// d ∈ {-1, -2, 2}
    Exceptional,
    /// d = -p, p ≡ 3 (mod 4)
    NegativePrime,
    /// d = p, p odd
    OddPrime,
    /// d = 2p
    TwicePrime,
    /// d = pq, p ≡ q (mod 4)
    TwoPrimes,
}

impl ZantemaCase {
    pub fn number(self) -> u8 {
        match self {
            ZantemaCase::Exceptional => 1,
            ZantemaCase::NegativePrime => 2,
            ZantemaCase::OddPrime => 3,
            ZantemaCase::TwicePrime => 4,
            ZantemaCase::TwoPrimes => 5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub d: i64,
    pub verdict: Verdict,
    /// The case whose shape `d` has, whether or not its condition held.
    pub case: Option<ZantemaCase>,
    /// Fundamental unit norm, when the case consulted it.
    pub unit_norm: Option<i8>,
}

impl Classification {
    pub fn label(&self) -> String {
        match (self.verdict, self.case) {
            (Verdict::Polya, Some(c)) => format!("case {}", c.number()),
            (Verdict::NotPolya, Some(c)) => format!("shape of case {}, condition fails", c.number()),
            (_, None) => "no case matches".into(),
        }
    }
}

pub fn zantema_classify(d: i64) -> Result<Classification> {
    let field = QuadraticField::new(d)?;
    let mut out = Classification { d, verdict: Verdict::NotPolya, case: None, unit_norm: None };
    if matches!(d, -1 | -2 | 2) {
        out.case = Some(ZantemaCase::Exceptional);
        out.verdict = Verdict::Polya;
        return Ok(out);
    }
    let primes: Vec<u64> = factor_u64(d.unsigned_abs()).into_iter().map(|(p, _)| p).collect();
    if d < 0 {
        if primes.len() == 1 && primes[0] % 4 == 3 {
            out.case = Some(ZantemaCase::NegativePrime);
            out.verdict = Verdict::Polya;
        }
        return Ok(out);
    }
    let mut unit_norm = || -> Result<i8> {
        let n = fundamental_unit(field.d)?.norm;
        out.unit_norm = Some(n);
        Ok(n)
    };
    let (case, polya) = match primes.as_slice() {
        [p] if p % 2 == 1 => (ZantemaCase::OddPrime, true),
        [2, p] => {
            let ok = p % 4 == 3 || unit_norm()? == 1;
            (ZantemaCase::TwicePrime, ok)
        }
        [p, q] if p % 4 == q % 4 => {
            let ok = p % 4 == 3 || unit_norm()? == 1;
            (ZantemaCase::TwoPrimes, ok)
        }
        _ => return Ok(out),
    };
    out.case = Some(case);
    if polya {
        out.verdict = Verdict::Polya;
    }
    Ok(out)
}

/// Principality of one ramified prime ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RamifiedPrimeCheck {
    pub prime: u64,
    /// `None` when the norm search ran out of budget.
    pub principal: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub d: i64,
    pub verdict: OracleVerdict,
    pub checks: Vec<RamifiedPrimeCheck>,
}

/// Pólya iff each ramified prime `𝔭` (the only possibly non-principal
/// `Π_q` in a quadratic field) is principal, i.e. some element has norm
/// `±ℓ` (`+ℓ` only, for imaginary fields).
pub fn quadratic_polya_oracle(d: i64, budget: &Budget) -> Result<OracleReport> {
    let field = QuadraticField::new(d)?;
    let mut checks = Vec::new();
    for &l in &field.ramified_primes {
        let l = l as i64;
        let signs: &[i64] = if d < 0 { &[1] } else { &[1, -1] };
        let mut principal = Some(false);
        for &s in signs {
            match norm_equation(d, s * l, budget) {
                Ok(Some(_)) => {
                    principal = Some(true);
                    break;
                }
                Ok(None) => {}
                Err(e) if e.is_undecided() => principal = None,
                Err(e) => return Err(e),
            }
        }
        checks.push(RamifiedPrimeCheck { prime: l as u64, principal });
    }
    let verdict = if checks.iter().any(|c| c.principal == Some(false)) {
        OracleVerdict::NotPolya
    } else if checks.iter().all(|c| c.principal == Some(true)) {
        OracleVerdict::Polya
    } else {
        OracleVerdict::Undecided
    };
    Ok(OracleReport { d, verdict, checks })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirichletReport {
    pub r: u64,
    pub s: u64,
    /// `(r/s)`, when `s` is odd.
    pub legendre: Option<i8>,
    pub applies: bool,
    pub norm: i8,
    pub consistent: bool,
}

/// If `r ≡ s ≡ 1 (mod 4)` and `(r/s) = -1`, the unit of `Q(√rs)` must have
/// norm -1. The computed norm is reported either way.
pub fn dirichlet_norm_criterion(r: u64, s: u64) -> Result<DirichletReport> {
    if r == s || !is_prime(r) || !is_prime(s) {
        return Err(Error::InvalidInput(format!("need distinct primes, got {r}, {s}")));
    }
    let legendre = if s % 2 == 1 { Some(jacobi(r as i64, s)?) } else { None };
    let applies = r % 4 == 1 && s % 4 == 1 && legendre == Some(-1);
    let norm = fundamental_unit((r * s) as i64)?.norm;
    Ok(DirichletReport { r, s, legendre, applies, norm, consistent: !applies || norm == -1 })
}
