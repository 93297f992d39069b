//! Fundamental units of real quadratic maximal orders.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::Serialize;

use super::cf::{Convergents, Expansion};
use crate::arith::{self, is_squarefree};
use crate::sqclass::SquareClass;
use crate::{Budget, Error, Result};

/// The minimal unit `(z + t√d)/denom > 1` of the maximal order of `Q(√d)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FundamentalUnit {
    pub d: u64,
    #[serde(serialize_with = "crate::serde_util::biguint_str")]
    pub z: BigUint,
    #[serde(serialize_with = "crate::serde_util::biguint_str")]
    pub t: BigUint,
    /// 2 only for `d ≡ 1 (mod 4)` with `z`, `t` both odd.
    pub denom: u8,
    pub norm: i8,
}

impl FundamentalUnit {
    /// `z² - d·t²`, which must equal `norm · denom²`.
    pub fn equation_value(&self) -> BigInt {
        let z = BigInt::from(self.z.clone());
        let t = BigInt::from(self.t.clone());
        &z * &z - BigInt::from(self.d) * &t * &t
    }

    pub fn verify(&self) -> bool {
        let den = self.denom as i64;
        self.equation_value() == BigInt::from(self.norm as i64 * den * den)
            && (self.denom == 1 || (self.d % 4 == 1 && self.z.is_odd() && self.t.is_odd()))
    }

    /// Natural log of the real value `(z + t√d)/denom`.
    pub fn ln_value(&self) -> f64 {
        if self.z.bits() < 500 {
            let v = self.z.to_f64().unwrap() + self.t.to_f64().unwrap() * (self.d as f64).sqrt();
            return (v / self.denom as f64).ln();
        }
        // z ≈ t√d to relative precision 1/z², far below f64 resolution here
        ln_biguint(&self.z) + (2.0 / self.denom as f64).ln()
    }

    /// `N(u + 1)`: `2(z + 1)` for integral units, `z + 2` for half-integral
    /// ones (both assume norm +1).
    pub fn norm_of_successor(&self) -> BigInt {
        let z = BigInt::from(self.z.clone());
        let den = BigInt::from(self.denom);
        let n = BigInt::from(self.norm);
        // ((z + den)² - d t²)/den² = (norm·den² + 2·den·z + den²)/den²
        (&n * &den * &den + 2 * &den * &z + &den * &den) / (&den * &den)
    }
}

impl fmt::Display for FundamentalUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = if self.t.is_one() { String::new() } else { self.t.to_string() };
        if self.denom == 2 {
            write!(f, "({} + {t}√{})/2", self.z, self.d)
        } else {
            write!(f, "{} + {t}√{}", self.z, self.d)
        }
    }
}

pub(crate) fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 900 {
        x.to_f64().unwrap().ln()
    } else {
        let shift = bits - 64;
        (x >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
    }
}

fn cache() -> &'static RwLock<HashMap<u64, Arc<FundamentalUnit>>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Arc<FundamentalUnit>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

fn check_radicand(d: i64) -> Result<u64> {
    if d <= 0 {
        return Err(Error::Signature(d));
    }
    if d == 1 || !is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    Ok(d as u64)
}

/// Fundamental unit of `Q(√d)`, `d > 1` squarefree. Memoized.
pub fn fundamental_unit(d: i64) -> Result<FundamentalUnit> {
    let d = check_radicand(d)?;
    if let Some(u) = cache().read().unwrap().get(&d) {
        return Ok((**u).clone());
    }
    let unit = compute_unit(d)?;
    cache().write().unwrap().entry(d).or_insert_with(|| Arc::new(unit.clone()));
    Ok(unit)
}

/// Runs the expansion of `√d` (or of `(√d - 1)/2` when `d ≡ 1 mod 4`) up to
/// the first return of the denominator to its starting value. With
/// `x = h·q0 - p0·k` the convergents satisfy `x² - d·k² = ±q0·Q_{n+1}`, so
/// that return is the first convergent giving a unit.
fn compute_unit(d: u64) -> Result<FundamentalUnit> {
    let (p0, q0) = if d % 4 == 1 { (-1i128, 2i128) } else { (0, 1) };
    let mut conv = Convergents::new();
    let mut exp = Expansion::new(d, p0, q0);
    let mut n = 0usize;
    loop {
        let step = exp.next().unwrap();
        conv.push(step.a);
        n += 1;
        // peek at Q_{n}
        let next_q = exp.clone().next().unwrap().q;
        if next_q == q0 {
            break;
        }
    }
    let norm: i8 = if n % 2 == 0 { 1 } else { -1 };
    let x = &conv.h * BigInt::from(q0) - BigInt::from(p0) * &conv.k;
    let mut z = x.abs().to_biguint().unwrap();
    let mut t = conv.k.to_biguint().unwrap();
    let mut denom = q0 as u8;
    if denom == 2 && z.is_even() && t.is_even() {
        z >>= 1;
        t >>= 1;
        denom = 1;
    }
    let unit = FundamentalUnit { d, z, t, denom, norm };
    if !unit.verify() {
        return Err(Error::Invariant(format!("unit equation fails for d = {d}: {unit}")));
    }
    Ok(unit)
}

/// The Lemma-style invariant `a`: the trivial class when the unit has
/// norm -1, otherwise the class of `N(u + 1)`.
pub fn a_value(d: i64, budget: &Budget) -> Result<SquareClass> {
    let unit = fundamental_unit(d)?;
    a_value_of(&unit, budget)
}

pub fn a_value_of(unit: &FundamentalUnit, budget: &Budget) -> Result<SquareClass> {
    if unit.norm == -1 {
        return Ok(SquareClass::identity());
    }
    // (z+δ)(z-δ) = d·t² with gcd(z+δ, z-δ) | 4, so every prime with odd
    // exponent in N(u+1) divides 2d.
    let mut primes = arith::prime_divisors(unit.d);
    primes.push(2);
    SquareClass::of_hinted(&unit.norm_of_successor(), &primes, budget)
}
