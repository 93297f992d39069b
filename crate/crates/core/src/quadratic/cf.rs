//! Continued fractions of quadratic irrationals `(P + √D)/Q`.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::{Error, Result};

/// One step of the expansion: complete quotient `(p + √D)/q` and its
/// partial quotient `a = floor((p + √D)/q)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Step {
    pub p: i128,
    pub q: i128,
    pub a: i128,
}

/// Iterator over the complete quotients of `(p0 + √D)/q0`.
/// Requires `q0 | D - p0²` and `D` not a square.
#[derive(Clone, Debug)]
pub(crate) struct Expansion {
    d: i128,
    root: i128,
    p: i128,
    q: i128,
}

impl Expansion {
    pub fn new(d: u64, p0: i128, q0: i128) -> Self {
        let d = d as i128;
        debug_assert!(q0 != 0 && (d - p0 * p0) % q0 == 0);
        Expansion { d, root: (d as u128).sqrt() as i128, p: p0, q: q0 }
    }
}

impl Iterator for Expansion {
    type Item = Step;

    fn next(&mut self) -> Option<Step> {
        let (p, q) = (self.p, self.q);
        // floor((p + √D)/q) with √D irrational
        let a = if q > 0 {
            (p + self.root).div_euclid(q)
        } else {
            -((p + self.root).div_euclid(-q) + 1)
        };
        self.p = a * q - p;
        self.q = (self.d - self.p * self.p) / q;
        Some(Step { p, q, a })
    }
}

/// Running convergents `h_n / k_n`.
#[derive(Clone, Debug)]
pub(crate) struct Convergents {
    pub h: BigInt,
    pub k: BigInt,
    h_prev: BigInt,
    k_prev: BigInt,
}

impl Convergents {
    pub fn new() -> Self {
        Convergents { h: BigInt::one(), k: BigInt::zero(), h_prev: BigInt::zero(), k_prev: BigInt::one() }
    }

    pub fn push(&mut self, a: i128) {
        let a = BigInt::from(a);
        let h = &a * &self.h + &self.h_prev;
        let k = &a * &self.k + &self.k_prev;
        self.h_prev = std::mem::replace(&mut self.h, h);
        self.k_prev = std::mem::replace(&mut self.k, k);
    }
}

/// Periodic expansion of `√d`: `[a0; period]` with the final period term
/// equal to `2·a0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ContinuedFraction {
    pub d: u64,
    pub preperiod: Vec<u64>,
    pub period: Vec<u64>,
    /// `P_n` for the complete quotients `(P_n + √d)/Q_n`, `n = 1..=L`.
    pub p_values: Vec<u64>,
    /// `Q_n`, `n = 1..=L`; the last one is 1.
    pub q_values: Vec<u64>,
}

impl ContinuedFraction {
    pub fn period_len(&self) -> usize {
        self.period.len()
    }
}

/// Expand `√d`; the period ends at the first return of `Q` to 1.
pub fn cf_expand(d: u64) -> Result<ContinuedFraction> {
    if d < 2 {
        return Err(Error::InvalidInput(format!("cf_expand needs d >= 2, got {d}")));
    }
    let root = d.sqrt();
    if root * root == d {
        return Err(Error::PerfectSquare(d));
    }
    let mut steps = Expansion::new(d, 0, 1);
    let a0 = steps.next().unwrap().a as u64;
    let mut period = Vec::new();
    let mut p_values = Vec::new();
    let mut q_values = Vec::new();
    for step in steps {
        period.push(step.a as u64);
        p_values.push(step.p as u64);
        q_values.push(step.q as u64);
        if step.q == 1 {
            break;
        }
    }
    Ok(ContinuedFraction { d, preperiod: vec![a0], period, p_values, q_values })
}
