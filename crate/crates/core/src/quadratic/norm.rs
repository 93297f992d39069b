//! Norm equations `N(α) = c` in the maximal order of `Q(√d)`.
//!
//! Elements are written `(x + y√d)/denom`. When `d ≡ 1 (mod 4)` the search
//! runs over the lattice `x² - d·y² = 4c` with `x ≡ y (mod 2)`, which covers
//! both integral and half-integral elements.
//!
//! Absence is always a proof:
//! * small right-hand sides (`|x² - dy²| < √d`) are decided by Lagrange's
//!   theorem on the convergents of `√d`;
//! * otherwise some solution, if any exists, satisfies
//!   `y ≤ √(|c|·U/d)` (twice that on the half-integral lattice), `U` the
//!   fundamental unit, and that range is scanned exhaustively. If the range
//!   exceeds the budget the answer is [`Error::Undecided`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::cf::{Convergents, Expansion};
use super::unit::{fundamental_unit, FundamentalUnit};
use crate::arith::{exact_sqrt_u128, is_squarefree};
use crate::{Budget, Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormEquationSolution {
    pub d: i64,
    pub c: i64,
    #[serde(serialize_with = "crate::serde_util::bigint_str")]
    pub x: BigInt,
    #[serde(serialize_with = "crate::serde_util::bigint_str")]
    pub y: BigInt,
    pub denom: u8,
}

impl NormEquationSolution {
    pub fn verify(&self) -> bool {
        let den = BigInt::from(self.denom);
        let lhs = &self.x * &self.x - BigInt::from(self.d) * &self.y * &self.y;
        lhs == BigInt::from(self.c) * &den * &den
            && (self.denom == 1
                || (self.d.rem_euclid(4) == 1 && (&self.x - &self.y).is_even()))
    }
}

/// Solve `N(α) = c` exactly. `Ok(None)` means provably no solution.
pub fn norm_equation(d: i64, c: i64, budget: &Budget) -> Result<Option<NormEquationSolution>> {
    if d == 0 || d == 1 || !is_squarefree(d) {
        return Err(Error::NotSquarefree(d));
    }
    if c == 0 {
        return Err(Error::InvalidInput("norm equation with c = 0".into()));
    }
    let half = d.rem_euclid(4) == 1;
    let target = if half { 4 * c as i128 } else { c as i128 };
    let found = if d < 0 {
        definite(d, target, half)
    } else if target * target < d as i128 {
        by_convergents(d as u64, target, half)
    } else {
        bounded(d as u64, c, target, half, budget)?
    };
    Ok(found.map(|(x, y)| make_solution(d, c, x, y, half)))
}

fn make_solution(d: i64, c: i64, x: BigInt, y: BigInt, half: bool) -> NormEquationSolution {
    let (mut x, mut y) = (x.abs(), y.abs());
    let mut denom = if half { 2 } else { 1 };
    if half && x.is_even() && y.is_even() {
        x >>= 1;
        y >>= 1;
        denom = 1;
    }
    let sol = NormEquationSolution { d, c, x, y, denom };
    debug_assert!(sol.verify(), "{sol:?}");
    sol
}

fn parity_ok(x: u128, y: u128, half: bool) -> bool {
    !half || (x + y) % 2 == 0
}

/// Imaginary fields: `x² + |d|y² = target` has finitely many solutions.
fn definite(d: i64, target: i128, half: bool) -> Option<(BigInt, BigInt)> {
    if target <= 0 {
        return None;
    }
    let ad = d.unsigned_abs() as u128;
    let target = target as u128;
    let mut y = 0u128;
    while ad * y * y <= target {
        if let Some(x) = exact_sqrt_u128(target - ad * y * y) {
            if parity_ok(x, y, half) {
                return Some((BigInt::from(x), BigInt::from(y)));
            }
        }
        y += 1;
    }
    None
}

/// `|target| < √d`: every primitive solution is a convergent of `√d`, whose
/// norms are `(-1)^(n+1)·Q_{n+1}`; two periods cover both signs.
fn by_convergents(d: u64, target: i128, half: bool) -> Option<(BigInt, BigInt)> {
    let abs = target.unsigned_abs();
    let scales: Vec<u128> = (1..).take_while(|g| g * g <= abs).filter(|g| abs % (g * g) == 0).collect();

    if let Some(&g) = scales.iter().find(|&&g| g * g == abs && target > 0) {
        return Some((BigInt::from(g), BigInt::zero()));
    }

    let mut exp = Expansion::new(d, 0, 1);
    let mut conv = Convergents::new();
    let mut period = None;
    let mut best: Option<(BigInt, BigInt)> = None;
    let mut n = 0usize;
    while period.is_none_or(|len| n < 2 * len) {
        conv.push(exp.next().unwrap().a);
        let q_next = exp.clone().next().unwrap().q;
        if q_next == 1 && period.is_none() {
            period = Some(n + 1);
        }
        let norm = if n % 2 == 0 { -q_next } else { q_next };
        for &g in &scales {
            let gg = (g * g) as i128;
            if norm * gg != target {
                continue;
            }
            let (x, y) = (&conv.h * BigInt::from(g), &conv.k * BigInt::from(g));
            if half && (&x - &y).is_odd() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, by)| y < *by) {
                best = Some((x, y));
            }
        }
        n += 1;
    }
    best
}

fn bounded(
    d: u64,
    c: i64,
    target: i128,
    half: bool,
    budget: &Budget,
) -> Result<Option<(BigInt, BigInt)>> {
    let unit = fundamental_unit(d as i64)?;
    let ln_bound = 0.5 * ((c.unsigned_abs() as f64).ln() + unit.ln_value() - (d as f64).ln())
        + if half { std::f64::consts::LN_2 } else { 0.0 };
    if ln_bound > (budget.normeq_steps as f64).ln() {
        return Err(Error::Undecided {
            d: d as i64,
            c,
            needed: format!("e^{ln_bound:.1}"),
            budget: budget.normeq_steps,
        });
    }
    let bound = ln_bound.exp().ceil() as u128 + 1;
    let mut targets = vec![target];
    if unit.norm == -1 {
        targets.push(-target);
    }
    let d128 = d as u128;
    for y in 0..=bound {
        let dy2 = d128 * y * y;
        for &tg in &targets {
            let v = tg + dy2 as i128;
            if v < 0 {
                continue;
            }
            let Some(x) = exact_sqrt_u128(v as u128) else { continue };
            if !parity_ok(x, y, half) {
                continue;
            }
            let (x, y) = (BigInt::from(x), BigInt::from(y));
            return Ok(Some(if tg == target { (x, y) } else { flip_sign(d, x, y, half, &unit) }));
        }
    }
    Ok(None)
}

/// Multiply `(x + y√d)/s` by a norm -1 unit; result on the same lattice.
fn flip_sign(d: u64, x: BigInt, y: BigInt, half: bool, unit: &FundamentalUnit) -> (BigInt, BigInt) {
    let z = BigInt::from(unit.z.clone());
    let t = BigInt::from(unit.t.clone());
    let dd = BigInt::from(d);
    let mut nx = &x * &z + &dd * &y * &t;
    let mut ny = &x * &t + &y * &z;
    let mut den = if half { 2u32 } else { 1 } * unit.denom as u32;
    let want = if half { 2 } else { 1 };
    while den > want {
        debug_assert!(nx.is_even() && ny.is_even());
        nx >>= 1;
        ny >>= 1;
        den /= 2;
    }
    (nx, ny)
}

/// Plain scan used as an independent check: does any lattice point with
/// `0 ≤ y ≤ limit` have norm exactly `c`?
pub fn scan_norm(d: i64, c: i64, limit: u64) -> bool {
    let half = d.rem_euclid(4) == 1;
    let target = if half { 4 * c as i128 } else { c as i128 };
    (0..=limit as i128).any(|y| {
        let v = target + d as i128 * y * y;
        v >= 0
            && exact_sqrt_u128(v as u128)
                .is_some_and(|x| parity_ok(x, y as u128, half))
    })
}
