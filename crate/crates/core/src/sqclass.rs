//! `Q*/(Q*)²` as a vector space over GF(2) with basis `{-1} ∪ primes`.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use crate::arith::{self, exact_sqrt};
use crate::{Budget, Error, Result};

/// Square class of a nonzero rational, stored as sign plus the sorted
/// prime support of its squarefree kernel.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SquareClass {
    negative: bool,
    support: Vec<BigUint>,
}

impl SquareClass {
    pub fn identity() -> Self {
        SquareClass { negative: false, support: Vec::new() }
    }

    /// Class of a nonzero integer. Factors `n`; see [`SquareClass::of_with_support`]
    /// for a factoring-free route when the support is known in advance.
    pub fn of(n: &BigInt, budget: &Budget) -> Result<Self> {
        if n.is_zero() {
            return Err(Error::InvalidInput("square class of zero".into()));
        }
        let f = arith::factor(n.magnitude(), budget)?;
        let support = f
            .factors
            .into_iter()
            .filter(|(_, e)| e % 2 == 1)
            .map(|(p, _)| p)
            .collect();
        Ok(SquareClass { negative: n.sign() == num_bigint::Sign::Minus, support })
    }

    pub fn of_i64(n: i64) -> Self {
        assert!(n != 0, "square class of zero");
        let support = arith::factor_u64(n.unsigned_abs())
            .into_iter()
            .filter(|(_, e)| e % 2 == 1)
            .map(|(p, _)| BigUint::from(p))
            .collect();
        SquareClass { negative: n < 0, support }
    }

    /// Class of `n` when every prime occurring to an odd power is known to
    /// lie in `primes`. Strips those primes and checks that the cofactor is
    /// a perfect square; returns `None` if it is not.
    pub fn of_with_support(n: &BigInt, primes: &[u64]) -> Option<Self> {
        if n.is_zero() {
            return None;
        }
        let mut m = n.magnitude().clone();
        let mut support = Vec::new();
        let mut sorted = primes.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for p in sorted {
            let mut e = 0u32;
            loop {
                let (q, r) = m.div_rem(&BigUint::from(p));
                if !r.is_zero() {
                    break;
                }
                m = q;
                e += 1;
            }
            if e % 2 == 1 {
                support.push(BigUint::from(p));
            }
        }
        exact_sqrt(&m)?;
        Some(SquareClass { negative: n.sign() == num_bigint::Sign::Minus, support })
    }

    /// Class of `n` trying the known support first, factoring otherwise.
    pub fn of_hinted(n: &BigInt, primes: &[u64], budget: &Budget) -> Result<Self> {
        match Self::of_with_support(n, primes) {
            Some(c) => Ok(c),
            None => Self::of(n, budget),
        }
    }

    pub fn is_identity(&self) -> bool {
        !self.negative && self.support.is_empty()
    }

    pub fn is_negative(&self) -> bool {
        self.negative
    }

    /// `-1` or `+1`.
    pub fn sign(&self) -> i8 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn support(&self) -> &[BigUint] {
        &self.support
    }

    /// Positive squarefree kernel (product of the support).
    pub fn kernel(&self) -> BigUint {
        self.support.iter().fold(BigUint::one(), |acc, p| acc * p)
    }

    /// Canonical signed squarefree representative.
    pub fn representative(&self) -> BigInt {
        let k = BigInt::from(self.kernel());
        if self.negative {
            -k
        } else {
            k
        }
    }

    /// Group law: XOR of sign and support.
    pub fn mul(&self, other: &SquareClass) -> SquareClass {
        let (a, b) = (&self.support, &other.support);
        let mut support = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    support.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    support.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    i += 1;
                    j += 1;
                }
            }
        }
        support.extend_from_slice(&a[i..]);
        support.extend_from_slice(&b[j..]);
        SquareClass { negative: self.negative ^ other.negative, support }
    }
}

impl fmt::Display for SquareClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.representative())
    }
}

impl Serialize for SquareClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.representative().to_string())
    }
}

/// Subgroup of `Q*/(Q*)²` spanned by a list of classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SquareClassSubgroup {
    pub generators: Vec<SquareClass>,
    /// Reduced echelon basis; each element has a pivot coordinate no other
    /// basis element touches.
    pub basis: Vec<SquareClass>,
    /// `2^rank`, saturating at `u64::MAX`.
    pub order: u64,
}

impl SquareClassSubgroup {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Membership: adjoining `class` does not grow the subgroup.
    pub fn contains(&self, class: &SquareClass) -> bool {
        let mut gens = self.basis.clone();
        gens.push(class.clone());
        subgroup_order(&gens).rank() == self.rank()
    }
}

/// Coordinate 0 is the sign; the rest are primes from the union of supports.
fn to_rows<'a, I>(classes: I) -> (Vec<BigUint>, Vec<Vec<u64>>)
where
    I: Iterator<Item = &'a SquareClass> + Clone,
 {
    let mut primes: Vec<BigUint> = classes.clone().flat_map(|c| c.support.iter().cloned()).collect();
    primes.sort();
    primes.dedup();
    let width = primes.len() + 1;
    let limbs = width.div_ceil(64);
    let rows = classes
        .map(|c| {
            let mut row = vec![0u64; limbs];
            if c.negative {
                row[0] |= 1;
            }
            for p in &c.support {
                let idx = primes.binary_search(p).unwrap() + 1;
                row[idx / 64] |= 1 << (idx % 64);
            }
            row
        })
        .collect();
    (primes, rows)
}

fn leading_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

/// Gauss-Jordan elimination over GF(2); returns the nonzero reduced rows.
fn echelon(mut rows: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    let mut basis: Vec<Vec<u64>> = Vec::new();
    for mut row in rows.drain(..) {
        for b in &basis {
            let piv = leading_bit(b).unwrap();
            if row[piv / 64] >> (piv % 64) & 1 == 1 {
                row.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
            }
        }
        if let Some(piv) = leading_bit(&row) {
            for b in basis.iter_mut() {
                if b[piv / 64] >> (piv % 64) & 1 == 1 {
                    b.iter_mut().zip(&row).for_each(|(x, y)| *x ^= y);
                }
            }
            basis.push(row);
        }
    }
    basis.sort_by_key(|r| leading_bit(r));
    basis
}

/// Order of the subgroup generated by `gens`, with a reduced basis.
pub fn subgroup_order(gens: &[SquareClass]) -> SquareClassSubgroup {
    let (primes, rows) = to_rows(gens.iter());
    let reduced = echelon(rows);
    let basis: Vec<SquareClass> = reduced
        .iter()
        .map(|row| {
            let bit = |i: usize| row[i / 64] >> (i % 64) & 1 == 1;
            SquareClass {
                negative: bit(0),
                support: primes
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| bit(i + 1))
                    .map(|(_, p)| p.clone())
                    .collect(),
            }
        })
        .collect();
    SquareClassSubgroup {
        generators: gens.to_vec(),
        order: 1u64.checked_shl(basis.len() as u32).unwrap_or(u64::MAX),
        basis,
    }
}
