//! Integer utilities: primality, factorization, squarefree parts and the
//! Jacobi symbol.
//!
//! Inputs coming from field data (radicands, ramified primes) are small and
//! take the `u64` fast paths. Values derived from fundamental-unit
//! coefficients can have hundreds of digits; those go through the `BigUint`
//! routines, which fall back to a Baillie-PSW test and Brent's variant of
//! Pollard rho bounded by [`Budget::factor_steps`].

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::Budget;

/// Trial division limit before switching to rho splitting.
pub const TRIAL_LIMIT: u64 = 1_000_000;

const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic primality for the whole `u64` range (Miller-Rabin with the
/// first twelve prime bases).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Primality for arbitrary-size integers.
///
/// Exact below 2^64. Above that a strong base-2 Fermat test followed by a
/// strong Lucas test (Selfridge parameters); no composite is known to pass
/// the combination.
pub fn is_prime_big(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime(small);
    }
    if n.is_even() {
        return false;
    }
    for &p in &MR_BASES {
        if (n % p).is_zero() {
            return false;
        }
    }
    strong_fermat_base2(n) && strong_lucas(n)
}

fn strong_fermat_base2(n: &BigUint) -> bool {
    let one = BigUint::one();
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let mut x = BigUint::from(2u32).modpow(&d, n);
    if x == one || x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n_minus_1 {
            return true;
        }
    }
    false
}

fn strong_lucas(n: &BigUint) -> bool {
    let root = n.sqrt();
    if &root * &root == *n {
        return false;
    }
    let nb = BigInt::from(n.clone());
    // Selfridge: first D in 5, -7, 9, -11, ... with (D/n) = -1.
    let mut d: i64 = 5;
    loop {
        match jacobi_big(&BigInt::from(d), n) {
            Ok(-1) => break,
            Ok(0) => {
                if BigInt::from(d.abs()) != nb {
                    return false;
                }
            }
            _ => {}
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let p = BigInt::one();
    let q = BigInt::from((1 - d) / 4);
    let disc = BigInt::from(d);

    let reduce = |x: BigInt| x.mod_floor(&nb);
    let half = |x: BigInt| {
        let x = x.mod_floor(&nb);
        if x.is_odd() {
            (x + &nb) >> 1
        } else {
            x >> 1
        }
    };

    let n_plus_1 = n + 1u32;
    let s = n_plus_1.trailing_zeros().unwrap_or(0);
    let odd = &n_plus_1 >> s;
    let bits = odd.bits();

    let mut u = BigInt::one();
    let mut v = p.clone();
    let mut qk = reduce(q.clone());
    for i in (0..bits - 1).rev() {
        u = reduce(&u * &v);
        v = reduce(&v * &v - (&qk << 1));
        qk = reduce(&qk * &qk);
        if odd.bit(i) {
            let u_next = half(&p * &u + &v);
            let v_next = half(&disc * &u + &p * &v);
            u = u_next;
            v = v_next;
            qk = reduce(&qk * &q);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = reduce(&v * &v - (&qk << 1));
        qk = reduce(&qk * &qk);
        if v.is_zero() {
            return true;
        }
    }
    false
}

/// A complete prime factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    pub value: BigUint,
    /// `(prime, exponent)` pairs, primes strictly increasing.
    pub factors: Vec<(BigUint, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = &BigUint> {
        self.factors.iter().map(|(p, _)| p)
    }

    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::one(), |acc, (p, e)| acc * p.pow(*e))
    }
}

/// Factorization of a machine-size integer. Never exceeds a budget: trial
/// division to 10^6 leaves a cofactor that is either prime or a product of
/// at most three primes, which rho splits quickly.
pub fn factor_u64(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 of zero");
    let mut out = Vec::new();
    let mut m = n;
    for p in [2u64, 3, 5] {
        push_power(&mut m, p, &mut out);
    }
    let mut p = 7u64;
    // 6k ± 1 wheel
    let mut step = [4u64, 2].into_iter().cycle();
    while p <= TRIAL_LIMIT && p * p <= m {
        push_power(&mut m, p, &mut out);
        p += step.next().unwrap();
    }
    if m > 1 {
        let mut rest = Vec::new();
        split_u64(m, &mut rest);
        rest.sort_unstable();
        for q in rest {
            match out.last_mut() {
                Some((last, e)) if *last == q => *e += 1,
                _ => out.push((q, 1)),
            }
        }
    }
    out
}

fn push_power(m: &mut u64, p: u64, out: &mut Vec<(u64, u32)>) {
    let mut e = 0;
    while *m % p == 0 {
        *m /= p;
        e += 1;
    }
    if e > 0 {
        out.push((p, e));
    }
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = (1..)
        .find_map(|c| rho_u64(n, c))
        .expect("rho finds a factor of a composite u64");
    split_u64(d, out);
    split_u64(n / d, out);
}

fn rho_u64(n: u64, c: u64) -> Option<u64> {
    let f = |x: u64| (mul_mod(x, x, n) + c) % n;
    let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
    while d == 1 {
        x = f(x);
        y = f(f(y));
        d = x.abs_diff(y).gcd(&n);
    }
    (d != n).then_some(d)
}

/// Full factorization of an arbitrary positive integer.
///
/// Fails with [`Error::FactorBudget`] when rho splitting needs more than
/// `budget.factor_steps` iterations in total.
pub fn factor(n: &BigUint, budget: &Budget) -> Result<Factorization> {
    if n.is_zero() {
        return Err(Error::InvalidInput("factor of zero".into()));
    }
    if let Some(small) = n.to_u64() {
        let factors = factor_u64(small)
            .into_iter()
            .map(|(p, e)| (BigUint::from(p), e))
            .collect();
        return Ok(Factorization { value: n.clone(), factors });
    }
    let mut m = n.clone();
    let mut primes: Vec<BigUint> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let pb = BigUint::from(p);
        if &pb * &pb > m {
            break;
        }
        while (&m % p).is_zero() {
            m /= p;
            primes.push(pb.clone());
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > BigUint::one() {
        let mut spent = 0u64;
        split_big(m, budget, &mut spent, &mut primes)?;
    }
    primes.sort();
    let mut factors: Vec<(BigUint, u32)> = Vec::new();
    for q in primes {
        match factors.last_mut() {
            Some((last, e)) if *last == q => *e += 1,
            _ => factors.push((q, 1)),
        }
    }
    Ok(Factorization { value: n.clone(), factors })
}

fn split_big(n: BigUint, budget: &Budget, spent: &mut u64, out: &mut Vec<BigUint>) -> Result<()> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        let mut v = Vec::new();
        split_u64(small, &mut v);
        out.extend(v.into_iter().map(BigUint::from));
        return Ok(());
    }
    if is_prime_big(&n) {
        out.push(n);
        return Ok(());
    }
    let root = n.sqrt();
    if &root * &root == n {
        split_big(root.clone(), budget, spent, out)?;
        return split_big(root, budget, spent, out);
    }
    let mut c = 1u32;
    let d = loop {
        if let Some(d) = brent_big(&n, c, budget, spent)? {
            break d;
        }
        c += 1;
    };
    let other = &n / &d;
    split_big(d, budget, spent, out)?;
    split_big(other, budget, spent, out)
}

/// Brent's cycle-finding rho with batched gcds.
fn brent_big(n: &BigUint, c: u32, budget: &Budget, spent: &mut u64) -> Result<Option<BigUint>> {
    const BATCH: u64 = 128;
    let f = |x: &BigUint| (x * x + c) % n;
    let mut y = BigUint::from(2u32);
    let mut r = 1u64;
    let mut q = BigUint::one();
    let mut g = BigUint::one();
    let mut x = y.clone();
    let mut ys = y.clone();
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = f(&y);
        }
        let mut k = 0;
        while k < r && g.is_one() {
            ys = y.clone();
            let lim = BATCH.min(r - k);
            for _ in 0..lim {
                y = f(&y);
                let diff = if x > y { &x - &y } else { &y - &x };
                q = (q * diff) % n;
            }
            *spent += lim;
            if *spent > budget.factor_steps {
                return Err(Error::FactorBudget { value: n.to_string() });
            }
            g = q.gcd(n);
            k += lim;
        }
        r *= 2;
    }
    if &g == n {
        // batch overshot; retrace one step at a time
        loop {
            ys = f(&ys);
            let diff = if x > ys { &x - &ys } else { &ys - &x };
            g = diff.gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    Ok((&g != n).then_some(g))
}

/// Signed squarefree kernel: `n = s·k²` with `s` squarefree, same sign as `n`.
pub fn squarefree_part(n: &BigInt, budget: &Budget) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::InvalidInput("squarefree part of zero".into()));
    }
    let f = factor(n.magnitude(), budget)?;
    let kernel = f
        .factors
        .iter()
        .filter(|(_, e)| e % 2 == 1)
        .fold(BigUint::one(), |acc, (p, _)| acc * p);
    Ok(BigInt::from_biguint(n.sign(), kernel))
}

pub fn squarefree_part_i64(n: i64) -> i64 {
    assert!(n != 0, "squarefree part of zero");
    let kernel: u64 = factor_u64(n.unsigned_abs())
        .into_iter()
        .filter(|(_, e)| e % 2 == 1)
        .map(|(p, _)| p)
        .product();
    n.signum() * kernel as i64
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factor_u64(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Odd prime divisors and possibly 2, ascending.
pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor_u64(n).into_iter().map(|(p, _)| p).collect()
}

/// Jacobi symbol `(a/n)` for odd positive `n`.
pub fn jacobi(a: i64, n: u64) -> Result<i8> {
    if n == 0 || n % 2 == 0 {
        return Err(Error::InvalidInput(format!("jacobi modulus {n} must be odd and positive")));
    }
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut t = 1i8;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && matches!(n % 8, 3 | 5) {
            t = -t;
        }
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    Ok(if n == 1 { t } else { 0 })
}

/// Jacobi symbol on arbitrary-size operands.
pub fn jacobi_big(a: &BigInt, n: &BigUint) -> Result<i8> {
    if n.is_zero() || n.is_even() {
        return Err(Error::InvalidInput(format!("jacobi modulus {n} must be odd and positive")));
    }
    let nn = BigInt::from(n.clone());
    let mut a = a.mod_floor(&nn).magnitude().clone();
    let mut n = n.clone();
    let mut t = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        a >>= tz;
        let n8 = (&n % 8u32).to_u32().unwrap();
        if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
            t = -t;
        }
        if (&a % 4u32).to_u32() == Some(3) && n8 % 4 == 3 {
            t = -t;
        }
        std::mem::swap(&mut a, &mut n);
        a %= &n;
    }
    Ok(if n.is_one() { t } else { 0 })
}

/// Integer square root test on arbitrary-size integers.
pub fn exact_sqrt(n: &BigUint) -> Option<BigUint> {
    let r = n.sqrt();
    (&r * &r == *n).then_some(r)
}

pub(crate) fn exact_sqrt_u128(n: u128) -> Option<u128> {
    let r = n.sqrt();
    (r * r == n).then_some(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn trial_is_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn small_primality() {
        assert!(is_prime(17));
        assert!(!is_prime(1));
        assert!(!is_prime(0));
        assert!(!is_prime(2091));
        assert!(is_prime(2));
    }

    #[test]
    fn primality_matches_trial_division_to_a_million() {
        // sieve as the independent reference
        let n = 1_000_000usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                (i * i..=n).step_by(i).for_each(|j| sieve[j] = false);
            }
            i += 1;
        }
        for (k, &p) in sieve.iter().enumerate() {
            assert_eq!(is_prime(k as u64), p, "{k}");
        }
        for k in (0..5000u64).map(|k| k * 197 + 3) {
            assert_eq!(is_prime(k), trial_is_prime(k));
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // base-2 strong pseudoprimes and a Carmichael number
        for n in [2047u64, 3277, 4033, 561, 3_215_031_751, 3_825_123_056_546_413_051] {
            assert!(!is_prime(n), "{n}");
        }
        assert!(is_prime(18_446_744_073_709_551_557));
    }

    #[test]
    fn big_primality() {
        let m127 = (BigUint::one() << 127u32) - 1u32;
        assert!(is_prime_big(&m127));
        let m128 = (BigUint::one() << 128u32) + 1u32;
        assert!(!is_prime_big(&m128));
        let p1 = BigUint::from(18_446_744_073_709_551_557u64);
        let p2 = BigUint::from(4_294_967_291u64);
        assert!(!is_prime_big(&(&p1 * &p2)));
        assert!(!is_prime_big(&(&p1 * &p1)));
    }

    #[test]
    fn factor_examples() {
        let b = Budget::default();
        let f = factor(&BigUint::from(84u32), &b).unwrap();
        let got: Vec<_> = f.factors.iter().map(|(p, e)| (p.to_u64().unwrap(), *e)).collect();
        assert_eq!(got, vec![(2, 2), (3, 1), (7, 1)]);
        assert!(factor(&BigUint::one(), &b).unwrap().factors.is_empty());
        assert_eq!(factor_u64(1680), vec![(2, 4), (3, 1), (5, 1), (7, 1)]);
    }

    #[test]
    fn factor_beyond_u64() {
        let b = Budget::default();
        let p = BigUint::from(1_000_000_007u64);
        let q = BigUint::from(998_244_353u64);
        let r = BigUint::from(18_446_744_073_709_551_557u64);
        let n = &p * &q * &r * &q;
        let f = factor(&n, &b).unwrap();
        assert_eq!(f.product(), n);
        assert_eq!(f.factors.len(), 3);
        assert_eq!(f.factors[0], (q, 2));
    }

    #[test]
    fn factor_budget_is_reported() {
        let b = Budget { factor_steps: 10, ..Budget::default() };
        let p = BigUint::from(18_446_744_073_709_551_557u64);
        let q = BigUint::from(18_446_744_073_709_551_533u64);
        let err = factor(&(&p * &q), &b).unwrap_err();
        assert!(matches!(err, Error::FactorBudget { .. }));
    }

    #[test]
    fn factor_round_trip_to_a_million() {
        for n in 1..=1_000_000u64 {
            let f = factor_u64(n);
            assert_eq!(f.iter().map(|&(p, e)| p.pow(e)).product::<u64>(), n);
            assert!(f.windows(2).all(|w| w[0].0 < w[1].0));
            assert!(f.iter().all(|&(p, e)| e >= 1 && is_prime(p)));
        }
    }

    #[test]
    fn squarefree_examples() {
        let b = Budget::default();
        assert_eq!(squarefree_part(&BigInt::from(18), &b).unwrap(), BigInt::from(2));
        assert_eq!(squarefree_part(&BigInt::from(-12), &b).unwrap(), BigInt::from(-3));
        assert_eq!(squarefree_part(&BigInt::from(6), &b).unwrap(), BigInt::from(6));
        assert_eq!(squarefree_part(&BigInt::from(-1), &b).unwrap(), BigInt::from(-1));
        assert_eq!(squarefree_part_i64(1), 1);
        assert!(squarefree_part(&BigInt::zero(), &b).is_err());
    }

    fn legendre_by_enumeration(a: i64, p: u64) -> i8 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            0
        } else if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(5, 17).unwrap(), -1);
        assert_eq!(legendre_by_enumeration(5, 17), -1);
        assert_eq!(jacobi(17, 41).unwrap(), -1);
        assert_eq!(legendre_by_enumeration(17, 41), -1);
        for n in (1..200).step_by(2) {
            assert_eq!(jacobi(1, n).unwrap(), 1);
        }
        assert!(jacobi(3, 8).is_err());
        assert!(jacobi(3, 0).is_err());
        assert!(jacobi_big(&BigInt::from(3), &BigUint::from(10u32)).is_err());
    }

    #[test]
    fn jacobi_matches_enumeration_for_primes() {
        for p in (3..300u64).filter(|&p| is_prime(p)) {
            for a in -40..40 {
                assert_eq!(jacobi(a, p).unwrap(), legendre_by_enumeration(a, p), "({a}/{p})");
                assert_eq!(
                    jacobi_big(&BigInt::from(a), &BigUint::from(p)).unwrap(),
                    legendre_by_enumeration(a, p)
                );
            }
        }
    }

    proptest! {
        #[test]
        fn jacobi_is_multiplicative(a in -10_000i64..10_000, b in -10_000i64..10_000, n in 0u64..50_000) {
            let n = 2 * n + 1;
            prop_assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
        }

        #[test]
        fn squarefree_ignores_square_factors(n in -100_000i64..100_000, k in 1i64..3000) {
            prop_assume!(n != 0);
            let b = Budget::default();
            let big = BigInt::from(n) * BigInt::from(k) * BigInt::from(k);
            prop_assert_eq!(squarefree_part(&big, &b).unwrap(), BigInt::from(squarefree_part_i64(n)));
        }
    }
}
