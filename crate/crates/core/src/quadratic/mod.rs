//! Quadratic fields `Q(√d)`.

mod cf;
mod classify;
mod norm;
mod unit;

use serde::Serialize;

pub use cf::{cf_expand, ContinuedFraction};
pub use classify::{
    dirichlet_norm_criterion, quadratic_polya_oracle, zantema_classify, Classification,
    DirichletReport, OracleReport, OracleVerdict, RamifiedPrimeCheck, Verdict, ZantemaCase,
};
pub use norm::{norm_equation, scan_norm, NormEquationSolution};
pub use unit::{a_value, a_value_of, fundamental_unit, FundamentalUnit};

use crate::arith::{factor_u64, is_squarefree};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticField {
    pub d: i64,
    pub discriminant: i64,
    pub ramified_primes: Vec<u64>,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::NotSquarefree(d));
        }
        let discriminant = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        let ramified_primes = factor_u64(discriminant.unsigned_abs()).into_iter().map(|(p, _)| p).collect();
        Ok(QuadraticField { d, discriminant, ramified_primes })
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn discriminants() {
        let f = QuadraticField::new(5).unwrap();
        assert_eq!((f.discriminant, f.ramified_primes.clone()), (5, vec![5]));
        let f = QuadraticField::new(-1).unwrap();
        assert_eq!((f.discriminant, f.ramified_primes.clone()), (-4, vec![2]));
        let f = QuadraticField::new(6).unwrap();
        assert_eq!((f.discriminant, f.ramified_primes.clone()), (24, vec![2, 3]));
        assert!(QuadraticField::new(8).is_err());
        for d in (-200i64..200).filter(|&d| d != 0 && d != 1 && is_squarefree(d)) {
            let f = QuadraticField::new(d).unwrap();
            assert!(matches!(f.discriminant.rem_euclid(4), 0 | 1));
        }
    }
}
