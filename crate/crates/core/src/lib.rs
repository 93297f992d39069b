//! Pólya groups of real quadratic and totally real bi-quadratic fields.
//!
//! The bi-quadratic computation follows Zantema's exact sequence
//! `1 → H¹(G, O_K*) → ⊕ Z/e_ℓZ → Po(K) → 1`: the order of `H¹` is obtained
//! from the subgroup of `Q*/(Q*)²` spanned by the subfield kernels and the
//! norms `N(u_i + 1)` of the subfield fundamental units, times an index
//! factor that can only be 2 when 2 is totally ramified.

pub mod arith;
pub mod biquad;
mod error;
mod serde_util;
pub mod quadratic;
pub mod sqclass;
pub mod verify;

pub use biquad::{BiquadraticField, PolyaReport, PoStructure, RamificationProfile};
pub use error::{Error, Result};
pub use quadratic::{FundamentalUnit, NormEquationSolution, QuadraticField};
pub use sqclass::{SquareClass, SquareClassSubgroup};

/// Work limits for the searches that can blow up.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Budget {
    /// Total Pollard-rho iterations per factorization.
    pub factor_steps: u64,
    /// Values of `y` scanned by the bounded norm-equation search.
    pub normeq_steps: u64,
}

impl Budget {
    pub const DEFAULT_FACTOR_STEPS: u64 = 2_000_000;
    pub const DEFAULT_NORMEQ_STEPS: u64 = 20_000_000;
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            factor_steps: Self::DEFAULT_FACTOR_STEPS,
            normeq_steps: Self::DEFAULT_NORMEQ_STEPS,
        }
    }
}
