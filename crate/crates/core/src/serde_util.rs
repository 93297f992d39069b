//! Big integers serialize as decimal strings so JSON consumers never lose
//! precision.

use num_bigint::{BigInt, BigUint};
use serde::Serializer;

pub fn biguint_str<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn bigint_str<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}
