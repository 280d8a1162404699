//! Scalar abstraction shared by the exact and floating-point code paths.

use std::fmt::Debug;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// A field element the polynomial, scaling and expansion routines can run on.
///
/// Implemented for [`BigRational`] (exact) and for `f64`/`f32`.
pub trait Scalar: Clone + Debug + PartialEq + Num + Send + Sync {
    fn from_biguint(n: &BigUint) -> Self;

    fn from_u64(n: u64) -> Self {
        Self::from_biguint(&BigUint::from(n))
    }

    /// `numer / denom`.
    fn ratio(numer: &BigUint, denom: &BigUint) -> Self {
        Self::from_biguint(numer) / Self::from_biguint(denom)
    }

    /// Integer power with `x^0 = 1` for every `x`, including zero.
    fn powu(&self, exp: usize) -> Self {
        num_traits::pow(self.clone(), exp)
    }
}

impl Scalar for BigRational {
    fn from_biguint(n: &BigUint) -> Self {
        BigRational::from_integer(BigInt::from(n.clone()))
    }
}

impl Scalar for f64 {
    fn from_biguint(n: &BigUint) -> Self {
        n.to_f64().unwrap_or(f64::INFINITY)
    }
}

impl Scalar for f32 {
    fn from_biguint(n: &BigUint) -> Self {
        n.to_f32().unwrap_or(f32::INFINITY)
    }
}
