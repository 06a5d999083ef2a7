use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive};

/// Arithmetic the tableau needs. Implemented for `f64` (working precision)
/// and `BigRational` (exact).
pub trait LpScalar: Clone + PartialOrd + Num + Signed + std::fmt::Debug {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
}

impl LpScalar for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl LpScalar for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite input")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}
