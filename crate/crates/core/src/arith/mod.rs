//! Exact arithmetic over the Gaussian rationals ℚ(i): scalars, points of the
//! projective line, polynomials, Moebius maps, rational maps and Laurent
//! polynomials in the degeneration parameter ε.

use std::fmt::Debug;

use thiserror::Error;

mod gaussian;
mod laurent;
mod moebius;
mod point;
mod poly;
mod ratmap;

pub use gaussian::GaussianRational;
pub use laurent::{laurent_leading_value, LaurentPoint, LaurentPoly};
pub use moebius::{cross_ratio, moebius_from_three, Moebius};
pub use point::{det, Homogeneous, ProjPoint};
pub use poly::Polynomial;
pub use ratmap::{local_degree, MapFamily, RationalMap};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("two of the three reference points coincide")]
    DegenerateTriple,
    #[error("division by zero")]
    DivisionByZero,
    /// Both homogeneous coordinates vanish.
    #[error("both homogeneous coordinates are zero")]
    ZeroPoint,
    #[error("both components of the Laurent point are zero")]
    ZeroFamily,
    #[error("rational map is constant")]
    ConstantMap,
    #[error("cannot parse rational number {0:?}")]
    Parse(String),
}

/// A commutative ring with unit, the coefficient domain shared by exact
/// scalars and Laurent polynomials.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, rhs: &Self) -> Self;
    fn minus(&self, rhs: &Self) -> Self;
    fn times(&self, rhs: &Self) -> Self;
    fn negate(&self) -> Self;

    fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::one();
        for _ in 0..exp {
            acc = acc.times(self);
        }
        acc
    }
}
