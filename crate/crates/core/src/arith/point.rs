use std::fmt;

use super::{ArithError, GaussianRational, Ring};

/// Anything carrying homogeneous coordinates `(u : v)` over a ring.
pub trait Homogeneous<R: Ring>: Sized {
    fn u(&self) -> &R;
    fn v(&self) -> &R;
    fn from_coords(u: R, v: R) -> Result<Self, ArithError>;
}

/// `u₁·v₂ − v₁·u₂`; vanishes exactly when the two points coincide.
pub fn det<R: Ring, P: Homogeneous<R>, Q: Homogeneous<R>>(p: &P, q: &Q) -> R {
    p.u().times(q.v()).minus(&p.v().times(q.u()))
}

/// A point of the Riemann sphere over ℚ(i), stored canonically: `(z : 1)`
/// for finite points and `(1 : 0)` for ∞.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProjPoint {
    u: GaussianRational,
    v: GaussianRational,
}

impl ProjPoint {
    pub fn new(u: GaussianRational, v: GaussianRational) -> Result<Self, ArithError> {
        if v.is_zero() {
            if u.is_zero() {
                return Err(ArithError::ZeroPoint);
            }
            return Ok(Self::infinity());
        }
        let u = if v.is_one() { u } else { &u / &v };
        Ok(Self {
            u,
            v: GaussianRational::from_int(1),
        })
    }

    pub fn finite(z: GaussianRational) -> Self {
        Self {
            u: z,
            v: GaussianRational::from_int(1),
        }
    }

    pub fn infinity() -> Self {
        Self {
            u: GaussianRational::from_int(1),
            v: GaussianRational::from_int(0),
        }
    }

    pub fn zero() -> Self {
        Self::finite(GaussianRational::from_int(0))
    }

    pub fn one() -> Self {
        Self::finite(GaussianRational::from_int(1))
    }

    pub fn from_int(n: i64) -> Self {
        Self::finite(GaussianRational::from_int(n))
    }

    pub fn is_infinity(&self) -> bool {
        self.v.is_zero()
    }

    /// The affine coordinate, `None` at ∞.
    pub fn affine(&self) -> Option<&GaussianRational> {
        if self.is_infinity() {
            None
        } else {
            Some(&self.u)
        }
    }
}

impl Homogeneous<GaussianRational> for ProjPoint {
    fn u(&self) -> &GaussianRational {
        &self.u
    }
    fn v(&self) -> &GaussianRational {
        &self.v
    }
    fn from_coords(u: GaussianRational, v: GaussianRational) -> Result<Self, ArithError> {
        Self::new(u, v)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.affine() {
            Some(z) => write!(f, "{z}"),
            None => write!(f, "∞"),
        }
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form() {
        let p = ProjPoint::new(GaussianRational::from_int(6), GaussianRational::from_int(3)).unwrap();
        assert_eq!(p, ProjPoint::from_int(2));
        let q = ProjPoint::new(GaussianRational::from_int(-5), GaussianRational::from_int(0)).unwrap();
        assert_eq!(q, ProjPoint::infinity());
        assert!(ProjPoint::new(GaussianRational::from_int(0), GaussianRational::from_int(0)).is_err());
    }
}
