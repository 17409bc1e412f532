use std::collections::BTreeMap;
use std::fmt;

use super::{det, ArithError, GaussianRational, Homogeneous, ProjPoint, Ring};

/// Finite Laurent polynomial `Σ c_k ε^k` in the degeneration parameter.
/// Only nonzero coefficients are stored.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i32, GaussianRational>,
}

impl LaurentPoly {
    pub fn new(terms: impl IntoIterator<Item = (i32, GaussianRational)>) -> Self {
        let mut out = BTreeMap::new();
        for (k, c) in terms {
            let slot: &mut GaussianRational = out.entry(k).or_default();
            *slot = &*slot + &c;
        }
        out.retain(|_, c: &mut GaussianRational| !c.is_zero());
        Self { terms: out }
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::new([(0, c)])
    }

    /// `c·ε^k`.
    pub fn monomial(c: GaussianRational, k: i32) -> Self {
        Self::new([(k, c)])
    }

    /// `ε`.
    pub fn eps() -> Self {
        Self::monomial(GaussianRational::from_int(1), 1)
    }

    pub fn terms(&self) -> &BTreeMap<i32, GaussianRational> {
        &self.terms
    }

    /// Smallest exponent with a nonzero coefficient.
    pub fn valuation(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn leading_coeff(&self) -> Option<&GaussianRational> {
        self.terms.values().next()
    }

    /// Coefficient of `ε^k`.
    pub fn coeff(&self, k: i32) -> GaussianRational {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    /// Multiplication by `ε^k`.
    pub fn shift(&self, k: i32) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    /// The substitution `ε ↦ ε^m` for a positive integer `m`.
    pub fn reparameterize(&self, m: u32) -> Self {
        assert!(m > 0, "reparameterization exponent must be positive");
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e * m as i32, c.clone()))
                .collect(),
        }
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        Self::new(self.terms.iter().map(|(e, x)| (*e, x * c)))
    }

    /// Value at `ε = eps`; fails at `eps = 0` when negative powers occur.
    pub fn eval(&self, eps: &GaussianRational) -> Result<GaussianRational, ArithError> {
        let mut acc = GaussianRational::from_int(0);
        for (e, c) in &self.terms {
            acc = &acc + &(c * &eps.powi(*e)?);
        }
        Ok(acc)
    }

    /// Approximate value in double precision.
    pub fn eval_f64(&self, eps: f64) -> num_complex::Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                let (re, im) = c.to_f64_pair();
                num_complex::Complex64::new(re, im) * eps.powi(*e)
            })
            .sum()
    }
}

impl Ring for LaurentPoly {
    fn zero() -> Self {
        Self::default()
    }
    fn one() -> Self {
        Self::constant(GaussianRational::from_int(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn plus(&self, rhs: &Self) -> Self {
        Self::new(self.terms.iter().chain(rhs.terms.iter()).map(|(e, c)| (*e, c.clone())))
    }
    fn minus(&self, rhs: &Self) -> Self {
        self.plus(&rhs.negate())
    }
    fn times(&self, rhs: &Self) -> Self {
        let mut out: BTreeMap<i32, GaussianRational> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let slot = out.entry(ea + eb).or_default();
                *slot = &*slot + &(ca * cb);
            }
        }
        out.retain(|_, c| !c.is_zero());
        Self { terms: out }
    }
    fn negate(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl From<GaussianRational> for LaurentPoly {
    fn from(c: GaussianRational) -> Self {
        Self::constant(c)
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(e, c)| match e {
                0 => format!("({c})"),
                1 => format!("({c})ε"),
                _ => format!("({c})ε^{e}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A path `ε ↦ (u(ε) : v(ε))` on the sphere.
///
/// Canonical form: the common power of ε is divided out so that
/// `min(val u, val v) = 0`, and the coefficient of `ε^0` in the component
/// reaching that minimum (`v` preferred) is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LaurentPoint {
    u: LaurentPoly,
    v: LaurentPoly,
}

impl LaurentPoint {
    pub fn new(u: LaurentPoly, v: LaurentPoly) -> Result<Self, ArithError> {
        let shift = match (u.valuation(), v.valuation()) {
            (None, None) => return Err(ArithError::ZeroFamily),
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        let (u, v) = (u.shift(-shift), v.shift(-shift));
        let unit = if v.valuation() == Some(0) {
            v.coeff(0)
        } else {
            u.coeff(0)
        };
        let inv = unit.recip()?;
        Ok(Self {
            u: u.scale(&inv),
            v: v.scale(&inv),
        })
    }

    /// The constant path at `p`.
    pub fn constant(p: &ProjPoint) -> Self {
        Self::new(LaurentPoly::constant(p.u().clone()), LaurentPoly::constant(p.v().clone()))
            .expect("a projective point is nonzero")
    }

    /// The path `ε ↦ (z(ε) : 1)`.
    pub fn affine(z: LaurentPoly) -> Self {
        Self::new(z, LaurentPoly::one()).expect("v = 1 is nonzero")
    }

    pub fn reparameterize(&self, m: u32) -> Self {
        Self::new(self.u.reparameterize(m), self.v.reparameterize(m))
            .expect("reparameterization keeps the point nonzero")
    }

    /// Exact value at `ε = eps`; `ZeroPoint` if both coordinates vanish there.
    pub fn eval(&self, eps: &GaussianRational) -> Result<ProjPoint, ArithError> {
        ProjPoint::new(self.u.eval(eps)?, self.v.eval(eps)?)
    }

    /// True when the two paths differ as functions of ε.
    pub fn distinct_from(&self, other: &Self) -> bool {
        !det(self, other).is_zero()
    }
}

impl Homogeneous<LaurentPoly> for LaurentPoint {
    fn u(&self) -> &LaurentPoly {
        &self.u
    }
    fn v(&self) -> &LaurentPoly {
        &self.v
    }
    fn from_coords(u: LaurentPoly, v: LaurentPoly) -> Result<Self, ArithError> {
        Self::new(u, v)
    }
}

impl fmt::Debug for LaurentPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} : {})", self.u, self.v)
    }
}

/// The limit of the path as `ε → 0`, decided by comparing valuations.
pub fn laurent_leading_value(q: &LaurentPoint) -> Result<ProjPoint, ArithError> {
    match (q.u.valuation(), q.v.valuation()) {
        (None, None) => Err(ArithError::ZeroFamily),
        (Some(_), None) => Ok(ProjPoint::infinity()),
        (None, Some(_)) => Ok(ProjPoint::zero()),
        (Some(a), Some(b)) if a > b => Ok(ProjPoint::zero()),
        (Some(a), Some(b)) if a < b => Ok(ProjPoint::infinity()),
        (Some(_), Some(_)) => ProjPoint::new(
            q.u.leading_coeff().cloned().unwrap_or_default(),
            q.v.leading_coeff().cloned().unwrap_or_default(),
        ),
    }
}
