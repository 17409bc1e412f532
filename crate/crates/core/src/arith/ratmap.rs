use std::fmt;

use super::{
    ArithError, GaussianRational, Homogeneous, LaurentPoint, LaurentPoly, Moebius, Polynomial,
    ProjPoint,
};

type Poly = Polynomial<GaussianRational>;

/// A rational map `num(z) / den(z)` of the sphere, viewed homogeneously in
/// degree `max(deg num, deg den)`.
///
/// Stored reduced: the common factor is removed and the pair is scaled so the
/// leading coefficient of `den` is 1, or that of `num` when `den` is constant.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalMap {
    num: Poly,
    den: Poly,
}

impl RationalMap {
    pub fn new(num: Poly, den: Poly) -> Result<Self, ArithError> {
        if num.is_zero() && den.is_zero() {
            return Err(ArithError::ZeroPoint);
        }
        let g = num.gcd(&den);
        let (num, den) = if g.degree().unwrap_or(0) > 0 {
            (num.div_rem(&g)?.0, den.div_rem(&g)?.0)
        } else {
            (num, den)
        };
        let pivot = if den.degree().unwrap_or(0) > 0 || num.is_zero() {
            den.leading()
        } else {
            num.leading()
        }
        .cloned()
        .expect("one of the two polynomials is nonzero");
        let inv = pivot.recip()?;
        Ok(Self {
            num: num.scale(&inv),
            den: den.scale(&inv),
        })
    }

    pub fn from_moebius(m: &Moebius) -> Self {
        Self::new(
            Poly::linear(m.a.clone(), m.b.clone()),
            Poly::linear(m.c.clone(), m.d.clone()),
        )
        .expect("Moebius map has a nonzero row")
    }

    pub fn identity() -> Self {
        Self::from_moebius(&Moebius::identity())
    }

    /// `z^k`.
    pub fn power(k: usize) -> Self {
        Self::new(
            Poly::monomial(GaussianRational::from_int(1), k),
            Poly::constant(GaussianRational::from_int(1)),
        )
        .expect("nonzero")
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num
            .degree()
            .unwrap_or(0)
            .max(self.den.degree().unwrap_or(0))
    }

    pub fn is_constant(&self) -> bool {
        self.degree() == 0
    }

    pub fn eval(&self, p: &ProjPoint) -> ProjPoint {
        let d = self.degree();
        ProjPoint::new(
            self.num.eval_homogeneous(d, p.u(), p.v()),
            self.den.eval_homogeneous(d, p.u(), p.v()),
        )
        .expect("reduced forms have no common zero")
    }

    /// `m ∘ self`.
    pub fn post_compose(&self, m: &Moebius) -> Self {
        let n = self.num.scale(&m.a).add(&self.den.scale(&m.b));
        let d = self.num.scale(&m.c).add(&self.den.scale(&m.d));
        Self::new(n, d).expect("invertible map keeps the pair nonzero")
    }

    /// `self ∘ m`.
    pub fn pre_compose(&self, m: &Moebius) -> Self {
        let deg = self.degree();
        let n = self.num.substitute_moebius(deg, &m.a, &m.b, &m.c, &m.d);
        let d = self.den.substitute_moebius(deg, &m.a, &m.b, &m.c, &m.d);
        Self::new(n, d).expect("invertible map keeps the pair nonzero")
    }

    /// `outer ∘ self ∘ inner`.
    pub fn conjugate(&self, outer: &Moebius, inner: &Moebius) -> Self {
        self.pre_compose(inner).post_compose(outer)
    }

    /// The affine polynomial whose roots (with ∞ counted as `d − degree`) are
    /// the solutions of `f(w) = q`.
    fn fiber_form(&self, q: &ProjPoint) -> Poly {
        self.num.scale(q.v()).sub(&self.den.scale(q.u()))
    }

    /// Whether `p` lies over `q`, with its multiplicity; 0 when it does not.
    pub fn multiplicity_over(&self, p: &ProjPoint, q: &ProjPoint) -> usize {
        let h = self.fiber_form(q);
        if h.is_zero() {
            return 0;
        }
        match p.affine() {
            Some(z) => h.root_multiplicity(z).unwrap_or(0),
            None => self.degree() - h.degree().unwrap_or(0),
        }
    }

    pub fn eval_f64(&self, z: num_complex::Complex64) -> Option<num_complex::Complex64> {
        let ev = |p: &Poly| {
            p.coeffs().iter().rev().fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| {
                let (re, im) = c.to_f64_pair();
                acc * z + num_complex::Complex64::new(re, im)
            })
        };
        let d = ev(&self.den);
        if d.norm() == 0.0 {
            None
        } else {
            Some(ev(&self.num) / d)
        }
    }
}

/// Local degree of a nonconstant map at `p`: the multiplicity of `p` as a
/// solution of `f(w) = f(p)`.
pub fn local_degree(f: &RationalMap, p: &ProjPoint) -> Result<usize, ArithError> {
    if f.is_constant() {
        return Err(ArithError::ConstantMap);
    }
    Ok(f.multiplicity_over(p, &f.eval(p)))
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}

impl fmt::Debug for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A rational map whose coefficients are Laurent polynomials in ε, acting in
/// homogeneous degree `degree`.
#[derive(Clone, PartialEq)]
pub struct MapFamily {
    num: Polynomial<LaurentPoly>,
    den: Polynomial<LaurentPoly>,
    degree: usize,
}

impl MapFamily {
    pub fn new(num: Polynomial<LaurentPoly>, den: Polynomial<LaurentPoly>) -> Result<Self, ArithError> {
        if num.is_zero() && den.is_zero() {
            return Err(ArithError::ZeroFamily);
        }
        let degree = num.degree().unwrap_or(0).max(den.degree().unwrap_or(0));
        Ok(Self { num, den, degree })
    }

    pub fn constant_in_eps(f: &RationalMap) -> Self {
        let lift = |p: &Poly| p.map_coeffs(|c| LaurentPoly::constant(c.clone()));
        Self {
            num: lift(f.num()),
            den: lift(f.den()),
            degree: f.degree(),
        }
    }

    pub fn num(&self) -> &Polynomial<LaurentPoly> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<LaurentPoly> {
        &self.den
    }

    /// Homogeneous degree of the formal expression.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, p: &LaurentPoint) -> Result<LaurentPoint, ArithError> {
        LaurentPoint::new(
            self.num.eval_homogeneous(self.degree, p.u(), p.v()),
            self.den.eval_homogeneous(self.degree, p.u(), p.v()),
        )
    }

    /// `m ∘ self`.
    pub fn post_compose(&self, m: &Moebius<LaurentPoly>) -> Self {
        Self {
            num: self.num.scale(&m.a).add(&self.den.scale(&m.b)),
            den: self.num.scale(&m.c).add(&self.den.scale(&m.d)),
            degree: self.degree,
        }
    }

    /// `self ∘ m`.
    pub fn pre_compose(&self, m: &Moebius<LaurentPoly>) -> Self {
        Self {
            num: self.num.substitute_moebius(self.degree, &m.a, &m.b, &m.c, &m.d),
            den: self.den.substitute_moebius(self.degree, &m.a, &m.b, &m.c, &m.d),
            degree: self.degree,
        }
    }

    /// The map at a fixed parameter value.
    pub fn specialize(&self, eps: &GaussianRational) -> Result<RationalMap, ArithError> {
        let cs = |p: &Polynomial<LaurentPoly>| -> Result<Poly, ArithError> {
            Ok(Poly::new(
                p.coeffs().iter().map(|c| c.eval(eps)).collect::<Result<_, _>>()?,
            ))
        };
        let (n, d) = (cs(&self.num)?, cs(&self.den)?);
        RationalMap::new(n, d)
    }

    /// Leading-order limit as ε → 0: divide every coefficient by the minimal
    /// power of ε present, set ε = 0 and reduce. Fails with `ConstantMap`
    /// when the limit is constant.
    pub fn leading_limit(&self) -> Result<RationalMap, ArithError> {
        let min = self
            .num
            .coeffs()
            .iter()
            .chain(self.den.coeffs())
            .filter_map(LaurentPoly::valuation)
            .min()
            .ok_or(ArithError::ZeroFamily)?;
        let pick = |p: &Polynomial<LaurentPoly>| Poly::new(p.coeffs().iter().map(|c| c.coeff(min)).collect());
        let limit = RationalMap::new(pick(&self.num), pick(&self.den))?;
        if limit.is_constant() {
            return Err(ArithError::ConstantMap);
        }
        Ok(limit)
    }
}

impl fmt::Debug for MapFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({}) [deg {}]", self.num, self.den, self.degree)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Ring;

    fn poly(cs: &[i64]) -> Poly {
        Poly::new(cs.iter().map(|&c| GaussianRational::from_int(c)).collect())
    }

    #[test]
    fn local_degrees_of_square() {
        let f = RationalMap::power(2);
        assert_eq!(local_degree(&f, &ProjPoint::zero()).unwrap(), 2);
        assert_eq!(local_degree(&f, &ProjPoint::one()).unwrap(), 1);
        assert_eq!(local_degree(&f, &ProjPoint::infinity()).unwrap(), 2);
    }

    #[test]
    fn normalization_strips_common_factor() {
        // (z² − 1) / (2z − 2) = (z + 1) / 2, stored with num monic
        let f = RationalMap::new(poly(&[-1, 0, 1]), poly(&[-2, 2])).unwrap();
        assert_eq!(f.num(), &poly(&[1, 1]));
        assert_eq!(f.den(), &Poly::constant(GaussianRational::from_int(2)));
        assert_eq!(f.degree(), 1);
    }

    #[test]
    fn composition_with_moebius() {
        let inv = Moebius::new(
            GaussianRational::from_int(0),
            GaussianRational::from_int(1),
            GaussianRational::from_int(1),
            GaussianRational::from_int(0),
        )
        .unwrap();
        // 1/z ∘ z² ∘ 1/z = z²
        let f = RationalMap::power(2).conjugate(&inv, &inv);
        assert_eq!(f, RationalMap::power(2));
        assert_eq!(f.eval(&ProjPoint::from_int(3)), ProjPoint::from_int(9));
    }

    #[test]
    fn family_limit_rescales() {
        // ε·z² has leading limit z²
        let eps_z2 = Polynomial::monomial(LaurentPoly::eps(), 2);
        let fam = MapFamily::new(eps_z2, Polynomial::constant(LaurentPoly::one())).unwrap();
        assert_eq!(fam.leading_limit().unwrap_err(), ArithError::ConstantMap);
        let scale = Moebius::<LaurentPoly>::new(
            LaurentPoly::one(),
            LaurentPoly::zero(),
            LaurentPoly::zero(),
            LaurentPoly::eps(),
        )
        .unwrap();
        assert_eq!(fam.post_compose(&scale).leading_limit().unwrap(), RationalMap::power(2));
    }
}
