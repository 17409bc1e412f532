use std::fmt;

use super::{det, ArithError, GaussianRational, Homogeneous, ProjPoint, Ring};

/// The projective map `(u : v) ↦ (a u + b v : c u + d v)`.
///
/// Over ℚ(i) the matrix is only defined up to a scalar; use
/// [`Moebius::same_map`] or [`Moebius::canonical`] to compare.
#[derive(Clone, PartialEq)]
pub struct Moebius<R: Ring = GaussianRational> {
    pub a: R,
    pub b: R,
    pub c: R,
    pub d: R,
}

impl<R: Ring> Moebius<R> {
    pub fn new(a: R, b: R, c: R, d: R) -> Result<Self, ArithError> {
        let m = Self { a, b, c, d };
        if m.determinant().is_zero() {
            return Err(ArithError::DivisionByZero);
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        Self {
            a: R::one(),
            b: R::zero(),
            c: R::zero(),
            d: R::one(),
        }
    }

    pub fn determinant(&self) -> R {
        self.a.times(&self.d).minus(&self.b.times(&self.c))
    }

    pub fn apply<P: Homogeneous<R>>(&self, p: &P) -> P {
        let (u, v) = (p.u(), p.v());
        P::from_coords(
            self.a.times(u).plus(&self.b.times(v)),
            self.c.times(u).plus(&self.d.times(v)),
        )
        .expect("invertible map sends a point to a point")
    }

    /// `self ∘ rhs`.
    pub fn compose(&self, rhs: &Self) -> Self {
        Self {
            a: self.a.times(&rhs.a).plus(&self.b.times(&rhs.c)),
            b: self.a.times(&rhs.b).plus(&self.b.times(&rhs.d)),
            c: self.c.times(&rhs.a).plus(&self.d.times(&rhs.c)),
            d: self.c.times(&rhs.b).plus(&self.d.times(&rhs.d)),
        }
    }

    /// The adjugate matrix, which represents the inverse projectively.
    pub fn inverse(&self) -> Self {
        Self {
            a: self.d.clone(),
            b: self.b.negate(),
            c: self.c.negate(),
            d: self.a.clone(),
        }
    }
}

impl Moebius<GaussianRational> {
    /// Representative whose first nonzero entry (in `a, b, c, d` order) is 1.
    pub fn canonical(&self) -> Self {
        let pivot = [&self.a, &self.b, &self.c, &self.d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("invertible matrix has a nonzero entry");
        let inv = pivot.recip().expect("pivot is nonzero");
        Self {
            a: &self.a * &inv,
            b: &self.b * &inv,
            c: &self.c * &inv,
            d: &self.d * &inv,
        }
    }

    pub fn same_map(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }

    pub fn is_identity(&self) -> bool {
        self.same_map(&Self::identity())
    }

    /// Affine map `z ↦ s·z + t`.
    pub fn affine(s: GaussianRational, t: GaussianRational) -> Result<Self, ArithError> {
        Self::new(s, t, GaussianRational::from_int(0), GaussianRational::from_int(1))
    }
}

/// The unique Moebius map sending `p0 ↦ 0`, `p1 ↦ 1`, `p_inf ↦ ∞`.
///
/// Built from the linear forms `L_p(z) = det(z, p)`:
/// `M(z) = (L_{p0}(z)·L_{p∞}(p1) : L_{p∞}(z)·L_{p0}(p1))`.
pub fn moebius_from_three<R: Ring, P: Homogeneous<R>>(
    p0: &P,
    p1: &P,
    p_inf: &P,
) -> Result<Moebius<R>, ArithError> {
    let d01 = det(p1, p0);
    let d1i = det(p1, p_inf);
    if d01.is_zero() || d1i.is_zero() || det(p0, p_inf).is_zero() {
        return Err(ArithError::DegenerateTriple);
    }
    // det(z, p) = z.u·p.v − z.v·p.u, so the row of L_p is (p.v, −p.u).
    Ok(Moebius {
        a: p0.v().times(&d1i),
        b: p0.u().negate().times(&d1i),
        c: p_inf.v().times(&d01),
        d: p_inf.u().negate().times(&d01),
    })
}

/// `moebius_from_three(p0, p1, p_inf)` applied to `p`.
pub fn cross_ratio<R: Ring, P: Homogeneous<R>>(
    p0: &P,
    p1: &P,
    p_inf: &P,
    p: &P,
) -> Result<P, ArithError> {
    Ok(moebius_from_three(p0, p1, p_inf)?.apply(p))
}

impl Moebius<GaussianRational> {
    /// Moebius map sending the triple `src` to the triple `dst` in order.
    pub fn from_triples(src: [&ProjPoint; 3], dst: [&ProjPoint; 3]) -> Result<Self, ArithError> {
        let to_std = moebius_from_three(src[0], src[1], src[2])?;
        let from_std = moebius_from_three(dst[0], dst[1], dst[2])?.inverse();
        Ok(from_std.compose(&to_std))
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Moebius<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z ↦ (({})z + ({})) / (({})z + ({}))", self.a, self.b, self.c, self.d)
    }
}

impl<R: Ring> fmt::Debug for Moebius<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{:?}, {:?}], [{:?}, {:?}]]", self.a, self.b, self.c, self.d)
    }
}
