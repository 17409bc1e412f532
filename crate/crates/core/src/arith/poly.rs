use std::fmt;

use super::{ArithError, GaussianRational, Ring};

/// Dense univariate polynomial; `coeffs[k]` multiplies `z^k`. Trailing zero
/// coefficients are never stored, so the zero polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<R: Ring> {
    coeffs: Vec<R>,
}

impl<R: Ring> Polynomial<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: R) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `c·z^k`.
    pub fn monomial(c: R, k: usize) -> Self {
        let mut coeffs = vec![R::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    /// The linear polynomial `a·z + b`.
    pub fn linear(a: R, b: R) -> Self {
        Self::new(vec![b, a])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> R {
        self.coeffs.get(k).cloned().unwrap_or_else(R::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&R> {
        self.coeffs.last()
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k).plus(&rhs.coeff(k))).collect())
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Self::new((0..n).map(|k| self.coeff(k).minus(&rhs.coeff(k))).collect())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].plus(&a.times(b));
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.times(c)).collect())
    }

    pub fn pow(&self, exp: usize) -> Self {
        let mut acc = Self::constant(R::one());
        for _ in 0..exp {
            acc = acc.mul(self);
        }
        acc
    }

    /// Horner evaluation.
    pub fn eval(&self, z: &R) -> R {
        self.coeffs
            .iter()
            .rev()
            .fold(R::zero(), |acc, c| acc.times(z).plus(c))
    }

    /// Evaluates the degree-`d` homogenization `Σ c_k u^k v^(d−k)`.
    /// Requires `d ≥ degree`.
    pub fn eval_homogeneous(&self, d: usize, u: &R, v: &R) -> R {
        debug_assert!(self.degree().is_none_or(|deg| deg <= d));
        let mut upow = vec![R::one()];
        let mut vpow = vec![R::one()];
        for k in 1..=d {
            upow.push(upow[k - 1].times(u));
            vpow.push(vpow[k - 1].times(v));
        }
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(R::zero(), |acc, (k, c)| {
                acc.plus(&c.times(&upow[k]).times(&vpow[d - k]))
            })
    }

    /// Substitutes `z ↦ (a z + b)/(c z + d)` into the degree-`deg`
    /// homogenization, returning `Σ c_k (a z + b)^k (c z + d)^(deg−k)`.
    pub fn substitute_moebius(&self, deg: usize, a: &R, b: &R, c: &R, d: &R) -> Self {
        let top = Self::linear(a.clone(), b.clone());
        let bottom = Self::linear(c.clone(), d.clone());
        let top_pows: Vec<Self> = (0..=deg).map(|k| top.pow(k)).collect();
        let bottom_pows: Vec<Self> = (0..=deg).map(|k| bottom.pow(k)).collect();
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .fold(Self::zero(), |acc, (k, coef)| {
                acc.add(&top_pows[k].mul(&bottom_pows[deg - k]).scale(coef))
            })
    }

    pub fn map_coeffs<S: Ring>(&self, f: impl Fn(&R) -> S) -> Polynomial<S> {
        Polynomial::new(self.coeffs.iter().map(f).collect())
    }
}

impl Polynomial<GaussianRational> {
    /// Euclidean division; errors only on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self), ArithError> {
        let lead = divisor.leading().ok_or(ArithError::DivisionByZero)?;
        let lead_inv = lead.recip()?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![GaussianRational::from_int(0); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = &rem[k + j] - &(&c * dc);
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Scales to leading coefficient 1; the zero polynomial is returned as is.
    pub fn monic(&self) -> Self {
        match self.leading() {
            Some(l) => {
                let inv = l.recip().expect("leading coefficient is nonzero");
                self.scale(&inv)
            }
            None => Self::zero(),
        }
    }

    /// Monic greatest common divisor (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Multiplicity of `a` as a root; `None` for the zero polynomial.
    pub fn root_multiplicity(&self, a: &GaussianRational) -> Option<usize> {
        if self.is_zero() {
            return None;
        }
        let factor = Self::linear(GaussianRational::from_int(1), -a);
        let mut p = self.clone();
        let mut m = 0;
        loop {
            let (q, r) = p.div_rem(&factor).expect("nonzero divisor");
            if !r.is_zero() {
                return Some(m);
            }
            p = q;
            m += 1;
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * &GaussianRational::from_int(k as i64))
                .collect(),
        )
    }
}

impl<R: Ring + fmt::Display> fmt::Display for Polynomial<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 => write!(f, "({c})z")?,
                _ => write!(f, "({c})z^{k}")?,
            }
        }
        Ok(())
    }
}

impl<R: Ring> fmt::Debug for Polynomial<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}
