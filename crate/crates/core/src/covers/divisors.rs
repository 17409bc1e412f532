use std::collections::BTreeMap;

use super::CoverError;
use crate::arith::{GaussianRational, Homogeneous, Polynomial, ProjPoint, RationalMap};

type Poly = Polynomial<GaussianRational>;

fn collect(points: &[(ProjPoint, usize)]) -> BTreeMap<&ProjPoint, usize> {
    let mut out = BTreeMap::new();
    for (p, k) in points {
        if *k > 0 {
            *out.entry(p).or_insert(0) += k;
        }
    }
    out
}

/// `Π (z − a)^k` over the finite points of a divisor.
fn finite_part(div: &BTreeMap<&ProjPoint, usize>) -> Poly {
    let one = GaussianRational::from_int(1);
    div.iter()
        .filter_map(|(p, k)| p.affine().map(|a| (a, *k)))
        .fold(Poly::constant(one.clone()), |acc, (a, k)| {
            acc.mul(&Poly::linear(one.clone(), -a).pow(k))
        })
}

/// The rational map with the given zeros and poles (with multiplicity, ∞
/// allowed) sending `unit` to 1.
pub fn rational_from_divisors(
    zeros: &[(ProjPoint, usize)],
    poles: &[(ProjPoint, usize)],
    unit: &ProjPoint,
) -> Result<RationalMap, CoverError> {
    let (zs, ps) = (collect(zeros), collect(poles));
    let (dz, dp): (usize, usize) = (zs.values().sum(), ps.values().sum());
    if dz != dp || dz == 0 {
        return Err(CoverError::DivisorDegree { zeros: dz, poles: dp });
    }
    if let Some(p) = zs.keys().find(|p| ps.contains_key(*p)) {
        return Err(CoverError::OverlappingDivisors((*p).clone()));
    }
    if zs.contains_key(unit) || ps.contains_key(unit) {
        return Err(CoverError::UnitOnDivisor(unit.clone()));
    }
    let (num, den) = (finite_part(&zs), finite_part(&ps));
    let n = num.eval_homogeneous(dz, unit.u(), unit.v());
    let d = den.eval_homogeneous(dz, unit.u(), unit.v());
    let c = d.checked_div(&n)?;
    Ok(RationalMap::new(num.scale(&c), den)?)
}
