//! Limits of degenerating families of marked rational maps.

use std::collections::BTreeMap;

use rayon::prelude::*;

use super::{limit_tree, LaurentFamily, LimitError};
use crate::arith::{
    moebius_from_three, ArithError, GaussianRational, LaurentPoint, LaurentPoly, MapFamily, Moebius,
    RationalMap,
};
use crate::covers::{validate_cover, validate_portrait, CoverError, Portrait, TreeCover};
use crate::moduli::TreeOfSpheres;
use crate::trees::Node;

pub(crate) fn lift_moebius(m: &Moebius) -> Moebius<LaurentPoly> {
    let lift = |c: &GaussianRational| LaurentPoly::constant(c.clone());
    Moebius {
        a: lift(&m.a),
        b: lift(&m.b),
        c: lift(&m.c),
        d: lift(&m.d),
    }
}

/// A family `(f_ε, y_ε, z_ε)` of marked rational maps with `f_ε ∘ y_ε = z_ε ∘ F`.
#[derive(Clone, Debug)]
pub struct CoverFamily {
    portrait: Portrait,
    y_family: LaurentFamily,
    z_family: LaurentFamily,
    map_family: MapFamily,
}

impl CoverFamily {
    pub fn new(
        portrait: Portrait,
        y_family: LaurentFamily,
        z_family: LaurentFamily,
        map_family: MapFamily,
    ) -> Result<Self, LimitError> {
        let v = validate_portrait(&portrait);
        if !v.is_empty() {
            return Err(CoverError::InvalidPortrait(v).into());
        }
        if y_family.labels() != portrait.y || z_family.labels() != portrait.z {
            return Err(LimitError::Moduli(crate::moduli::ModuliError::LeafSetMismatch));
        }
        for (a, y) in y_family.paths() {
            let image = map_family.eval(y)?;
            if image != z_family.paths()[&portrait.f[a]] {
                return Err(LimitError::NotEquivariant(a.clone()));
            }
        }
        let got = [7, 11, 13]
            .iter()
            .filter_map(|&n| map_family.specialize(&GaussianRational::from_ratio(1, n)).ok())
            .map(|f| f.degree())
            .max()
            .unwrap_or(0);
        if got != portrait.d {
            return Err(LimitError::DegreeMismatch {
                got,
                expected: portrait.d,
            });
        }
        Ok(Self {
            portrait,
            y_family,
            z_family,
            map_family,
        })
    }

    pub fn portrait(&self) -> &Portrait {
        &self.portrait
    }

    pub fn y_family(&self) -> &LaurentFamily {
        &self.y_family
    }

    pub fn z_family(&self) -> &LaurentFamily {
        &self.z_family
    }

    pub fn map_family(&self) -> &MapFamily {
        &self.map_family
    }
}

/// Normalizes `f_ε` by the Moebius family sending `base = (p0, p1, p∞)` to
/// `(0, 1, ∞)` and returns that family with the leading-order limit of the
/// normalized map. `ConstantLimit` reports a base for which the limit
/// degenerates.
pub fn rescale_limit(
    f_eps: &MapFamily,
    base: [&LaurentPoint; 3],
) -> Result<(Moebius<LaurentPoly>, RationalMap), LimitError> {
    let m = moebius_from_three(base[0], base[1], base[2])?;
    match f_eps.post_compose(&m).leading_limit() {
        Ok(f) => Ok((m, f)),
        Err(ArithError::ConstantMap) => Err(LimitError::ConstantLimit { vertex: 0 }),
        Err(e) => Err(e.into()),
    }
}

/// The ε-family of charts converging to the marking of `v`, together with
/// the representative triple used for it.
fn chart_family(
    fam: &LaurentFamily,
    tree: &TreeOfSpheres,
    v: usize,
) -> Result<([crate::trees::Label; 3], Moebius<LaurentPoly>), LimitError> {
    let t = tree.representative_triple(v);
    let av = tree.induced_marking(v);
    let sigma = moebius_from_three(&av[&t[0]], &av[&t[1]], &av[&t[2]])?;
    let p = fam.paths();
    let phi = moebius_from_three(&p[&t[0]], &p[&t[1]], &p[&t[2]])?;
    Ok((t, lift_moebius(&sigma.inverse()).compose(&phi)))
}

/// The limit cover of a family of marked rational maps.
pub fn limit_cover(fam: &CoverFamily) -> Result<TreeCover, LimitError> {
    let ty = limit_tree(&fam.y_family)?;
    let tz = limit_tree(&fam.z_family)?;
    let mut targets: Vec<([crate::trees::Label; 3], usize, Moebius<LaurentPoly>)> = tz
        .shape()
        .internal()
        .iter()
        .map(|&w| chart_family(&fam.z_family, &tz, w).map(|(t, m)| (t, w, m)))
        .collect::<Result<_, _>>()?;
    targets.sort_by(|a, b| a.0.cmp(&b.0));

    let vertices: Vec<usize> = ty.shape().internal().iter().copied().collect();
    let found: Vec<(usize, usize, RationalMap)> = vertices
        .par_iter()
        .map(|&v| {
            let (_, psi) = chart_family(&fam.y_family, &ty, v)?;
            let g = fam.map_family.pre_compose(&psi.inverse());
            for (_, w, chi) in &targets {
                match g.post_compose(chi).leading_limit() {
                    Ok(f) => return Ok((v, *w, f)),
                    Err(ArithError::ConstantMap) => continue,
                    Err(e) => return Err(e.into()),
                }
            }
            Err(LimitError::ConstantLimit { vertex: v })
        })
        .collect::<Result<_, LimitError>>()?;

    let mut vertex_map: BTreeMap<Node, Node> = fam
        .portrait
        .f
        .iter()
        .map(|(a, b)| (Node::Leaf(a.clone()), Node::Leaf(b.clone())))
        .collect();
    let mut maps = BTreeMap::new();
    for (v, w, f) in found {
        vertex_map.insert(Node::Internal(v), Node::Internal(w));
        maps.insert(v, f);
    }
    let cover = TreeCover {
        source: ty,
        target: tz,
        vertex_map,
        maps,
    };
    let v = validate_cover(&cover);
    if !v.is_empty() {
        return Err(CoverError::InvalidCover(v).into());
    }
    if cover.portrait() != fam.portrait {
        return Err(CoverError::PortraitMismatch.into());
    }
    Ok(cover)
}
