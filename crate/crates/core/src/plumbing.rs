//! Degenerating families realizing a given tree of spheres.
//!
//! Every vertex is put in a chart where its parent direction sits at ∞, and
//! a leaf's path is obtained by nesting the affine maps `c ↦ p_e + ε^k c`
//! from its vertex up to the root.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::arith::{GaussianRational, LaurentPoint, LaurentPoly, Moebius, ProjPoint, Ring};
use crate::limits::{LaurentFamily, LimitError};
use crate::moduli::{MarkedSphere, ModuliError, TreeOfSpheres};
use crate::trees::{Label, Node};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum PlumbError {
    #[error(transparent)]
    Limit(#[from] LimitError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error("{0} and {1} collide at ε = {2}")]
    CollisionAtEpsilon(Label, Label, GaussianRational),
    #[error("ε must be a positive rational")]
    BadEpsilon,
    #[error("edge exponents must be positive")]
    BadExponent,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlumbingPlan {
    pub root: usize,
    /// Parent of every non-root internal vertex.
    pub parent: BTreeMap<usize, usize>,
    /// Chart change at each vertex; sends the parent direction to ∞.
    pub normalizers: BTreeMap<usize, Moebius>,
    /// Scale exponent of the edge from each non-root vertex to its parent.
    pub exponents: BTreeMap<usize, u32>,
}

/// Internal vertex of minimal eccentricity, smallest id on ties.
fn center(t: &TreeOfSpheres) -> usize {
    let shape = t.shape();
    let ecc = |s: usize| {
        let mut depth = BTreeMap::from([(s, 0usize)]);
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for u in shape.internal_neighbors(v) {
                if !depth.contains_key(&u) {
                    depth.insert(u, depth[&v] + 1);
                    queue.push_back(u);
                }
            }
        }
        depth.into_values().max().unwrap_or(0)
    };
    *shape
        .internal()
        .iter()
        .min_by_key(|&&v| (ecc(v), v))
        .expect("a tree of spheres has an internal vertex")
}

/// Moebius map sending `∞` to the smallest positive integer `k` that is not
/// an attaching point, with pole at `k`: `z ↦ k + 1/(z − k)`.
fn push_infinity_away(points: &BTreeSet<&ProjPoint>) -> Moebius {
    let k = (1..)
        .find(|&k| !points.contains(&ProjPoint::from_int(k)))
        .expect("finitely many points");
    let k = GaussianRational::from_int(k);
    let one = GaussianRational::from_int(1);
    Moebius::new(k.clone(), &one - &(&k * &k), one, -k).expect("determinant is 1")
}

/// The plan with every edge exponent equal to `exponent`.
pub fn plan(t: &TreeOfSpheres, exponent: u32) -> Result<PlumbingPlan, PlumbError> {
    if exponent == 0 {
        return Err(PlumbError::BadExponent);
    }
    let root = center(t);
    let shape = t.shape();
    let mut parent = BTreeMap::new();
    let mut queue = VecDeque::from([root]);
    let mut seen = BTreeSet::from([root]);
    while let Some(v) = queue.pop_front() {
        for u in shape.internal_neighbors(v) {
            if seen.insert(u) {
                parent.insert(u, v);
                queue.push_back(u);
            }
        }
    }
    let mut normalizers = BTreeMap::new();
    let iv = t.edge_marking(root);
    let m = if iv.values().any(ProjPoint::is_infinity) {
        push_infinity_away(&iv.values().collect())
    } else {
        Moebius::identity()
    };
    normalizers.insert(root, m);
    for (&v, &u) in &parent {
        let p = &t.edge_marking(v)[&Node::Internal(u)];
        let m = match p.affine() {
            None => Moebius::identity(),
            Some(a) => Moebius::new(
                GaussianRational::from_int(0),
                GaussianRational::from_int(1),
                GaussianRational::from_int(1),
                -a,
            )
            .expect("determinant is −1"),
        };
        normalizers.insert(v, m);
    }
    let exponents = parent.keys().map(|&v| (v, exponent)).collect();
    Ok(PlumbingPlan {
        root,
        parent,
        normalizers,
        exponents,
    })
}

fn finite(p: &ProjPoint) -> GaussianRational {
    p.affine()
        .cloned()
        .expect("normalized non-parent attaching points are finite")
}

/// The family prescribed by `plan`.
pub fn plumb_with(t: &TreeOfSpheres, plan: &PlumbingPlan) -> Result<LaurentFamily, PlumbError> {
    if plan.exponents.values().any(|&k| k == 0) {
        return Err(PlumbError::BadExponent);
    }
    let shape = t.shape();
    let local = |v: usize, e: &Node| finite(&plan.normalizers[&v].apply(&t.edge_marking(v)[e]));
    let mut paths = BTreeMap::new();
    for x in shape.leaves() {
        let mut v = shape.leaf_parent(x).expect("leaves hang off internal vertices");
        let mut c = LaurentPoly::constant(local(v, &Node::Leaf(x.clone())));
        while let Some(&u) = plan.parent.get(&v) {
            let k = plan.exponents[&v] as i32;
            let pe = LaurentPoly::constant(local(u, &Node::Internal(v)));
            c = pe.plus(&c.times(&LaurentPoly::monomial(GaussianRational::from_int(1), k)));
            v = u;
        }
        paths.insert(x.clone(), LaurentPoint::affine(c));
    }
    Ok(LaurentFamily::new(paths)?)
}

/// A family whose limit is `t`, with unit exponents.
pub fn plumb_family(t: &TreeOfSpheres) -> Result<LaurentFamily, PlumbError> {
    plumb_with(t, &plan(t, 1)?)
}

/// The marked sphere at a positive parameter value.
pub fn sample_family(fam: &LaurentFamily, eps: &GaussianRational) -> Result<MarkedSphere, PlumbError> {
    use num_traits::{Signed, Zero};
    if !eps.im().is_zero() || !eps.re().is_positive() {
        return Err(PlumbError::BadEpsilon);
    }
    let mut points = BTreeMap::new();
    let mut seen: BTreeMap<ProjPoint, Label> = BTreeMap::new();
    for (x, p) in fam.paths() {
        let q = p.eval(eps).map_err(|_| PlumbError::BadEpsilon)?;
        if let Some(other) = seen.insert(q.clone(), x.clone()) {
            return Err(PlumbError::CollisionAtEpsilon(other, x.clone(), eps.clone()));
        }
        points.insert(x.clone(), q);
    }
    Ok(MarkedSphere::new(points)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::limit_tree;
    use crate::moduli::spheres_iso;
    use crate::trees::MarkedTree;

    fn two_vertex() -> TreeOfSpheres {
        let l = |s: &str| Node::leaf(s);
        let shape = MarkedTree::new(
            ["1", "2", "3", "4"].map(String::from),
            [1, 2],
            [
                (Node::Internal(1), l("2")),
                (Node::Internal(1), l("3")),
                (Node::Internal(1), Node::Internal(2)),
                (Node::Internal(2), l("1")),
                (Node::Internal(2), l("4")),
            ],
        )
        .unwrap();
        let marking = BTreeMap::from([
            (
                1,
                BTreeMap::from([
                    (l("2"), ProjPoint::one()),
                    (l("3"), ProjPoint::infinity()),
                    (Node::Internal(2), ProjPoint::zero()),
                ]),
            ),
            (
                2,
                BTreeMap::from([
                    (l("1"), ProjPoint::zero()),
                    (l("4"), ProjPoint::one()),
                    (Node::Internal(1), ProjPoint::infinity()),
                ]),
            ),
        ]);
        TreeOfSpheres::new(shape, marking).unwrap()
    }

    #[test]
    fn two_vertex_round_trip() {
        let t = two_vertex();
        let fam = plumb_family(&t).unwrap();
        assert!(spheres_iso(&limit_tree(&fam).unwrap(), &t).unwrap());
        let doubled = plumb_with(&t, &plan(&t, 2).unwrap()).unwrap();
        assert!(spheres_iso(&limit_tree(&doubled).unwrap(), &t).unwrap());
    }

    #[test]
    fn sampling() {
        let fam = plumb_family(&two_vertex()).unwrap();
        let s = sample_family(&fam, &GaussianRational::from_ratio(1, 10)).unwrap();
        assert_eq!(s.points().len(), 4);
        let colliding = LaurentFamily::new(
            [
                ("a", LaurentPoint::affine(LaurentPoly::eps())),
                ("b", LaurentPoint::affine(LaurentPoly::constant(GaussianRational::from_ratio(1, 2)))),
                ("c", LaurentPoint::constant(&ProjPoint::infinity())),
            ]
            .into_iter()
            .map(|(l, p)| (l.to_string(), p))
            .collect(),
        )
        .unwrap();
        assert!(matches!(
            sample_family(&colliding, &GaussianRational::from_ratio(1, 2)),
            Err(PlumbError::CollisionAtEpsilon(..))
        ));
        assert_eq!(
            sample_family(&colliding, &GaussianRational::from_int(-1)),
            Err(PlumbError::BadEpsilon)
        );
    }
}
