//! Limits of degenerating families: exact limit trees of Laurent families,
//! an empirical mode for numeric snapshot sequences, and limits of covers.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{cross_ratio, laurent_leading_value, ArithError, LaurentPoint, ProjPoint};
use crate::covers::CoverError;
use crate::moduli::{ModuliError, TreeOfSpheres};
use crate::trees::{
    is_admissible, tree_from_partitions, AdmissibilityViolation, Label, Partition, PartitionSet,
    TreeError,
};

mod cover;
mod numeric;

pub use cover::{limit_cover, rescale_limit, CoverFamily};
pub use numeric::{numeric_limit_tree, NumPoint, NumericConfigSequence, NumericTree};

#[derive(Error, Debug, Clone, PartialEq)]
pub enum LimitError {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("limit partitions are not admissible: {0}")]
    AdmissibilityFailure(AdmissibilityViolation),
    #[error("at least three labels are required, got {0}")]
    TooFewLabels(usize),
    #[error("paths of {0} and {1} coincide")]
    NotInjective(Label, Label),
    #[error("{} quadruples did not stabilize", .0.len())]
    NotStabilized(Vec<[Label; 4]>),
    #[error("closeness is not transitive among the limits for triple {triple:?}")]
    InconsistentClustering { triple: [Label; 3] },
    #[error("{got} snapshots given, the stability window needs {window}")]
    TooFewSnapshots { got: usize, window: usize },
    #[error("snapshot {0} is marked by a different label set")]
    LabelMismatch(usize),
    #[error("tolerance must be positive and the window at least 1")]
    BadParameters,
    #[error("no chart yields a nonconstant limit at vertex #{vertex}")]
    ConstantLimit { vertex: usize },
    #[error("the map family does not send {0} to its image")]
    NotEquivariant(Label),
    #[error("the map family has generic degree {got}, the portrait {expected}")]
    DegreeMismatch { got: usize, expected: usize },
}

/// Paths `ε ↦ x(ε)` for each label, pairwise distinct as functions of ε.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentFamily {
    paths: BTreeMap<Label, LaurentPoint>,
}

impl LaurentFamily {
    pub fn new(paths: BTreeMap<Label, LaurentPoint>) -> Result<Self, LimitError> {
        if paths.len() < 3 {
            return Err(LimitError::TooFewLabels(paths.len()));
        }
        let entries: Vec<_> = paths.iter().collect();
        for (i, (a, p)) in entries.iter().enumerate() {
            for (b, q) in &entries[i + 1..] {
                if !p.distinct_from(q) {
                    return Err(LimitError::NotInjective((*a).clone(), (*b).clone()));
                }
            }
        }
        Ok(Self { paths })
    }

    pub fn paths(&self) -> &BTreeMap<Label, LaurentPoint> {
        &self.paths
    }

    pub fn labels(&self) -> BTreeSet<Label> {
        self.paths.keys().cloned().collect()
    }

    /// The substitution `ε ↦ ε^m` in every path.
    pub fn reparameterize(&self, m: u32) -> Self {
        Self {
            paths: self
                .paths
                .iter()
                .map(|(l, p)| (l.clone(), p.reparameterize(m)))
                .collect(),
        }
    }

    /// Applies a constant Moebius map to every path.
    pub fn transform(&self, m: &crate::arith::Moebius) -> Self {
        let lift = |c: &crate::arith::GaussianRational| crate::arith::LaurentPoly::constant(c.clone());
        let ml = crate::arith::Moebius {
            a: lift(&m.a),
            b: lift(&m.b),
            c: lift(&m.c),
            d: lift(&m.d),
        };
        Self {
            paths: self
                .paths
                .iter()
                .map(|(l, p)| (l.clone(), ml.apply(p)))
                .collect(),
        }
    }

    /// Limit of the ε-cross-ratio `(t; x)` for every label `x`.
    pub fn limit_chart(&self, t: [&str; 3]) -> Result<BTreeMap<Label, ProjPoint>, LimitError> {
        let (p0, p1, pi) = (&self.paths[t[0]], &self.paths[t[1]], &self.paths[t[2]]);
        self.paths
            .iter()
            .map(|(x, p)| Ok((x.clone(), laurent_leading_value(&cross_ratio(p0, p1, pi, p)?)?)))
            .collect()
    }
}

/// Sorted triples of `labels` in lexicographic order.
pub(crate) fn sorted_triples(labels: &[Label]) -> Vec<[Label; 3]> {
    let mut out = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            for k in j + 1..labels.len() {
                out.push([labels[i].clone(), labels[j].clone(), labels[k].clone()]);
            }
        }
    }
    out
}

/// Fibers of a marking as a partition.
pub(crate) fn fiber_partition<P: Ord>(alpha: &BTreeMap<Label, P>) -> Partition {
    let mut fibers: BTreeMap<&P, BTreeSet<Label>> = BTreeMap::new();
    for (x, p) in alpha {
        fibers.entry(p).or_default().insert(x.clone());
    }
    Partition::new(fibers.into_values()).expect("fibers are disjoint and nonempty")
}

/// Assembles a tree of spheres from one limit chart per partition, keyed by
/// partition in their canonical order.
pub(crate) fn assemble<P: Clone>(
    charts: &BTreeMap<Partition, BTreeMap<Label, P>>,
) -> Result<(crate::trees::MarkedTree, BTreeMap<usize, BTreeMap<crate::trees::Node, P>>), LimitError> {
    let ps: PartitionSet = charts.keys().cloned().collect();
    is_admissible(&ps).map_err(LimitError::AdmissibilityFailure)?;
    let shape = tree_from_partitions(&ps)?;
    let marking = charts
        .values()
        .enumerate()
        .map(|(v, alpha)| {
            let mut iv = BTreeMap::new();
            for (x, e) in shape.directions(v) {
                iv.entry(e).or_insert_with(|| alpha[&x].clone());
            }
            (v, iv)
        })
        .collect();
    Ok((shape, marking))
}

/// The limit tree of spheres of a Laurent family, in canonical form.
pub fn limit_tree(fam: &LaurentFamily) -> Result<TreeOfSpheres, LimitError> {
    let labels: Vec<Label> = fam.paths.keys().cloned().collect();
    let triples = sorted_triples(&labels);
    let charts: Vec<(Partition, BTreeMap<Label, ProjPoint>)> = triples
        .par_iter()
        .map(|t| {
            let alpha = fam.limit_chart([&t[0], &t[1], &t[2]])?;
            Ok((fiber_partition(&alpha), alpha))
        })
        .collect::<Result<_, LimitError>>()?;
    let mut by_partition = BTreeMap::new();
    for (p, alpha) in charts {
        by_partition.entry(p).or_insert(alpha);
    }
    let (shape, marking) = assemble(&by_partition)?;
    Ok(TreeOfSpheres::new(shape, marking)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{LaurentPoly, Ring};

    fn fam(paths: Vec<(&str, LaurentPoint)>) -> LaurentFamily {
        LaurentFamily::new(paths.into_iter().map(|(l, p)| (l.to_string(), p)).collect()).unwrap()
    }

    fn konst(n: i64) -> LaurentPoint {
        LaurentPoint::constant(&ProjPoint::from_int(n))
    }

    #[test]
    fn constant_family_is_its_sphere() {
        let f = fam(vec![
            ("1", konst(0)),
            ("2", konst(1)),
            ("3", LaurentPoint::constant(&ProjPoint::infinity())),
        ]);
        let t = limit_tree(&f).unwrap();
        assert_eq!(t.shape().internal().len(), 1);
    }

    #[test]
    fn one_point_approaching_zero() {
        let f = fam(vec![
            ("1", konst(0)),
            ("2", konst(1)),
            ("3", LaurentPoint::constant(&ProjPoint::infinity())),
            ("4", LaurentPoint::affine(LaurentPoly::eps())),
        ]);
        let t = limit_tree(&f).unwrap();
        let e = t.embed();
        assert_eq!(t.shape().internal().len(), 2);
        assert_eq!(e.get("1", "2", "3", "4"), Some(&ProjPoint::zero()));
        assert_eq!(e.get("1", "4", "2", "3"), Some(&ProjPoint::infinity()));
    }

    #[test]
    fn caterpillar_from_nested_points() {
        let eps2 = LaurentPoly::eps().plus(&LaurentPoly::eps().times(&LaurentPoly::eps()));
        let f = fam(vec![
            ("1", konst(0)),
            ("2", konst(1)),
            ("3", LaurentPoint::constant(&ProjPoint::infinity())),
            ("4", LaurentPoint::affine(LaurentPoly::eps())),
            ("5", LaurentPoint::affine(eps2)),
        ]);
        let t = limit_tree(&f).unwrap();
        assert_eq!(t.shape().internal().len(), 3);
    }
}
