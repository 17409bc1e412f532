//! Dynamical systems between trees of spheres: a cover together with a tree
//! over a label set shared by source and target, compatible with both.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::arith::Moebius;
use crate::covers::{cover_iso, validate_cover, CoverError, CoverViolation, TreeCover};
use crate::moduli::{spheres_iso, ModuliError, TreeOfSpheres};
use crate::trees::{Label, Node};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum DynError {
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error("label {0} is not marked on both sides")]
    NotASubset(Label),
    #[error("at least three dynamical labels are required, got {0}")]
    TooFewLabels(usize),
    #[error("the systems are marked by different dynamical sets")]
    LabelSetMismatch,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DynSystem {
    pub cover: TreeCover,
    pub dyn_tree: TreeOfSpheres,
}

impl DynSystem {
    pub fn x(&self) -> &BTreeSet<Label> {
        self.dyn_tree.labels()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DynViolation {
    InvalidCover(Vec<CoverViolation>),
    NotInSource(Label),
    NotInTarget(Label),
    SourceIncompatible,
    TargetIncompatible,
}

impl DynViolation {
    pub fn code(&self) -> &'static str {
        match self {
            DynViolation::InvalidCover(_) => "invalid-cover",
            DynViolation::NotInSource(_) => "not-in-source",
            DynViolation::NotInTarget(_) => "not-in-target",
            DynViolation::SourceIncompatible => "source-incompatible",
            DynViolation::TargetIncompatible => "target-incompatible",
        }
    }
}

impl fmt::Display for DynViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DynViolation::InvalidCover(v) => write!(f, "cover has {} violations", v.len()),
            DynViolation::NotInSource(x) => write!(f, "{x} does not mark the source"),
            DynViolation::NotInTarget(x) => write!(f, "{x} does not mark the target"),
            DynViolation::SourceIncompatible => write!(f, "dynamical tree is not compatible with the source"),
            DynViolation::TargetIncompatible => write!(f, "dynamical tree is not compatible with the target"),
        }
    }
}

/// Whether `tx` is the projection of `ty` on the nose: isomorphic to it, and
/// every internal vertex of `tx` is a vertex of `ty` inducing the same
/// marking on the labels of `tx`.
pub fn compatible(tx: &TreeOfSpheres, ty: &TreeOfSpheres) -> Result<bool, DynError> {
    let x = tx.labels();
    if let Some(l) = x.iter().find(|l| !ty.labels().contains(*l)) {
        return Err(DynError::NotASubset(l.clone()));
    }
    if !spheres_iso(tx, &ty.project(x)?)? {
        return Ok(false);
    }
    Ok(tx.shape().internal().iter().all(|&v| {
        ty.shape().internal().contains(&v) && {
            let ay = ty.induced_marking(v);
            tx.induced_marking(v).iter().all(|(l, p)| ay[l] == *p)
        }
    }))
}

pub fn validate_dyn(d: &DynSystem) -> Vec<DynViolation> {
    let mut out = Vec::new();
    let cv = validate_cover(&d.cover);
    if !cv.is_empty() {
        out.push(DynViolation::InvalidCover(cv));
    }
    for x in d.x() {
        if !d.cover.source.labels().contains(x) {
            out.push(DynViolation::NotInSource(x.clone()));
        }
        if !d.cover.target.labels().contains(x) {
            out.push(DynViolation::NotInTarget(x.clone()));
        }
    }
    if !out.iter().all(|v| matches!(v, DynViolation::InvalidCover(_))) {
        return out;
    }
    if !compatible(&d.dyn_tree, &d.cover.source).unwrap_or(false) {
        out.push(DynViolation::SourceIncompatible);
    }
    if !compatible(&d.dyn_tree, &d.cover.target).unwrap_or(false) {
        out.push(DynViolation::TargetIncompatible);
    }
    out
}

fn check_subset(c: &TreeCover, x: &BTreeSet<Label>) -> Result<(), DynError> {
    if x.len() < 3 {
        return Err(DynError::TooFewLabels(x.len()));
    }
    match x
        .iter()
        .find(|l| !c.source.labels().contains(*l) || !c.target.labels().contains(*l))
    {
        Some(l) => Err(DynError::NotASubset(l.clone())),
        None => Ok(()),
    }
}

/// Renames and re-charts the target so that `witness` (a projection of the
/// source) is also compatible with the target on the nose.
fn remark_target(c: &TreeCover, witness: &TreeOfSpheres) -> Result<TreeCover, DynError> {
    let x = witness.labels();
    let pz = c.target.project(x)?;
    let iso = pz
        .iso_maps(witness)?
        .expect("caller checked the projections are isomorphic");
    // iso: projected target vertex w ↦ (witness vertex v, m) with m ∘ a_w = a_v.
    let mut rename: BTreeMap<usize, usize> = BTreeMap::new();
    let mut charts: BTreeMap<usize, Moebius> = BTreeMap::new();
    for (w, (v, m)) in &iso {
        rename.insert(*w, *v);
        charts.insert(*w, m.clone());
    }
    let taken: BTreeSet<usize> = rename.values().copied().collect();
    let mut next = c
        .target
        .shape()
        .internal()
        .iter()
        .chain(&taken)
        .copied()
        .max()
        .unwrap_or(0)
        + 1;
    for &w in c.target.shape().internal() {
        rename.entry(w).or_insert_with(|| {
            next += 1;
            next - 1
        });
    }
    let moved = c.change_charts(&BTreeMap::new(), &charts);
    let target = moved.target.relabel_internal(|w| rename[&w]);
    let vertex_map = moved
        .vertex_map
        .iter()
        .map(|(a, b)| {
            let b = match b {
                Node::Internal(w) => Node::Internal(rename[w]),
                leaf => leaf.clone(),
            };
            (a.clone(), b)
        })
        .collect();
    Ok(TreeCover {
        source: moved.source,
        target,
        vertex_map,
        maps: moved.maps,
    })
}

/// Whether `c` underlies a dynamical system over `x`. When it does, returns
/// the system whose dynamical tree is the projection of the source, with the
/// target re-marked to share its vertices.
pub fn dyn_membership(c: &TreeCover, x: &BTreeSet<Label>) -> Result<Option<DynSystem>, DynError> {
    check_subset(c, x)?;
    let witness = c.source.project(x)?;
    if !spheres_iso(&witness, &c.target.project(x)?)? {
        return Ok(None);
    }
    let cover = remark_target(c, &witness)?;
    Ok(Some(DynSystem {
        cover,
        dyn_tree: witness,
    }))
}

/// Conjugacy of dynamical systems, which reduces to isomorphism of the
/// underlying covers.
pub fn dyn_conjugate(d1: &DynSystem, d2: &DynSystem) -> Result<bool, DynError> {
    if d1.x() != d2.x() {
        return Err(DynError::LabelSetMismatch);
    }
    Ok(cover_iso(&d1.cover, &d2.cover)?)
}
