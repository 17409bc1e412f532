//! Portraits, covers between trees of spheres, their validation, restriction
//! to subtrees, isomorphism and reconstruction from the source tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::arith::{local_degree, ArithError, Moebius, ProjPoint, RationalMap};
use crate::moduli::{MarkedSphere, ModuliError, TreeOfSpheres};
use crate::trees::{Label, MarkedTree, Node, TreeError};

mod divisors;
mod reconstruct;

pub use divisors::rational_from_divisors;
pub use reconstruct::reconstruct_cover;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CoverError {
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid portrait: {}", join(.0))]
    InvalidPortrait(Vec<PortraitViolation>),
    #[error("invalid cover: {}", join(.0))]
    InvalidCover(Vec<CoverViolation>),
    #[error("target vertex #{vertex} has preimage degree {sum}, expected {expected}")]
    InconsistentDegree {
        vertex: usize,
        sum: usize,
        expected: usize,
    },
    #[error("the selected vertices are not connected")]
    NotConnected,
    #[error("no internal vertex selected")]
    EmptySelection,
    #[error("no component {0} over the selection")]
    NoSuchComponent(String),
    #[error("zeros and poles share the point {0}")]
    OverlappingDivisors(ProjPoint),
    #[error("the unit point {0} lies on the divisor")]
    UnitOnDivisor(ProjPoint),
    #[error("zeros have total multiplicity {zeros}, poles {poles}")]
    DivisorDegree { zeros: usize, poles: usize },
    #[error("not realizable: {0}")]
    NotRealizable(String),
    #[error("the covers have different portraits")]
    PortraitMismatch,
    #[error("isomorphic sources but incompatible covers: {0}")]
    InvariantBreach(String),
}

fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
}

/// Degree data `(F, deg)` between two finite sets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Portrait {
    pub y: BTreeSet<Label>,
    pub z: BTreeSet<Label>,
    pub f: BTreeMap<Label, Label>,
    pub deg: BTreeMap<Label, usize>,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PortraitViolation {
    DegreeTooSmall(usize),
    MissingImage(Label),
    UnknownImage { a: Label, b: Label },
    ZeroLocalDegree(Label),
    RiemannHurwitz { sum: usize, expected: usize },
    FiberSum { b: Label, sum: usize, expected: usize },
}

impl PortraitViolation {
    pub fn code(&self) -> &'static str {
        match self {
            PortraitViolation::DegreeTooSmall(_) => "degree-too-small",
            PortraitViolation::MissingImage(_) => "missing-image",
            PortraitViolation::UnknownImage { .. } => "unknown-image",
            PortraitViolation::ZeroLocalDegree(_) => "zero-local-degree",
            PortraitViolation::RiemannHurwitz { .. } => "riemann-hurwitz",
            PortraitViolation::FiberSum { .. } => "fiber-sum",
        }
    }
}

impl fmt::Display for PortraitViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PortraitViolation::DegreeTooSmall(d) => write!(f, "degree {d} is below 2"),
            PortraitViolation::MissingImage(a) => write!(f, "{a} has no image or no degree"),
            PortraitViolation::UnknownImage { a, b } => write!(f, "{a} maps to {b}, which is not in Z"),
            PortraitViolation::ZeroLocalDegree(a) => write!(f, "{a} has local degree 0"),
            PortraitViolation::RiemannHurwitz { sum, expected } => {
                write!(f, "sum of (deg - 1) is {sum}, expected {expected}")
            }
            PortraitViolation::FiberSum { b, sum, expected } => {
                write!(f, "degrees over {b} sum to {sum}, expected {expected}")
            }
        }
    }
}

impl Portrait {
    /// Checks the sum conditions, requiring `d ≥ min_degree`.
    pub fn violations(&self, min_degree: usize) -> Vec<PortraitViolation> {
        let mut out = Vec::new();
        if self.d < min_degree {
            out.push(PortraitViolation::DegreeTooSmall(self.d));
        }
        let mut fibers: BTreeMap<&Label, usize> = self.z.iter().map(|b| (b, 0)).collect();
        let mut ramification = 0;
        for a in &self.y {
            let (Some(b), Some(&k)) = (self.f.get(a), self.deg.get(a)) else {
                out.push(PortraitViolation::MissingImage(a.clone()));
                continue;
            };
            if k == 0 {
                out.push(PortraitViolation::ZeroLocalDegree(a.clone()));
                continue;
            }
            ramification += k - 1;
            match fibers.get_mut(b) {
                Some(s) => *s += k,
                None => out.push(PortraitViolation::UnknownImage {
                    a: a.clone(),
                    b: b.clone(),
                }),
            }
        }
        let expected = (2 * self.d).saturating_sub(2);
        if ramification != expected {
            out.push(PortraitViolation::RiemannHurwitz {
                sum: ramification,
                expected,
            });
        }
        for (b, sum) in fibers {
            if sum != self.d {
                out.push(PortraitViolation::FiberSum {
                    b: b.clone(),
                    sum,
                    expected: self.d,
                });
            }
        }
        out
    }

    /// The portrait of a rational map restricted to `y ↦ f(y)`, with labels
    /// assigned by the two markings.
    pub fn of_map(f: &RationalMap, y: &MarkedSphere, z: &MarkedSphere) -> Result<Self, CoverError> {
        let by_point: BTreeMap<&ProjPoint, &Label> = z.points().iter().map(|(l, p)| (p, l)).collect();
        let mut fm = BTreeMap::new();
        let mut deg = BTreeMap::new();
        for (a, p) in y.points() {
            let image = f.eval(p);
            let b = by_point
                .get(&image)
                .ok_or_else(|| CoverError::NotRealizable(format!("f({a}) = {image} is not marked")))?;
            fm.insert(a.clone(), (*b).clone());
            deg.insert(a.clone(), local_degree(f, p)?);
        }
        Ok(Self {
            y: y.labels().cloned().collect(),
            z: z.labels().cloned().collect(),
            f: fm,
            deg,
            d: f.degree(),
        })
    }
}

/// Diagnostics of a portrait of degree at least 2.
pub fn validate_portrait(p: &Portrait) -> Vec<PortraitViolation> {
    p.violations(2)
}

/// A cover between trees of spheres. `vertex_map` is defined on every vertex
/// of the source; `maps` holds `f_v` for every internal source vertex.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeCover {
    pub source: TreeOfSpheres,
    pub target: TreeOfSpheres,
    pub vertex_map: BTreeMap<Node, Node>,
    pub maps: BTreeMap<usize, RationalMap>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CoverViolation {
    MissingImage(Node),
    UnknownImage { vertex: Node, image: Node },
    KindMismatch(Node),
    EdgeNotMapped { a: Node, b: Node },
    MissingMap(usize),
    ConstantMap(usize),
    Equivariance { vertex: usize, edge: Node },
    FiberCount { vertex: usize, point: ProjPoint, sum: usize, degree: usize },
    RiemannHurwitz { vertex: usize, sum: usize, expected: usize },
    EdgeDegree { a: usize, b: usize, at_a: usize, at_b: usize },
    Portrait(PortraitViolation),
    GlobalDegree { vertex: usize, sum: usize, expected: usize },
}

impl CoverViolation {
    pub fn code(&self) -> &'static str {
        match self {
            CoverViolation::MissingImage(_) => "missing-image",
            CoverViolation::UnknownImage { .. } => "unknown-image",
            CoverViolation::KindMismatch(_) => "kind-mismatch",
            CoverViolation::EdgeNotMapped { .. } => "edge-not-mapped",
            CoverViolation::MissingMap(_) => "missing-map",
            CoverViolation::ConstantMap(_) => "constant-map",
            CoverViolation::Equivariance { .. } => "equivariance",
            CoverViolation::FiberCount { .. } => "fiber-count",
            CoverViolation::RiemannHurwitz { .. } => "riemann-hurwitz",
            CoverViolation::EdgeDegree { .. } => "edge-degree",
            CoverViolation::Portrait(p) => p.code(),
            CoverViolation::GlobalDegree { .. } => "global-degree",
        }
    }
}

impl fmt::Display for CoverViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoverViolation::MissingImage(n) => write!(f, "{n} has no image"),
            CoverViolation::UnknownImage { vertex, image } => {
                write!(f, "{vertex} maps to {image}, which is not a target vertex")
            }
            CoverViolation::KindMismatch(n) => write!(f, "{n} changes kind under the vertex map"),
            CoverViolation::EdgeNotMapped { a, b } => write!(f, "edge {a}-{b} does not map to an edge"),
            CoverViolation::MissingMap(v) => write!(f, "no map at #{v}"),
            CoverViolation::ConstantMap(v) => write!(f, "map at #{v} is constant"),
            CoverViolation::Equivariance { vertex, edge } => {
                write!(f, "f_#{vertex} does not send the attaching point of {edge} to its image")
            }
            CoverViolation::FiberCount { vertex, point, sum, degree } => write!(
                f,
                "at #{vertex}, marked preimages of {point} count {sum}, degree is {degree}"
            ),
            CoverViolation::RiemannHurwitz { vertex, sum, expected } => {
                write!(f, "at #{vertex}, marked ramification is {sum}, expected {expected}")
            }
            CoverViolation::EdgeDegree { a, b, at_a, at_b } => {
                write!(f, "edge #{a}-#{b} has local degree {at_a} at #{a} and {at_b} at #{b}")
            }
            CoverViolation::Portrait(p) => write!(f, "leaf portrait: {p}"),
            CoverViolation::GlobalDegree { vertex, sum, expected } => {
                write!(f, "target #{vertex} has preimage degree {sum}, expected {expected}")
            }
        }
    }
}

impl TreeCover {
    pub fn image(&self, n: &Node) -> &Node {
        &self.vertex_map[n]
    }

    /// `F(v)` for an internal source vertex.
    pub fn image_of(&self, v: usize) -> usize {
        self.vertex_map[&Node::Internal(v)]
            .as_internal()
            .expect("internal vertices map to internal vertices")
    }

    /// Local degree of `f_v` at the attaching point of the edge toward `toward`.
    pub fn edge_degree(&self, v: usize, toward: &Node) -> usize {
        local_degree(&self.maps[&v], &self.source.edge_marking(v)[toward])
            .expect("cover maps are nonconstant")
    }

    /// The portrait read off the leaves: `F` on leaves, local degrees at leaf
    /// edges, and `d` from the fiber of the first target label.
    pub fn portrait(&self) -> Portrait {
        let mut f = BTreeMap::new();
        let mut deg = BTreeMap::new();
        for y in self.source.labels() {
            let leaf = Node::Leaf(y.clone());
            if let Some(Node::Leaf(b)) = self.vertex_map.get(&leaf) {
                f.insert(y.clone(), b.clone());
            }
            if let Some(v) = self.source.shape().leaf_parent(y) {
                if let Some(m) = self.maps.get(&v) {
                    if let Ok(k) = local_degree(m, &self.source.edge_marking(v)[&leaf]) {
                        deg.insert(y.clone(), k);
                    }
                }
            }
        }
        let first = self.target.labels().iter().next();
        let d = first
            .map(|b| {
                f.iter()
                    .filter(|(_, img)| *img == b)
                    .map(|(a, _)| deg.get(a).copied().unwrap_or(0))
                    .sum()
            })
            .unwrap_or(0);
        Portrait {
            y: self.source.labels().clone(),
            z: self.target.labels().clone(),
            f,
            deg,
            d,
        }
    }

    /// Post-composes every `f_v` by the target chart change at `F(v)` and
    /// pre-composes by the inverse of the source chart change at `v`; the
    /// markings move accordingly, so the result is isomorphic to `self`.
    pub fn change_charts(
        &self,
        source: &BTreeMap<usize, Moebius>,
        target: &BTreeMap<usize, Moebius>,
    ) -> Self {
        let maps = self
            .maps
            .iter()
            .map(|(&v, f)| {
                let w = self.image_of(v);
                let outer = target.get(&w).cloned().unwrap_or_else(Moebius::identity);
                let inner = source
                    .get(&v)
                    .map(Moebius::inverse)
                    .unwrap_or_else(Moebius::identity);
                (v, f.conjugate(&outer, &inner))
            })
            .collect();
        Self {
            source: self.source.transform(source),
            target: self.target.transform(target),
            vertex_map: self.vertex_map.clone(),
            maps,
        }
    }

    /// Replaces the target by its canonical representative.
    pub fn canonical_target(&self) -> Self {
        let (target, moves) = self.target.canonical_with_maps();
        let charts: BTreeMap<usize, Moebius> = moves.iter().map(|(&w, (_, m))| (w, m.clone())).collect();
        let moved = self.change_charts(&BTreeMap::new(), &charts);
        let vertex_map = moved
            .vertex_map
            .iter()
            .map(|(a, b)| {
                let b = match b {
                    Node::Internal(w) => Node::Internal(moves[w].0),
                    leaf => leaf.clone(),
                };
                (a.clone(), b)
            })
            .collect();
        Self {
            source: moved.source,
            target,
            vertex_map,
            maps: moved.maps,
        }
    }
}

/// All violated cover conditions; empty when the cover is valid.
pub fn validate_cover(c: &TreeCover) -> Vec<CoverViolation> {
    let mut out = Vec::new();
    let ts = c.source.shape();
    let tt = c.target.shape();
    for n in ts.vertices() {
        match c.vertex_map.get(n) {
            None => out.push(CoverViolation::MissingImage(n.clone())),
            Some(img) if !tt.contains(img) => out.push(CoverViolation::UnknownImage {
                vertex: n.clone(),
                image: img.clone(),
            }),
            Some(img) if img.as_internal().is_some() != n.as_internal().is_some() => {
                out.push(CoverViolation::KindMismatch(n.clone()))
            }
            Some(_) => {}
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (a, b) in ts.edges() {
        let (fa, fb) = (&c.vertex_map[&a], &c.vertex_map[&b]);
        if !tt.neighbors(fa).is_ok_and(|n| n.contains(fb)) {
            out.push(CoverViolation::EdgeNotMapped { a, b });
        }
    }
    if !out.is_empty() {
        return out;
    }
    let mut ok_maps = BTreeSet::new();
    for &v in ts.internal() {
        let Some(f) = c.maps.get(&v) else {
            out.push(CoverViolation::MissingMap(v));
            continue;
        };
        if f.is_constant() {
            out.push(CoverViolation::ConstantMap(v));
            continue;
        }
        ok_maps.insert(v);
        let w = c.image_of(v);
        let iv = c.source.edge_marking(v);
        let iw = c.target.edge_marking(w);
        let d = f.degree();
        let mut ledger = 0;
        for (e, p) in iv {
            if f.eval(p) != iw[&c.vertex_map[e]] {
                out.push(CoverViolation::Equivariance {
                    vertex: v,
                    edge: e.clone(),
                });
            }
            ledger += local_degree(f, p).expect("nonconstant") - 1;
        }
        for q in iw.values() {
            let sum: usize = iv
                .values()
                .filter(|p| f.eval(p) == *q)
                .map(|p| local_degree(f, p).expect("nonconstant"))
                .sum();
            if sum != d {
                out.push(CoverViolation::FiberCount {
                    vertex: v,
                    point: q.clone(),
                    sum,
                    degree: d,
                });
            }
        }
        if ledger != 2 * d - 2 {
            out.push(CoverViolation::RiemannHurwitz {
                vertex: v,
                sum: ledger,
                expected: 2 * d - 2,
            });
        }
    }
    for (a, b) in ts.edges() {
        let (Node::Internal(va), Node::Internal(vb)) = (&a, &b) else {
            continue;
        };
        if !ok_maps.contains(va) || !ok_maps.contains(vb) {
            continue;
        }
        let (at_a, at_b) = (c.edge_degree(*va, &b), c.edge_degree(*vb, &a));
        if at_a != at_b {
            out.push(CoverViolation::EdgeDegree {
                a: *va,
                b: *vb,
                at_a,
                at_b,
            });
        }
    }
    if ok_maps.len() == ts.internal().len() {
        let p = c.portrait();
        out.extend(p.violations(1).into_iter().map(CoverViolation::Portrait));
        if let Err(CoverError::InconsistentDegree { vertex, sum, expected }) = global_degree(c) {
            out.push(CoverViolation::GlobalDegree { vertex, sum, expected });
        }
    }
    out
}

/// The common value of `Σ_{v ∈ F⁻¹(w)} deg f_v` over target vertices `w`.
pub fn global_degree(c: &TreeCover) -> Result<usize, CoverError> {
    let mut sums: BTreeMap<usize, usize> = c.target.shape().internal().iter().map(|&w| (w, 0)).collect();
    for (&v, f) in &c.maps {
        if let Some(s) = c.vertex_map.get(&Node::Internal(v)).and_then(Node::as_internal).and_then(|w| sums.get_mut(&w)) {
            *s += f.degree();
        }
    }
    let expected = sums.values().copied().max().unwrap_or(0);
    match sums.iter().find(|(_, &s)| s != expected) {
        Some((&vertex, &sum)) => Err(CoverError::InconsistentDegree { vertex, sum, expected }),
        None => Ok(expected),
    }
}

/// A marked rational map `(f, y, z)` with its portrait.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MarkedSphereCover {
    pub f: RationalMap,
    pub y: MarkedSphere,
    pub z: MarkedSphere,
    pub portrait: Portrait,
}

impl MarkedSphereCover {
    /// Checks `f ∘ y = z ∘ F` and the local degrees against the portrait.
    pub fn new(f: RationalMap, y: MarkedSphere, z: MarkedSphere, portrait: Portrait) -> Result<Self, CoverError> {
        let actual = Portrait::of_map(&f, &y, &z)?;
        if actual != portrait {
            return Err(CoverError::PortraitMismatch);
        }
        Ok(Self { f, y, z, portrait })
    }

    /// The one-vertex cover between the corresponding one-vertex trees.
    pub fn as_tree_cover(&self) -> TreeCover {
        let source = TreeOfSpheres::from_sphere(&self.y);
        let target = TreeOfSpheres::from_sphere(&self.z);
        let mut vertex_map: BTreeMap<Node, Node> = self
            .portrait
            .f
            .iter()
            .map(|(a, b)| (Node::Leaf(a.clone()), Node::Leaf(b.clone())))
            .collect();
        vertex_map.insert(Node::Internal(0), Node::Internal(0));
        TreeCover {
            source,
            target,
            vertex_map,
            maps: BTreeMap::from([(0, self.f.clone())]),
        }
    }
}

/// Which connected component of `F⁻¹(T'')` to keep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComponentChoice {
    /// Position among the components ordered by smallest vertex id.
    Index(usize),
    /// The component containing this internal source vertex.
    Containing(usize),
}

/// Name for a vertex that becomes a leaf of a completed subtree.
pub(crate) fn boundary_label(n: &Node, taken: &BTreeSet<Label>) -> Label {
    match n {
        Node::Leaf(l) => l.clone(),
        Node::Internal(id) => {
            let mut name = format!("@{id}");
            while taken.contains(&name) {
                name.insert(0, '@');
            }
            name
        }
    }
}

/// Connected components of `vs` in `t`, each as a sorted id set, ordered by
/// smallest id.
pub(crate) fn components(t: &MarkedTree, vs: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for &start in vs {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for u in t.internal_neighbors(v) {
                if vs.contains(&u) && seen.insert(u) {
                    comp.insert(u);
                    stack.push(u);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// The completion of a connected set of internal vertices: the set itself
/// with every outside neighbour turned into a leaf. Returns the tree and the
/// name given to each outside neighbour.
pub(crate) fn complete(
    t: &TreeOfSpheres,
    keep: &BTreeSet<usize>,
) -> Result<(TreeOfSpheres, BTreeMap<Node, Label>), CoverError> {
    let shape = t.shape();
    let taken = shape.leaves().clone();
    let mut names: BTreeMap<Node, Label> = BTreeMap::new();
    let mut edges = Vec::new();
    let mut marking = BTreeMap::new();
    for &v in keep {
        let mut iv = BTreeMap::new();
        for (e, p) in t.edge_marking(v) {
            let key = match e {
                Node::Internal(u) if keep.contains(u) => {
                    if v < *u {
                        edges.push((Node::Internal(v), e.clone()));
                    }
                    e.clone()
                }
                outside => {
                    let name = names
                        .entry(outside.clone())
                        .or_insert_with(|| boundary_label(outside, &taken))
                        .clone();
                    edges.push((Node::Internal(v), Node::Leaf(name.clone())));
                    Node::Leaf(name)
                }
            };
            iv.insert(key, p.clone());
        }
        marking.insert(v, iv);
    }
    let shape = MarkedTree::new(names.values().cloned(), keep.iter().copied(), edges)?;
    Ok((TreeOfSpheres::new(shape, marking)?, names))
}

/// Restriction of a cover to a connected set of internal target vertices and
/// one component of its preimage, both completed by their boundary leaves.
pub fn restrict_cover(
    c: &TreeCover,
    selection: &BTreeSet<usize>,
    choice: &ComponentChoice,
) -> Result<TreeCover, CoverError> {
    let tt = c.target.shape();
    let selection: BTreeSet<usize> = selection.iter().copied().filter(|w| tt.internal().contains(w)).collect();
    if selection.is_empty() {
        return Err(CoverError::EmptySelection);
    }
    if components(tt, &selection).len() != 1 {
        return Err(CoverError::NotConnected);
    }
    let pre: BTreeSet<usize> = c
        .maps
        .keys()
        .copied()
        .filter(|&v| selection.contains(&c.image_of(v)))
        .collect();
    let comps = components(c.source.shape(), &pre);
    let comp = match choice {
        ComponentChoice::Index(i) => comps.get(*i),
        ComponentChoice::Containing(v) => comps.iter().find(|k| k.contains(v)),
    }
    .ok_or_else(|| CoverError::NoSuchComponent(format!("{choice:?}")))?;
    let (target, tnames) = complete(&c.target, &selection)?;
    let (source, snames) = complete(&c.source, comp)?;
    let mut vertex_map = BTreeMap::new();
    for &v in comp {
        vertex_map.insert(Node::Internal(v), c.vertex_map[&Node::Internal(v)].clone());
    }
    for (outside, name) in &snames {
        let img = &c.vertex_map[outside];
        vertex_map.insert(Node::Leaf(name.clone()), Node::Leaf(tnames[img].clone()));
    }
    let maps = comp.iter().map(|v| (*v, c.maps[v].clone())).collect();
    let out = TreeCover {
        source,
        target,
        vertex_map,
        maps,
    };
    let v = validate_cover(&out);
    if !v.is_empty() {
        return Err(CoverError::InvalidCover(v));
    }
    Ok(out)
}

/// Isomorphism of covers with the same portrait, decided by the sources; the
/// induced target isomorphism and conjugacy squares are verified as well.
pub fn cover_iso(c1: &TreeCover, c2: &TreeCover) -> Result<bool, CoverError> {
    if c1.portrait() != c2.portrait() {
        return Err(CoverError::PortraitMismatch);
    }
    let Some(my) = c1.source.iso_maps(&c2.source)? else {
        return Ok(false);
    };
    let mz = c1
        .target
        .iso_maps(&c2.target)?
        .ok_or_else(|| CoverError::InvariantBreach("targets are not isomorphic".into()))?;
    for (&v1, (v2, m)) in &my {
        let w1 = c1.image_of(v1);
        let w2 = c2.image_of(*v2);
        let (w1_to, mw) = &mz[&w1];
        if *w1_to != w2 {
            return Err(CoverError::InvariantBreach(format!(
                "#{v1} maps to #{w1}, its partner #{v2} to #{w2}"
            )));
        }
        let left = c1.maps[&v1].post_compose(mw);
        let right = c2.maps[v2].pre_compose(m);
        if left != right {
            return Err(CoverError::InvariantBreach(format!(
                "maps at #{v1} and #{v2} are not conjugate"
            )));
        }
    }
    Ok(true)
}
