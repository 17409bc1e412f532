//! Marked spheres, trees of spheres, t-charts and the cross-ratio embedding.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{moebius_from_three, ArithError, Moebius, ProjPoint};
use crate::trees::{tree_from_partitions, Label, MarkedTree, Node, Partition, PartitionSet, TreeError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModuliError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("labels {0} and {1} are marked by the same point")]
    NotInjective(Label, Label),
    #[error("marking of vertex #{vertex} is not injective on its edges")]
    EdgeCollision { vertex: usize },
    #[error("marking of vertex #{vertex} does not match its edges")]
    MarkingDomain { vertex: usize },
    #[error("at least three marked points are required, got {0}")]
    MarkedSetTooSmall(usize),
    #[error("the trees are marked by different sets")]
    LeafSetMismatch,
    #[error("label {0} is not marked")]
    NotASubset(Label),
}

/// An injection of a finite label set into the sphere.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MarkedSphere {
    points: BTreeMap<Label, ProjPoint>,
}

impl MarkedSphere {
    pub fn new(points: BTreeMap<Label, ProjPoint>) -> Result<Self, ModuliError> {
        if points.len() < 3 {
            return Err(ModuliError::MarkedSetTooSmall(points.len()));
        }
        let mut seen: BTreeMap<&ProjPoint, &Label> = BTreeMap::new();
        for (l, p) in &points {
            if let Some(other) = seen.insert(p, l) {
                return Err(ModuliError::NotInjective(other.clone(), l.clone()));
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &BTreeMap<Label, ProjPoint> {
        &self.points
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.points.keys()
    }
}

/// Ordered quadruple `(x0, x1, x∞, x)`.
pub type Quad = [Label; 4];

/// The values `α_t(x)` of a tree of spheres over every ordered triple `t` of
/// distinct labels and every label `x` (triple members included).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Embedding {
    values: BTreeMap<Quad, ProjPoint>,
}

impl Embedding {
    pub fn values(&self) -> &BTreeMap<Quad, ProjPoint> {
        &self.values
    }

    pub fn get(&self, x0: &str, x1: &str, xi: &str, x: &str) -> Option<&ProjPoint> {
        self.values
            .get(&[x0.to_string(), x1.to_string(), xi.to_string(), x.to_string()])
    }

    /// Values on quadruples made of labels in `sub`.
    pub fn restricted_to(&self, sub: &BTreeSet<Label>) -> Self {
        Self {
            values: self
                .values
                .iter()
                .filter(|(q, _)| q.iter().all(|l| sub.contains(l)))
                .map(|(q, p)| (q.clone(), p.clone()))
                .collect(),
        }
    }
}

/// A stable tree with, at each internal vertex, an injective marking of its
/// edges (keyed by the neighbouring vertex) by points of the sphere.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TreeOfSpheres {
    shape: MarkedTree,
    marking: BTreeMap<usize, BTreeMap<Node, ProjPoint>>,
}

impl TreeOfSpheres {
    pub fn new(
        shape: MarkedTree,
        marking: BTreeMap<usize, BTreeMap<Node, ProjPoint>>,
    ) -> Result<Self, ModuliError> {
        let violations = crate::trees::validate_tree(&shape);
        if !violations.is_empty() {
            return Err(TreeError::Invalid(violations).into());
        }
        if marking.keys().ne(shape.internal().iter()) {
            let v = marking
                .keys()
                .chain(shape.internal())
                .find(|v| !marking.contains_key(v) || !shape.internal().contains(v))
                .copied()
                .unwrap_or_default();
            return Err(ModuliError::MarkingDomain { vertex: v });
        }
        for (&v, iv) in &marking {
            if iv.keys().ne(shape.edges_at(v).iter()) {
                return Err(ModuliError::MarkingDomain { vertex: v });
            }
            let distinct: BTreeSet<&ProjPoint> = iv.values().collect();
            if distinct.len() != iv.len() {
                return Err(ModuliError::EdgeCollision { vertex: v });
            }
        }
        Ok(Self { shape, marking })
    }

    /// The marked sphere as a one-vertex tree (vertex id 0).
    pub fn from_sphere(s: &MarkedSphere) -> Self {
        let shape = MarkedTree::star(s.labels().cloned()).expect("at least three labels");
        let iv = s
            .points()
            .iter()
            .map(|(l, p)| (Node::Leaf(l.clone()), p.clone()))
            .collect();
        Self::new(shape, BTreeMap::from([(0, iv)])).expect("injective marking")
    }

    pub fn shape(&self) -> &MarkedTree {
        &self.shape
    }

    pub fn labels(&self) -> &BTreeSet<Label> {
        self.shape.leaves()
    }

    pub fn marking(&self) -> &BTreeMap<usize, BTreeMap<Node, ProjPoint>> {
        &self.marking
    }

    /// `i_v`.
    pub fn edge_marking(&self, v: usize) -> &BTreeMap<Node, ProjPoint> {
        &self.marking[&v]
    }

    /// `a_v`: each label is sent to the attaching point of the edge leading to it.
    pub fn induced_marking(&self, v: usize) -> BTreeMap<Label, ProjPoint> {
        let iv = &self.marking[&v];
        self.shape
            .directions(v)
            .into_iter()
            .map(|(x, e)| (x, iv[&e].clone()))
            .collect()
    }

    fn all_induced(&self) -> BTreeMap<usize, BTreeMap<Label, ProjPoint>> {
        self.shape
            .internal()
            .iter()
            .map(|&v| (v, self.induced_marking(v)))
            .collect()
    }

    /// The vertex separating the triple, its t-chart `σ_t` and `α_t = σ_t ∘ a_v`.
    pub fn t_chart(
        &self,
        t: [&str; 3],
    ) -> Result<(usize, Moebius, BTreeMap<Label, ProjPoint>), ModuliError> {
        let v = self.shape.separating_vertex(t[0], t[1], t[2])?;
        let av = self.induced_marking(v);
        let sigma = moebius_from_three(&av[t[0]], &av[t[1]], &av[t[2]])?;
        let alpha = av.iter().map(|(x, p)| (x.clone(), sigma.apply(p))).collect();
        Ok((v, sigma, alpha))
    }

    /// The map 𝔅.
    pub fn embed(&self) -> Embedding {
        let induced = self.all_induced();
        let labels: Vec<&Label> = self.labels().iter().collect();
        let mut triples = Vec::new();
        for a in &labels {
            for b in &labels {
                for c in &labels {
                    if a != b && b != c && a != c {
                        triples.push([*a, *b, *c]);
                    }
                }
            }
        }
        let values = triples
            .par_iter()
            .flat_map_iter(|t| {
                let av = induced
                    .values()
                    .find(|av| {
                        let (p0, p1, p2) = (&av[t[0]], &av[t[1]], &av[t[2]]);
                        p0 != p1 && p1 != p2 && p0 != p2
                    })
                    .expect("some vertex separates every triple");
                let sigma = moebius_from_three(&av[t[0]], &av[t[1]], &av[t[2]])
                    .expect("separated triple is nondegenerate");
                labels.iter().map(move |x| {
                    (
                        [t[0].clone(), t[1].clone(), t[2].clone(), (*x).clone()],
                        sigma.apply(&av[*x]),
                    )
                })
            })
            .collect();
        Embedding { values }
    }

    /// Post-composes each `i_v` with the given Moebius maps (missing ones are
    /// the identity).
    pub fn transform(&self, maps: &BTreeMap<usize, Moebius>) -> Self {
        let marking = self
            .marking
            .iter()
            .map(|(v, iv)| {
                let iv = match maps.get(v) {
                    Some(m) => iv.iter().map(|(e, p)| (e.clone(), m.apply(p))).collect(),
                    None => iv.clone(),
                };
                (*v, iv)
            })
            .collect();
        Self {
            shape: self.shape.clone(),
            marking,
        }
    }

    /// Renames internal vertices by `f`, which must be injective.
    pub fn relabel_internal(&self, f: impl Fn(usize) -> usize + Copy) -> Self {
        let g = |n: &Node| match n {
            Node::Internal(i) => Node::Internal(f(*i)),
            leaf => leaf.clone(),
        };
        let shape = self.shape.relabel_internal(f);
        let marking = self
            .marking
            .iter()
            .map(|(v, iv)| (f(*v), iv.iter().map(|(e, p)| (g(e), p.clone())).collect()))
            .collect();
        Self { shape, marking }
    }

    /// Lexicographically smallest triple separated by `v`, which comes out
    /// sorted.
    pub fn representative_triple(&self, v: usize) -> [Label; 3] {
        representative_triple(&self.shape.partition_at(v))
    }

    /// Canonical representative of the isomorphism class: ids in partition
    /// order, each vertex in the chart of its representative triple.
    pub fn canonical(&self) -> Self {
        self.canonical_with_maps().0
    }

    /// The canonical representative together with, for each old vertex, its
    /// new id and the chart change `σ` with `i'_{new} = σ ∘ i_{old}`.
    pub fn canonical_with_maps(&self) -> (Self, BTreeMap<usize, (usize, Moebius)>) {
        let ps = self.shape.tree_partitions();
        let shape = tree_from_partitions(&ps).expect("partitions of a valid tree");
        let by_partition: BTreeMap<Partition, usize> = self
            .shape
            .internal()
            .iter()
            .map(|&v| (self.shape.partition_at(v), v))
            .collect();
        let mut marking = BTreeMap::new();
        let mut moves = BTreeMap::new();
        for (new_id, p) in ps.iter().enumerate() {
            let old = by_partition[p];
            let av = self.induced_marking(old);
            let t = representative_triple(p);
            let sigma = moebius_from_three(&av[&t[0]], &av[&t[1]], &av[&t[2]])
                .expect("representative triple is separated");
            let dirs = shape.directions(new_id);
            let mut iv = BTreeMap::new();
            for (x, e) in dirs {
                iv.entry(e).or_insert_with(|| sigma.apply(&av[&x]));
            }
            marking.insert(new_id, iv);
            moves.insert(old, (new_id, sigma));
        }
        (Self { shape, marking }, moves)
    }

    /// An isomorphism onto `other` if there is one: for each internal vertex
    /// of `self`, the vertex of `other` with the same partition and the map
    /// `m` with `m ∘ a_v = a'_{v'}`.
    pub fn iso_maps(&self, other: &Self) -> Result<Option<BTreeMap<usize, (usize, Moebius)>>, ModuliError> {
        if self.labels() != other.labels() {
            return Err(ModuliError::LeafSetMismatch);
        }
        let theirs: BTreeMap<Partition, usize> = other
            .shape
            .internal()
            .iter()
            .map(|&v| (other.shape.partition_at(v), v))
            .collect();
        if theirs.len() != self.shape.internal().len() {
            return Ok(None);
        }
        let mut out = BTreeMap::new();
        for &v in self.shape.internal() {
            let p = self.shape.partition_at(v);
            let Some(&w) = theirs.get(&p) else {
                return Ok(None);
            };
            let (av, aw) = (self.induced_marking(v), other.induced_marking(w));
            let t = representative_triple(&p);
            let m = Moebius::from_triples(
                [&av[&t[0]], &av[&t[1]], &av[&t[2]]],
                [&aw[&t[0]], &aw[&t[1]], &aw[&t[2]]],
            )?;
            if av.iter().any(|(x, q)| m.apply(q) != aw[x]) {
                return Ok(None);
            }
            out.insert(v, (w, m));
        }
        Ok(Some(out))
    }

    /// The projection Π onto the sub-marking `sub`. Each vertex of the result
    /// keeps the id of the (smallest) vertex of `self` it comes from.
    pub fn project(&self, sub: &BTreeSet<Label>) -> Result<Self, ModuliError> {
        if sub.len() < 3 {
            return Err(ModuliError::MarkedSetTooSmall(sub.len()));
        }
        if let Some(x) = sub.iter().find(|x| !self.labels().contains(*x)) {
            return Err(ModuliError::NotASubset(x.clone()));
        }
        let mut chosen: BTreeMap<Partition, (usize, BTreeMap<Label, ProjPoint>)> = BTreeMap::new();
        for &v in self.shape.internal() {
            let av: BTreeMap<Label, ProjPoint> = self
                .induced_marking(v)
                .into_iter()
                .filter(|(x, _)| sub.contains(x))
                .collect();
            let mut fibers: BTreeMap<&ProjPoint, BTreeSet<Label>> = BTreeMap::new();
            for (x, p) in &av {
                fibers.entry(p).or_default().insert(x.clone());
            }
            if fibers.len() < 3 {
                continue;
            }
            let p = Partition::new(fibers.into_values()).expect("fibers partition the set");
            chosen.entry(p).or_insert((v, av));
        }
        let ps: PartitionSet = chosen.keys().cloned().collect();
        let built = tree_from_partitions(&ps)?;
        let ids: Vec<usize> = chosen.values().map(|(v, _)| *v).collect();
        let mut marking = BTreeMap::new();
        for (new_id, (v, av)) in chosen.values().enumerate() {
            let iv = built
                .directions(new_id)
                .into_iter()
                .map(|(x, e)| {
                    let e = match e {
                        Node::Internal(j) => Node::Internal(ids[j]),
                        leaf => leaf,
                    };
                    (e, av[&x].clone())
                })
                .collect();
            marking.insert(*v, iv);
        }
        let shape = built.relabel_internal(|j| ids[j]);
        Self::new(shape, marking)
    }
}

/// Smallest sorted triple meeting three distinct blocks.
pub fn representative_triple(p: &Partition) -> [Label; 3] {
    let ground: Vec<Label> = p.ground().into_iter().collect();
    for (i, a) in ground.iter().enumerate() {
        for (j, b) in ground.iter().enumerate().skip(i + 1) {
            if p.block_of(a) == p.block_of(b) {
                continue;
            }
            for c in ground.iter().skip(j + 1) {
                if p.block_of(c) != p.block_of(a) && p.block_of(c) != p.block_of(b) {
                    return [a.clone(), b.clone(), c.clone()];
                }
            }
        }
    }
    panic!("partition with fewer than three blocks")
}

/// Isomorphism of trees of spheres, decided by equality of embeddings.
pub fn spheres_iso(t1: &TreeOfSpheres, t2: &TreeOfSpheres) -> Result<bool, ModuliError> {
    if t1.labels() != t2.labels() {
        return Err(ModuliError::LeafSetMismatch);
    }
    if t1.shape.tree_partitions() != t2.shape.tree_partitions() {
        return Ok(false);
    }
    // Canonical representatives coincide exactly when the embeddings do.
    Ok(t1.canonical() == t2.canonical())
}
