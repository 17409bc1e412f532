//! Stable trees marked by a finite set and their classification by
//! admissible sets of partitions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

pub type Label = String;
pub type Block = BTreeSet<Label>;

/// A vertex of a marked tree: a leaf (identified with its label) or an
/// internal vertex with an opaque id.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Leaf(Label),
    Internal(usize),
}

impl Node {
    pub fn leaf(label: impl Into<Label>) -> Self {
        Node::Leaf(label.into())
    }

    pub fn as_internal(&self) -> Option<usize> {
        match self {
            Node::Internal(id) => Some(*id),
            Node::Leaf(_) => None,
        }
    }

    pub fn as_leaf(&self) -> Option<&str> {
        match self {
            Node::Leaf(l) => Some(l),
            Node::Internal(_) => None,
        }
    }

    /// Inverse of `Display`: `"#7"` is internal vertex 7, anything else a leaf.
    pub fn parse_key(s: &str) -> Result<Self, TreeError> {
        match s.strip_prefix('#') {
            Some(rest) => rest
                .parse()
                .map(Node::Internal)
                .map_err(|_| TreeError::BadVertexKey(s.to_string())),
            None => Ok(Node::Leaf(s.to_string())),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Leaf(l) => write!(f, "{l}"),
            Node::Internal(id) => write!(f, "#{id}"),
        }
    }
}

impl fmt::Debug for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("{edge} is not an edge at {vertex}")]
    InvalidIncidence { vertex: Node, edge: Node },
    #[error("vertex {0} is not in the tree")]
    UnknownVertex(Node),
    #[error("vertex {0} is not internal")]
    NotInternal(Node),
    #[error("partition set is not admissible: {0}")]
    NotAdmissible(AdmissibilityViolation),
    #[error("invalid tree: {0:?}")]
    Invalid(Vec<TreeViolation>),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("the trees are marked by different sets")]
    LeafSetMismatch,
    #[error("the tree has a single internal vertex")]
    SingleVertexTree,
    #[error("empty vertex set")]
    EmptySet,
    #[error("labels {0:?} are not distinct leaves")]
    BadTriple(Vec<Label>),
    #[error("cannot parse vertex key {0:?}")]
    BadVertexKey(String),
}

/// One reason a graph fails to be a stable tree marked by its leaves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    TooFewLeaves(usize),
    ReservedLabel(Label),
    DuplicateId(usize),
    UnknownEndpoint(Node),
    SelfLoop(Node),
    LeafValence { leaf: Label, valence: usize },
    Stability { vertex: usize, valence: usize },
    Disconnected,
    Cycle,
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::TooFewLeaves(n) => write!(f, "only {n} leaves, at least 3 required"),
            TreeViolation::ReservedLabel(l) => write!(f, "leaf label {l:?} starts with '#'"),
            TreeViolation::DuplicateId(id) => write!(f, "internal id {id} listed twice"),
            TreeViolation::UnknownEndpoint(n) => write!(f, "edge endpoint {n} is not a vertex"),
            TreeViolation::SelfLoop(n) => write!(f, "self loop at {n}"),
            TreeViolation::LeafValence { leaf, valence } => {
                write!(f, "leaf {leaf} has valence {valence}")
            }
            TreeViolation::Stability { vertex, valence } => {
                write!(f, "internal vertex #{vertex} has valence {valence}")
            }
            TreeViolation::Disconnected => write!(f, "graph is disconnected"),
            TreeViolation::Cycle => write!(f, "graph contains a cycle"),
        }
    }
}

impl TreeViolation {
    pub fn code(&self) -> &'static str {
        match self {
            TreeViolation::TooFewLeaves(_) => "too-few-leaves",
            TreeViolation::ReservedLabel(_) => "reserved-label",
            TreeViolation::DuplicateId(_) => "duplicate-id",
            TreeViolation::UnknownEndpoint(_) => "unknown-endpoint",
            TreeViolation::SelfLoop(_) => "self-loop",
            TreeViolation::LeafValence { .. } => "leaf-valence",
            TreeViolation::Stability { .. } => "stability",
            TreeViolation::Disconnected => "disconnected",
            TreeViolation::Cycle => "cycle",
        }
    }
}

/// A finite tree whose leaves are the marked labels.
#[derive(Clone, PartialEq, Eq)]
pub struct MarkedTree {
    leaves: BTreeSet<Label>,
    internal: BTreeSet<usize>,
    adj: BTreeMap<Node, BTreeSet<Node>>,
    violations: Vec<TreeViolation>,
}

impl MarkedTree {
    /// Builds the graph without checking it; see [`validate_tree`].
    pub fn unchecked(
        leaves: impl IntoIterator<Item = Label>,
        internal: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (Node, Node)>,
    ) -> Self {
        let mut violations = Vec::new();
        let leaves: BTreeSet<Label> = leaves.into_iter().collect();
        let mut ids = BTreeSet::new();
        for id in internal {
            if !ids.insert(id) {
                violations.push(TreeViolation::DuplicateId(id));
            }
        }
        let mut adj: BTreeMap<Node, BTreeSet<Node>> = leaves
            .iter()
            .map(|l| Node::Leaf(l.clone()))
            .chain(ids.iter().map(|&i| Node::Internal(i)))
            .map(|n| (n, BTreeSet::new()))
            .collect();
        for (a, b) in edges {
            for n in [&a, &b] {
                if !adj.contains_key(n) {
                    violations.push(TreeViolation::UnknownEndpoint(n.clone()));
                }
            }
            if a == b {
                violations.push(TreeViolation::SelfLoop(a));
                continue;
            }
            if !adj.contains_key(&a) || !adj.contains_key(&b) {
                continue;
            }
            adj.get_mut(&a).unwrap().insert(b.clone());
            adj.get_mut(&b).unwrap().insert(a);
        }
        Self {
            leaves,
            internal: ids,
            adj,
            violations,
        }
    }

    /// Builds and validates.
    pub fn new(
        leaves: impl IntoIterator<Item = Label>,
        internal: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (Node, Node)>,
    ) -> Result<Self, TreeError> {
        let t = Self::unchecked(leaves, internal, edges);
        let v = validate_tree(&t);
        if v.is_empty() {
            Ok(t)
        } else {
            Err(TreeError::Invalid(v))
        }
    }

    /// Star tree: one internal vertex (id 0) joined to every label.
    pub fn star(labels: impl IntoIterator<Item = Label>) -> Result<Self, TreeError> {
        let leaves: Vec<Label> = labels.into_iter().collect();
        let edges: Vec<(Node, Node)> = leaves
            .iter()
            .map(|l| (Node::Internal(0), Node::Leaf(l.clone())))
            .collect();
        Self::new(leaves, [0], edges)
    }

    pub fn leaves(&self) -> &BTreeSet<Label> {
        &self.leaves
    }

    pub fn internal(&self) -> &BTreeSet<usize> {
        &self.internal
    }

    pub fn vertices(&self) -> impl Iterator<Item = &Node> {
        self.adj.keys()
    }

    pub fn contains(&self, n: &Node) -> bool {
        self.adj.contains_key(n)
    }

    pub fn neighbors(&self, n: &Node) -> Result<&BTreeSet<Node>, TreeError> {
        self.adj.get(n).ok_or_else(|| TreeError::UnknownVertex(n.clone()))
    }

    /// Neighbours of an internal vertex.
    pub fn edges_at(&self, v: usize) -> &BTreeSet<Node> {
        self.adj
            .get(&Node::Internal(v))
            .unwrap_or_else(|| panic!("#{v} is not an internal vertex"))
    }

    /// Edges as ordered pairs `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(Node, Node)> {
        let mut out = Vec::new();
        for (a, nbrs) in &self.adj {
            for b in nbrs {
                if a < b {
                    out.push((a.clone(), b.clone()));
                }
            }
        }
        out
    }

    pub fn internal_neighbors(&self, v: usize) -> Vec<usize> {
        self.edges_at(v).iter().filter_map(Node::as_internal).collect()
    }

    /// The internal vertex a leaf hangs from.
    pub fn leaf_parent(&self, x: &str) -> Option<usize> {
        self.adj
            .get(&Node::leaf(x))?
            .iter()
            .next()
            .and_then(Node::as_internal)
    }

    /// Leaves reached from `v` through the edge toward `toward`.
    pub fn branch(&self, v: &Node, toward: &Node) -> Result<Block, TreeError> {
        if !self.neighbors(v)?.contains(toward) {
            return Err(TreeError::InvalidIncidence {
                vertex: v.clone(),
                edge: toward.clone(),
            });
        }
        let mut out = Block::new();
        let mut stack = vec![(toward.clone(), v.clone())];
        while let Some((n, from)) = stack.pop() {
            if let Node::Leaf(l) = &n {
                out.insert(l.clone());
            }
            for m in &self.adj[&n] {
                if *m != from {
                    stack.push((m.clone(), n.clone()));
                }
            }
        }
        Ok(out)
    }

    /// For an internal vertex, the neighbour through which each leaf is reached.
    pub fn directions(&self, v: usize) -> BTreeMap<Label, Node> {
        let vn = Node::Internal(v);
        let mut out = BTreeMap::new();
        for e in self.edges_at(v) {
            for x in self.branch(&vn, e).expect("neighbour") {
                out.insert(x, e.clone());
            }
        }
        out
    }

    /// The blocks `B_v(e) ∩ X` over the edges at `v`.
    pub fn partition_at(&self, v: usize) -> Partition {
        let vn = Node::Internal(v);
        Partition {
            blocks: self
                .edges_at(v)
                .iter()
                .map(|e| self.branch(&vn, e).expect("neighbour"))
                .collect(),
        }
    }

    /// The map ψ.
    pub fn tree_partitions(&self) -> PartitionSet {
        self.internal.iter().map(|&v| self.partition_at(v)).collect()
    }

    /// The unique internal vertex at which the three labels lie in three
    /// distinct branches.
    pub fn separating_vertex(&self, x0: &str, x1: &str, x2: &str) -> Result<usize, TreeError> {
        let bad = || TreeError::BadTriple(vec![x0.into(), x1.into(), x2.into()]);
        if x0 == x1 || x1 == x2 || x0 == x2 {
            return Err(bad());
        }
        for x in [x0, x1, x2] {
            if !self.leaves.contains(x) {
                return Err(bad());
            }
        }
        // Walk from the parent of x0 toward x1 and x2; the separating vertex
        // is where the paths to x1 and x2 diverge.
        let p1 = self.path(&Node::leaf(x0), &Node::leaf(x1))?;
        let p2 = self.path(&Node::leaf(x0), &Node::leaf(x2))?;
        let common = p1.iter().zip(&p2).take_while(|(a, b)| a == b).count();
        p1[common - 1].as_internal().ok_or_else(bad)
    }

    /// Vertices on the path from `a` to `b`, both included.
    pub fn path(&self, a: &Node, b: &Node) -> Result<Vec<Node>, TreeError> {
        self.neighbors(a)?;
        self.neighbors(b)?;
        let mut prev: BTreeMap<Node, Node> = BTreeMap::new();
        let mut queue = VecDeque::from([a.clone()]);
        let mut seen = BTreeSet::from([a.clone()]);
        while let Some(n) = queue.pop_front() {
            if n == *b {
                break;
            }
            for m in &self.adj[&n] {
                if seen.insert(m.clone()) {
                    prev.insert(m.clone(), n.clone());
                    queue.push_back(m.clone());
                }
            }
        }
        let mut out = vec![b.clone()];
        let mut cur = b.clone();
        while cur != *a {
            cur = prev.get(&cur).cloned().ok_or(TreeError::Invalid(vec![TreeViolation::Disconnected]))?;
            out.push(cur.clone());
        }
        out.reverse();
        Ok(out)
    }

    /// An internal vertex adjacent to exactly one other internal vertex,
    /// smallest id first.
    pub fn peripheral_internal(&self) -> Result<usize, TreeError> {
        if self.internal.len() < 2 {
            return Err(TreeError::SingleVertexTree);
        }
        self.internal
            .iter()
            .copied()
            .find(|&v| self.internal_neighbors(v).len() == 1)
            .ok_or(TreeError::SingleVertexTree)
    }

    /// The smallest subtree containing every vertex of `vs`.
    pub fn convex_hull(&self, vs: &BTreeSet<Node>) -> Result<BTreeSet<Node>, TreeError> {
        let first = vs.iter().next().ok_or(TreeError::EmptySet)?;
        let mut out = BTreeSet::new();
        for v in vs {
            out.extend(self.path(first, v)?);
        }
        Ok(out)
    }

    /// Copy with internal ids renamed by `f`.
    pub fn relabel_internal(&self, f: impl Fn(usize) -> usize) -> Self {
        let g = |n: &Node| match n {
            Node::Internal(i) => Node::Internal(f(*i)),
            leaf => leaf.clone(),
        };
        Self::unchecked(
            self.leaves.iter().cloned(),
            self.internal.iter().map(|&i| f(i)),
            self.edges().iter().map(|(a, b)| (g(a), g(b))),
        )
    }
}

impl fmt::Debug for MarkedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MarkedTree")
            .field("leaves", &self.leaves)
            .field("edges", &self.edges())
            .finish()
    }
}

/// All violated stability/tree conditions; empty when the tree is valid.
pub fn validate_tree(t: &MarkedTree) -> Vec<TreeViolation> {
    let mut out = t.violations.clone();
    if t.leaves.len() < 3 {
        out.push(TreeViolation::TooFewLeaves(t.leaves.len()));
    }
    for l in &t.leaves {
        if l.starts_with('#') {
            out.push(TreeViolation::ReservedLabel(l.clone()));
        }
        let valence = t.adj[&Node::Leaf(l.clone())].len();
        if valence != 1 {
            out.push(TreeViolation::LeafValence {
                leaf: l.clone(),
                valence,
            });
        }
    }
    for &v in &t.internal {
        let valence = t.adj[&Node::Internal(v)].len();
        if valence < 3 {
            out.push(TreeViolation::Stability { vertex: v, valence });
        }
    }
    let edges: usize = t.adj.values().map(BTreeSet::len).sum::<usize>() / 2;
    if let Some(start) = t.adj.keys().next() {
        let mut seen = BTreeSet::from([start.clone()]);
        let mut stack = vec![start.clone()];
        while let Some(n) = stack.pop() {
            for m in &t.adj[&n] {
                if seen.insert(m.clone()) {
                    stack.push(m.clone());
                }
            }
        }
        if seen.len() < t.adj.len() {
            out.push(TreeViolation::Disconnected);
        } else if edges >= t.adj.len() {
            out.push(TreeViolation::Cycle);
        }
    }
    out
}

/// A partition of the marked set into nonempty disjoint blocks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    blocks: BTreeSet<Block>,
}

impl Partition {
    pub fn new(blocks: impl IntoIterator<Item = Block>) -> Result<Self, TreeError> {
        let blocks: BTreeSet<Block> = blocks.into_iter().collect();
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if b.is_empty() {
                return Err(TreeError::InvalidPartition("empty block".into()));
            }
            for x in b {
                if !seen.insert(x) {
                    return Err(TreeError::InvalidPartition(format!("{x} lies in two blocks")));
                }
            }
        }
        Ok(Self { blocks })
    }

    /// Convenience constructor from string slices.
    pub fn of(blocks: &[&[&str]]) -> Result<Self, TreeError> {
        Self::new(
            blocks
                .iter()
                .map(|b| b.iter().map(|s| s.to_string()).collect()),
        )
    }

    pub fn blocks(&self) -> &BTreeSet<Block> {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn ground(&self) -> Block {
        self.blocks.iter().flatten().cloned().collect()
    }

    pub fn block_of(&self, x: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.contains(x))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(&self.blocks).finish()
    }
}

pub type PartitionSet = BTreeSet<Partition>;

/// The first failed admissibility condition, with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AdmissibilityViolation {
    /// No partition at all, or partitions of different sets.
    GroundSet,
    /// Condition 1: fewer than three blocks.
    TooFewBlocks { partition: Partition },
    /// Condition 2: a non-singleton block whose complement is nobody's block.
    MissingComplement { partition: Partition, block: Block },
    /// Condition 3: two distinct partitions share a block.
    SharedBlock {
        first: Partition,
        second: Partition,
        block: Block,
    },
}

impl AdmissibilityViolation {
    /// 1, 2 or 3 for the numbered conditions, 0 for a malformed input.
    pub fn condition(&self) -> u8 {
        match self {
            AdmissibilityViolation::GroundSet => 0,
            AdmissibilityViolation::TooFewBlocks { .. } => 1,
            AdmissibilityViolation::MissingComplement { .. } => 2,
            AdmissibilityViolation::SharedBlock { .. } => 3,
        }
    }
}

impl fmt::Display for AdmissibilityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdmissibilityViolation::GroundSet => {
                write!(f, "partitions are missing or cover different sets")
            }
            AdmissibilityViolation::TooFewBlocks { partition } => {
                write!(f, "condition 1: {partition:?} has fewer than three blocks")
            }
            AdmissibilityViolation::MissingComplement { partition, block } => write!(
                f,
                "condition 2: no partition contains the complement of {block:?} from {partition:?}"
            ),
            AdmissibilityViolation::SharedBlock { first, second, block } => write!(
                f,
                "condition 3: {first:?} and {second:?} share the block {block:?}"
            ),
        }
    }
}

/// Checks the three admissibility conditions in order.
pub fn is_admissible(ps: &PartitionSet) -> Result<(), AdmissibilityViolation> {
    let ground = ps
        .iter()
        .next()
        .ok_or(AdmissibilityViolation::GroundSet)?
        .ground();
    if ps.iter().any(|p| p.ground() != ground) {
        return Err(AdmissibilityViolation::GroundSet);
    }
    if let Some(p) = ps.iter().find(|p| p.len() < 3) {
        return Err(AdmissibilityViolation::TooFewBlocks {
            partition: p.clone(),
        });
    }
    let all_blocks: BTreeSet<&Block> = ps.iter().flat_map(|p| &p.blocks).collect();
    for p in ps {
        for b in &p.blocks {
            if b.len() == 1 {
                continue;
            }
            let complement: Block = ground.difference(b).cloned().collect();
            if !all_blocks.contains(&complement) {
                return Err(AdmissibilityViolation::MissingComplement {
                    partition: p.clone(),
                    block: b.clone(),
                });
            }
        }
    }
    for (i, p1) in ps.iter().enumerate() {
        for p2 in ps.iter().skip(i + 1) {
            if let Some(b) = p1.blocks.intersection(&p2.blocks).next() {
                return Err(AdmissibilityViolation::SharedBlock {
                    first: p1.clone(),
                    second: p2.clone(),
                    block: b.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Inverse of ψ. Internal ids follow the order of the partitions, so equal
/// partition sets give identical trees.
pub fn tree_from_partitions(ps: &PartitionSet) -> Result<MarkedTree, TreeError> {
    is_admissible(ps).map_err(TreeError::NotAdmissible)?;
    let parts: Vec<&Partition> = ps.iter().collect();
    let ground = parts[0].ground();
    let mut owner: BTreeMap<&Block, usize> = BTreeMap::new();
    for (i, p) in parts.iter().enumerate() {
        for b in &p.blocks {
            owner.insert(b, i);
        }
    }
    let mut edges = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        for b in &p.blocks {
            if b.len() == 1 {
                let x = b.iter().next().unwrap();
                edges.push((Node::Internal(i), Node::Leaf(x.clone())));
            }
            let complement: Block = ground.difference(b).cloned().collect();
            if let Some(&j) = owner.get(&complement) {
                if i < j {
                    edges.push((Node::Internal(i), Node::Internal(j)));
                }
            }
        }
    }
    MarkedTree::new(ground, 0..parts.len(), edges)
}

/// Isomorphism of marked trees, decided by comparing partition sets.
pub fn trees_isomorphic(t1: &MarkedTree, t2: &MarkedTree) -> Result<bool, TreeError> {
    if t1.leaves != t2.leaves {
        return Err(TreeError::LeafSetMismatch);
    }
    Ok(t1.tree_partitions() == t2.tree_partitions())
}
