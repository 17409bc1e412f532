#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sphere_trees::arith::{GaussianRational as GR, LaurentPoint, LaurentPoly, Moebius, ProjPoint, RationalMap};
use sphere_trees::covers::{MarkedSphereCover, Portrait, TreeCover};
use sphere_trees::limits::{CoverFamily, LaurentFamily, NumPoint};
use sphere_trees::moduli::{MarkedSphere, TreeOfSpheres};
use sphere_trees::trees::{Label, MarkedTree, Node};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

pub fn labels(xs: &[&str]) -> BTreeSet<Label> {
    xs.iter().map(|s| s.to_string()).collect()
}

pub fn gr(re: i64, im: i64) -> GR {
    GR::from_parts(re, 1, im, 1)
}

pub fn pt(z: GR) -> ProjPoint {
    ProjPoint::finite(z)
}

pub fn q(n: i64, d: i64) -> ProjPoint {
    ProjPoint::finite(GR::from_ratio(n, d))
}

// Stable tree shapes

/// Every stable tree on `x1..xn`, one per isomorphism class of marked trees.
pub fn stable_shapes(n: usize) -> Vec<MarkedTree> {
    assert!(n >= 3);
    let name = |i: usize| format!("x{i}");
    let star = MarkedTree::star((1..=3).map(name)).unwrap();
    let mut level = vec![star];
    for k in 4..=n {
        let x = Node::Leaf(name(k));
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for t in &level {
            let leaves: Vec<Label> = t.leaves().iter().cloned().chain([name(k)]).collect();
            let fresh = t.internal().iter().max().unwrap() + 1;
            let mut candidates = Vec::new();
            for &v in t.internal() {
                let mut edges = t.edges();
                edges.push((Node::Internal(v), x.clone()));
                candidates.push((t.internal().iter().copied().collect::<Vec<_>>(), edges));
            }
            for (i, (a, b)) in t.edges().into_iter().enumerate() {
                let mut edges = t.edges();
                edges.remove(i);
                let m = Node::Internal(fresh);
                edges.extend([(a, m.clone()), (m.clone(), b), (m, x.clone())]);
                let ids = t.internal().iter().copied().chain([fresh]).collect();
                candidates.push((ids, edges));
            }
            for (ids, edges) in candidates {
                let s = MarkedTree::new(leaves.clone(), ids, edges).unwrap();
                if seen.insert(s.tree_partitions()) {
                    next.push(s);
                }
            }
        }
        level = next;
    }
    level
}

// Random trees of spheres

pub fn random_scalar(r: &mut ChaCha8Rng) -> GR {
    GR::from_parts(r.gen_range(-3..=3), r.gen_range(1..=3), r.gen_range(-2..=2), r.gen_range(1..=2))
}

pub fn random_point(r: &mut ChaCha8Rng) -> ProjPoint {
    if r.gen_ratio(1, 6) {
        ProjPoint::infinity()
    } else {
        ProjPoint::finite(random_scalar(r))
    }
}

pub fn random_moebius(r: &mut ChaCha8Rng) -> Moebius {
    loop {
        let (a, b, c, d) = (random_scalar(r), random_scalar(r), random_scalar(r), random_scalar(r));
        if let Ok(m) = Moebius::new(a, b, c, d) {
            return m;
        }
    }
}

/// A random stable shape on `n` labels, grown by random leaf insertions.
pub fn random_shape(r: &mut ChaCha8Rng, n: usize) -> MarkedTree {
    let name = |i: usize| format!("x{i}");
    let mut t = MarkedTree::star((1..=3).map(name)).unwrap();
    for k in 4..=n {
        let x = Node::Leaf(name(k));
        let leaves: Vec<Label> = t.leaves().iter().cloned().chain([name(k)]).collect();
        let ids: Vec<usize> = t.internal().iter().copied().collect();
        let mut edges = t.edges();
        if r.gen_bool(0.5) {
            let v = *ids.choose(r).unwrap();
            edges.push((Node::Internal(v), x));
            t = MarkedTree::new(leaves, ids, edges).unwrap();
        } else {
            let i = r.gen_range(0..edges.len());
            let (a, b) = edges.remove(i);
            let m = Node::Internal(ids.iter().max().unwrap() + 1);
            edges.extend([(a, m.clone()), (m.clone(), b), (m.clone(), x)]);
            let ids = ids.into_iter().chain(m.as_internal());
            t = MarkedTree::new(leaves, ids, edges).unwrap();
        }
    }
    t
}

/// Random injective markings of the edges at every vertex of `shape`.
pub fn random_marking(r: &mut ChaCha8Rng, shape: &MarkedTree) -> TreeOfSpheres {
    let mut marking = BTreeMap::new();
    for &v in shape.internal() {
        let mut used = BTreeSet::new();
        let mut iv = BTreeMap::new();
        for e in shape.edges_at(v) {
            let p = loop {
                let p = random_point(r);
                if used.insert(p.clone()) {
                    break p;
                }
            };
            iv.insert(e.clone(), p);
        }
        marking.insert(v, iv);
    }
    TreeOfSpheres::new(shape.clone(), marking).unwrap()
}

pub fn random_spheres(r: &mut ChaCha8Rng) -> TreeOfSpheres {
    let n = r.gen_range(3..=6);
    let shape = random_shape(r, n);
    random_marking(r, &shape)
}

/// The same class as `t`: random chart changes and a shuffle of vertex ids.
pub fn random_isomorph(r: &mut ChaCha8Rng, t: &TreeOfSpheres) -> TreeOfSpheres {
    let maps: BTreeMap<usize, Moebius> = t.shape().internal().iter().map(|&v| (v, random_moebius(r))).collect();
    let ids: Vec<usize> = t.shape().internal().iter().copied().collect();
    let mut shuffled: Vec<usize> = ids.iter().map(|v| v + 10).collect();
    shuffled.shuffle(r);
    let perm: BTreeMap<usize, usize> = ids.into_iter().zip(shuffled).collect();
    let perm = &perm;
    t.transform(&maps).relabel_internal(move |v| perm[&v])
}

// Numeric samples

pub fn to_num(p: &ProjPoint) -> NumPoint {
    match p.affine() {
        None => NumPoint::Infinity,
        Some(z) => {
            let (re, im) = z.to_f64_pair();
            NumPoint::Finite(Complex64::new(re, im))
        }
    }
}

// Cover corpus

fn sphere(pts: &[(&str, ProjPoint)]) -> MarkedSphere {
    MarkedSphere::new(pts.iter().map(|(l, p)| (l.to_string(), p.clone())).collect()).unwrap()
}

fn single(f: RationalMap, y: &[(&str, ProjPoint)], z: &[(&str, ProjPoint)]) -> TreeCover {
    let (y, z) = (sphere(y), sphere(z));
    let p = Portrait::of_map(&f, &y, &z).unwrap();
    MarkedSphereCover::new(f, y, z, p).unwrap().as_tree_cover()
}

fn ratmap(num: &[GR], den: &[GR]) -> RationalMap {
    use sphere_trees::arith::Polynomial;
    RationalMap::new(Polynomial::new(num.to_vec()), Polynomial::new(den.to_vec())).unwrap()
}

fn int(n: i64) -> GR {
    GR::from_int(n)
}

/// `z²(3 − 2z)`: critical values 0, 1, ∞, all fibers rational.
pub fn belyi3() -> RationalMap {
    ratmap(&[int(0), int(0), int(3), int(-2)], &[int(1)])
}

/// Single-sphere covers with rational fibers.
pub fn base_covers() -> Vec<(String, TreeCover)> {
    let inf = ProjPoint::infinity;
    vec![
        (
            "square".into(),
            single(
                RationalMap::power(2),
                &[("y0", ProjPoint::zero()), ("yinf", inf()), ("y1", ProjPoint::one()), ("ym1", q(-1, 1))],
                &[("z0", ProjPoint::zero()), ("zinf", inf()), ("z1", ProjPoint::one())],
            ),
        ),
        (
            "square-i".into(),
            single(
                RationalMap::power(2),
                &[
                    ("y0", ProjPoint::zero()),
                    ("yinf", inf()),
                    ("y1", ProjPoint::one()),
                    ("ym1", q(-1, 1)),
                    ("yi", pt(gr(0, 1))),
                    ("ymi", pt(gr(0, -1))),
                ],
                &[("z0", ProjPoint::zero()), ("zinf", inf()), ("z1", ProjPoint::one()), ("zm1", q(-1, 1))],
            ),
        ),
        (
            "square-4".into(),
            single(
                RationalMap::power(2),
                &[
                    ("y0", ProjPoint::zero()),
                    ("yinf", inf()),
                    ("y1", ProjPoint::one()),
                    ("ym1", q(-1, 1)),
                    ("y2", q(2, 1)),
                    ("ym2", q(-2, 1)),
                ],
                &[("z0", ProjPoint::zero()), ("zinf", inf()), ("z1", ProjPoint::one()), ("z4", q(4, 1))],
            ),
        ),
        (
            "belyi3".into(),
            single(
                belyi3(),
                &[
                    ("y0", ProjPoint::zero()),
                    ("y32", q(3, 2)),
                    ("y1", ProjPoint::one()),
                    ("ymh", q(-1, 2)),
                    ("yinf", inf()),
                ],
                &[("z0", ProjPoint::zero()), ("z1", ProjPoint::one()), ("zinf", inf())],
            ),
        ),
        (
            "chebyshev3".into(),
            single(
                ratmap(&[int(0), int(-3), int(0), int(4)], &[int(1)]),
                &[
                    ("yinf", inf()),
                    ("y1", ProjPoint::one()),
                    ("ymh", q(-1, 2)),
                    ("ym1", q(-1, 1)),
                    ("yh", q(1, 2)),
                ],
                &[("zinf", inf()), ("z1", ProjPoint::one()), ("zm1", q(-1, 1))],
            ),
        ),
        (
            "joukowski".into(),
            single(
                ratmap(&[int(1), int(0), int(1)], &[int(0), int(2)]),
                &[("y1", ProjPoint::one()), ("ym1", q(-1, 1)), ("y0", ProjPoint::zero()), ("yinf", inf())],
                &[("z1", ProjPoint::one()), ("zm1", q(-1, 1)), ("zinf", inf())],
            ),
        ),
    ]
}

fn fresh_label(taken: &BTreeSet<Label>, stem: &str) -> Label {
    (0..)
        .map(|i| format!("{stem}{i}"))
        .find(|l| !taken.contains(l))
        .unwrap()
}

/// The local model over a new target sphere (parent at ∞, old leaf at 0,
/// new leaf at 1) for an edge of degree `k`: the map and the fibers of 0
/// and 1 with local degrees.
fn graft_model(k: usize) -> (RationalMap, Vec<(ProjPoint, usize)>, Vec<(ProjPoint, usize)>) {
    match k {
        1 => (RationalMap::identity(), vec![(ProjPoint::zero(), 1)], vec![(ProjPoint::one(), 1)]),
        2 => (
            RationalMap::power(2),
            vec![(ProjPoint::zero(), 2)],
            vec![(ProjPoint::one(), 1), (q(-1, 1), 1)],
        ),
        3 => (
            belyi3(),
            vec![(ProjPoint::zero(), 2), (q(3, 2), 1)],
            vec![(ProjPoint::one(), 2), (q(-1, 2), 1)],
        ),
        _ => panic!("no model of degree {k}"),
    }
}

fn tree_with(
    t: &TreeOfSpheres,
    edges: Vec<(Node, Node)>,
    extra_leaves: &[Label],
    new_vertex: usize,
    marking: BTreeMap<usize, BTreeMap<Node, ProjPoint>>,
) -> TreeOfSpheres {
    let leaves: Vec<Label> = t.labels().iter().chain(extra_leaves).cloned().collect();
    let ids = t.shape().internal().iter().copied().chain([new_vertex]);
    let shape = MarkedTree::new(leaves, ids, edges).unwrap();
    TreeOfSpheres::new(shape, marking).unwrap()
}

fn replace_edge(edges: Vec<(Node, Node)>, old: &Node, v: usize, new: &Node) -> Vec<(Node, Node)> {
    edges
        .into_iter()
        .map(|(a, b)| {
            if (&a, &b) == (&Node::Internal(v), old) || (&b, &a) == (&Node::Internal(v), old) {
                (Node::Internal(v), new.clone())
            } else {
                (a, b)
            }
        })
        .collect()
}

/// Replaces the target leaf `b` by a new sphere carrying `b` and a new leaf,
/// and every source leaf over `b` by a sphere carrying the local model.
pub fn graft(c: &TreeCover, b: &str) -> TreeCover {
    let tz = &c.target;
    let bn = Node::leaf(b);
    let wp = tz.shape().leaf_parent(b).unwrap();
    let w = tz.shape().internal().iter().max().unwrap() + 1;
    let cz = fresh_label(tz.labels(), &format!("{b}_"));

    let mut edges = replace_edge(tz.shape().edges(), &bn, wp, &Node::Internal(w));
    edges.extend([(Node::Internal(w), bn.clone()), (Node::Internal(w), Node::leaf(&cz))]);
    let mut marking = tz.marking().clone();
    let pb = marking.get_mut(&wp).unwrap().remove(&bn).unwrap();
    marking.get_mut(&wp).unwrap().insert(Node::Internal(w), pb);
    marking.insert(
        w,
        BTreeMap::from([
            (Node::Internal(wp), ProjPoint::infinity()),
            (bn.clone(), ProjPoint::zero()),
            (Node::leaf(&cz), ProjPoint::one()),
        ]),
    );
    let target = tree_with(tz, edges, std::slice::from_ref(&cz), w, marking);

    let mut source = c.source.clone();
    let mut vertex_map = c.vertex_map.clone();
    let mut maps = c.maps.clone();
    let fiber: Vec<Label> = c
        .vertex_map
        .iter()
        .filter(|(_, img)| **img == bn)
        .filter_map(|(a, _)| a.as_leaf().map(String::from))
        .collect();
    for a in fiber {
        let an = Node::leaf(&a);
        let vp = source.shape().leaf_parent(&a).unwrap();
        let k = c.edge_degree(vp, &an);
        let u = source.shape().internal().iter().max().unwrap() + 1;
        let (g, over_b, over_c) = graft_model(k);
        let mut taken = source.labels().clone();
        let mut new_leaves = Vec::new();
        let mut iv = BTreeMap::from([(Node::Internal(vp), ProjPoint::infinity())]);
        let mut edges = replace_edge(source.shape().edges(), &an, vp, &Node::Internal(u));
        for (i, (p, _)) in over_b.iter().enumerate() {
            let l = if i == 0 { a.clone() } else { fresh_label(&taken, &format!("{a}_b")) };
            taken.insert(l.clone());
            if i > 0 {
                new_leaves.push(l.clone());
            }
            vertex_map.insert(Node::leaf(&l), bn.clone());
            edges.push((Node::Internal(u), Node::leaf(&l)));
            iv.insert(Node::leaf(&l), p.clone());
        }
        for (p, _) in &over_c {
            let l = fresh_label(&taken, &format!("{a}_c"));
            taken.insert(l.clone());
            new_leaves.push(l.clone());
            vertex_map.insert(Node::leaf(&l), Node::leaf(&cz));
            edges.push((Node::Internal(u), Node::leaf(&l)));
            iv.insert(Node::leaf(&l), p.clone());
        }
        let mut marking = source.marking().clone();
        let pa = marking.get_mut(&vp).unwrap().remove(&an).unwrap();
        marking.get_mut(&vp).unwrap().insert(Node::Internal(u), pa);
        marking.insert(u, iv);
        source = tree_with(&source, edges, &new_leaves, u, marking);
        vertex_map.insert(Node::Internal(u), Node::Internal(w));
        maps.insert(u, g);
    }
    TreeCover {
        source,
        target,
        vertex_map,
        maps,
    }
}

fn family(pts: Vec<(&str, LaurentPoint)>) -> LaurentFamily {
    LaurentFamily::new(pts.into_iter().map(|(l, p)| (l.to_string(), p)).collect()).unwrap()
}

fn lconst(p: ProjPoint) -> LaurentPoint {
    LaurentPoint::constant(&p)
}

fn lmono(c: i64, k: i32) -> LaurentPoint {
    LaurentPoint::affine(LaurentPoly::monomial(GR::from_int(c), k))
}

/// `z²` with `±ε` over `ε²`: the source limit has two spheres.
pub fn degenerating_square_family() -> CoverFamily {
    let y = family(vec![
        ("a0", lconst(ProjPoint::zero())),
        ("a1", lconst(ProjPoint::one())),
        ("ai", lconst(ProjPoint::infinity())),
        ("am", lconst(q(-1, 1))),
        ("ae", lmono(1, 1)),
        ("ame", lmono(-1, 1)),
    ]);
    let z = family(vec![
        ("b0", lconst(ProjPoint::zero())),
        ("b1", lconst(ProjPoint::one())),
        ("bi", lconst(ProjPoint::infinity())),
        ("be", lmono(1, 2)),
    ]);
    cover_family(y, z, &RationalMap::power(2))
}

/// `z²` with `±ε`, `±1/ε`: three source spheres.
pub fn two_sided_square_family() -> CoverFamily {
    let y = family(vec![
        ("a0", lconst(ProjPoint::zero())),
        ("a1", lconst(ProjPoint::one())),
        ("ai", lconst(ProjPoint::infinity())),
        ("am", lconst(q(-1, 1))),
        ("ae", lmono(1, 1)),
        ("ame", lmono(-1, 1)),
        ("af", lmono(1, -1)),
        ("amf", lmono(-1, -1)),
    ]);
    let z = family(vec![
        ("b0", lconst(ProjPoint::zero())),
        ("b1", lconst(ProjPoint::one())),
        ("bi", lconst(ProjPoint::infinity())),
        ("be", lmono(1, 2)),
        ("bf", lmono(1, -2)),
    ]);
    cover_family(y, z, &RationalMap::power(2))
}

/// The constant map `f` with the portrait read off at a generic parameter.
pub fn cover_family(y: LaurentFamily, z: LaurentFamily, f: &RationalMap) -> CoverFamily {
    use sphere_trees::arith::MapFamily;
    let at = GR::from_ratio(1, 5);
    let sample = |fam: &LaurentFamily| {
        MarkedSphere::new(fam.paths().iter().map(|(l, p)| (l.clone(), p.eval(&at).unwrap())).collect()).unwrap()
    };
    let portrait = Portrait::of_map(f, &sample(&y), &sample(&z)).unwrap();
    CoverFamily::new(portrait, y, z, MapFamily::constant_in_eps(f)).unwrap()
}

/// Hand-built covers of degree 2 and 3 with one to three source spheres.
pub fn cover_corpus() -> Vec<(String, TreeCover)> {
    let mut out = Vec::new();
    for (name, c) in base_covers() {
        let n = c.source.shape().internal().len();
        let zs: Vec<Label> = c.target.labels().iter().cloned().collect();
        out.push((name.clone(), c.clone()));
        for b in &zs {
            let g = graft(&c, b);
            if g.source.shape().internal().len() <= 3 {
                out.push((format!("{name}+{b}"), g.clone()));
                for b2 in &zs {
                    if b2 > b {
                        let gg = graft(&g, b2);
                        if gg.source.shape().internal().len() <= 3 {
                            out.push((format!("{name}+{b}+{b2}"), gg));
                        }
                    }
                }
            }
        }
        assert_eq!(n, 1);
    }
    for (name, fam) in [
        ("limit-square", degenerating_square_family()),
        ("limit-two-sided", two_sided_square_family()),
    ] {
        out.push((name.into(), sphere_trees::limits::limit_cover(&fam).unwrap()));
    }
    out
}

/// Renames target leaves.
pub fn rename_target(c: &TreeCover, names: &BTreeMap<Label, Label>) -> TreeCover {
    let ren = |n: &Node| match n {
        Node::Leaf(l) => Node::Leaf(names.get(l).cloned().unwrap_or_else(|| l.clone())),
        other => other.clone(),
    };
    let t = &c.target;
    let shape = MarkedTree::new(
        t.labels().iter().map(|l| names.get(l).cloned().unwrap_or_else(|| l.clone())),
        t.shape().internal().iter().copied(),
        t.shape().edges().iter().map(|(a, b)| (ren(a), ren(b))),
    )
    .unwrap();
    let marking = t
        .marking()
        .iter()
        .map(|(v, iv)| (*v, iv.iter().map(|(e, p)| (ren(e), p.clone())).collect()))
        .collect();
    TreeCover {
        source: c.source.clone(),
        target: TreeOfSpheres::new(shape, marking).unwrap(),
        vertex_map: c.vertex_map.iter().map(|(a, b)| (a.clone(), ren(b))).collect(),
        maps: c.maps.clone(),
    }
}
