//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;

use sphere_trees::arith::{
    GaussianRational as GR, Homogeneous, LaurentPoint, LaurentPoly, MapFamily, Polynomial, ProjPoint,
    RationalMap,
};
use sphere_trees::covers::{cover_iso, reconstruct_cover, validate_cover, validate_portrait, Portrait, TreeCover};
use sphere_trees::dynamics::{dyn_membership, validate_dyn, DynSystem};
use sphere_trees::limits::{
    limit_cover, limit_tree, numeric_limit_tree, CoverFamily, LaurentFamily, NumericConfigSequence,
};
use sphere_trees::moduli::{spheres_iso, TreeOfSpheres};
use sphere_trees::plumbing::{plumb_family, sample_family};
use sphere_trees::trees::{
    is_admissible, tree_from_partitions, trees_isomorphic, Label, MarkedTree, Node, Partition, PartitionSet,
    TreeError,
};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn corpus_trees() -> Vec<TreeOfSpheres> {
    let mut r = common::rng(2024);
    (0..500).map(|_| common::random_spheres(&mut r)).collect()
}

// 1

/// Isomorphism by brute force over bijections of internal ids.
fn same_graph(t1: &MarkedTree, t2: &MarkedTree) -> bool {
    fn perms(v: &[usize]) -> Vec<Vec<usize>> {
        if v.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for i in 0..v.len() {
            let mut rest = v.to_vec();
            let x = rest.remove(i);
            for mut p in perms(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }
    let canon = |t: &MarkedTree, m: &BTreeMap<usize, usize>| -> BTreeSet<(Node, Node)> {
        let f = |n: &Node| match n {
            Node::Internal(i) => Node::Internal(m[i]),
            l => l.clone(),
        };
        t.edges()
            .iter()
            .map(|(a, b)| {
                let (a, b) = (f(a), f(b));
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    };
    let ids1: Vec<usize> = t1.internal().iter().copied().collect();
    let ids2: Vec<usize> = t2.internal().iter().copied().collect();
    if t1.leaves() != t2.leaves() || ids1.len() != ids2.len() {
        return false;
    }
    let id: BTreeMap<usize, usize> = ids2.iter().map(|&i| (i, i)).collect();
    let target = canon(t2, &id);
    perms(&ids2).into_iter().any(|p| {
        let m: BTreeMap<usize, usize> = ids1.iter().copied().zip(p).collect();
        canon(t1, &m) == target
    })
}

fn criterion1() -> Outcome {
    let mut total = 0;
    for n in 3..=6 {
        for t in common::stable_shapes(n) {
            let ps = t.tree_partitions();
            is_admissible(&ps).map_err(|e| format!("ψ(t) not admissible: {e}"))?;
            let back = tree_from_partitions(&ps).map_err(|e| e.to_string())?;
            check(same_graph(&back, &t), || format!("round trip changed {t:?}"))?;
            check(trees_isomorphic(&back, &t) == Ok(true), || "trees_isomorphic disagrees".into())?;
            total += 1;
        }
    }
    Ok(format!("{total} stable shapes with up to 6 leaves"))
}

// 2

fn partitions(ps: &[&[&[&str]]]) -> PartitionSet {
    ps.iter().map(|p| Partition::of(p).unwrap()).collect()
}

fn criterion2() -> Outcome {
    let cases: [(u8, PartitionSet); 3] = [
        (1, partitions(&[&[&["a", "b"], &["c", "d"]]])),
        (2, partitions(&[&[&["a", "b"], &["c"], &["d"]], &[&["a", "c"], &["b"], &["d"]]])),
        (
            3,
            partitions(&[
                &[&["a", "b"], &["c"], &["d"]],
                &[&["c", "d"], &["a"], &["b"]],
                &[&["a"], &["b"], &["c"], &["d"]],
            ]),
        ),
    ];
    for (k, ps) in &cases {
        let got = is_admissible(ps).err().map(|e| e.condition());
        check(got == Some(*k), || format!("condition {k}: is_admissible gave {got:?}"))?;
        match tree_from_partitions(ps) {
            Err(TreeError::NotAdmissible(e)) if e.condition() == *k => {}
            other => return Err(format!("condition {k}: tree_from_partitions gave {other:?}")),
        }
    }
    Ok("each condition rejected with its index".into())
}

// 3

fn det(a: &ProjPoint, b: &ProjPoint) -> GR {
    &(a.u() * b.v()) - &(a.v() * b.u())
}

/// Cross-ratio sending `p0, p1, pi` to `0, 1, ∞`, evaluated at `z`.
fn cross_ratio_oracle(p0: &ProjPoint, p1: &ProjPoint, pi: &ProjPoint, z: &ProjPoint) -> ProjPoint {
    ProjPoint::new(&det(z, p0) * &det(p1, pi), &det(z, pi) * &det(p1, p0)).unwrap()
}

/// The coordinate of quadruple `q` read directly off the tree.
fn embed_oracle(t: &TreeOfSpheres, q: &[Label; 4]) -> ProjPoint {
    let shape = t.shape();
    for &v in shape.internal() {
        let dirs = shape.directions(v);
        let d: BTreeSet<&Node> = q[..3].iter().map(|x| &dirs[x]).collect();
        if d.len() == 3 {
            let a = |x: &Label| t.edge_marking(v)[&dirs[x]].clone();
            return cross_ratio_oracle(&a(&q[0]), &a(&q[1]), &a(&q[2]), &a(&q[3]));
        }
    }
    panic!("no vertex separates {q:?}")
}

fn criterion3(trees: &[TreeOfSpheres]) -> Outcome {
    let mut r = common::rng(7);
    let (mut iso, mut non) = (0, 0);
    for (i, t) in trees.iter().enumerate() {
        let e = t.embed();
        for (q, v) in e.values() {
            check(embed_oracle(t, q) == *v, || format!("tree {i}: coordinate {q:?}"))?;
        }
        let other = match i % 3 {
            0 => common::random_isomorph(&mut r, t),
            1 => common::random_marking(&mut r, t.shape()),
            _ => {
                let mut o = common::random_spheres(&mut r);
                while o.labels() != t.labels() {
                    o = common::random_spheres(&mut r);
                }
                o
            }
        };
        let same_embed = e == other.embed();
        let is_iso = spheres_iso(t, &other).map_err(|e| e.to_string())?;
        let same_canon = t.canonical() == other.canonical();
        check(same_embed == is_iso && is_iso == same_canon, || {
            format!("tree {i}: embed {same_embed}, iso {is_iso}, canonical {same_canon}")
        })?;
        if i % 3 == 0 {
            check(is_iso, || format!("tree {i}: chart change not recognized"))?;
        }
        if is_iso {
            iso += 1
        } else {
            non += 1
        }
    }
    Ok(format!("{} trees, {iso} isomorphic and {non} distinct pairs", trees.len()))
}

// 4

fn criterion4(trees: &[TreeOfSpheres]) -> Outcome {
    let mut r = common::rng(11);
    for (i, t) in trees.iter().enumerate() {
        let fam = plumb_family(t).map_err(|e| format!("tree {i}: {e}"))?;
        let m = common::random_moebius(&mut r);
        for (what, f) in [
            ("plain", fam.clone()),
            ("ε ↦ ε²", fam.reparameterize(2)),
            ("Moebius", fam.transform(&m)),
        ] {
            let lim = limit_tree(&f).map_err(|e| format!("tree {i} ({what}): {e}"))?;
            check(spheres_iso(&lim, t) == Ok(true), || format!("tree {i} ({what}): limit differs"))?;
        }
    }
    Ok(format!("{} trees, three variants each", trees.len()))
}

// 5

fn criterion5(trees: &[TreeOfSpheres]) -> Outcome {
    let mut checked = 0;
    for (i, t) in trees.iter().enumerate().filter(|(_, t)| t.shape().internal().len() > 1).take(50) {
        let fam = plumb_family(t).map_err(|e| e.to_string())?;
        let exact = limit_tree(&fam).map_err(|e| e.to_string())?;
        let snapshots = (10..=200)
            .map(|n| {
                let s = sample_family(&fam, &GR::from_ratio(1, n)).map_err(|e| format!("tree {i}: {e}"))?;
                Ok(s.points().iter().map(|(l, p)| (l.clone(), common::to_num(p))).collect())
            })
            .collect::<Result<Vec<_>, String>>()?;
        let seq = NumericConfigSequence::new(snapshots, 1e-6, 5).map_err(|e| e.to_string())?;
        let num = numeric_limit_tree(&seq).map_err(|e| format!("tree {i}: {e}"))?;
        check(num.shape.tree_partitions() == exact.shape().tree_partitions(), || {
            format!("tree {i}: numeric clustering differs")
        })?;
        checked += 1;
    }
    check(checked == 50, || format!("only {checked} families"))?;
    Ok("50 families sampled at ε = 1/10 … 1/200".into())
}

// 6

fn criterion6(corpus: &[(String, TreeCover)]) -> Outcome {
    for (name, c) in corpus {
        let r = reconstruct_cover(&c.source, &c.portrait()).map_err(|e| format!("{name}: {e}"))?;
        check(cover_iso(c, &r) == Ok(true), || format!("{name}: reconstruction is not isomorphic"))?;
    }
    let degrees: BTreeSet<usize> = corpus
        .iter()
        .map(|(_, c)| sphere_trees::covers::global_degree(c).unwrap())
        .collect();
    let max_v = corpus.iter().map(|(_, c)| c.source.shape().internal().len()).max().unwrap();
    Ok(format!(
        "{} covers, degrees {degrees:?}, up to {max_v} source spheres",
        corpus.len()
    ))
}

// 7

fn shift_to_zero(f: &RationalMap, p: &ProjPoint) -> (RationalMap, GR) {
    use sphere_trees::arith::Moebius;
    let one = GR::from_int(1);
    let zero = GR::from_int(0);
    let flip = Moebius::new(zero.clone(), one.clone(), one.clone(), zero.clone()).unwrap();
    let (f, p) = match p.affine() {
        Some(a) => (f.clone(), a.clone()),
        None => (f.pre_compose(&flip), zero.clone()),
    };
    let f = if f.eval(&ProjPoint::finite(p.clone())).is_infinity() {
        f.post_compose(&flip)
    } else {
        f
    };
    (f, p)
}

/// Order of vanishing of `f − f(p)` at `p`, by repeated synthetic division.
fn local_degree_oracle(f: &RationalMap, p: &ProjPoint) -> usize {
    let (f, a) = shift_to_zero(f, p);
    let w = f.eval(&ProjPoint::finite(a.clone())).affine().unwrap().clone();
    let mut h: Vec<GR> = (0..=f.num().coeffs().len().max(f.den().coeffs().len()))
        .map(|k| &f.num().coeff(k) - &(&w * &f.den().coeff(k)))
        .collect();
    let mut order = 0;
    loop {
        let mut acc = GR::from_int(0);
        let mut quotient = vec![GR::from_int(0); h.len()];
        for k in (0..h.len()).rev() {
            acc = &(&acc * &a) + &h[k];
            if k > 0 {
                quotient[k - 1] = acc.clone();
            }
        }
        if !acc.is_zero() {
            return order;
        }
        order += 1;
        h = quotient;
    }
}

fn criterion7(corpus: &[(String, TreeCover)]) -> Outcome {
    for (name, c) in corpus {
        check(validate_cover(c).is_empty(), || format!("{name}: rejected"))?;
        for (&v, f) in &c.maps {
            let iv = c.source.edge_marking(v);
            let ramification: usize = iv.values().map(|p| local_degree_oracle(f, p) - 1).sum();
            let d = f.degree();
            check(ramification == 2 * d - 2, || format!("{name}: vertex {v} ramification {ramification}"))?;
            for (e, p) in iv {
                let k = local_degree_oracle(f, p);
                let other = match e {
                    Node::Internal(u) => local_degree_oracle(&c.maps[u], &c.source.edge_marking(*u)[&Node::Internal(v)]),
                    Node::Leaf(a) => c.portrait().deg[a],
                };
                check(k == other, || format!("{name}: edge {v}–{e} degrees {k} ≠ {other}"))?;
            }
        }
    }
    let mut mutants = 0;
    'outer: for round in 0.. {
        for (name, c) in corpus {
            let p = c.portrait();
            let leaves: Vec<&Label> = p.deg.keys().collect();
            let a = leaves[round % leaves.len()];
            let mut m = p.clone();
            let k = m.deg[a];
            m.deg.insert(a.clone(), if (round / leaves.len()).is_multiple_of(2) { k + 1 } else { k - 1 });
            check(!validate_portrait(&m).is_empty(), || format!("{name}: mutant at {a} accepted"))?;
            check(reconstruct_cover(&c.source, &m).is_err(), || format!("{name}: mutant at {a} realized"))?;
            mutants += 1;
            if mutants == 100 {
                break 'outer;
            }
        }
    }
    Ok(format!("{} covers checked, {mutants} mutants rejected", corpus.len()))
}

// 8

fn family(pts: Vec<(&str, LaurentPoint)>) -> LaurentFamily {
    LaurentFamily::new(pts.into_iter().map(|(l, p)| (l.to_string(), p)).collect()).unwrap()
}

fn square_families() -> (CoverFamily, CoverFamily) {
    let c = |p: ProjPoint| LaurentPoint::constant(&p);
    let y = family(vec![
        ("a0", c(ProjPoint::zero())),
        ("a1", c(ProjPoint::one())),
        ("ai", c(ProjPoint::infinity())),
        ("am", c(ProjPoint::from_int(-1))),
    ]);
    let z = |b1: LaurentPoint| family(vec![("b0", c(ProjPoint::zero())), ("b1", b1), ("bi", c(ProjPoint::infinity()))]);
    let constant = common::cover_family(y.clone(), z(c(ProjPoint::one())), &RationalMap::power(2));
    let eps = LaurentPoly::eps();
    let map = MapFamily::new(Polynomial::monomial(eps.clone(), 2), Polynomial::constant(LaurentPoly::constant(GR::from_int(1)))).unwrap();
    let scaled = CoverFamily::new(constant.portrait().clone(), y, z(LaurentPoint::affine(eps)), map).unwrap();
    (constant, scaled)
}

fn criterion8() -> Outcome {
    let (constant, scaled) = square_families();
    for (what, fam) in [("constant", constant), ("rescaled", scaled)] {
        let c = limit_cover(&fam).map_err(|e| format!("{what}: {e}"))?;
        check(validate_cover(&c).is_empty(), || format!("{what}: invalid"))?;
        check(c.maps.len() == 1 && c.maps.values().all(|f| *f == RationalMap::power(2)), || {
            format!("{what}: expected z², got {:?}", c.maps)
        })?;
    }
    let fam = common::degenerating_square_family();
    let c = limit_cover(&fam).map_err(|e| e.to_string())?;
    check(validate_cover(&c).is_empty(), || "degenerating: invalid".into())?;
    check(c.source.shape().internal().len() == 2, || "degenerating: expected two source spheres".into())?;
    let ty = limit_tree(fam.y_family()).map_err(|e| e.to_string())?;
    let tz = limit_tree(fam.z_family()).map_err(|e| e.to_string())?;
    check(c.source == ty && c.target == tz, || "degenerating: trees differ from limit_tree".into())?;
    let r = reconstruct_cover(&c.source, fam.portrait()).map_err(|e| e.to_string())?;
    check(cover_iso(&c, &r) == Ok(true), || "degenerating: reconstruction differs".into())?;
    Ok("constant, rescaled and degenerating z² families".into())
}

// 9

fn with_x_marking(c: &TreeCover, pairs: &[(Label, Label)]) -> (TreeCover, BTreeSet<Label>) {
    let names: BTreeMap<Label, Label> = pairs.iter().map(|(y, z)| (z.clone(), y.clone())).collect();
    let x = pairs.iter().map(|(y, _)| y.clone()).collect();
    (common::rename_target(c, &names), x)
}

fn dyn_agrees(c: &TreeCover, x: &BTreeSet<Label>) -> Result<bool, String> {
    match dyn_membership(c, x).map_err(|e| e.to_string())? {
        Some(d) => {
            check(validate_dyn(&d).is_empty(), || format!("witness over {x:?} rejected"))?;
            Ok(true)
        }
        None => {
            let naive = DynSystem {
                cover: c.clone(),
                dyn_tree: c.source.project(x).map_err(|e| e.to_string())?,
            };
            check(!validate_dyn(&naive).is_empty(), || format!("naive witness over {x:?} accepted"))?;
            Ok(false)
        }
    }
}

fn criterion9(corpus: &[(String, TreeCover)]) -> Outcome {
    let mut r = common::rng(99);
    let (mut yes, mut no) = (0, 0);
    for (name, c) in corpus {
        let ys: Vec<Label> = c.source.labels().iter().cloned().collect();
        for m in [3, 4] {
            for _ in 0..3 {
                let mut zs: Vec<Label> = c.target.labels().iter().cloned().collect();
                zs.shuffle(&mut r);
                let mut yy = ys.clone();
                yy.shuffle(&mut r);
                let m = m.min(zs.len());
                let pairs: Vec<(Label, Label)> = yy.into_iter().zip(zs).take(m).collect();
                let (cx, x) = with_x_marking(c, &pairs);
                if dyn_agrees(&cx, &x).map_err(|e| format!("{name}: {e}"))? {
                    yes += 1
                } else {
                    no += 1
                }
            }
        }
    }
    let (mismatch, x) = mismatch_example();
    check(dyn_agrees(&mismatch, &x) == Ok(false), || "4-point mismatch example was accepted".into())?;
    Ok(format!("{} markings agree ({yes} members, {no} non-members); 4-point mismatch rejected", yes + no + 1))
}

/// `z²` with a fourth shared label at `i` in the source and `−1` in the target:
/// the two 4-point projections have different cross-ratios.
fn mismatch_example() -> (TreeCover, BTreeSet<Label>) {
    use sphere_trees::covers::MarkedSphereCover;
    use sphere_trees::moduli::MarkedSphere;
    let sphere = |pts: Vec<(&str, ProjPoint)>| {
        MarkedSphere::new(pts.into_iter().map(|(l, p)| (l.to_string(), p)).collect()).unwrap()
    };
    let i = GR::i();
    let y = sphere(vec![
        ("0", ProjPoint::zero()),
        ("inf", ProjPoint::infinity()),
        ("1", ProjPoint::one()),
        ("m1", ProjPoint::from_int(-1)),
        ("a", ProjPoint::finite(i.clone())),
        ("mi", ProjPoint::finite(-i)),
    ]);
    let z = sphere(vec![
        ("0", ProjPoint::zero()),
        ("inf", ProjPoint::infinity()),
        ("1", ProjPoint::one()),
        ("a", ProjPoint::from_int(-1)),
    ]);
    let f = RationalMap::power(2);
    let p = Portrait::of_map(&f, &y, &z).unwrap();
    let c = MarkedSphereCover::new(f, y, z, p).unwrap().as_tree_cover();
    (c, common::labels(&["0", "inf", "1", "a"]))
}

// 10

fn data(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("data");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn criterion10() -> Outcome {
    let runs: Vec<(Vec<String>, i32)> = [
        (vec!["validate", "star4.json"], 0),
        (vec!["validate", "partitions.json"], 0),
        (vec!["validate", "bad_partitions.json"], 1),
        (vec!["validate", "square_cover.json"], 0),
        (vec!["validate", "square_family.json"], 0),
        (vec!["embed", "square_sphere.json"], 0),
        (vec!["iso", "star4.json", "star4_other.json"], 0),
        (vec!["iso", "square_cover.json", "square_limit_cover.json"], 0),
        (vec!["limit", "family.json"], 0),
        (vec!["limit", "numeric.json", "--tolerance", "1e-6", "--window", "5"], 0),
        (vec!["limit", "family.json", "--tolerance", "1e-3"], 2),
        (vec!["limit-cover", "square_family.json"], 0),
        (vec!["project", "two_vertex.json", "a", "b", "c"], 0),
        (vec!["reconstruct", "square_sphere.json", "square_portrait.json"], 0),
        (vec!["plumb", "two_vertex.json"], 0),
        (vec!["sample", "family.json", "--eps", "1/10"], 0),
        (vec!["compat", "two_vertex.json", "two_vertex.json"], 0),
        (vec!["dyn-member", "square_cover.json", "0", "1", "inf"], 0),
    ]
    .into_iter()
    .map(|(args, code)| {
        let args = args
            .into_iter()
            .map(|a| if a.ends_with(".json") { data(a) } else { a.to_string() })
            .collect();
        (args, code)
    })
    .collect();
    let bin = env!("CARGO_BIN_EXE_sphere-trees");
    for (args, code) in &runs {
        let outs: Vec<_> = (0..2)
            .map(|_| Command::new(bin).args(args).output().map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?;
        let got = outs[0].status.code();
        check(got == Some(*code), || format!("{args:?}: exit {got:?}, expected {code}"))?;
        check(outs[0].stdout == outs[1].stdout, || format!("{args:?}: output differs between runs"))?;
        check(outs[0].stdout.ends_with(b"\n"), || format!("{args:?}: output not newline-terminated"))?;
    }
    Ok(format!("{} invocations byte-identical across two runs", runs.len()))
}

fn main() {
    let start = Instant::now();
    let trees = corpus_trees();
    let corpus = common::cover_corpus();
    println!("corpora built in {:.1?}", start.elapsed());
    let criteria: Vec<(&str, Duration, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("tree/partition round trip", Duration::from_secs(10), Box::new(criterion1)),
        ("admissibility completeness", Duration::from_secs(1), Box::new(criterion2)),
        ("embedding injectivity", Duration::from_secs(30), Box::new(|| criterion3(&trees))),
        ("plumbing/limit round trip", Duration::from_secs(60), Box::new(|| criterion4(&trees))),
        ("numeric/exact agreement", Duration::from_secs(60), Box::new(|| criterion5(&trees))),
        ("cover reconstruction", Duration::from_secs(30), Box::new(|| criterion6(&corpus))),
        ("cover validation ledger", Duration::from_secs(30), Box::new(|| criterion7(&corpus))),
        ("cover limits", Duration::from_secs(30), Box::new(criterion8)),
        ("dynamics membership", Duration::from_secs(10), Box::new(|| criterion9(&corpus))),
        ("CLI determinism", Duration::from_secs(10), Box::new(criterion10)),
    ];
    let only: Option<BTreeSet<usize>> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|k| k.trim().parse().ok()).collect());
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        if only.as_ref().is_some_and(|o| !o.contains(&(i + 1))) {
            continue;
        }
        let t = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(run))
            .unwrap_or_else(|_| Err("panicked".into()));
        let took = t.elapsed();
        let (tag, detail) = match result {
            Ok(_) if took > *budget => ("FAIL", format!("over the {budget:?} budget")),
            Ok(d) => ("PASS", d),
            Err(e) => ("FAIL", e),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} [{tag}] {name}: {detail} ({took:.2?})", i + 1);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
