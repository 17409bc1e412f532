//! Rebuilding a cover from its source tree and leaf portrait.
//!
//! A target vertex `w0` carrying at least two leaves is located through its
//! preimages `P`: starting from one source vertex, `P` and the leaves `S`
//! around `w0` are closed under "leaf over S" and "parent of such a leaf".
//! The rest of the source falls into components, and components hitting the
//! same Z-labels lie over the same branch at `w0`. With two leaves of `w0`
//! at 0 and ∞ every map `f_p` is fixed by its divisor and one more point;
//! the branches are then rebuilt recursively and glued onto `w0`.

use std::collections::{BTreeMap, BTreeSet};

use super::{
    complete, components, rational_from_divisors, validate_cover, CoverError, Portrait, TreeCover,
};
use crate::arith::{local_degree, ProjPoint, RationalMap};
use crate::moduli::TreeOfSpheres;
use crate::trees::{Label, MarkedTree, Node};

fn fail(msg: impl Into<String>) -> CoverError {
    CoverError::NotRealizable(msg.into())
}

/// The cover with source `source` and leaf portrait `portrait`, with its
/// target in canonical form.
pub fn reconstruct_cover(source: &TreeOfSpheres, portrait: &Portrait) -> Result<TreeCover, CoverError> {
    let v = super::validate_portrait(portrait);
    if !v.is_empty() {
        return Err(CoverError::InvalidPortrait(v));
    }
    if &portrait.y != source.labels() {
        return Err(fail("source leaves differ from the portrait domain"));
    }
    let c = build(source, portrait)
        .map_err(|e| match e {
            CoverError::NotRealizable(_) => e,
            other => fail(other.to_string()),
        })?
        .canonical_target();
    let v = validate_cover(&c);
    if !v.is_empty() {
        return Err(fail(super::join(&v)));
    }
    Ok(c)
}

fn fresh(base: &str, taken: &BTreeSet<Label>) -> Label {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.insert(0, '@');
    }
    name
}

/// `f_v` with zeros over `refs[0]`, poles over `refs[1]` and an edge over
/// `refs[2]` sent to 1; `image` gives the target key of every edge at `v`.
fn solve_vertex(
    source: &TreeOfSpheres,
    portrait: &Portrait,
    v: usize,
    image: &BTreeMap<Node, Node>,
    refs: [&Node; 3],
) -> Result<RationalMap, CoverError> {
    let iv = source.edge_marking(v);
    let divisor = |r: &Node| -> Result<Vec<(ProjPoint, usize)>, CoverError> {
        let pts: Vec<(ProjPoint, usize)> = image
            .iter()
            .filter(|(_, img)| *img == r)
            .map(|(e, _)| match e {
                Node::Leaf(y) => Ok((iv[e].clone(), portrait.deg[y])),
                Node::Internal(_) => Err(fail(format!("internal edge {e} at #{v} lies over leaf {r}"))),
            })
            .collect::<Result<_, _>>()?;
        if pts.is_empty() {
            return Err(fail(format!("#{v} has no edge over {r}")));
        }
        Ok(pts)
    };
    let zeros = divisor(refs[0])?;
    let poles = divisor(refs[1])?;
    let unit = image
        .iter()
        .find(|(_, img)| *img == refs[2])
        .map(|(e, _)| iv[e].clone())
        .ok_or_else(|| fail(format!("#{v} has no edge over {}", refs[2])))?;
    let f = rational_from_divisors(&zeros, &poles, &unit).map_err(|e| fail(format!("at #{v}: {e}")))?;
    for (e, p) in iv {
        if let Node::Leaf(y) = e {
            if local_degree(&f, p)? != portrait.deg[y] {
                return Err(fail(format!("local degree at {y} disagrees with the portrait")));
            }
        }
    }
    Ok(f)
}

/// Records `f(i_v(e))` as the attaching point of `image[e]`, checking that the
/// assignment stays a well-defined injection.
fn record(
    points: &mut BTreeMap<Node, ProjPoint>,
    f: &RationalMap,
    iv: &BTreeMap<Node, ProjPoint>,
    image: &BTreeMap<Node, Node>,
) -> Result<(), CoverError> {
    for (e, key) in image {
        let q = f.eval(&iv[e]);
        match points.get(key) {
            Some(old) if *old != q => return Err(fail(format!("{key} receives two attaching points"))),
            Some(_) => {}
            None => {
                if points.values().any(|p| *p == q) {
                    return Err(fail(format!("{key} shares its attaching point")));
                }
                points.insert(key.clone(), q);
            }
        }
    }
    Ok(())
}

fn build(source: &TreeOfSpheres, portrait: &Portrait) -> Result<TreeCover, CoverError> {
    let v = portrait.violations(1);
    if !v.is_empty() {
        return Err(fail(super::join(&v)));
    }
    if portrait.z.len() < 3 {
        return Err(fail("fewer than three target labels"));
    }
    if source.shape().internal().len() == 1 {
        base_case(source, portrait)
    } else {
        peel(source, portrait)
    }
}

fn leaf_image(portrait: &Portrait, y: &str) -> Node {
    Node::Leaf(portrait.f[y].clone())
}

fn base_case(source: &TreeOfSpheres, portrait: &Portrait) -> Result<TreeCover, CoverError> {
    let v = *source.shape().internal().iter().next().expect("one vertex");
    let refs: Vec<Node> = portrait.z.iter().take(3).map(|z| Node::Leaf(z.clone())).collect();
    let image: BTreeMap<Node, Node> = source
        .edge_marking(v)
        .keys()
        .map(|e| (e.clone(), leaf_image(portrait, e.as_leaf().expect("only leaves"))))
        .collect();
    let f = solve_vertex(source, portrait, v, &image, [&refs[0], &refs[1], &refs[2]])?;
    let mut points = BTreeMap::new();
    record(&mut points, &f, source.edge_marking(v), &image)?;
    let target = TreeOfSpheres::new(MarkedTree::star(portrait.z.iter().cloned())?, BTreeMap::from([(0, points)]))?;
    let mut vertex_map: BTreeMap<Node, Node> = image.into_iter().collect();
    vertex_map.insert(Node::Internal(v), Node::Internal(0));
    Ok(TreeCover {
        source: source.clone(),
        target,
        vertex_map,
        maps: BTreeMap::from([(v, f)]),
    })
}

/// Preimages `P` of the target vertex next to the leaves over `v0`, and the
/// set `S` of target leaves at that vertex.
fn closure(shape: &MarkedTree, portrait: &Portrait, v0: usize) -> (BTreeSet<usize>, BTreeSet<Label>) {
    let leaves_at = |v: usize| -> Vec<Label> {
        shape
            .edges_at(v)
            .iter()
            .filter_map(|e| e.as_leaf().map(String::from))
            .collect()
    };
    let mut p = BTreeSet::from([v0]);
    let mut s: BTreeSet<Label> = leaves_at(v0).iter().map(|y| portrait.f[y].clone()).collect();
    loop {
        let grown_p: BTreeSet<usize> = portrait
            .f
            .iter()
            .filter(|(_, z)| s.contains(*z))
            .filter_map(|(y, _)| shape.leaf_parent(y))
            .chain(p.iter().copied())
            .collect();
        let grown_s: BTreeSet<Label> = grown_p
            .iter()
            .flat_map(|&v| leaves_at(v))
            .map(|y| portrait.f[&y].clone())
            .collect();
        if grown_p == p && grown_s == s {
            return (p, s);
        }
        p = grown_p;
        s = grown_s;
    }
}

fn peel(source: &TreeOfSpheres, portrait: &Portrait) -> Result<TreeCover, CoverError> {
    let shape = source.shape();
    let mut candidates: Vec<usize> = shape
        .internal()
        .iter()
        .copied()
        .filter(|&v| shape.edges_at(v).iter().any(|e| e.as_leaf().is_some()))
        .collect();
    candidates.sort_by_key(|&v| (shape.internal_neighbors(v).len() != 1, v));
    let (pre, s) = candidates
        .iter()
        .map(|&v| closure(shape, portrait, v))
        .find(|(_, s)| s.len() >= 2)
        .ok_or_else(|| fail("no target vertex with two leaves"))?;
    if pre.iter().any(|&v| shape.internal_neighbors(v).iter().any(|u| pre.contains(u))) {
        return Err(fail("two adjacent vertices lie over the same vertex"));
    }

    let rest: BTreeSet<usize> = shape.internal().difference(&pre).copied().collect();
    let comps = components(shape, &rest);
    let mut comp_of: BTreeMap<usize, usize> = BTreeMap::new();
    let mut images: Vec<BTreeSet<Label>> = Vec::new();
    for (k, c) in comps.iter().enumerate() {
        let img: BTreeSet<Label> = c
            .iter()
            .flat_map(|&v| shape.edges_at(v).iter())
            .filter_map(|e| e.as_leaf())
            .map(|y| portrait.f[y].clone())
            .collect();
        if img.is_empty() || !img.is_disjoint(&s) {
            return Err(fail("a component does not lie over a single branch"));
        }
        c.iter().for_each(|&v| {
            comp_of.insert(v, k);
        });
        images.push(img);
    }
    let branches: Vec<BTreeSet<Label>> = images.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    for (i, a) in branches.iter().enumerate() {
        if branches[i + 1..].iter().any(|b| !a.is_disjoint(b)) {
            return Err(fail("components over overlapping label sets"));
        }
    }
    let branch_of: Vec<usize> = images
        .iter()
        .map(|img| branches.iter().position(|b| b == img).expect("listed"))
        .collect();

    // Target keys at w0: leaves of S, and Internal(k) for branch k.
    let s_sorted: Vec<Node> = s.iter().map(|z| Node::Leaf(z.clone())).collect();
    let third = s_sorted.get(2).cloned().unwrap_or(Node::Internal(0));
    let refs = [&s_sorted[0], &s_sorted[1], &third];
    let mut w0_points: BTreeMap<Node, ProjPoint> = BTreeMap::new();
    let mut maps = BTreeMap::new();
    for &p in &pre {
        let image: BTreeMap<Node, Node> = source
            .edge_marking(p)
            .keys()
            .map(|e| {
                let key = match e {
                    Node::Leaf(y) => leaf_image(portrait, y),
                    Node::Internal(u) => Node::Internal(branch_of[comp_of[u]]),
                };
                (e.clone(), key)
            })
            .collect();
        let f = solve_vertex(source, portrait, p, &image, refs)?;
        record(&mut w0_points, &f, source.edge_marking(p), &image)?;
        maps.insert(p, f);
    }

    let w_name = fresh("@w", &portrait.z);
    let mut branch_targets: Vec<Option<TreeOfSpheres>> = vec![None; branches.len()];
    let mut sub_covers = Vec::new();
    for (k, c) in comps.iter().enumerate() {
        let (sub_source, names) = complete(source, c)?;
        let mut f = BTreeMap::new();
        let mut deg = BTreeMap::new();
        for (outside, name) in &names {
            match outside {
                Node::Leaf(y) => {
                    f.insert(name.clone(), portrait.f[y].clone());
                    deg.insert(name.clone(), portrait.deg[y]);
                }
                Node::Internal(p) => {
                    let inner = shape
                        .internal_neighbors(*p)
                        .into_iter()
                        .find(|u| c.contains(u))
                        .expect("boundary vertex touches the component");
                    f.insert(name.clone(), w_name.clone());
                    deg.insert(name.clone(), local_degree(&maps[p], &source.edge_marking(*p)[&Node::Internal(inner)])?);
                }
            }
        }
        let mut z = branches[branch_of[k]].clone();
        z.insert(w_name.clone());
        let d = f.iter().filter(|(_, b)| **b == w_name).map(|(a, _)| deg[a]).sum();
        let sub = Portrait {
            y: sub_source.labels().clone(),
            z,
            f,
            deg,
            d,
        };
        let cover = build(&sub_source, &sub)?.canonical_target();
        match &branch_targets[branch_of[k]] {
            Some(t) if *t != cover.target => {
                return Err(fail("components over one branch disagree on its target"))
            }
            Some(_) => {}
            None => branch_targets[branch_of[k]] = Some(cover.target.clone()),
        }
        sub_covers.push(cover);
    }

    // Glue: w0 gets id 0, branch k is shifted past the earlier branches.
    let mut offsets = Vec::new();
    let mut next = 1;
    for t in &branch_targets {
        offsets.push(next);
        next += t.as_ref().expect("every branch has a component").shape().internal().len();
    }
    let w_leaf = Node::Leaf(w_name.clone());
    let mut edges: Vec<(Node, Node)> = s.iter().map(|z| (Node::Internal(0), Node::Leaf(z.clone()))).collect();
    let mut marking = BTreeMap::new();
    let mut at_w0: BTreeMap<Node, ProjPoint> = BTreeMap::new();
    for (key, q) in &w0_points {
        if let Node::Leaf(_) = key {
            at_w0.insert(key.clone(), q.clone());
        }
    }
    for (k, t) in branch_targets.iter().enumerate() {
        let t = t.as_ref().expect("filled");
        let shift = |n: &Node| match n {
            Node::Internal(i) => Node::Internal(i + offsets[k]),
            n if *n == w_leaf => Node::Internal(0),
            leaf => leaf.clone(),
        };
        for (a, b) in t.shape().edges() {
            edges.push((shift(&a), shift(&b)));
        }
        for (w, iw) in t.marking() {
            if iw.contains_key(&w_leaf) {
                let q = w0_points
                    .get(&Node::Internal(k))
                    .ok_or_else(|| fail("branch without attaching point"))?;
                at_w0.insert(Node::Internal(w + offsets[k]), q.clone());
            }
            marking.insert(w + offsets[k], iw.iter().map(|(e, p)| (shift(e), p.clone())).collect());
        }
    }
    marking.insert(0, at_w0);
    let target_shape = MarkedTree::new(portrait.z.iter().cloned(), 0..next, edges)?;
    let target = TreeOfSpheres::new(target_shape, marking)?;

    let mut vertex_map: BTreeMap<Node, Node> = portrait
        .f
        .iter()
        .map(|(y, z)| (Node::Leaf(y.clone()), Node::Leaf(z.clone())))
        .collect();
    for &p in &pre {
        vertex_map.insert(Node::Internal(p), Node::Internal(0));
    }
    for (k, cover) in sub_covers.into_iter().enumerate() {
        let off = offsets[branch_of[k]];
        for &u in &comps[k] {
            let w = cover.image_of(u);
            vertex_map.insert(Node::Internal(u), Node::Internal(w + off));
        }
        maps.extend(cover.maps);
    }
    Ok(TreeCover {
        source: source.clone(),
        target,
        vertex_map,
        maps,
    })
}
