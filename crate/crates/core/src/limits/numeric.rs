//! Empirical limit trees for sequences of floating-point configurations.
//!
//! Each quadruple's cross-ratio sequence is accepted when the last `window`
//! Wynn ρ estimates agree within the tolerance, or failing that when its last
//! `window` raw values do. Snapshots are assumed to be taken at ε = 1/n for
//! consecutive n, the regime in which ρ cancels the leading terms in 1/n.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;

use super::{assemble, sorted_triples, LimitError};
use crate::trees::{Label, MarkedTree, Node, Partition};

/// A floating-point point of the sphere.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum NumPoint {
    Finite(Complex64),
    Infinity,
}

impl NumPoint {
    fn homogeneous(self) -> (Complex64, Complex64) {
        match self {
            NumPoint::Finite(z) => (z, Complex64::new(1.0, 0.0)),
            NumPoint::Infinity => (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
        }
    }

    fn from_homogeneous(u: Complex64, v: Complex64) -> Self {
        if v.norm() == 0.0 {
            NumPoint::Infinity
        } else {
            NumPoint::Finite(u / v)
        }
    }

    /// Chordal distance, at most 2.
    pub fn chordal(self, other: NumPoint) -> f64 {
        let (u1, v1) = self.homogeneous();
        let (u2, v2) = other.homogeneous();
        let n1 = (u1.norm_sqr() + v1.norm_sqr()).sqrt();
        let n2 = (u2.norm_sqr() + v2.norm_sqr()).sqrt();
        2.0 * (u1 * v2 - v1 * u2).norm() / (n1 * n2)
    }

    pub fn is_finite_value(self) -> bool {
        match self {
            NumPoint::Finite(z) => z.re.is_finite() && z.im.is_finite(),
            NumPoint::Infinity => true,
        }
    }
}

impl From<&crate::arith::ProjPoint> for NumPoint {
    fn from(p: &crate::arith::ProjPoint) -> Self {
        match p.affine() {
            Some(z) => {
                let (re, im) = z.to_f64_pair();
                NumPoint::Finite(Complex64::new(re, im))
            }
            None => NumPoint::Infinity,
        }
    }
}

/// A finite sequence of marked configurations with acceptance parameters.
#[derive(Clone, Debug)]
pub struct NumericConfigSequence {
    snapshots: Vec<BTreeMap<Label, NumPoint>>,
    tolerance: f64,
    window: usize,
}

impl NumericConfigSequence {
    pub fn new(
        snapshots: Vec<BTreeMap<Label, NumPoint>>,
        tolerance: f64,
        window: usize,
    ) -> Result<Self, LimitError> {
        if !(tolerance > 0.0 && tolerance.is_finite()) || window == 0 {
            return Err(LimitError::BadParameters);
        }
        if snapshots.len() < window {
            return Err(LimitError::TooFewSnapshots {
                got: snapshots.len(),
                window,
            });
        }
        let labels: Vec<&Label> = snapshots[0].keys().collect();
        if labels.len() < 3 {
            return Err(LimitError::TooFewLabels(labels.len()));
        }
        if let Some(i) = snapshots.iter().position(|s| s.keys().ne(labels.iter().copied())) {
            return Err(LimitError::LabelMismatch(i));
        }
        Ok(Self {
            snapshots,
            tolerance,
            window,
        })
    }

    pub fn snapshots(&self) -> &[BTreeMap<Label, NumPoint>] {
        &self.snapshots
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn window(&self) -> usize {
        self.window
    }
}

/// Tree shape with floating-point edge markings.
#[derive(Clone, Debug)]
pub struct NumericTree {
    pub shape: MarkedTree,
    pub marking: BTreeMap<usize, BTreeMap<Node, NumPoint>>,
}

fn cross_ratio_f64(p0: NumPoint, p1: NumPoint, pi: NumPoint, p: NumPoint) -> NumPoint {
    let det = |a: (Complex64, Complex64), b: (Complex64, Complex64)| a.0 * b.1 - a.1 * b.0;
    let (h0, h1, hi, h) = (p0.homogeneous(), p1.homogeneous(), pi.homogeneous(), p.homogeneous());
    let u = det(h, h0) * det(h1, hi);
    let v = det(h, hi) * det(h1, h0);
    NumPoint::from_homogeneous(u, v)
}

/// Limit estimate of a sequence of points, or `None` if it has not settled.
fn settle(seq: &[NumPoint], tol: f64, window: usize) -> Option<NumPoint> {
    let last = *seq.last()?;
    if !last.is_finite_value() {
        return None;
    }
    // Work in the affine chart in which the last value has modulus ≤ 1.
    let (lu, lv) = last.homogeneous();
    let inverted = lu.norm() > lv.norm();
    let from_chart = |r: Complex64| {
        if inverted {
            NumPoint::from_homogeneous(Complex64::new(1.0, 0.0), r)
        } else {
            NumPoint::Finite(r)
        }
    };
    // Wynn's ρ table over strided subsequences (ending at the last
    // snapshot), even columns of order 2, 4 and 6. Wider strides tame the
    // rounding noise that high orders amplify; the combination whose trailing
    // estimates agree best wins.
    let chart: Vec<Complex64> = seq
        .iter()
        .map(|p| {
            let (u, v) = p.homogeneous();
            if inverted {
                v / u
            } else {
                u / v
            }
        })
        .collect();
    let rho = |xs: Vec<Complex64>, order: usize| -> Vec<Complex64> {
        let mut prev = vec![Complex64::new(0.0, 0.0); xs.len() + 1];
        let mut cur = xs;
        for k in 0..order {
            let next: Vec<Complex64> = (0..cur.len() - 1)
                .map(|n| prev[n + 1] + Complex64::new((k + 1) as f64, 0.0) / (cur[n + 1] - cur[n]))
                .collect();
            prev = cur;
            cur = next;
        }
        cur
    };
    let mut best: Option<(f64, NumPoint)> = None;
    for stride in [1usize, 2, 4, 8, 16] {
        for order in [2usize, 4, 6] {
            let len = window + order;
            if (len - 1) * stride + stride > chart.len() {
                continue;
            }
            // Every phase of the stride must agree, so no subsequence is
            // singled out.
            let mut estimates = Vec::new();
            for phase in 0..stride {
                let mut xs: Vec<Complex64> =
                    chart.iter().rev().skip(phase).step_by(stride).take(len).copied().collect();
                xs.reverse();
                estimates.extend(rho(xs, order).into_iter().map(from_chart));
            }
            let last_estimate = estimates[window - 1];
            let spread = estimates
                .iter()
                .map(|p| if p.is_finite_value() { p.chordal(last_estimate) } else { f64::INFINITY })
                .fold(0.0, f64::max);
            if spread <= tol && best.is_none_or(|(s, _)| spread < s) {
                best = Some((spread, last_estimate));
            }
        }
    }
    if let Some((_, p)) = best {
        return Some(p);
    }
    // Sequences that are constant up to rounding defeat ρ.
    let tail = &seq[seq.len().saturating_sub(window)..];
    if tail.iter().all(|p| p.is_finite_value() && p.chordal(last) <= tol) {
        return Some(last);
    }
    None
}

/// Groups labels whose limits are within `tol`; `None` when closeness is not
/// transitive.
fn cluster(alpha: &BTreeMap<Label, NumPoint>, tol: f64) -> Option<Partition> {
    let labels: Vec<&Label> = alpha.keys().collect();
    let mut root: Vec<usize> = (0..labels.len()).collect();
    fn find(root: &mut [usize], i: usize) -> usize {
        let mut i = i;
        while root[i] != i {
            root[i] = root[root[i]];
            i = root[i];
        }
        i
    }
    let close = |i: usize, j: usize| alpha[labels[i]].chordal(alpha[labels[j]]) < tol;
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            if close(i, j) {
                let (a, b) = (find(&mut root, i), find(&mut root, j));
                root[a] = b;
            }
        }
    }
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..labels.len() {
        let r = find(&mut root, i);
        blocks.entry(r).or_default().push(i);
    }
    for b in blocks.values() {
        for (k, &i) in b.iter().enumerate() {
            if b[k + 1..].iter().any(|&j| !close(i, j)) {
                return None;
            }
        }
    }
    Some(
        Partition::new(
            blocks
                .into_values()
                .map(|b| b.into_iter().map(|i| labels[i].clone()).collect()),
        )
        .expect("clusters are disjoint"),
    )
}

/// Empirical limit tree of a numeric sequence.
pub fn numeric_limit_tree(seq: &NumericConfigSequence) -> Result<NumericTree, LimitError> {
    let labels: Vec<Label> = seq.snapshots[0].keys().cloned().collect();
    let triples = sorted_triples(&labels);
    let (tol, window) = (seq.tolerance, seq.window);
    let results: Vec<Result<(Partition, BTreeMap<Label, NumPoint>), Vec<[Label; 4]>>> = triples
        .par_iter()
        .map(|t| {
            let mut alpha = BTreeMap::new();
            let mut unsettled = Vec::new();
            for x in &labels {
                let forced = t.iter().position(|y| y == x).map(|i| match i {
                    0 => NumPoint::Finite(Complex64::new(0.0, 0.0)),
                    1 => NumPoint::Finite(Complex64::new(1.0, 0.0)),
                    _ => NumPoint::Infinity,
                });
                let value = forced.or_else(|| {
                    let values: Vec<NumPoint> = seq
                        .snapshots
                        .iter()
                        .map(|s| cross_ratio_f64(s[&t[0]], s[&t[1]], s[&t[2]], s[x]))
                        .collect();
                    settle(&values, tol, window)
                });
                match value {
                    Some(v) => {
                        alpha.insert(x.clone(), v);
                    }
                    None => unsettled.push([t[0].clone(), t[1].clone(), t[2].clone(), x.clone()]),
                }
            }
            if !unsettled.is_empty() {
                return Err(unsettled);
            }
            match cluster(&alpha, tol) {
                Some(p) => Ok((p, alpha)),
                None => Err(vec![]),
            }
        })
        .collect();

    let mut unsettled = Vec::new();
    let mut charts: BTreeMap<Partition, BTreeMap<Label, NumPoint>> = BTreeMap::new();
    for (t, r) in triples.iter().zip(results) {
        match r {
            Ok((p, alpha)) => {
                // Every label of a block takes the value of the block's first label.
                let snapped = alpha
                    .keys()
                    .map(|x| {
                        let rep = p.block_of(x).and_then(|b| b.iter().next()).expect("covered");
                        (x.clone(), alpha[rep])
                    })
                    .collect();
                charts.entry(p).or_insert(snapped);
            }
            Err(quads) if quads.is_empty() => {
                return Err(LimitError::InconsistentClustering { triple: t.clone() })
            }
            Err(quads) => unsettled.extend(quads),
        }
    }
    if !unsettled.is_empty() {
        return Err(LimitError::NotStabilized(unsettled));
    }
    let (shape, marking) = assemble(&charts)?;
    Ok(NumericTree { shape, marking })
}
