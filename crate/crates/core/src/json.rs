//! JSON encodings of every domain object, built on `serde_json::Value`.
//!
//! Objects serialize with sorted keys, so output is canonical. Scalars are
//! strings `"p/q"` when real and `{"re", "im"}` objects otherwise.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_rational::BigRational;
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::arith::{
    ArithError, GaussianRational, Homogeneous, LaurentPoint, LaurentPoly, MapFamily, Polynomial, ProjPoint,
    RationalMap,
};
use crate::covers::{CoverError, Portrait, TreeCover};
use crate::dynamics::{DynError, DynSystem};
use crate::limits::{CoverFamily, LaurentFamily, LimitError, NumPoint, NumericTree};
use crate::moduli::{Embedding, MarkedSphere, ModuliError, TreeOfSpheres};
use crate::plumbing::PlumbError;
use crate::trees::{Label, MarkedTree, Node, Partition, PartitionSet, TreeError};

#[derive(Error, Debug)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("schema: {0}")]
    Schema(String),
}

fn schema(msg: impl Into<String>) -> JsonError {
    JsonError::Schema(msg.into())
}

type Res<T> = Result<T, JsonError>;

fn field<'a>(v: &'a Value, key: &str) -> Res<&'a Value> {
    v.get(key).ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn as_obj<'a>(v: &'a Value, what: &str) -> Res<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| schema(format!("{what} must be an object")))
}

fn as_arr<'a>(v: &'a Value, what: &str) -> Res<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(format!("{what} must be an array")))
}

fn as_str<'a>(v: &'a Value, what: &str) -> Res<&'a str> {
    v.as_str().ok_or_else(|| schema(format!("{what} must be a string")))
}

fn as_usize(v: &Value, what: &str) -> Res<usize> {
    v.as_u64()
        .map(|n| n as usize)
        .ok_or_else(|| schema(format!("{what} must be a non-negative integer")))
}

fn as_i32(v: &Value, what: &str) -> Res<i32> {
    v.as_i64()
        .and_then(|n| i32::try_from(n).ok())
        .ok_or_else(|| schema(format!("{what} must be an integer")))
}

pub fn parse(text: &str) -> Res<Value> {
    Ok(serde_json::from_str(text)?)
}

/// Pretty, newline-terminated canonical text.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values always serialize");
    s.push('\n');
    s
}

pub fn labels_from_json(v: &Value) -> Res<BTreeSet<Label>> {
    as_arr(v, "label list")?
        .iter()
        .map(|x| as_str(x, "label").map(String::from))
        .collect()
}

fn labels_to_json<'a>(ls: impl IntoIterator<Item = &'a Label>) -> Value {
    Value::Array(ls.into_iter().map(|l| Value::String(l.clone())).collect())
}

// Scalars and points

fn rational_from_json(v: &Value) -> Res<BigRational> {
    match v {
        Value::String(s) => GaussianRational::parse_rational(s).map_err(|e| schema(e.to_string())),
        Value::Number(n) if n.is_i64() => Ok(BigRational::from_integer(n.as_i64().unwrap().into())),
        _ => Err(schema("rational must be a string \"p/q\" or an integer")),
    }
}

pub fn scalar_to_json(z: &GaussianRational) -> Value {
    if num_traits::Zero::is_zero(z.im()) {
        Value::String(z.re().to_string())
    } else {
        json!({"re": z.re().to_string(), "im": z.im().to_string()})
    }
}

pub fn scalar_from_json(v: &Value) -> Res<GaussianRational> {
    match v {
        Value::Object(_) => Ok(GaussianRational::new(
            rational_from_json(field(v, "re")?)?,
            rational_from_json(field(v, "im")?)?,
        )),
        other => Ok(GaussianRational::from_real(rational_from_json(other)?)),
    }
}

pub fn point_to_json(p: &ProjPoint) -> Value {
    json!({"u": scalar_to_json(p.u()), "v": scalar_to_json(p.v())})
}

pub fn point_from_json(v: &Value) -> Res<ProjPoint> {
    ProjPoint::new(scalar_from_json(field(v, "u")?)?, scalar_from_json(field(v, "v")?)?)
        .map_err(|e| schema(format!("point: {e}")))
}

// Trees

pub fn node_to_json(n: &Node) -> Value {
    match n {
        Node::Leaf(l) => Value::String(l.clone()),
        Node::Internal(i) => json!(i),
    }
}

fn node_from_json(v: &Value) -> Res<Node> {
    match v {
        Value::String(s) => Ok(Node::Leaf(s.clone())),
        other => Ok(Node::Internal(as_usize(other, "edge endpoint")?)),
    }
}

/// Key form of a vertex: its label, or `#id`.
pub fn node_key(n: &Node) -> String {
    n.to_string()
}

fn node_from_key(s: &str) -> Res<Node> {
    Node::parse_key(s).map_err(|e| schema(e.to_string()))
}

pub fn tree_to_json(t: &MarkedTree) -> Value {
    json!({
        "leaves": labels_to_json(t.leaves()),
        "internal": t.internal().iter().collect::<Vec<_>>(),
        "edges": t.edges().iter().map(|(a, b)| json!([node_to_json(a), node_to_json(b)])).collect::<Vec<_>>(),
    })
}

/// The graph as given, without validation.
pub fn tree_from_json(v: &Value) -> Res<MarkedTree> {
    let leaves = labels_from_json(field(v, "leaves")?)?;
    let internal = as_arr(field(v, "internal")?, "internal")?
        .iter()
        .map(|x| as_usize(x, "internal id"))
        .collect::<Res<Vec<_>>>()?;
    let edges = as_arr(field(v, "edges")?, "edges")?
        .iter()
        .map(|e| match as_arr(e, "edge")?.as_slice() {
            [a, b] => Ok((node_from_json(a)?, node_from_json(b)?)),
            _ => Err(schema("an edge has two endpoints")),
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(MarkedTree::unchecked(leaves, internal, edges))
}

pub fn partition_to_json(p: &Partition) -> Value {
    Value::Array(p.blocks().iter().map(labels_to_json).collect())
}

pub fn partitions_from_json(v: &Value) -> Res<Result<PartitionSet, TreeError>> {
    let mut out = PartitionSet::new();
    for p in as_arr(field(v, "partitions")?, "partitions")? {
        let blocks = as_arr(p, "partition")?
            .iter()
            .map(labels_from_json)
            .collect::<Res<Vec<_>>>()?;
        match Partition::new(blocks) {
            Ok(p) => {
                out.insert(p);
            }
            Err(e) => return Ok(Err(e)),
        }
    }
    Ok(Ok(out))
}

// Trees of spheres

pub fn sphere_to_json(s: &MarkedSphere) -> Value {
    let pts: Map<String, Value> = s.points().iter().map(|(l, p)| (l.clone(), point_to_json(p))).collect();
    json!({ "points": pts })
}

pub fn sphere_from_json(v: &Value) -> Res<Result<MarkedSphere, ModuliError>> {
    let pts = as_obj(field(v, "points")?, "points")?
        .iter()
        .map(|(l, p)| Ok((l.clone(), point_from_json(p)?)))
        .collect::<Res<BTreeMap<_, _>>>()?;
    Ok(MarkedSphere::new(pts))
}

pub fn spheres_to_json(t: &TreeOfSpheres) -> Value {
    let mut v = tree_to_json(t.shape());
    let marking: Map<String, Value> = t
        .marking()
        .iter()
        .map(|(id, iv)| {
            let m: Map<String, Value> = iv.iter().map(|(e, p)| (node_key(e), point_to_json(p))).collect();
            (id.to_string(), Value::Object(m))
        })
        .collect();
    v["marking"] = Value::Object(marking);
    v
}

pub fn spheres_from_json(v: &Value) -> Res<Result<TreeOfSpheres, ModuliError>> {
    let shape = tree_from_json(v)?;
    let mut marking = BTreeMap::new();
    for (id, iv) in as_obj(field(v, "marking")?, "marking")? {
        let id: usize = id.parse().map_err(|_| schema(format!("vertex id {id:?}")))?;
        let iv = as_obj(iv, "vertex marking")?
            .iter()
            .map(|(k, p)| Ok((node_from_key(k)?, point_from_json(p)?)))
            .collect::<Res<BTreeMap<_, _>>>()?;
        marking.insert(id, iv);
    }
    Ok(TreeOfSpheres::new(shape, marking))
}

pub fn embedding_to_json(e: &Embedding) -> Value {
    Value::Array(
        e.values()
            .iter()
            .map(|(q, p)| json!({"quad": q.to_vec(), "value": point_to_json(p)}))
            .collect(),
    )
}

// Laurent data

pub fn laurent_to_json(p: &LaurentPoly) -> Value {
    Value::Array(p.terms().iter().map(|(k, c)| json!([k, scalar_to_json(c)])).collect())
}

pub fn laurent_from_json(v: &Value) -> Res<LaurentPoly> {
    let terms = as_arr(v, "Laurent polynomial")?
        .iter()
        .map(|t| match as_arr(t, "term")?.as_slice() {
            [k, c] => Ok((as_i32(k, "exponent")?, scalar_from_json(c)?)),
            _ => Err(schema("a term is [exponent, coefficient]")),
        })
        .collect::<Res<Vec<_>>>()?;
    Ok(LaurentPoly::new(terms))
}

pub fn laurent_point_to_json(p: &LaurentPoint) -> Value {
    json!({"u": laurent_to_json(p.u()), "v": laurent_to_json(p.v())})
}

pub fn laurent_point_from_json(v: &Value) -> Res<LaurentPoint> {
    LaurentPoint::new(laurent_from_json(field(v, "u")?)?, laurent_from_json(field(v, "v")?)?)
        .map_err(|e| schema(format!("Laurent point: {e}")))
}

pub fn family_to_json(f: &LaurentFamily) -> Value {
    let paths: Map<String, Value> = f
        .paths()
        .iter()
        .map(|(l, p)| (l.clone(), laurent_point_to_json(p)))
        .collect();
    json!({"labels": labels_to_json(f.paths().keys()), "paths": paths})
}

pub fn family_from_json(v: &Value) -> Res<Result<LaurentFamily, LimitError>> {
    let paths = as_obj(field(v, "paths")?, "paths")?
        .iter()
        .map(|(l, p)| Ok((l.clone(), laurent_point_from_json(p)?)))
        .collect::<Res<BTreeMap<_, _>>>()?;
    if let Some(ls) = v.get("labels") {
        if labels_from_json(ls)? != paths.keys().cloned().collect() {
            return Err(schema("labels do not match the paths"));
        }
    }
    Ok(LaurentFamily::new(paths))
}

// Polynomials and maps, as sparse [[degree, coefficient]] lists

fn sparse<R: crate::arith::Ring>(p: &Polynomial<R>, enc: impl Fn(&R) -> Value) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| json!([k, enc(c)]))
            .collect(),
    )
}

fn from_sparse<R: crate::arith::Ring>(v: &Value, dec: impl Fn(&Value) -> Res<R>) -> Res<Polynomial<R>> {
    let mut coeffs: Vec<R> = Vec::new();
    for t in as_arr(v, "polynomial")? {
        match as_arr(t, "term")?.as_slice() {
            [k, c] => {
                let k = as_usize(k, "degree")?;
                if coeffs.len() <= k {
                    coeffs.resize(k + 1, R::zero());
                }
                coeffs[k] = coeffs[k].plus(&dec(c)?);
            }
            _ => return Err(schema("a term is [degree, coefficient]")),
        }
    }
    Ok(Polynomial::new(coeffs))
}

pub fn ratmap_to_json(f: &RationalMap) -> Value {
    json!({"num": sparse(f.num(), scalar_to_json), "den": sparse(f.den(), scalar_to_json)})
}

pub fn ratmap_from_json(v: &Value) -> Res<Result<RationalMap, ArithError>> {
    let num = from_sparse(field(v, "num")?, scalar_from_json)?;
    let den = from_sparse(field(v, "den")?, scalar_from_json)?;
    Ok(RationalMap::new(num, den))
}

pub fn map_family_to_json(f: &MapFamily) -> Value {
    json!({"num": sparse(f.num(), laurent_to_json), "den": sparse(f.den(), laurent_to_json)})
}

pub fn map_family_from_json(v: &Value) -> Res<Result<MapFamily, ArithError>> {
    let num = from_sparse(field(v, "num")?, laurent_from_json)?;
    let den = from_sparse(field(v, "den")?, laurent_from_json)?;
    Ok(MapFamily::new(num, den))
}

// Portraits, covers, dynamical systems

pub fn portrait_to_json(p: &Portrait) -> Value {
    json!({
        "Y": labels_to_json(&p.y),
        "Z": labels_to_json(&p.z),
        "F": p.f,
        "deg": p.deg,
        "d": p.d,
    })
}

pub fn portrait_from_json(v: &Value) -> Res<Portrait> {
    let f = as_obj(field(v, "F")?, "F")?
        .iter()
        .map(|(a, b)| Ok((a.clone(), as_str(b, "image")?.to_string())))
        .collect::<Res<_>>()?;
    let deg = as_obj(field(v, "deg")?, "deg")?
        .iter()
        .map(|(a, k)| Ok((a.clone(), as_usize(k, "local degree")?)))
        .collect::<Res<_>>()?;
    Ok(Portrait {
        y: labels_from_json(field(v, "Y")?)?,
        z: labels_from_json(field(v, "Z")?)?,
        f,
        deg,
        d: as_usize(field(v, "d")?, "d")?,
    })
}

pub fn cover_to_json(c: &TreeCover) -> Value {
    let vm: Map<String, Value> = c
        .vertex_map
        .iter()
        .map(|(a, b)| (node_key(a), Value::String(node_key(b))))
        .collect();
    let maps: Map<String, Value> = c.maps.iter().map(|(v, f)| (v.to_string(), ratmap_to_json(f))).collect();
    json!({
        "source": spheres_to_json(&c.source),
        "target": spheres_to_json(&c.target),
        "vertex_map": vm,
        "maps": maps,
    })
}

/// Errors of the domain objects inside a cover file.
#[derive(Error, Debug)]
pub enum Invalid {
    #[error(transparent)]
    Moduli(#[from] ModuliError),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

pub fn cover_from_json(v: &Value) -> Res<Result<TreeCover, Invalid>> {
    let source = match spheres_from_json(field(v, "source")?)? {
        Ok(t) => t,
        Err(e) => return Ok(Err(e.into())),
    };
    let target = match spheres_from_json(field(v, "target")?)? {
        Ok(t) => t,
        Err(e) => return Ok(Err(e.into())),
    };
    let vertex_map = as_obj(field(v, "vertex_map")?, "vertex_map")?
        .iter()
        .map(|(a, b)| Ok((node_from_key(a)?, node_from_key(as_str(b, "image")?)?)))
        .collect::<Res<BTreeMap<_, _>>>()?;
    let mut maps = BTreeMap::new();
    for (id, f) in as_obj(field(v, "maps")?, "maps")? {
        let id: usize = id.parse().map_err(|_| schema(format!("vertex id {id:?}")))?;
        match ratmap_from_json(f)? {
            Ok(f) => {
                maps.insert(id, f);
            }
            Err(e) => return Ok(Err(e.into())),
        }
    }
    Ok(Ok(TreeCover {
        source,
        target,
        vertex_map,
        maps,
    }))
}

pub fn cover_family_from_json(v: &Value) -> Res<Result<CoverFamily, Invalid>> {
    let portrait = portrait_from_json(field(v, "portrait")?)?;
    let y = match family_from_json(field(v, "y_family")?)? {
        Ok(f) => f,
        Err(e) => return Ok(Err(e.into())),
    };
    let z = match family_from_json(field(v, "z_family")?)? {
        Ok(f) => f,
        Err(e) => return Ok(Err(e.into())),
    };
    let map = match map_family_from_json(field(v, "map")?)? {
        Ok(f) => f,
        Err(e) => return Ok(Err(e.into())),
    };
    Ok(CoverFamily::new(portrait, y, z, map).map_err(Invalid::from))
}

pub fn cover_family_to_json(f: &CoverFamily) -> Value {
    json!({
        "portrait": portrait_to_json(f.portrait()),
        "y_family": family_to_json(f.y_family()),
        "z_family": family_to_json(f.z_family()),
        "map": map_family_to_json(f.map_family()),
    })
}

pub fn dyn_to_json(d: &DynSystem) -> Value {
    let mut v = cover_to_json(&d.cover);
    v["X"] = labels_to_json(d.x());
    v["dyn_tree"] = spheres_to_json(&d.dyn_tree);
    v
}

pub fn dyn_from_json(v: &Value) -> Res<Result<DynSystem, Invalid>> {
    let cover = match cover_from_json(v)? {
        Ok(c) => c,
        Err(e) => return Ok(Err(e)),
    };
    let dyn_tree = match spheres_from_json(field(v, "dyn_tree")?)? {
        Ok(t) => t,
        Err(e) => return Ok(Err(e.into())),
    };
    if let Some(x) = v.get("X") {
        if &labels_from_json(x)? != dyn_tree.labels() {
            return Err(schema("X does not match the leaves of dyn_tree"));
        }
    }
    Ok(Ok(DynSystem { cover, dyn_tree }))
}

// Numeric mode

pub fn num_point_to_json(p: &NumPoint) -> Value {
    match p {
        NumPoint::Infinity => Value::String("inf".into()),
        NumPoint::Finite(z) => json!({"re": z.re, "im": z.im}),
    }
}

fn num_point_from_json(v: &Value) -> Res<NumPoint> {
    match v {
        Value::String(s) if s == "inf" => Ok(NumPoint::Infinity),
        Value::Object(_) => {
            let get = |k: &str| {
                field(v, k)?
                    .as_f64()
                    .ok_or_else(|| schema(format!("{k} must be a number")))
            };
            Ok(NumPoint::Finite(Complex64::new(get("re")?, get("im")?)))
        }
        _ => Err(schema("numeric point must be {\"re\", \"im\"} or \"inf\"")),
    }
}

pub fn snapshots_from_json(v: &Value) -> Res<Vec<BTreeMap<Label, NumPoint>>> {
    as_arr(v, "snapshot list")?
        .iter()
        .map(|s| {
            as_obj(s, "snapshot")?
                .iter()
                .map(|(l, p)| Ok((l.clone(), num_point_from_json(p)?)))
                .collect()
        })
        .collect()
}

pub fn numeric_tree_to_json(t: &NumericTree) -> Value {
    let mut v = tree_to_json(&t.shape);
    let marking: Map<String, Value> = t
        .marking
        .iter()
        .map(|(id, iv)| {
            let m: Map<String, Value> = iv.iter().map(|(e, p)| (node_key(e), num_point_to_json(p))).collect();
            (id.to_string(), Value::Object(m))
        })
        .collect();
    v["marking"] = Value::Object(marking);
    v
}

// Error payloads

/// A stable machine-readable code and a witness for a domain error.
pub trait ErrorPayload {
    fn code(&self) -> &'static str;
    fn witness(&self) -> Value;
}

fn message(e: &impl std::fmt::Display) -> Value {
    Value::String(e.to_string())
}

impl ErrorPayload for ArithError {
    fn code(&self) -> &'static str {
        match self {
            ArithError::DegenerateTriple => "degenerate-triple",
            ArithError::DivisionByZero => "division-by-zero",
            ArithError::ZeroPoint => "zero-point",
            ArithError::ZeroFamily => "zero-family",
            ArithError::ConstantMap => "constant-map",
            ArithError::Parse(_) => "parse",
        }
    }
    fn witness(&self) -> Value {
        message(self)
    }
}

impl ErrorPayload for TreeError {
    fn code(&self) -> &'static str {
        match self {
            TreeError::InvalidIncidence { .. } => "invalid-incidence",
            TreeError::UnknownVertex(_) => "unknown-vertex",
            TreeError::NotInternal(_) => "not-internal",
            TreeError::NotAdmissible(_) => "not-admissible",
            TreeError::Invalid(_) => "invalid-tree",
            TreeError::InvalidPartition(_) => "invalid-partition",
            TreeError::LeafSetMismatch => "leaf-set-mismatch",
            TreeError::SingleVertexTree => "single-vertex-tree",
            TreeError::EmptySet => "empty-set",
            TreeError::BadTriple(_) => "bad-triple",
            TreeError::BadVertexKey(_) => "bad-vertex-key",
        }
    }
    fn witness(&self) -> Value {
        match self {
            TreeError::Invalid(vs) => Value::Array(
                vs.iter()
                    .map(|v| json!({"code": v.code(), "message": v.to_string()}))
                    .collect(),
            ),
            TreeError::NotAdmissible(a) => json!({"condition": a.condition(), "message": a.to_string()}),
            other => message(other),
        }
    }
}

impl ErrorPayload for ModuliError {
    fn code(&self) -> &'static str {
        match self {
            ModuliError::Tree(e) => e.code(),
            ModuliError::Arith(e) => e.code(),
            ModuliError::NotInjective(..) => "not-injective",
            ModuliError::EdgeCollision { .. } => "edge-collision",
            ModuliError::MarkingDomain { .. } => "marking-domain",
            ModuliError::MarkedSetTooSmall(_) => "marked-set-too-small",
            ModuliError::LeafSetMismatch => "leaf-set-mismatch",
            ModuliError::NotASubset(_) => "not-a-subset",
        }
    }
    fn witness(&self) -> Value {
        match self {
            ModuliError::Tree(e) => e.witness(),
            ModuliError::Arith(e) => e.witness(),
            other => message(other),
        }
    }
}

impl ErrorPayload for CoverError {
    fn code(&self) -> &'static str {
        match self {
            CoverError::Moduli(e) => e.code(),
            CoverError::Tree(e) => e.code(),
            CoverError::Arith(e) => e.code(),
            CoverError::InvalidPortrait(_) => "invalid-portrait",
            CoverError::InvalidCover(_) => "invalid-cover",
            CoverError::InconsistentDegree { .. } => "inconsistent-degree",
            CoverError::NotConnected => "not-connected",
            CoverError::EmptySelection => "empty-selection",
            CoverError::NoSuchComponent(_) => "no-such-component",
            CoverError::OverlappingDivisors(_) => "overlapping-divisors",
            CoverError::UnitOnDivisor(_) => "unit-on-divisor",
            CoverError::DivisorDegree { .. } => "divisor-degree",
            CoverError::NotRealizable(_) => "not-realizable",
            CoverError::PortraitMismatch => "portrait-mismatch",
            CoverError::InvariantBreach(_) => "invariant-breach",
        }
    }
    fn witness(&self) -> Value {
        match self {
            CoverError::Moduli(e) => e.witness(),
            CoverError::Tree(e) => e.witness(),
            CoverError::Arith(e) => e.witness(),
            CoverError::InvalidPortrait(vs) => Value::Array(
                vs.iter()
                    .map(|v| json!({"code": v.code(), "message": v.to_string()}))
                    .collect(),
            ),
            CoverError::InvalidCover(vs) => Value::Array(
                vs.iter()
                    .map(|v| json!({"code": v.code(), "message": v.to_string()}))
                    .collect(),
            ),
            other => message(other),
        }
    }
}

impl ErrorPayload for LimitError {
    fn code(&self) -> &'static str {
        match self {
            LimitError::Arith(e) => e.code(),
            LimitError::Tree(e) => e.code(),
            LimitError::Moduli(e) => e.code(),
            LimitError::Cover(e) => e.code(),
            LimitError::AdmissibilityFailure(_) => "admissibility-failure",
            LimitError::TooFewLabels(_) => "too-few-labels",
            LimitError::NotInjective(..) => "not-injective",
            LimitError::NotStabilized(_) => "not-stabilized",
            LimitError::InconsistentClustering { .. } => "inconsistent-clustering",
            LimitError::TooFewSnapshots { .. } => "too-few-snapshots",
            LimitError::LabelMismatch(_) => "label-mismatch",
            LimitError::BadParameters => "bad-parameters",
            LimitError::ConstantLimit { .. } => "constant-limit",
            LimitError::NotEquivariant(_) => "not-equivariant",
            LimitError::DegreeMismatch { .. } => "degree-mismatch",
        }
    }
    fn witness(&self) -> Value {
        match self {
            LimitError::Arith(e) => e.witness(),
            LimitError::Tree(e) => e.witness(),
            LimitError::Moduli(e) => e.witness(),
            LimitError::Cover(e) => e.witness(),
            LimitError::NotStabilized(qs) => json!(qs),
            LimitError::AdmissibilityFailure(a) => json!({"condition": a.condition(), "message": a.to_string()}),
            other => message(other),
        }
    }
}

impl ErrorPayload for DynError {
    fn code(&self) -> &'static str {
        match self {
            DynError::Moduli(e) => e.code(),
            DynError::Cover(e) => e.code(),
            DynError::NotASubset(_) => "not-a-subset",
            DynError::TooFewLabels(_) => "too-few-labels",
            DynError::LabelSetMismatch => "label-set-mismatch",
        }
    }
    fn witness(&self) -> Value {
        match self {
            DynError::Moduli(e) => e.witness(),
            DynError::Cover(e) => e.witness(),
            other => message(other),
        }
    }
}

impl ErrorPayload for PlumbError {
    fn code(&self) -> &'static str {
        match self {
            PlumbError::Limit(e) => e.code(),
            PlumbError::Moduli(e) => e.code(),
            PlumbError::CollisionAtEpsilon(..) => "collision-at-epsilon",
            PlumbError::BadEpsilon => "bad-epsilon",
            PlumbError::BadExponent => "bad-exponent",
        }
    }
    fn witness(&self) -> Value {
        match self {
            PlumbError::Limit(e) => e.witness(),
            PlumbError::Moduli(e) => e.witness(),
            other => message(other),
        }
    }
}

impl ErrorPayload for Invalid {
    fn code(&self) -> &'static str {
        match self {
            Invalid::Moduli(e) => e.code(),
            Invalid::Arith(e) => e.code(),
            Invalid::Limit(e) => e.code(),
        }
    }
    fn witness(&self) -> Value {
        match self {
            Invalid::Moduli(e) => e.witness(),
            Invalid::Arith(e) => e.witness(),
            Invalid::Limit(e) => e.witness(),
        }
    }
}

pub fn error_to_json(e: &impl ErrorPayload) -> Value {
    json!({"error": e.code(), "witness": e.witness()})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalars_round_trip() {
        let z = GaussianRational::from_parts(1, 2, -3, 4);
        assert_eq!(scalar_to_json(&z), json!({"re": "1/2", "im": "-3/4"}));
        assert_eq!(scalar_from_json(&scalar_to_json(&z)).unwrap(), z);
        assert_eq!(point_to_json(&ProjPoint::infinity()), json!({"u": "1", "v": "0"}));
    }

    #[test]
    fn spheres_round_trip() {
        let s = MarkedSphere::new(
            [("a", ProjPoint::zero()), ("b", ProjPoint::one()), ("c", ProjPoint::infinity())]
                .into_iter()
                .map(|(l, p)| (l.to_string(), p))
                .collect(),
        )
        .unwrap();
        let t = TreeOfSpheres::from_sphere(&s);
        let back = spheres_from_json(&spheres_to_json(&t)).unwrap().unwrap();
        assert_eq!(back, t);
        assert_eq!(sphere_from_json(&sphere_to_json(&s)).unwrap().unwrap(), s);
    }

    #[test]
    fn laurent_round_trip() {
        let p = LaurentPoint::affine(LaurentPoly::new([(1, GaussianRational::from_int(2)), (-1, GaussianRational::i())]));
        assert_eq!(laurent_point_from_json(&laurent_point_to_json(&p)).unwrap(), p);
    }
}
