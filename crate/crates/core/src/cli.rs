//! Command-line front end. Every command reads JSON files and writes one
//! canonical JSON document.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::arith::GaussianRational;
use crate::covers::{cover_iso, reconstruct_cover, validate_cover, validate_portrait, CoverError};
use crate::dynamics::{compatible, dyn_membership, validate_dyn};
use crate::json::{self, error_to_json, ErrorPayload, JsonError};
use crate::limits::{limit_cover, limit_tree, numeric_limit_tree, NumericConfigSequence};
use crate::moduli::{spheres_iso, TreeOfSpheres};
use crate::plumbing::{plumb_family, sample_family};
use crate::trees::{is_admissible, tree_from_partitions, trees_isomorphic, validate_tree, TreeError};

#[derive(Parser, Debug)]
#[command(name = "sphere-trees", version, about = "Exact computations with trees of spheres and their covers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Clustering tolerance for numeric limits.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    /// Number of trailing snapshots that must agree in numeric limits.
    #[arg(long, global = true)]
    pub window: Option<usize>,
    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check any supported object; the kind is inferred from its fields.
    Validate { file: PathBuf },
    /// Cross-ratio coordinates of a tree of spheres or marked sphere.
    Embed { file: PathBuf },
    /// Isomorphism of two trees, trees of spheres or covers.
    Iso { a: PathBuf, b: PathBuf },
    /// Limit of an exact Laurent family or of numeric snapshots.
    Limit { file: PathBuf },
    /// Limit cover of a family of marked rational maps.
    LimitCover { file: PathBuf },
    /// Projection of a tree of spheres to a subset of its labels.
    Project {
        file: PathBuf,
        #[arg(required = true, num_args = 1..)]
        labels: Vec<String>,
    },
    /// The cover with the given source tree and portrait.
    Reconstruct { source: PathBuf, portrait: PathBuf },
    /// A Laurent family converging to a tree of spheres.
    Plumb { file: PathBuf },
    /// A Laurent family evaluated at ε.
    Sample {
        file: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Whether the first tree is compatible with the second.
    Compat { tx: PathBuf, ty: PathBuf },
    /// Whether a cover underlies a dynamical system over the given labels.
    DynMember {
        file: PathBuf,
        #[arg(required = true, num_args = 1..)]
        labels: Vec<String>,
    },
}

/// Outcome of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub status: i32,
    pub output: Value,
    pub diagnostic: Option<String>,
}

enum Failure {
    Usage(String),
    Schema(JsonError),
    Domain { payload: Value, message: String },
}

impl From<JsonError> for Failure {
    fn from(e: JsonError) -> Self {
        Failure::Schema(e)
    }
}

fn domain<E: ErrorPayload + std::fmt::Display>(e: E) -> Failure {
    Failure::Domain {
        payload: error_to_json(&e),
        message: e.to_string(),
    }
}

fn invalid(code: &str, witness: Value) -> Failure {
    Failure::Domain {
        payload: json!({"error": code, "witness": witness}),
        message: code.to_string(),
    }
}

fn read(path: &PathBuf) -> Result<Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(json::parse(&text)?)
}

fn read_spheres(path: &PathBuf) -> Result<TreeOfSpheres, Failure> {
    let v = read(path)?;
    spheres_or_sphere(&v)
}

fn spheres_or_sphere(v: &Value) -> Result<TreeOfSpheres, Failure> {
    if v.get("points").is_some() {
        let s = json::sphere_from_json(v)?.map_err(domain)?;
        Ok(TreeOfSpheres::from_sphere(&s))
    } else {
        json::spheres_from_json(v)?.map_err(domain)
    }
}

fn violations<T: std::fmt::Display>(vs: &[T], code: impl Fn(&T) -> &'static str) -> Value {
    Value::Array(
        vs.iter()
            .map(|v| json!({"code": code(v), "message": v.to_string()}))
            .collect(),
    )
}

fn ok() -> Value {
    json!({"ok": true})
}

fn validate(v: &Value) -> Result<Value, Failure> {
    if v.get("partitions").is_some() {
        let ps = json::partitions_from_json(v)?.map_err(domain)?;
        is_admissible(&ps).map_err(|a| domain(TreeError::NotAdmissible(a)))?;
        let t = tree_from_partitions(&ps).map_err(domain)?;
        return Ok(json!({"ok": true, "tree": json::tree_to_json(&t)}));
    }
    if v.get("portrait").is_some() {
        json::cover_family_from_json(v)?.map_err(domain)?;
        return Ok(ok());
    }
    if v.get("dyn_tree").is_some() {
        let d = json::dyn_from_json(v)?.map_err(domain)?;
        let vs = validate_dyn(&d);
        if !vs.is_empty() {
            return Err(invalid("invalid-dynamical-system", violations(&vs, |v| v.code())));
        }
        return Ok(ok());
    }
    if v.get("source").is_some() {
        let c = json::cover_from_json(v)?.map_err(domain)?;
        let vs = validate_cover(&c);
        if !vs.is_empty() {
            return Err(domain(CoverError::InvalidCover(vs)));
        }
        return Ok(ok());
    }
    if v.get("F").is_some() {
        let p = json::portrait_from_json(v)?;
        let vs = validate_portrait(&p);
        if !vs.is_empty() {
            return Err(domain(CoverError::InvalidPortrait(vs)));
        }
        return Ok(ok());
    }
    if v.get("paths").is_some() {
        json::family_from_json(v)?.map_err(domain)?;
        return Ok(ok());
    }
    if v.get("points").is_some() || v.get("marking").is_some() {
        spheres_or_sphere(v)?;
        return Ok(ok());
    }
    if v.get("leaves").is_some() {
        let t = json::tree_from_json(v)?;
        let vs = validate_tree(&t);
        if !vs.is_empty() {
            return Err(domain(TreeError::Invalid(vs)));
        }
        return Ok(ok());
    }
    Err(Failure::Schema(JsonError::Schema("unrecognized object".into())))
}

fn leaves_of(v: &Value) -> Result<BTreeSet<String>, Failure> {
    let v = v.get("source").unwrap_or(v);
    match v.get("points") {
        Some(pts) => Ok(json::sphere_from_json(&json!({"points": pts}))?
            .map_err(domain)?
            .labels()
            .cloned()
            .collect()),
        None => Ok(json::labels_from_json(v.get("leaves").unwrap_or(&Value::Null))?),
    }
}

fn iso(a: &Value, b: &Value) -> Result<Value, Failure> {
    if leaves_of(a)? != leaves_of(b)? {
        return Ok(json!({"isomorphic": false}));
    }
    let result = if a.get("source").is_some() && b.get("source").is_some() {
        let c1 = json::cover_from_json(a)?.map_err(domain)?;
        let c2 = json::cover_from_json(b)?.map_err(domain)?;
        cover_iso(&c1, &c2).map_err(domain)?
    } else if a.get("marking").is_some() || a.get("points").is_some() {
        spheres_iso(&spheres_or_sphere(a)?, &spheres_or_sphere(b)?).map_err(domain)?
    } else {
        let t1 = json::tree_from_json(a)?;
        let t2 = json::tree_from_json(b)?;
        for t in [&t1, &t2] {
            let vs = validate_tree(t);
            if !vs.is_empty() {
                return Err(domain(TreeError::Invalid(vs)));
            }
        }
        trees_isomorphic(&t1, &t2).map_err(domain)?
    };
    Ok(json!({"isomorphic": result}))
}

fn label_set(labels: &[String]) -> BTreeSet<String> {
    labels.iter().cloned().collect()
}

fn numeric_command(c: &Command) -> bool {
    matches!(c, Command::Limit { .. })
}

fn execute(cli: &Cli) -> Result<Value, Failure> {
    if !numeric_command(&cli.command) && (cli.tolerance.is_some() || cli.window.is_some()) {
        return Err(Failure::Usage("--tolerance and --window apply only to numeric limits".into()));
    }
    if let Some(t) = cli.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::Usage("--tolerance must be positive".into()));
        }
    }
    if cli.window == Some(0) {
        return Err(Failure::Usage("--window must be at least 1".into()));
    }
    match &cli.command {
        Command::Validate { file } => validate(&read(file)?),
        Command::Embed { file } => Ok(json::embedding_to_json(&read_spheres(file)?.embed())),
        Command::Iso { a, b } => iso(&read(a)?, &read(b)?),
        Command::Limit { file } => {
            let v = read(file)?;
            if v.is_array() {
                let seq = NumericConfigSequence::new(
                    json::snapshots_from_json(&v)?,
                    cli.tolerance.unwrap_or(1e-6),
                    cli.window.unwrap_or(5),
                )
                .map_err(domain)?;
                let t = numeric_limit_tree(&seq).map_err(domain)?;
                Ok(json::numeric_tree_to_json(&t))
            } else {
                if cli.tolerance.is_some() || cli.window.is_some() {
                    return Err(Failure::Usage("exact families take no --tolerance or --window".into()));
                }
                let fam = json::family_from_json(&v)?.map_err(domain)?;
                Ok(json::spheres_to_json(&limit_tree(&fam).map_err(domain)?))
            }
        }
        Command::LimitCover { file } => {
            let fam = json::cover_family_from_json(&read(file)?)?.map_err(domain)?;
            Ok(json::cover_to_json(&limit_cover(&fam).map_err(domain)?))
        }
        Command::Project { file, labels } => {
            let t = read_spheres(file)?;
            Ok(json::spheres_to_json(&t.project(&label_set(labels)).map_err(domain)?))
        }
        Command::Reconstruct { source, portrait } => {
            let t = read_spheres(source)?;
            let p = json::portrait_from_json(&read(portrait)?)?;
            Ok(json::cover_to_json(&reconstruct_cover(&t, &p).map_err(domain)?))
        }
        Command::Plumb { file } => Ok(json::family_to_json(&plumb_family(&read_spheres(file)?).map_err(domain)?)),
        Command::Sample { file, eps } => {
            let eps = GaussianRational::parse_rational(eps)
                .map(GaussianRational::from_real)
                .map_err(|e| Failure::Usage(format!("--eps: {e}")))?;
            let fam = json::family_from_json(&read(file)?)?.map_err(domain)?;
            Ok(json::sphere_to_json(&sample_family(&fam, &eps).map_err(domain)?))
        }
        Command::Compat { tx, ty } => {
            let r = compatible(&read_spheres(tx)?, &read_spheres(ty)?).map_err(domain)?;
            Ok(json!({"compatible": r}))
        }
        Command::DynMember { file, labels } => {
            let c = json::cover_from_json(&read(file)?)?.map_err(domain)?;
            Ok(match dyn_membership(&c, &label_set(labels)).map_err(domain)? {
                Some(d) => json!({"member": true, "system": json::dyn_to_json(&d)}),
                None => json!({"member": false}),
            })
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match execute(cli) {
        Ok(output) => Outcome {
            status: 0,
            output,
            diagnostic: None,
        },
        Err(Failure::Domain { payload, message }) => Outcome {
            status: 1,
            output: payload,
            diagnostic: Some(message),
        },
        Err(Failure::Schema(e)) => Outcome {
            status: 2,
            output: json!({"error": "schema", "witness": e.to_string()}),
            diagnostic: Some(e.to_string()),
        },
        Err(Failure::Usage(m)) => Outcome {
            status: 2,
            output: json!({"error": "usage", "witness": m}),
            diagnostic: Some(m),
        },
    }
}

fn configure_threads() {
    let Ok(n) = std::env::var("SPHERE_TREES_THREADS") else {
        return;
    };
    match n.trim().parse::<usize>() {
        Ok(n) => {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
        Err(_) => eprintln!("ignoring SPHERE_TREES_THREADS={n:?}"),
    }
}

/// Entry point of the binary; returns the exit status.
pub fn main() -> i32 {
    configure_threads();
    let cli = Cli::parse();
    let outcome = run(&cli);
    if let Some(d) = &outcome.diagnostic {
        eprintln!("sphere-trees: {d}");
    }
    let text = json::render(&outcome.output);
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, text) {
                eprintln!("sphere-trees: {}: {e}", path.display());
                return 2;
            }
        }
        None => print!("{text}"),
    }
    outcome.status
}
