//! Command-line front end: subcommand routing, deterministic seeding, and
//! machine-readable reports. Reports are JSON by default; `--format csv`
//! mirrors the results table for diffable regression artifacts.

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bmo::{bmo_norm, ArcFamily, BmoFlavor};
use crate::codes::{exact_n, gv_greedy, WordOrder};
use crate::error::Error;
use crate::gaussian::tensor_decompose;
use crate::matroid::{horn_rado_partition, GFVectorSet, PartitionOutcome};
use crate::relations::relation_count;
use crate::riesz::{riesz_product, sidon_constant_search};
use crate::spectrum::{synth_eval, FreqSet, GroupSpec, TrigPoly};
use crate::subgauss::{
    entropy_integral, packing_net, psi_norm, sg_system_lower, DiscreteDistribution,
    FunctionSystem,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Parser, Debug, Clone)]
#[command(
    name = "thinset",
    version,
    about = "Desk-scale diagnostics for thin frequency sets",
    propagate_version = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// RNG seed for every stochastic step.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Sampling grid size, where the subcommand evaluates on a grid.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Enumeration budget for counting subcommands.
    #[arg(long, global = true)]
    pub cap: Option<u64>,
    /// Convergence tolerance for iterative solvers.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Report rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Count signed relations on a frequency set and test quasi-independence.
    Relations {
        /// Frequency set: inline JSON like '[1,2,3]' or a path to a JSON file.
        #[arg(long)]
        set: String,
        /// Materialize the nontrivial relation certificates.
        #[arg(long)]
        witnesses: bool,
    },
    /// Partition GF(p) vectors into independent parts, or prove none exists.
    Matroid {
        /// Field characteristic (prime).
        #[arg(long)]
        p: u64,
        /// Vectors: inline JSON like '[[1,0],[0,1],[1,1]]' or a file path.
        #[arg(long)]
        vectors: String,
        /// Number of parts.
        #[arg(long)]
        k: usize,
    },
    /// Certified lower bound for the subgaussian constant of a function system.
    Sg {
        /// System file: {"grid": M, "polys": [trig polynomials...]}.
        #[arg(long)]
        system: String,
        /// Random restarts for the direction search.
        #[arg(long, default_value_t = 64)]
        restarts: usize,
    },
    /// Orlicz psi_a norm of a distribution.
    Psi {
        /// "rademacher", "normal-quadrature:N", "uniform-circle:M",
        /// or atoms as JSON [[value, weight], ...] (value real or [re, im]).
        #[arg(long)]
        dist: String,
        /// Orlicz exponent.
        #[arg(long, default_value_t = 2.0)]
        a: f64,
    },
    /// Riesz product of a quasi-independent set on a sampling grid.
    Riesz {
        /// Frequency set: inline JSON or file path.
        #[arg(long)]
        set: String,
        /// Phase choice: "random" (seeded unimodular) or "ones".
        #[arg(long, default_value = "random")]
        phases: String,
    },
    /// Certified Sidon-constant lower bound via L1 interpolation duality.
    Sidon {
        /// Character group, e.g. "cyclic:64" or "primepower:3:2".
        #[arg(long)]
        group: String,
        /// Character indices: inline JSON or file path.
        #[arg(long)]
        set: String,
        /// Phase vectors to try (enumerated exhaustively when feasible).
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Mehler tensor decomposition with norm certificates.
    Mehler {
        /// Number of Gaussian variables.
        #[arg(long)]
        n: usize,
        /// Splitting parameter in (0, 1).
        #[arg(long)]
        delta: f64,
        /// Hermite truncation degree.
        #[arg(long, default_value_t = 8)]
        degree: usize,
        /// Eigenvalue vector, comma-separated in [-1, 1]; defaults to ones.
        #[arg(long)]
        z: Option<String>,
        /// Also write the full decomposition (both kernels) to this path.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Constant-weight code families: greedy lower bound or exact maximum.
    Codes {
        /// Word length.
        #[arg(long)]
        n: usize,
        /// Code weight.
        #[arg(long)]
        m: usize,
        /// Max allowed pairwise intersection.
        #[arg(long)]
        k: usize,
        /// Run the exact branch-and-bound search instead of the greedy pass.
        #[arg(long)]
        exact: bool,
    },
    /// BMO norm of a trigonometric polynomial on a sampled circle.
    Bmo {
        /// Polynomial JSON: {"group": ..., "coeffs": [[freq, re, im], ...]}.
        #[arg(long)]
        poly: String,
        /// "mean1" or "psi<exponent>", e.g. "psi2".
        #[arg(long, default_value = "psi2")]
        flavor: String,
        /// Arc family: "dyadic" or "all".
        #[arg(long, default_value = "dyadic")]
        arcs: String,
    },
    /// Separated net in a function system's embedding, with volumetric bound.
    Net {
        /// System file: {"grid": M, "polys": [trig polynomials...]}.
        #[arg(long)]
        system: String,
        /// Separation parameter.
        #[arg(long)]
        delta: f64,
        /// Certified subgaussian bound for the system.
        #[arg(long)]
        sg: f64,
        /// Sup-norm bound for the system.
        #[arg(long)]
        sup: f64,
    },
    /// Stationary entropy integral of a frequency set on a cyclic group.
    Entropy {
        /// Character indices: inline JSON or file path.
        #[arg(long)]
        set: String,
        /// Cyclic group, e.g. "cyclic:64".
        #[arg(long)]
        group: String,
    },
}

/// Machine-readable run report. Every numeric result is labeled
/// "certified-lower-bound" | "exact" | "estimate"; estimates carry their
/// seed and trial count.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub tool_version: String,
    pub config: Value,
    pub results: Value,
    pub provenance: Vec<String>,
    pub wall_ms: u64,
}

/// A failed run: exit code plus the structured error object to print.
#[derive(Debug, Clone)]
pub struct Failure {
    pub exit_code: i32,
    pub payload: Value,
}

type RunResult<T> = std::result::Result<T, Failure>;

fn input_err(msg: impl std::fmt::Display) -> Failure {
    Failure {
        exit_code: 2,
        payload: json!({"error": "InputError", "message": msg.to_string()}),
    }
}

fn module_err(e: Error) -> Failure {
    let mut payload = json!({"error": e.name(), "message": e.to_string()});
    if let Error::CapExceeded {
        partial_count: Some(c),
        ..
    } = &e
    {
        payload["partial_count"] = big(*c);
    }
    Failure {
        exit_code: 3,
        payload,
    }
}

fn exact(v: impl Serialize) -> Value {
    json!({"value": v, "kind": "exact"})
}

fn certified_lower(v: impl Serialize) -> Value {
    json!({"value": v, "kind": "certified-lower-bound"})
}

#[allow(dead_code)]
fn estimate(v: f64, seed: u64, trials: usize) -> Value {
    json!({"value": v, "kind": "estimate", "seed": seed, "trials": trials})
}

fn big(n: u128) -> Value {
    if n <= u64::MAX as u128 {
        json!(n as u64)
    } else {
        json!(n.to_string())
    }
}

/// Inline JSON if the argument parses as JSON, otherwise a file path.
fn read_json_arg(arg: &str) -> RunResult<Value> {
    if let Ok(v) = serde_json::from_str::<Value>(arg) {
        return Ok(v);
    }
    let text = std::fs::read_to_string(arg)
        .map_err(|e| input_err(format!("cannot read {arg}: {e}")))?;
    serde_json::from_str(&text).map_err(|e| input_err(format!("{arg} is not valid JSON: {e}")))
}

/// A frequency set: a bare list of integers (interpreted in `group`) or the
/// full serialized form carrying its own group.
fn parse_freqset(arg: &str, group: GroupSpec) -> RunResult<FreqSet> {
    let v = read_json_arg(arg)?;
    if let Ok(xs) = serde_json::from_value::<Vec<i64>>(v.clone()) {
        return FreqSet::from_ints(group, &xs).map_err(module_err);
    }
    serde_json::from_value::<FreqSet>(v)
        .map_err(|e| input_err(format!("not a frequency set: {e}")))
}

fn parse_group(s: &str) -> RunResult<GroupSpec> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        ["integers"] => Ok(GroupSpec::Integers),
        ["cyclic", m] => m
            .parse::<u64>()
            .map(|m| GroupSpec::Cyclic { m })
            .map_err(|_| input_err(format!("bad cyclic order in {s:?}"))),
        ["torus", m] => m
            .parse::<u64>()
            .map(|m| GroupSpec::TorusGrid { m })
            .map_err(|_| input_err(format!("bad torus grid in {s:?}"))),
        ["primepower", p, n] => match (p.parse::<u64>(), n.parse::<usize>()) {
            (Ok(p), Ok(n)) => Ok(GroupSpec::PrimePower { p, n }),
            _ => Err(input_err(format!("bad prime power in {s:?}"))),
        },
        _ => Err(input_err(format!(
            "unknown group {s:?}; expected integers, cyclic:M, torus:M, or primepower:P:N"
        ))),
    }
}

/// Built-in names or a JSON atom list [[value, weight], ...].
fn parse_dist(arg: &str) -> RunResult<DiscreteDistribution> {
    match arg.split(':').collect::<Vec<_>>().as_slice() {
        ["rademacher"] => return Ok(DiscreteDistribution::rademacher()),
        ["normal-quadrature"] => {
            return DiscreteDistribution::normal_quadrature(129).map_err(module_err)
        }
        ["normal-quadrature", n] => {
            let n = n
                .parse::<usize>()
                .map_err(|_| input_err(format!("bad node count in {arg:?}")))?;
            return DiscreteDistribution::normal_quadrature(n).map_err(module_err);
        }
        ["uniform-circle"] => return DiscreteDistribution::uniform_circle(64).map_err(module_err),
        ["uniform-circle", m] => {
            let m = m
                .parse::<usize>()
                .map_err(|_| input_err(format!("bad atom count in {arg:?}")))?;
            return DiscreteDistribution::uniform_circle(m).map_err(module_err);
        }
        _ => {}
    }
    let v = read_json_arg(arg)?;
    let rows = v
        .as_array()
        .ok_or_else(|| input_err("distribution JSON must be a list of [value, weight] pairs"))?;
    let mut atoms = Vec::with_capacity(rows.len());
    for row in rows {
        let pair = row
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| input_err("each atom must be a [value, weight] pair"))?;
        let value = if let Some(x) = pair[0].as_f64() {
            Complex64::new(x, 0.0)
        } else if let Some(c) = pair[0].as_array().filter(|c| c.len() == 2) {
            match (c[0].as_f64(), c[1].as_f64()) {
                (Some(re), Some(im)) => Complex64::new(re, im),
                _ => return Err(input_err("complex atom values are [re, im] numbers")),
            }
        } else {
            return Err(input_err("atom value must be a number or [re, im]"));
        };
        let weight = pair[1]
            .as_f64()
            .ok_or_else(|| input_err("atom weight must be a number"))?;
        atoms.push((value, weight));
    }
    DiscreteDistribution::new(atoms).map_err(module_err)
}

/// {"grid": M, "polys": [...]}: each polynomial is synthesized on the shared
/// grid, giving a function system over one atom set.
fn parse_system(arg: &str) -> RunResult<(FunctionSystem, usize)> {
    let v = read_json_arg(arg)?;
    let grid = v
        .get("grid")
        .and_then(Value::as_u64)
        .ok_or_else(|| input_err("system JSON needs a \"grid\" field"))? as usize;
    let polys: Vec<TrigPoly> = serde_json::from_value(
        v.get("polys")
            .cloned()
            .ok_or_else(|| input_err("system JSON needs a \"polys\" list"))?,
    )
    .map_err(|e| input_err(format!("bad polynomial list: {e}")))?;
    if polys.is_empty() {
        return Err(input_err("system needs at least one polynomial"));
    }
    let mut funcs = Vec::with_capacity(polys.len());
    for p in &polys {
        funcs.push(synth_eval(p, grid).map_err(module_err)?);
    }
    let system = FunctionSystem::new(&funcs).map_err(module_err)?;
    Ok((system, grid))
}

fn parse_trigpoly(arg: &str) -> RunResult<TrigPoly> {
    let v = read_json_arg(arg)?;
    serde_json::from_value::<TrigPoly>(v)
        .map_err(|e| input_err(format!("not a trigonometric polynomial: {e}")))
}

/// Bounds the global thread pool when THINSET_THREADS is set. Called once;
/// later calls are no-ops because the pool is already built.
pub fn configure_threads() {
    if let Ok(s) = std::env::var("THINSET_THREADS") {
        if let Ok(n) = s.trim().parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

/// Dispatches a parsed invocation and assembles its report (without wall
/// time, which the caller stamps).
pub fn run(cli: &Cli) -> RunResult<Report> {
    let base_config = json!({
        "seed": cli.seed,
        "grid": cli.grid,
        "cap": cli.cap,
        "tol": cli.tol,
        "format": match cli.format { Format::Json => "json", Format::Csv => "csv" },
    });
    let mut config = base_config;
    let mut provenance: Vec<String> = Vec::new();

    let results = match &cli.command {
        Command::Relations { set, witnesses } => {
            config["subcommand"] = json!("relations");
            config["set"] = json!(set);
            config["witnesses"] = json!(witnesses);
            let a = parse_freqset(set, GroupSpec::Integers)?;
            let cap = cli.cap.unwrap_or(1_000_000) as u128;
            let rep = relation_count(&a, cap, *witnesses).map_err(module_err)?;
            provenance.push(
                "count is the exact number of signed {-1,0,1} relations summing to zero, \
                 including the trivial one; quasi-independence means count == 1"
                    .into(),
            );
            let mut out = json!({
                "count": exact(big(rep.count)),
                "quasi_independent": exact(rep.count == 1),
                "cap": big(rep.cap),
            });
            if let Some(certs) = &rep.certificates {
                out["witnesses"] = json!(certs
                    .iter()
                    .map(|c| json!({"signs": c.signs}))
                    .collect::<Vec<_>>());
                out["witnesses_truncated"] = json!(rep.witnesses_truncated);
            }
            out
        }
        Command::Matroid { p, vectors, k } => {
            config["subcommand"] = json!("matroid");
            config["p"] = json!(p);
            config["vectors"] = json!(vectors);
            config["k"] = json!(k);
            let v = read_json_arg(vectors)?;
            let rows: Vec<Vec<u64>> = serde_json::from_value(v)
                .map_err(|e| input_err(format!("vectors must be a list of integer rows: {e}")))?;
            let dim = rows.first().map(Vec::len).unwrap_or(0);
            let vs = GFVectorSet::new(*p, dim, rows).map_err(module_err)?;
            let outcome = horn_rado_partition(&vs, *k).map_err(module_err)?;
            provenance.push(
                "partitions are verified part-by-part for linear independence; \
                 failure witnesses satisfy k*rank(A) < |A|"
                    .into(),
            );
            match outcome {
                PartitionOutcome::Partitioned(part) => json!({
                    "outcome": exact("partitioned"),
                    "parts": part.parts,
                }),
                PartitionOutcome::Infeasible(w) => json!({
                    "outcome": exact("infeasible"),
                    "witness": {"indices": w.indices, "rank": w.rank, "k": w.k},
                }),
            }
        }
        Command::Sg { system, restarts } => {
            config["subcommand"] = json!("sg");
            config["system"] = json!(system);
            config["restarts"] = json!(restarts);
            let (s, grid) = parse_system(system)?;
            let rep = sg_system_lower(&s, *restarts, cli.seed).map_err(module_err)?;
            provenance.push(
                "sg_lower maximizes the one-dimensional subgaussian constant over \
                 explicit unit directions; every reported value is realized by a direction"
                    .into(),
            );
            json!({
                "sg_lower": certified_lower(rep.value),
                "direction": rep.direction,
                "grid": exact(grid),
                "restarts": json!(restarts),
                "seed": json!(cli.seed),
            })
        }
        Command::Psi { dist, a } => {
            config["subcommand"] = json!("psi");
            config["dist"] = json!(dist);
            config["a"] = json!(a);
            let d = parse_dist(dist)?;
            let v = psi_norm(&d, *a).map_err(module_err)?;
            provenance
                .push("psi norm solved by bisection to relative tolerance 1e-9".into());
            json!({"psi_norm": exact(v), "a": json!(a)})
        }
        Command::Riesz { set, phases } => {
            config["subcommand"] = json!("riesz");
            config["set"] = json!(set);
            config["phases"] = json!(phases);
            let a = parse_freqset(set, GroupSpec::Integers)?;
            let xs = a.scalars().map_err(module_err)?;
            let spread: i64 = xs.iter().map(|x| x.abs()).sum();
            let min_grid = ((2 * spread + 1).max(2) as usize).next_power_of_two();
            let m = cli.grid.unwrap_or(min_grid);
            let z: Vec<Complex64> = match phases.as_str() {
                "ones" => vec![Complex64::new(1.0, 0.0); a.len()],
                "random" => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    (0..a.len())
                        .map(|_| {
                            let th = rng.gen::<f64>() * std::f64::consts::TAU;
                            Complex64::new(th.cos(), th.sin())
                        })
                        .collect()
                }
                other => {
                    return Err(input_err(format!(
                        "unknown phase mode {other:?}; expected \"random\" or \"ones\""
                    )))
                }
            };
            let rp = riesz_product(&a, &z, m).map_err(module_err)?;
            let vals: Vec<f64> = rp.samples.atoms.iter().map(|&(v, _)| v.re).collect();
            let min = vals.iter().cloned().fold(f64::INFINITY, f64::min);
            let sup = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            provenance.push(
                "product sampled alias-free; nonnegativity, unit mean, and the signed \
                 coefficient expansion are asserted during construction"
                    .into(),
            );
            json!({
                "grid": exact(m),
                "min": exact(min),
                "mean": exact(mean),
                "sup": exact(sup),
                "phases": rp.phases.iter().map(|z| json!([z.re, z.im])).collect::<Vec<_>>(),
                "seed": json!(cli.seed),
            })
        }
        Command::Sidon {
            group,
            set,
            samples,
        } => {
            config["subcommand"] = json!("sidon");
            config["group"] = json!(group);
            config["set"] = json!(set);
            config["samples"] = json!(samples);
            let g = parse_group(group)?;
            let l = parse_freqset(set, g)?;
            let tol = cli.tol.unwrap_or(1e-6);
            if !(tol > 0.0) {
                return Err(input_err("tolerance must be positive"));
            }
            let v = sidon_constant_search(&l, *samples, cli.seed, tol).map_err(module_err)?;
            provenance.push(
                "each phase vector contributes the dual (certified) side of its \
                 interpolation problem; the maximum is a true Sidon-constant lower bound"
                    .into(),
            );
            json!({
                "sidon_lower": certified_lower(v),
                "tol": json!(tol),
                "samples": json!(samples),
                "seed": json!(cli.seed),
            })
        }
        Command::Mehler {
            n,
            delta,
            degree,
            z,
            report,
        } => {
            config["subcommand"] = json!("mehler");
            config["n"] = json!(n);
            config["delta"] = json!(delta);
            config["degree"] = json!(degree);
            config["z"] = json!(z);
            let zs: Vec<f64> = match z {
                None => vec![1.0; *n],
                Some(s) => {
                    let parsed: std::result::Result<Vec<f64>, _> =
                        s.split(',').map(|t| t.trim().parse::<f64>()).collect();
                    parsed.map_err(|_| input_err(format!("bad eigenvalue list {s:?}")))?
                }
            };
            let (t, r) = tensor_decompose(*n, *delta, &zs, *degree).map_err(module_err)?;
            provenance.push(
                "l1_norm_t is a quadrature-certified upper bound on the kernel's L1 mass \
                 (asserted <= 2/delta); op_norm_r is the exact diagonal spectral norm"
                    .into(),
            );
            if let Some(path) = report {
                let full = json!({"t": t, "r": r});
                let text = serde_json::to_string_pretty(&full).expect("kernel serialization");
                std::fs::write(path, text)
                    .map_err(|e| input_err(format!("cannot write {}: {e}", path.display())))?;
            }
            json!({
                "l1_norm_t": exact(t.l1_norm),
                "l1_bound": exact(2.0 / delta),
                "op_norm_r": exact(r.op_norm_2to2),
                "decomposition_written": json!(report.is_some()),
            })
        }
        Command::Codes { n, m, k, exact: want_exact } => {
            config["subcommand"] = json!("codes");
            config["n"] = json!(n);
            config["m"] = json!(m);
            config["k"] = json!(k);
            config["exact"] = json!(want_exact);
            if *want_exact {
                let v = exact_n(*n, *m, *k).map_err(module_err)?;
                provenance.push(
                    "maximum family size from branch-and-bound clique search over \
                     admissible word pairs"
                        .into(),
                );
                json!({"max_family": exact(v)})
            } else {
                let fam = gv_greedy(*n, *m, *k, &WordOrder::Lex).map_err(module_err)?;
                provenance.push(
                    "the greedy family is itself a valid packing, so its size is a \
                     certified lower bound for the maximum"
                        .into(),
                );
                let mut out = json!({
                    "family_size": certified_lower(fam.len()),
                    "maximal": exact(fam.maximal),
                });
                if fam.len() <= 200 {
                    out["words"] = json!(fam.words);
                }
                out
            }
        }
        Command::Bmo { poly, flavor, arcs } => {
            config["subcommand"] = json!("bmo");
            config["poly"] = json!(poly);
            config["flavor"] = json!(flavor);
            config["arcs"] = json!(arcs);
            let p = parse_trigpoly(poly)?;
            let m = cli.grid.unwrap_or(1024);
            let flav = if flavor == "mean1" {
                BmoFlavor::Mean1
            } else if let Some(rest) = flavor.strip_prefix("psi") {
                let a = rest
                    .parse::<f64>()
                    .map_err(|_| input_err(format!("bad flavor {flavor:?}")))?;
                BmoFlavor::Psi { a }
            } else {
                return Err(input_err(format!(
                    "unknown flavor {flavor:?}; expected \"mean1\" or \"psi<a>\""
                )));
            };
            let family = match arcs.as_str() {
                "dyadic" => ArcFamily::dyadic(m).map_err(module_err)?,
                "all" => ArcFamily::all(m).map_err(module_err)?,
                other => {
                    return Err(input_err(format!(
                        "unknown arc family {other:?}; expected \"dyadic\" or \"all\""
                    )))
                }
            };
            let samples = synth_eval(&p, m).map_err(module_err)?;
            let v = bmo_norm(&samples, flav, &family).map_err(module_err)?;
            provenance.push(
                "exact supremum over the listed grid-endpoint arc family; Orlicz flavors \
                 use per-arc bisection to relative tolerance 1e-9"
                    .into(),
            );
            json!({
                "bmo_norm": exact(v),
                "grid": exact(m),
                "arcs": json!(family.arcs.len()),
            })
        }
        Command::Net {
            system,
            delta,
            sg,
            sup,
        } => {
            config["subcommand"] = json!("net");
            config["system"] = json!(system);
            config["delta"] = json!(delta);
            config["sg"] = json!(sg);
            config["sup"] = json!(sup);
            let (s, grid) = parse_system(system)?;
            let rep = packing_net(&s, *delta, *sg, *sup).map_err(module_err)?;
            provenance.push(
                "log_size_bound is valid whenever the supplied subgaussian and sup-norm \
                 bounds really dominate the system"
                    .into(),
            );
            json!({
                "net_size": exact(rep.points.len()),
                "separation": exact(rep.separation),
                "log_size_bound": certified_lower(rep.bound),
                "points": rep.points,
                "grid": exact(grid),
            })
        }
        Command::Entropy { set, group } => {
            config["subcommand"] = json!("entropy");
            config["set"] = json!(set);
            config["group"] = json!(group);
            let g = parse_group(group)?;
            let l = parse_freqset(set, g)?;
            let v = entropy_integral(&l).map_err(module_err)?;
            provenance.push(
                "entropy integral evaluated exactly as a finite sum over sorted distinct \
                 translation distances"
                    .into(),
            );
            json!({"entropy_integral": exact(v)})
        }
    };

    Ok(Report {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        results,
        provenance,
        wall_ms: 0,
    })
}

/// Flattens the results object into "field,value,kind" rows.
fn render_csv(report: &Report) -> String {
    fn quote(s: &str) -> String {
        if s.contains(',') || s.contains('"') || s.contains('\n') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_string()
        }
    }
    fn emit(rows: &mut Vec<(String, String, String)>, path: &str, v: &Value) {
        match v {
            Value::Object(map) => {
                if let Some(value) = map.get("value") {
                    let kind = map
                        .get("kind")
                        .and_then(Value::as_str)
                        .unwrap_or_default()
                        .to_string();
                    rows.push((path.to_string(), value.to_string(), kind));
                } else {
                    for (k, inner) in map {
                        let next = if path.is_empty() {
                            k.clone()
                        } else {
                            format!("{path}.{k}")
                        };
                        emit(rows, &next, inner);
                    }
                }
            }
            other => rows.push((path.to_string(), other.to_string(), String::new())),
        }
    }
    let mut rows = Vec::new();
    emit(&mut rows, "", &report.results);
    let mut out = String::from("field,value,kind\n");
    for (f, v, k) in rows {
        out.push_str(&format!("{},{},{}\n", quote(&f), quote(&v), quote(&k)));
    }
    out
}

fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Json => {
            let mut text =
                serde_json::to_string_pretty(report).expect("report serialization");
            text.push('\n');
            text
        }
        Format::Csv => render_csv(report),
    }
}

/// Full front end: parse, dispatch, render, and return the process exit code
/// (0 success, 2 malformed invocation or input, 3 module error).
pub fn execute<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    configure_threads();
    let started = Instant::now();
    match run(&cli) {
        Ok(mut report) => {
            report.wall_ms = started.elapsed().as_millis() as u64;
            let rendered = render(&report, cli.format);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, &rendered) {
                        eprintln!(
                            "{}",
                            json!({"error": "InputError",
                                   "message": format!("cannot write {}: {e}", path.display())})
                        );
                        return 2;
                    }
                }
                None => print!("{rendered}"),
            }
            0
        }
        Err(failure) => {
            eprintln!(
                "{}",
                serde_json::to_string_pretty(&failure.payload).expect("error serialization")
            );
            failure.exit_code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(args).expect("test invocation parses")
    }

    #[test]
    fn relations_inline_set_counts_three() {
        let cli = parse(&["thinset", "relations", "--set", "[1,2,3]"]);
        let rep = run(&cli).unwrap();
        assert_eq!(rep.results["count"]["value"], json!(3));
        assert_eq!(rep.results["count"]["kind"], json!("exact"));
        assert_eq!(rep.results["quasi_independent"]["value"], json!(false));
    }

    #[test]
    fn relations_witnesses_are_materialized() {
        let cli = parse(&["thinset", "relations", "--set", "[1,2,3]", "--witnesses"]);
        let rep = run(&cli).unwrap();
        let w = rep.results["witnesses"].as_array().unwrap();
        assert_eq!(w.len(), 2);
    }

    #[test]
    fn psi_rademacher_is_one() {
        let cli = parse(&["thinset", "psi", "--dist", "rademacher", "--a", "2"]);
        let rep = run(&cli).unwrap();
        let v = rep.results["psi_norm"]["value"].as_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn psi_accepts_inline_atom_lists() {
        let cli = parse(&[
            "thinset",
            "psi",
            "--dist",
            "[[1.0, 0.5], [-1.0, 0.5]]",
            "--a",
            "2",
        ]);
        let rep = run(&cli).unwrap();
        let v = rep.results["psi_norm"]["value"].as_f64().unwrap();
        assert!((v - 1.0).abs() < 1e-8);
    }

    #[test]
    fn unknown_subcommand_exits_two() {
        assert_eq!(execute(["thinset", "frobnicate"]), 2);
    }

    #[test]
    fn missing_file_exits_two() {
        assert_eq!(
            execute(["thinset", "relations", "--set", "/nonexistent/set.json"]),
            2
        );
    }

    #[test]
    fn module_error_exits_three() {
        // Zero frequency is rejected by the set constructor.
        assert_eq!(execute(["thinset", "relations", "--set", "[0]"]), 3);
    }

    #[test]
    fn codes_exact_reproduces_the_projective_plane() {
        let cli = parse(&[
            "thinset", "codes", "--n", "7", "--m", "3", "--k", "1", "--exact",
        ]);
        let rep = run(&cli).unwrap();
        assert_eq!(rep.results["max_family"]["value"], json!(7));
    }

    #[test]
    fn codes_greedy_reports_a_certified_family() {
        let cli = parse(&["thinset", "codes", "--n", "6", "--m", "3", "--k", "1"]);
        let rep = run(&cli).unwrap();
        assert_eq!(
            rep.results["family_size"]["kind"],
            json!("certified-lower-bound")
        );
        assert!(rep.results["family_size"]["value"].as_u64().unwrap() >= 4);
    }

    #[test]
    fn matroid_partitions_the_standard_basis_pairs() {
        let cli = parse(&[
            "thinset",
            "matroid",
            "--p",
            "2",
            "--vectors",
            "[[1,0],[0,1],[1,1],[1,0]]",
            "--k",
            "2",
        ]);
        let rep = run(&cli).unwrap();
        assert_eq!(rep.results["outcome"]["value"], json!("partitioned"));
        let parts = rep.results["parts"].as_array().unwrap();
        assert_eq!(parts.len(), 2);
    }

    #[test]
    fn riesz_is_deterministic_under_a_seed() {
        let args = [
            "thinset", "riesz", "--set", "[1,2,4]", "--phases", "random", "--seed", "5",
        ];
        let a = run(&parse(&args)).unwrap();
        let b = run(&parse(&args)).unwrap();
        assert_eq!(a.results, b.results);
        let mean = a.results["mean"]["value"].as_f64().unwrap();
        assert!((mean - 1.0).abs() < 1e-9);
        let min = a.results["min"]["value"].as_f64().unwrap();
        assert!(min >= -1e-10);
    }

    #[test]
    fn riesz_respects_an_explicit_grid() {
        let cli = parse(&[
            "thinset", "riesz", "--set", "[1,2,4]", "--phases", "ones", "--grid", "64",
        ]);
        let rep = run(&cli).unwrap();
        assert_eq!(rep.results["grid"]["value"], json!(64));
        // All-ones phases: the product is prod(1 + cos n_k t), sup at t = 0.
        let sup = rep.results["sup"]["value"].as_f64().unwrap();
        assert!((sup - 8.0).abs() < 1e-9);
    }

    #[test]
    fn sidon_reports_a_certified_lower_bound() {
        let cli = parse(&[
            "thinset", "sidon", "--group", "cyclic:8", "--set", "[1,2,5]", "--tol", "1e-6",
        ]);
        let rep = run(&cli).unwrap();
        let v = rep.results["sidon_lower"]["value"].as_f64().unwrap();
        assert!(v >= 1.0 - 1e-9);
        assert_eq!(
            rep.results["sidon_lower"]["kind"],
            json!("certified-lower-bound")
        );
    }

    #[test]
    fn mehler_certificates_embed_in_the_report() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("decomp.json");
        let cli = parse(&[
            "thinset",
            "mehler",
            "--n",
            "1",
            "--delta",
            "0.5",
            "--degree",
            "6",
            "--report",
            path.to_str().unwrap(),
        ]);
        let rep = run(&cli).unwrap();
        let op = rep.results["op_norm_r"]["value"].as_f64().unwrap();
        assert!((op - 0.5).abs() < 1e-12);
        let l1 = rep.results["l1_norm_t"]["value"].as_f64().unwrap();
        assert!(l1 <= 4.0 + 1e-4);
        let written: Value =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert!(written.get("t").is_some() && written.get("r").is_some());
    }

    #[test]
    fn bmo_subcommand_reads_a_polynomial_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("poly.json");
        let poly = TrigPoly::new(
            GroupSpec::Integers,
            vec![
                (1, Complex64::new(0.5, 0.0)),
                (2, Complex64::new(0.0, -0.5)),
            ],
        )
        .unwrap();
        std::fs::write(&path, serde_json::to_string(&poly).unwrap()).unwrap();
        let cli = parse(&[
            "thinset",
            "bmo",
            "--poly",
            path.to_str().unwrap(),
            "--flavor",
            "psi2",
            "--arcs",
            "dyadic",
            "--grid",
            "256",
        ]);
        let rep = run(&cli).unwrap();
        let v = rep.results["bmo_norm"]["value"].as_f64().unwrap();
        assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn entropy_subcommand_evaluates_cyclic_sets() {
        let cli = parse(&[
            "thinset", "entropy", "--group", "cyclic:16", "--set", "[1,3]",
        ]);
        let rep = run(&cli).unwrap();
        let v = rep.results["entropy_integral"]["value"].as_f64().unwrap();
        assert!(v > 0.0 && v.is_finite());
    }

    #[test]
    fn net_subcommand_packs_a_sampled_system() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("system.json");
        let polys: Vec<TrigPoly> = [1i64, 2, 4]
            .iter()
            .map(|&k| {
                TrigPoly::new(GroupSpec::Integers, vec![(k, Complex64::new(1.0, 0.0))]).unwrap()
            })
            .collect();
        let doc = json!({"grid": 64, "polys": polys});
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let cli = parse(&[
            "thinset",
            "net",
            "--system",
            path.to_str().unwrap(),
            "--delta",
            "0.4",
            "--sg",
            "2.0",
            "--sup",
            "1.0",
        ]);
        let rep = run(&cli).unwrap();
        assert!(rep.results["net_size"]["value"].as_u64().unwrap() >= 1);
        assert_eq!(
            rep.results["log_size_bound"]["kind"],
            json!("certified-lower-bound")
        );
    }

    #[test]
    fn sg_subcommand_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("system.json");
        let polys: Vec<TrigPoly> = [1i64, 2]
            .iter()
            .map(|&k| {
                TrigPoly::new(GroupSpec::Integers, vec![(k, Complex64::new(1.0, 0.0))]).unwrap()
            })
            .collect();
        let doc = json!({"grid": 32, "polys": polys});
        std::fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
        let args = [
            "thinset",
            "sg",
            "--system",
            path.to_str().unwrap(),
            "--restarts",
            "8",
            "--seed",
            "3",
        ];
        let a = run(&parse(&args)).unwrap();
        let b = run(&parse(&args)).unwrap();
        assert_eq!(a.results, b.results);
        assert!(a.results["sg_lower"]["value"].as_f64().unwrap() > 0.0);
    }

    #[test]
    fn csv_rendering_flattens_labeled_results() {
        let cli = parse(&[
            "thinset", "--format", "csv", "relations", "--set", "[1,2,3]",
        ]);
        let mut rep = run(&cli).unwrap();
        rep.wall_ms = 0;
        let csv = render(&rep, Format::Csv);
        assert!(csv.starts_with("field,value,kind\n"));
        assert!(csv.contains("count,3,exact"));
        assert!(csv.contains("quasi_independent,false,exact"));
    }

    #[test]
    fn json_reports_echo_config_and_version() {
        let cli = parse(&["thinset", "psi", "--dist", "rademacher"]);
        let rep = run(&cli).unwrap();
        assert_eq!(rep.config["subcommand"], json!("psi"));
        assert_eq!(rep.tool_version, env!("CARGO_PKG_VERSION"));
        assert!(!rep.provenance.is_empty());
    }

    #[test]
    fn out_flag_writes_the_report_to_disk() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let code = execute([
            "thinset",
            "relations",
            "--set",
            "[1,2,4]",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(doc["results"]["count"]["value"], json!(1));
        assert_eq!(doc["results"]["quasi_independent"]["value"], json!(true));
    }
}
