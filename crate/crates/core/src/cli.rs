//! Command-line surface: argument types and command implementations.
//!
//! Commands return their output and exit code instead of printing, so the
//! binary is a thin wrapper and the commands can be driven from tests.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog::{parse_catalog, write_catalog, Catalog, CatalogError};
use crate::constructors::{
    covariant_rank_one, make_cyclic_position, make_number_observable, make_photon_counting, make_trivial,
    make_yes_no, smear_cyclic, DEFAULT_TRUNCATION,
};
use crate::determination::default_probes;
use crate::error::Error;
use crate::linalg::HermitianOperator;
use crate::operator::{DensityState, DiscreteObservable, Effect, ProbabilityVector};
use crate::relations::{Certificate, Comparator, RelationKind, RelationVerdict};
use crate::settings::{Settings, DEFAULT_SEED};
use crate::tolerance::Tolerances;

pub const SEED_ENV: &str = "POVM_ORDER_SEED";

pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const USAGE: i32 = 2;
    pub const RELATION_FAILS: i32 = 3;
    pub const INVALID_CATALOG: i32 = 4;
    pub const TOLERANCE: i32 = 5;
    pub const SCHEMA: i32 = 6;
    pub const IO: i32 = 7;
}

#[derive(Debug, Parser)]
#[command(name = "povm-order", version, about = "Compare finite-dimensional observables under post-processing orders")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Catalog file to read (and, for `construct`, to extend).
    #[arg(long, global = true)]
    pub catalog: Option<PathBuf>,
    /// Output file: the catalog for `construct`, the DOT graph for `poset`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for the determination witness search; overrides POVM_ORDER_SEED.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// default, strict or loose.
    #[arg(long, global = true, default_value = "default")]
    pub tolerance_profile: String,
    /// Append a machine-readable JSON block to the output.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an observable and store it in a catalog.
    Construct(ConstructArgs),
    /// Decide one relation between two catalog observables, F ≼ E.
    Check(CheckArgs),
    /// Equivalence classes and Hasse diagram of the catalog.
    Poset(PosetArgs),
    /// Parse and validate a catalog.
    Validate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConstructKind {
    YesNo,
    Photon,
    Number,
    Trivial,
    CyclicPosition,
    SmearedPosition,
    Covariant,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructArgs {
    pub kind: ConstructKind,
    /// Catalog entry name.
    #[arg(long)]
    pub name: Option<String>,
    /// Detector efficiency for `photon`.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Hilbert space dimension.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Outcome probabilities for `trivial`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub probs: Option<Vec<f64>>,
    /// Period for the cyclic kinds.
    #[arg(long = "L")]
    pub period: Option<usize>,
    /// Smearing measure for `smeared-position`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub rho: Option<Vec<f64>>,
    /// Diagonal of the effect for `yes-no`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub diag: Option<Vec<f64>>,
    /// Fourier phases of the fiducial vector for `covariant`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub phases: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Fuzzy,
    Coarse,
    Info,
    Det,
    All,
}

impl RelationArg {
    fn kind(self) -> Option<RelationKind> {
        match self {
            RelationArg::Fuzzy => Some(RelationKind::Fuzzy),
            RelationArg::Coarse => Some(RelationKind::CoarseGraining),
            RelationArg::Info => Some(RelationKind::Informational),
            RelationArg::Det => Some(RelationKind::Determination),
            RelationArg::All => None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    /// Name of F, the observable claimed to be lower.
    pub f: String,
    /// Name of E.
    pub e: String,
    #[arg(long, value_enum, default_value = "fuzzy")]
    pub relation: RelationArg,
}

#[derive(Debug, Clone, Args)]
pub struct PosetArgs {
    #[arg(long, value_enum, default_value = "fuzzy")]
    pub relation: RelationArg,
}

/// Text and exit code produced by one command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String, code: i32) -> Self {
        Self {
            stdout,
            stderr: String::new(),
            code,
        }
    }

    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
            code,
        }
    }
}

fn catalog_failure(e: &CatalogError) -> Outcome {
    let code = match e {
        CatalogError::Io { .. } => exit::IO,
        CatalogError::Schema(_) => exit::SCHEMA,
        CatalogError::Invariant { .. } => exit::INVALID_CATALOG,
    };
    Outcome::fail(code, e)
}

fn library_failure(e: &Error) -> Outcome {
    let code = match e {
        Error::ToleranceViolation(_) => exit::TOLERANCE,
        Error::Dimension { .. } => exit::INVALID_CATALOG,
        Error::Domain(_) | Error::Format(_) | Error::EmptyProbeSet => exit::USAGE,
    };
    Outcome::fail(code, e)
}

/// `--seed`, then the environment variable, then the built-in default.
pub fn resolve_seed(flag: Option<u64>, env: Option<&str>) -> Result<u64, String> {
    match (flag, env) {
        (Some(s), _) => Ok(s),
        (None, Some(v)) => v
            .trim()
            .parse()
            .map_err(|_| format!("{SEED_ENV}='{v}' is not an unsigned integer")),
        (None, None) => Ok(DEFAULT_SEED),
    }
}

/// Runs one parsed command; `env_seed` is the value of `POVM_ORDER_SEED`.
pub fn run(cli: &Cli, env_seed: Option<&str>) -> Outcome {
    let seed = match resolve_seed(cli.common.seed, env_seed) {
        Ok(s) => s,
        Err(msg) => return Outcome::fail(exit::USAGE, msg),
    };
    let Some(tol) = Tolerances::profile(&cli.common.tolerance_profile) else {
        return Outcome::fail(
            exit::USAGE,
            format!("unknown tolerance profile '{}'", cli.common.tolerance_profile),
        );
    };
    let ctx = Context {
        common: &cli.common,
        settings: Settings {
            tol,
            seed,
            ..Settings::default()
        },
    };
    match &cli.command {
        Command::Construct(a) => ctx.construct(a),
        Command::Check(a) => ctx.check(a),
        Command::Poset(a) => ctx.poset(a),
        Command::Validate => ctx.validate(),
    }
}

struct Context<'a> {
    common: &'a Common,
    settings: Settings,
}

impl Context<'_> {
    fn cmp(&self) -> Comparator {
        Comparator::new(self.settings)
    }

    fn header(&self, command: &str) -> serde_json::Map<String, Value> {
        let mut m = serde_json::Map::new();
        m.insert("command".into(), json!(command));
        m.insert("seed".into(), json!(self.settings.seed));
        m.insert("tolerance_profile".into(), json!(self.common.tolerance_profile));
        m
    }

    fn finish(&self, mut text: String, block: serde_json::Map<String, Value>, code: i32) -> Outcome {
        if self.common.json {
            text.push_str(&serde_json::to_string_pretty(&Value::Object(block)).expect("json block serializes"));
            text.push('\n');
        }
        Outcome::ok(text, code)
    }

    fn load(&self) -> Result<Catalog, Outcome> {
        let Some(path) = &self.common.catalog else {
            return Err(Outcome::fail(exit::USAGE, "--catalog is required"));
        };
        parse_catalog(path).map_err(|e| catalog_failure(&e))
    }

    fn construct(&self, a: &ConstructArgs) -> Outcome {
        let (default_name, observable) = match build_observable(a) {
            Ok(x) => x,
            Err(msg) => return Outcome::fail(exit::USAGE, msg),
        };
        let name = a.name.clone().unwrap_or(default_name);
        let mut catalog = match &self.common.catalog {
            Some(p) if p.exists() => match parse_catalog(p) {
                Ok(c) => c,
                Err(e) => return catalog_failure(&e),
            },
            _ => Catalog::new(observable.dim()),
        };
        if catalog.hilbert_dim != observable.dim() {
            return Outcome::fail(
                exit::USAGE,
                format!(
                    "constructed observable has dimension {}, catalog has {}",
                    observable.dim(),
                    catalog.hilbert_dim
                ),
            );
        }
        let outcomes = observable.outcomes();
        if let Err(e) = catalog.upsert(&name, observable) {
            return catalog_failure(&e);
        }
        let target: Option<&Path> = self.common.out.as_deref().or(self.common.catalog.as_deref());
        let mut text = String::new();
        match target {
            Some(path) => {
                if let Err(e) = write_catalog(path, &catalog) {
                    return catalog_failure(&e);
                }
                text.push_str(&format!(
                    "wrote '{name}' ({outcomes} outcomes, dimension {}) to {}\n",
                    catalog.hilbert_dim,
                    path.display()
                ));
            }
            None => text.push_str(&catalog.to_json_string()),
        }
        let mut block = self.header("construct");
        block.insert("name".into(), json!(name));
        block.insert("outcomes".into(), json!(outcomes));
        block.insert("hilbert_dim".into(), json!(catalog.hilbert_dim));
        block.insert("catalog_size".into(), json!(catalog.entries.len()));
        self.finish(text, block, exit::SUCCESS)
    }

    fn probes(&self, catalog: &Catalog) -> Result<(Vec<DensityState>, &'static str), Outcome> {
        if catalog.probes.is_empty() {
            default_probes(&catalog.observables())
                .map(|p| (p, "default"))
                .map_err(|e| library_failure(&e))
        } else {
            Ok((catalog.probe_states(), "catalog"))
        }
    }

    fn check(&self, a: &CheckArgs) -> Outcome {
        let catalog = match self.load() {
            Ok(c) => c,
            Err(o) => return o,
        };
        let (Some(f), Some(e)) = (catalog.get(&a.f), catalog.get(&a.e)) else {
            let missing = if catalog.get(&a.f).is_none() { &a.f } else { &a.e };
            return Outcome::fail(exit::USAGE, format!("no observable named '{missing}' in the catalog"));
        };
        let (probes, probe_source) = match self.probes(&catalog) {
            Ok(p) => p,
            Err(o) => return o,
        };
        let cmp = self.cmp();
        let kinds: Vec<RelationKind> = match a.relation.kind() {
            Some(k) => vec![k],
            None => RelationKind::ALL.to_vec(),
        };
        let mut text = String::new();
        let mut verdicts = Vec::new();
        for kind in &kinds {
            let v = match cmp.leq(f, e, *kind, Some(&probes)) {
                Ok(v) => v,
                Err(err) => return library_failure(&err),
            };
            text.push_str(&verdict_text(&a.f, &a.e, &v));
            verdicts.push(v);
        }
        let mut block = self.header("check");
        block.insert("f".into(), json!(a.f));
        block.insert("e".into(), json!(a.e));
        block.insert("probes".into(), json!({ "source": probe_source, "count": probes.len() }));
        block.insert("verdicts".into(), Value::Array(verdicts.iter().map(verdict_json).collect()));
        let all_hold = verdicts.iter().all(|v| v.holds);
        if a.relation == RelationArg::All {
            let h = &verdicts;
            let violation = (h[0].holds && !h[1].holds) || (h[1].holds && !h[2].holds) || (h[2].holds && !h[3].holds);
            block.insert("hierarchy_violation".into(), json!(violation));
            if violation {
                let mut o = self.finish(text, block, exit::TOLERANCE);
                o.stderr = "error: implication chain fuzzy => coarse => info => det violated\n".into();
                return o;
            }
            text.push_str("hierarchy: fuzzy => coarse => info => det respected\n");
        }
        block.insert("holds".into(), json!(all_hold));
        let code = if all_hold { exit::SUCCESS } else { exit::RELATION_FAILS };
        self.finish(text, block, code)
    }

    fn poset(&self, a: &PosetArgs) -> Outcome {
        let Some(kind) = a.relation.kind() else {
            return Outcome::fail(exit::USAGE, "poset needs a single relation");
        };
        let catalog = match self.load() {
            Ok(c) => c,
            Err(o) => return o,
        };
        if catalog.entries.is_empty() {
            return Outcome::fail(exit::USAGE, "catalog has no observables");
        }
        let probes = catalog.probe_states();
        let probes = (!probes.is_empty()).then_some(&probes[..]);
        let report = match self.cmp().build_poset(&catalog.observables(), &catalog.names(), kind, probes) {
            Ok(r) => r,
            Err(e) => return library_failure(&e),
        };
        let dot = report.to_dot();
        let mut text = String::new();
        for c in 0..report.classes.len() {
            let mark = if report.maximal[c] { "  [optimal]" } else { "" };
            text.push_str(&format!("class {c}: {}{mark}\n", report.class_name(c)));
        }
        for (lo, hi) in &report.edges {
            text.push_str(&format!("class {lo} < class {hi}\n"));
        }
        for n in &report.notes {
            text.push_str(&format!("note: {n}\n"));
        }
        match &self.common.out {
            Some(path) => {
                if let Err(source) = std::fs::write(path, &dot) {
                    return catalog_failure(&CatalogError::Io {
                        path: path.clone(),
                        source,
                    });
                }
                text.push_str(&format!("wrote {}\n", path.display()));
            }
            None => text.push_str(&dot),
        }
        let mut block = self.header("poset");
        block.insert("report".into(), serde_json::to_value(&report).expect("report serializes"));
        self.finish(text, block, exit::SUCCESS)
    }

    fn validate(&self) -> Outcome {
        let catalog = match self.load() {
            Ok(c) => c,
            Err(o) => return o,
        };
        let cmp = self.cmp();
        let mut text = format!(
            "catalog valid: {} observables, {} probes, dimension {}\n",
            catalog.entries.len(),
            catalog.probes.len(),
            catalog.hilbert_dim
        );
        let mut entries = Vec::new();
        for entry in &catalog.entries {
            let o = &entry.observable;
            let sharp = o.is_sharp(self.settings.tol.sum);
            let trivial = cmp.is_trivial(o).is_some();
            let ic = cmp.is_informationally_complete(o);
            text.push_str(&format!(
                "  {}: {} outcomes{}{}{}\n",
                entry.name,
                o.outcomes(),
                if sharp { ", sharp" } else { "" },
                if trivial { ", trivial" } else { "" },
                if ic { ", informationally complete" } else { "" },
            ));
            entries.push(json!({
                "name": entry.name,
                "outcomes": o.outcomes(),
                "sharp": sharp,
                "trivial": trivial,
                "informationally_complete": ic,
            }));
        }
        let mut block = self.header("validate");
        block.insert("hilbert_dim".into(), json!(catalog.hilbert_dim));
        block.insert("observables".into(), Value::Array(entries));
        block.insert("probes".into(), json!(catalog.probes.iter().map(|p| &p.name).collect::<Vec<_>>()));
        self.finish(text, block, exit::SUCCESS)
    }
}

fn require<T: Copy>(v: Option<T>, flag: &str, kind: &str) -> Result<T, String> {
    v.ok_or_else(|| format!("{kind} needs --{flag}"))
}

fn require_list<'a>(v: &'a Option<Vec<f64>>, flag: &str, kind: &str) -> Result<&'a [f64], String> {
    v.as_deref().ok_or_else(|| format!("{kind} needs --{flag}"))
}

fn build_observable(a: &ConstructArgs) -> Result<(String, DiscreteObservable), String> {
    let lib = |e: Error| e.to_string();
    Ok(match a.kind {
        ConstructKind::YesNo => {
            let diag = require_list(&a.diag, "diag", "yes-no")?;
            let effect = Effect::new(HermitianOperator::from_real_diagonal(diag).map_err(lib)?).map_err(lib)?;
            ("yes-no".into(), make_yes_no(&effect).map_err(lib)?.observable)
        }
        ConstructKind::Photon => {
            let eps = require(a.eps, "eps", "photon")?;
            let dim = a.dim.unwrap_or(DEFAULT_TRUNCATION);
            (format!("photon-{eps}"), make_photon_counting(eps, dim).map_err(lib)?.observable)
        }
        ConstructKind::Number => {
            let dim = a.dim.unwrap_or(DEFAULT_TRUNCATION);
            ("number".into(), make_number_observable(dim).map_err(lib)?)
        }
        ConstructKind::Trivial => {
            let probs = require_list(&a.probs, "probs", "trivial")?;
            let dim = require(a.dim, "dim", "trivial")?;
            let m = ProbabilityVector::new(probs.to_vec()).map_err(lib)?;
            ("trivial".into(), make_trivial(&m, dim).map_err(lib)?)
        }
        ConstructKind::CyclicPosition => {
            let l = require(a.period, "L", "cyclic-position")?;
            ("position".into(), make_cyclic_position(l).map_err(lib)?.observable)
        }
        ConstructKind::SmearedPosition => {
            let l = require(a.period, "L", "smeared-position")?;
            let rho = require_list(&a.rho, "rho", "smeared-position")?;
            let rho = ProbabilityVector::new(rho.to_vec()).map_err(lib)?;
            let q = make_cyclic_position(l).map_err(lib)?;
            ("smeared-position".into(), smear_cyclic(&q, &rho).map_err(lib)?.observable)
        }
        ConstructKind::Covariant => {
            let l = require(a.period, "L", "covariant")?;
            let phases = require_list(&a.phases, "phases", "covariant")?;
            ("covariant".into(), covariant_rank_one(l, phases).map_err(lib)?.observable)
        }
    })
}

fn fmt_row(row: impl IntoIterator<Item = f64>) -> String {
    row.into_iter().map(|x| format!("{x:>10.6}")).collect::<Vec<_>>().join(" ")
}

fn state_text(name: &str, t: &DensityState) -> String {
    let m = t.op().matrix();
    let mut s = format!("    {name} (real | imaginary parts):\n");
    for i in 0..t.dim() {
        s.push_str(&format!(
            "      {} | {}\n",
            fmt_row((0..t.dim()).map(|j| m[(i, j)].re)),
            fmt_row((0..t.dim()).map(|j| m[(i, j)].im))
        ));
    }
    s
}

fn verdict_text(f: &str, e: &str, v: &RelationVerdict) -> String {
    let mut s = format!(
        "{}: {f} ≼ {e} {}\n",
        v.kind.name(),
        if v.holds { "holds" } else { "does not hold" }
    );
    match &v.certificate {
        Some(Certificate::Kernel(k)) => {
            s.push_str("  kernel (rows: outcomes of E, columns: outcomes of F):\n");
            for row in k.to_rows() {
                s.push_str(&format!("    {}\n", fmt_row(row)));
            }
        }
        Some(Certificate::Witness(w)) => {
            s.push_str(&format!(
                "  witness states, F separates them at outcome {}:\n",
                w.distinguishing_outcome
            ));
            s.push_str(&state_text("T1", &w.t1));
            s.push_str(&state_text("T2", &w.t2));
        }
        Some(Certificate::KernelBasis(r)) => {
            s.push_str(&format!(
                "  statistics kernel dimension: E {}{}\n",
                r.dim_kernel_e,
                r.dim_kernel_f.map(|d| format!(", F {d}")).unwrap_or_default()
            ));
        }
        None => {}
    }
    if let Some(g) = v.infeasibility_gap {
        s.push_str(&format!("  infeasibility gap: {g:.6e}\n"));
    }
    for line in v.note.lines() {
        s.push_str(&format!("  {line}\n"));
    }
    s
}

fn state_json(t: &DensityState) -> Value {
    let m = t.op().matrix();
    json!((0..t.dim())
        .map(|i| (0..t.dim()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

fn verdict_json(v: &RelationVerdict) -> Value {
    let certificate = match &v.certificate {
        Some(Certificate::Kernel(k)) => json!({ "type": "kernel", "matrix": k.to_rows() }),
        Some(Certificate::Witness(w)) => json!({
            "type": "witness",
            "t1": state_json(&w.t1),
            "t2": state_json(&w.t2),
            "distinguishing_outcome": w.distinguishing_outcome,
        }),
        Some(Certificate::KernelBasis(r)) => json!({
            "type": "kernel_basis",
            "dim_kernel_e": r.dim_kernel_e,
            "dim_kernel_f": r.dim_kernel_f,
            "inclusion_residual": r.inclusion_residual,
        }),
        None => Value::Null,
    };
    json!({
        "relation": v.kind.name(),
        "holds": v.holds,
        "certificate": certificate,
        "infeasibility_gap": v.infeasibility_gap,
        "note": v.note,
    })
}
