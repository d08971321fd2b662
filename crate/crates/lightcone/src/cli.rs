//! Flag definitions and `--config` handling.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::formats::read_json;

#[derive(Debug, Parser)]
#[command(name = "lightcone", version, about = "Lieb-Robinson speed limits for spin networks")]
pub struct Cli {
    /// JSON object whose keys supply defaults for the subcommand's flags
    /// (e.g. {"J": 1, "trials": 50}); flags on the command line win.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Write the primary output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a commutator coefficient, optionally turned into a task bound.
    #[command(args_override_self = true)]
    Bound(BoundArgs),
    /// Contour data for min(1, 2 I_R(4Jt)) on an infinite chain.
    #[command(args_override_self = true)]
    Lightcone(LightconeArgs),
    /// Run the randomized verification suites against the exact simulator.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Quantum speed-limit times from a spectral spread or a Hamiltonian file.
    #[command(args_override_self = true)]
    Qsl(QslArgs),
    /// Optimize a single-excitation transfer pulse along a chain.
    #[command(args_override_self = true)]
    Optimize(OptimizeArgs),
    /// Minimal transfer time against chain length.
    #[command(args_override_self = true)]
    Scan(ScanArgs),
}

impl Command {
    pub const NAMES: [&'static str; 6] = ["bound", "lightcone", "verify", "qsl", "optimize", "scan"];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaArg {
    /// Walk series on the given graph.
    Series,
    /// 2 I_R(4Jt) on an infinite chain.
    Bessel,
    /// 2 |X| exp(2edJt - R) for maximum degree d.
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskArg {
    /// Floor on the receiver fidelity, 1 - c ||A||.
    Transfer,
    /// Ceiling c (2 - c) on the spin-flip probability.
    Spinflip,
    /// Ceiling on the fidelity with any maximally entangled state.
    Entangle,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundArgs {
    /// Turn the coefficient into this task bound.
    #[arg(value_enum)]
    pub task: Option<TaskArg>,
    #[arg(long, value_enum, default_value = "series")]
    pub formula: FormulaArg,
    /// Graph JSON file (series formula).
    #[arg(long, value_name = "FILE", conflicts_with = "chain")]
    pub graph: Option<PathBuf>,
    /// Use an open chain of this many sites (series formula).
    #[arg(long, value_name = "L")]
    pub chain: Option<usize>,
    /// Coupling cap; overrides the graph file's value.
    #[arg(long = "J")]
    #[serde(rename = "J")]
    pub j: Option<f64>,
    #[arg(long)]
    pub t: Option<f64>,
    /// Source region, comma separated vertices.
    #[arg(long = "X", value_delimiter = ',')]
    #[serde(rename = "X")]
    pub x: Vec<usize>,
    /// Target region, comma separated vertices.
    #[arg(long = "Y", value_delimiter = ',')]
    #[serde(rename = "Y")]
    pub y: Vec<usize>,
    /// Graph distance (bessel and general formulas).
    #[arg(long = "R")]
    #[serde(rename = "R")]
    pub r: Option<usize>,
    /// Maximum degree (general formula).
    #[arg(long)]
    pub d: Option<usize>,
    /// Number of sites in X (general formula); defaults to |X| or 1.
    #[arg(long = "x-size")]
    pub x_size: Option<usize>,
    /// Use this coefficient instead of evaluating a formula.
    #[arg(long)]
    pub c: Option<f64>,
    /// Correlation amplitude for the entangle task, instead of deriving it.
    #[arg(long)]
    pub f: Option<f64>,
    /// Operator norm of the sender's operation (transfer task).
    #[arg(long, default_value_t = 1.0)]
    pub norm: f64,
    /// Initial correlation for the derived entangle amplitude.
    #[arg(long, default_value_t = 0.0)]
    pub f0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct LightconeArgs {
    #[arg(long = "R-max", default_value_t = 60)]
    #[serde(rename = "R_max")]
    pub r_max: usize,
    /// Largest time (not J t).
    #[arg(long = "t-max", default_value_t = 10.0)]
    pub t_max: f64,
    /// Number of evenly spaced times, endpoints included.
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteArg {
    All,
    /// Coefficient dominance and the receiver-fidelity floor.
    Transfer,
    /// Correlator and entangled-fidelity ceilings.
    Entangle,
    /// Trace-norm continuity of unitary conjugation.
    Lemma1,
    /// Speed-limit overlap floor, simplex oracle and the two-qubit demo.
    Qsl,
    /// Spin-flip ceiling on excitation-preserving chains.
    Spinflip,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    /// Trials per suite (per dimension for lemma1).
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Longest chain simulated; at least 3.
    #[arg(long = "L-max", default_value_t = 6)]
    #[serde(rename = "L_max")]
    pub l_max: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct QslArgs {
    /// Spectral spread E_max - E_min.
    #[arg(long, conflicts_with = "hamiltonian", required_unless_present = "hamiltonian")]
    pub delta: Option<f64>,
    /// Local dimension; defaults to 2, or the largest local dimension of the file's graph.
    #[arg(long)]
    pub d: Option<usize>,
    /// Single-slice Hamiltonian JSON file.
    #[arg(long, value_name = "FILE")]
    pub hamiltonian: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OptimizeArgs {
    /// Chain length, at least 3.
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<usize>,
    /// Total transfer time.
    #[arg(long = "T")]
    #[serde(rename = "T")]
    pub t: Option<f64>,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub slices: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long = "max-iterations", default_value_t = 400)]
    pub max_iterations: usize,
    /// Stop a restart once the infidelity drops below this.
    #[arg(long, default_value_t = 1e-6)]
    pub target: f64,
    /// Bound on |B_n(t)|; unbounded when absent.
    #[arg(long)]
    pub cap: Option<f64>,
    /// Start from a saved pulse instead of random restarts; L, T and the
    /// slice count are taken from the file.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["l", "t"])]
    pub init: Option<PathBuf>,
    /// Save the optimized pulse here.
    #[arg(long, value_name = "FILE")]
    pub save: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScanArgs {
    /// Chain lengths: `5..9` (inclusive), `5..=9` or `5,7,9`.
    #[arg(long = "L", default_value = "5..9")]
    #[serde(rename = "L")]
    pub lengths: String,
    #[arg(long = "J", default_value_t = 1.0)]
    #[serde(rename = "J")]
    pub j: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 64)]
    pub slices: usize,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    /// Success threshold on the infidelity.
    #[arg(long, default_value_t = 1e-2)]
    pub threshold: f64,
    /// Grid times are factor * L / (2J) for factors in [factor-min, factor-max].
    #[arg(long = "factor-min", default_value_t = 0.8)]
    pub factor_min: f64,
    #[arg(long = "factor-max", default_value_t = 1.8)]
    pub factor_max: f64,
    #[arg(long = "factor-step", default_value_t = 0.05)]
    pub factor_step: f64,
    /// Bisection steps refining t* between grid points.
    #[arg(long = "refine-steps", default_value_t = 8)]
    pub refine_steps: usize,
    #[arg(long = "max-iterations", default_value_t = 400)]
    pub max_iterations: usize,
    #[arg(long)]
    pub cap: Option<f64>,
    /// Primary output: JSON summary or the CSV of all points.
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Also write the CSV of all points here.
    #[arg(long, value_name = "FILE")]
    pub csv: Option<PathBuf>,
}

/// Parses `5..9` and `5..=9` as inclusive ranges, or a comma list.
pub fn parse_lengths(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("cannot parse chain lengths {s:?}"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

fn config_value(v: &Value) -> Result<Vec<String>, String> {
    match v {
        Value::Null => Ok(Vec::new()),
        Value::Bool(_) => Err("boolean values are not supported".into()),
        Value::Number(n) => Ok(vec![n.to_string()]),
        Value::String(s) => Ok(vec![s.clone()]),
        Value::Array(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|i| match i {
                    Value::Number(n) => Ok(n.to_string()),
                    Value::String(s) => Ok(s.clone()),
                    _ => Err("arrays may only hold numbers or strings".to_string()),
                })
                .collect::<Result<_, _>>()?;
            Ok(vec![parts.join(",")])
        }
        Value::Object(_) => Err("nested objects are not supported".into()),
    }
}

fn config_path(args: &[OsString]) -> Option<PathBuf> {
    let mut it = args.iter();
    while let Some(a) = it.next() {
        let a = a.to_string_lossy();
        if a == "--config" {
            return it.next().map(PathBuf::from);
        }
        if let Some(p) = a.strip_prefix("--config=") {
            return Some(PathBuf::from(p));
        }
    }
    None
}

/// Splices the `--config` file's keys into `args` as flags placed right
/// after the subcommand name, so later flags typed by the user override them.
/// Keys are flag names; `_` is read as `-` (so `R_max` means `--R-max`).
pub fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let map: serde_json::Map<String, Value> = read_json(&path)?;
    let Some(pos) = args.iter().position(|a| Command::NAMES.contains(&a.to_string_lossy().as_ref())) else {
        return Ok(args);
    };
    let mut injected = Vec::new();
    for (key, value) in &map {
        let values = config_value(value)
            .map_err(|e| CliError::Usage(format!("{}: key {key:?}: {e}", path.display())))?;
        if values.is_empty() {
            continue;
        }
        injected.push(OsString::from(format!("--{}", key.replace('_', "-"))));
        injected.extend(values.into_iter().map(OsString::from));
    }
    let mut out = args;
    out.splice(pos + 1..pos + 1, injected);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths_forms() {
        assert_eq!(parse_lengths("5..9").unwrap(), vec![5, 6, 7, 8, 9]);
        assert_eq!(parse_lengths("5..=6").unwrap(), vec![5, 6]);
        assert_eq!(parse_lengths("3, 7").unwrap(), vec![3, 7]);
        assert!(parse_lengths("9..5").is_err());
        assert!(parse_lengths("a").is_err());
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
