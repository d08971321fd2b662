//! One function per subcommand; each returns the primary output text.

use std::fmt::Write as _;

use lightcone_core::control::{
    infidelity, max_group_velocity, optimize_pulse, OptimizerConfig, ScanConfig, ScanReport, TransferResult,
};
use lightcone_core::graph::graph_distance;
use lightcone_core::lr::{
    c_chain_bessel, c_general, c_series, light_cone_grid, BoundModel, BoundResult, DEFAULT_SERIES_TERMS,
    DEFAULT_SERIES_TOL,
};
use lightcone_core::qsl::{qsl_suite, speed_limit_times, Spectrum};
use lightcone_core::sim::checks::verify_lemma1;
use lightcone_core::task::{
    entangled_fidelity_ceiling, midpoint_correlator_ceiling, spin_flip_ceiling, transfer_fidelity_floor, TaskBound,
};
use lightcone_core::{Region, SpinGraph};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cli::{
    parse_lengths, BoundArgs, Command, FormulaArg, Format, LightconeArgs, OptimizeArgs, QslArgs, ScanArgs, SuiteArg,
    TaskArg, VerifyArgs,
};
use crate::error::CliError;
use crate::formats::{read_json, write_json, GraphFile, HamiltonianFile, PulseFile, SCHEMA_VERSION};
use crate::parallel;

/// Primary output and whether the command succeeded (exit 0) or reported a
/// domain failure such as a bound violation (exit 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub ok: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Self { text, ok: true }
    }
}

/// Largest chain the `verify` suites will simulate.
pub const VERIFY_L_MAX: usize = 10;

fn envelope<C: Serialize>(command: &str, config: &C, body: Value) -> Value {
    let mut v = json!({
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
    });
    if let (Value::Object(map), Value::Object(extra)) = (&mut v, body) {
        map.extend(extra);
    }
    v
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value") + "\n"
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Bound(a) => bound(a),
        Command::Lightcone(a) => lightcone(a),
        Command::Verify(a) => verify(a),
        Command::Qsl(a) => qsl(a),
        Command::Optimize(a) => optimize(a),
        Command::Scan(a) => scan(a),
    }
}

fn required<T: Copy>(v: Option<T>, flag: &str, formula: &str) -> Result<T, CliError> {
    v.ok_or_else(|| usage(format!("--{flag} is required for the {formula} formula")))
}

struct Resolved {
    graph: Option<SpinGraph>,
    j: Option<f64>,
}

fn resolve_graph(a: &BoundArgs) -> Result<Resolved, CliError> {
    if let Some(path) = &a.graph {
        let mut file: GraphFile = read_json(path)?;
        if let Some(j) = a.j {
            file.j = j;
        }
        let j = file.j;
        return Ok(Resolved { graph: Some(file.to_graph()?), j: Some(j) });
    }
    if let Some(l) = a.chain {
        let j = a.j.ok_or_else(|| usage("--J is required with --chain"))?;
        return Ok(Resolved { graph: Some(SpinGraph::chain(l, j, 0.0)?), j: Some(j) });
    }
    Ok(Resolved { graph: None, j: a.j })
}

fn regions(g: &SpinGraph, a: &BoundArgs) -> Result<Option<(Region, Region)>, CliError> {
    match (a.x.is_empty(), a.y.is_empty()) {
        (true, true) => Ok(None),
        (false, false) => Ok(Some((Region::new(g, a.x.iter().copied())?, Region::new(g, a.y.iter().copied())?))),
        _ => Err(usage("--X and --Y must be given together")),
    }
}

/// Distance from `--R`, or from the regions on the graph.
fn distance(a: &BoundArgs, res: &Resolved, formula: &str) -> Result<usize, CliError> {
    if let Some(r) = a.r {
        return Ok(r);
    }
    if let Some(g) = &res.graph {
        if let Some((x, y)) = regions(g, a)? {
            return graph_distance(g, &x, &y)?.ok_or(CliError::Domain(lightcone_core::Error::Disconnected));
        }
    }
    Err(usage(format!("--R (or a graph with --X and --Y) is required for the {formula} formula")))
}

fn evaluate_coefficient(a: &BoundArgs, res: &Resolved) -> Result<BoundResult, CliError> {
    match a.formula {
        FormulaArg::Series => {
            let g = res.graph.as_ref().ok_or_else(|| usage("the series formula needs --graph or --chain"))?;
            let t = required(a.t, "t", "series")?;
            let (x, y) = regions(g, a)?.ok_or_else(|| usage("the series formula needs --X and --Y"))?;
            Ok(c_series(g, &x, &y, t, DEFAULT_SERIES_TOL, DEFAULT_SERIES_TERMS)?)
        }
        FormulaArg::Bessel => {
            let j = required(res.j, "J", "bessel")?;
            let t = required(a.t, "t", "bessel")?;
            Ok(c_chain_bessel(j, t, distance(a, res, "bessel")?)?)
        }
        FormulaArg::General => {
            let j = required(res.j, "J", "general")?;
            let t = required(a.t, "t", "general")?;
            let d = match (a.d, &res.graph) {
                (Some(d), _) => d,
                (None, Some(g)) => g.max_degree(),
                (None, None) => return Err(usage("--d is required for the general formula")),
            };
            let x_size = a.x_size.unwrap_or(if a.x.is_empty() { 1 } else { a.x.len() });
            Ok(c_general(x_size, d, j, t, distance(a, res, "general")?)?)
        }
    }
}

fn model(a: &BoundArgs, res: &Resolved) -> Result<BoundModel, CliError> {
    let j = res.j.ok_or_else(|| usage("--J is required to derive the correlation amplitude"))?;
    Ok(match a.formula {
        FormulaArg::Series => BoundModel::ChainSeries { j },
        FormulaArg::Bessel => BoundModel::ChainBessel { j },
        FormulaArg::General => BoundModel::General {
            x_size: a.x_size.unwrap_or(1),
            d: a.d.ok_or_else(|| usage("--d is required for the general formula"))?,
            j,
        },
    })
}

pub fn bound(a: &BoundArgs) -> Result<Outcome, CliError> {
    let res = resolve_graph(a)?;
    let mut body = serde_json::Map::new();
    let task: Option<TaskBound> = match a.task {
        None => {
            if a.c.is_some() || a.f.is_some() {
                return Err(usage("--c and --f only apply to task bounds"));
            }
            let b = evaluate_coefficient(a, &res)?;
            body.insert("result".into(), json!(b));
            None
        }
        Some(TaskArg::Transfer) | Some(TaskArg::Spinflip) => {
            let c = match a.c {
                Some(c) => c,
                None => {
                    let b = evaluate_coefficient(a, &res)?;
                    body.insert("coefficient".into(), json!(b));
                    b.value
                }
            };
            Some(if a.task == Some(TaskArg::Transfer) {
                transfer_fidelity_floor(c, a.norm)?
            } else {
                spin_flip_ceiling(c)?
            })
        }
        Some(TaskArg::Entangle) => {
            let f = match a.f {
                Some(f) => f,
                None => {
                    let t = a.t.ok_or_else(|| usage("--t is required to derive the correlation amplitude"))?;
                    let r = a.r.ok_or_else(|| usage("--R is required to derive the correlation amplitude"))?;
                    let ceiling = midpoint_correlator_ceiling(&model(a, &res)?, r, t, a.f0)?;
                    body.insert("correlator".into(), json!(ceiling));
                    ceiling.value
                }
            };
            Some(entangled_fidelity_ceiling(f)?)
        }
    };
    if let Some(t) = task {
        body.insert("result".into(), json!(t));
    }
    Ok(Outcome::ok(pretty(&envelope("bound", a, Value::Object(body)))))
}

pub fn lightcone(a: &LightconeArgs) -> Result<Outcome, CliError> {
    if a.steps == 0 {
        return Err(usage("--steps must be positive"));
    }
    if !(a.t_max >= 0.0 && a.j >= 0.0) {
        return Err(usage("--t-max and --J must be non-negative"));
    }
    let cells = light_cone_grid(a.r_max, a.t_max, a.steps, a.j)?;
    let text = match a.format {
        Format::Csv => {
            let mut s = format!(
                "# schema_version={SCHEMA_VERSION} command=lightcone R_max={} t_max={} steps={} J={}\nR,t,c_value,formula\n",
                a.r_max, a.t_max, a.steps, a.j
            );
            for c in &cells {
                writeln!(s, "{},{},{},chain_bessel", c.r, c.t, c.value).expect("string write");
            }
            s
        }
        Format::Json => {
            let rows: Vec<Value> =
                cells.iter().map(|c| json!({"R": c.r, "t": c.t, "c_value": c.value})).collect();
            pretty(&envelope("lightcone", a, json!({"formula": "chain_bessel", "cells": rows})))
        }
    };
    Ok(Outcome::ok(text))
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome, CliError> {
    if a.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if !(3..=VERIFY_L_MAX).contains(&a.l_max) {
        return Err(usage(format!("--L-max must lie in 3..={VERIFY_L_MAX}")));
    }
    let want = |s: SuiteArg| a.suite == SuiteArg::All || a.suite == s;
    let lengths = 3..=a.l_max;
    let mut suites: Vec<Value> = Vec::new();
    let mut passed = true;
    let mut push = |name: &str, ok: bool, report: Value| {
        passed &= ok;
        suites.push(json!({"name": name, "passed": ok, "report": report}));
    };
    if want(SuiteArg::Transfer) {
        let d = parallel::dominance_suite(a.trials, lengths.clone(), a.seed)?;
        push("dominance", d.passed(), json!(d));
        let t = parallel::transfer_suite(a.trials, lengths.clone(), a.seed)?;
        push("transfer", t.passed(), json!(t));
    }
    if want(SuiteArg::Entangle) {
        let (c, f) = parallel::entangle_suite(a.trials, lengths.clone(), a.seed)?;
        push("correlator", c.passed(), json!(c));
        push("entangled_fidelity", f.passed(), json!(f));
    }
    if want(SuiteArg::Lemma1) {
        for dim in [4, 8, 16] {
            let r = verify_lemma1(a.trials, dim, a.seed)?;
            push(&format!("lemma1_dim{dim}"), r.passed(), json!(r));
        }
    }
    if want(SuiteArg::Qsl) {
        let r = qsl_suite(a.trials, 4, a.seed)?;
        push("qsl", r.passed(), json!(r));
    }
    if want(SuiteArg::Spinflip) {
        let r = parallel::spinflip_suite(a.trials, lengths.clone(), a.seed)?;
        push("spinflip", r.passed(), json!(r));
    }
    let doc = envelope("verify", a, json!({"passed": passed, "suites": suites}));
    Ok(Outcome { text: pretty(&doc), ok: passed })
}

pub fn qsl(a: &QslArgs) -> Result<Outcome, CliError> {
    let (delta, d, source) = match (&a.hamiltonian, a.delta) {
        (Some(path), _) => {
            let file: HamiltonianFile = read_json(path)?;
            let h = file.to_hamiltonian()?;
            if h.slices().len() != 1 {
                return Err(usage("the speed limit needs a time-independent Hamiltonian (one slice)"));
            }
            let spectrum = Spectrum::of(&h.slice_matrix(0)?)?;
            let d = a.d.unwrap_or_else(|| h.graph().local_dims().iter().copied().max().unwrap_or(2));
            (spectrum.delta_max(), d, "hamiltonian")
        }
        (None, Some(delta)) => (delta, a.d.unwrap_or(2), "delta"),
        (None, None) => return Err(usage("give --delta or --hamiltonian")),
    };
    let times = speed_limit_times(delta, d)?;
    let doc = envelope("qsl", a, json!({"source": source, "delta_max": delta, "times": times}));
    Ok(Outcome::ok(pretty(&doc)))
}

fn optimizer_config(max_iterations: usize, target: f64, cap: Option<f64>) -> Result<OptimizerConfig, CliError> {
    if max_iterations == 0 {
        return Err(usage("--max-iterations must be positive"));
    }
    if !(target >= 0.0) {
        return Err(usage("--target must be non-negative"));
    }
    if cap.is_some_and(|c| !(c > 0.0)) {
        return Err(usage("--cap must be positive"));
    }
    Ok(OptimizerConfig { max_iterations, target, amplitude_cap: cap, ..OptimizerConfig::default() })
}

pub fn optimize(a: &OptimizeArgs) -> Result<Outcome, CliError> {
    let config = optimizer_config(a.max_iterations, a.target, a.cap)?;
    let result = if let Some(path) = &a.init {
        let file = PulseFile::load(path)?;
        let start = lightcone_core::control::ControlPulse { amplitude_cap: a.cap, ..file.pulse };
        let (pulse, f, iterations, converged) = optimize_pulse(&start, a.j, &config)?;
        TransferResult { total_time: pulse.total_time(), pulse, infidelity: f, iterations, converged, restart: 0 }
    } else {
        let l = a.l.ok_or_else(|| usage("--L is required"))?;
        let t = a.t.ok_or_else(|| usage("--T is required"))?;
        if a.restarts == 0 {
            return Err(usage("--restarts must be at least 1"));
        }
        parallel::grape_optimize(l, a.j, t, a.slices, a.restarts, a.seed, &config)?
    };
    let check = infidelity(&result.pulse, a.j)?;
    if let Some(path) = &a.save {
        let file = PulseFile { schema_version: SCHEMA_VERSION, j: a.j, infidelity: check, pulse: result.pulse.clone() };
        write_json(path, &file)?;
    }
    let doc = envelope(
        "optimize",
        a,
        json!({
            "length": result.pulse.length,
            "total_time": result.total_time,
            "infidelity": result.infidelity,
            "fidelity": 1.0 - result.infidelity,
            "iterations": result.iterations,
            "converged": result.converged,
            "restart": result.restart,
            "max_group_velocity": max_group_velocity(result.pulse.length, a.j)?,
            "pulse": result.pulse,
        }),
    );
    Ok(Outcome::ok(pretty(&doc)))
}

pub fn scan_config(a: &ScanArgs) -> Result<ScanConfig, CliError> {
    let lengths = parse_lengths(&a.lengths)?;
    if lengths.iter().any(|&l| l < 3) {
        return Err(usage("chain lengths must be at least 3"));
    }
    if !(a.factor_step > 0.0 && a.factor_min > 0.0 && a.factor_max >= a.factor_min) {
        return Err(usage("need 0 < factor-min <= factor-max and a positive factor-step"));
    }
    if a.restarts == 0 || a.slices < 4 {
        return Err(usage("need at least one restart and four slices"));
    }
    if !(a.threshold > 0.0 && a.threshold < 1.0) {
        return Err(usage("--threshold must lie in (0, 1)"));
    }
    if !(a.j > 0.0) {
        return Err(usage("--J must be positive"));
    }
    Ok(ScanConfig {
        lengths,
        j: a.j,
        factors: ScanConfig::factor_grid(a.factor_min, a.factor_max, a.factor_step),
        slices: a.slices,
        restarts: a.restarts,
        seed: a.seed,
        threshold: a.threshold,
        refine_steps: a.refine_steps,
        optimizer: optimizer_config(a.max_iterations, 1e-6, a.cap)?,
    })
}

pub fn scan_csv(a: &ScanArgs, report: &ScanReport) -> String {
    let mut s = format!(
        "# schema_version={SCHEMA_VERSION} command=scan L={} J={} seed={} slices={} restarts={} threshold={}\nL,T,infidelity,converged\n",
        a.lengths, a.j, a.seed, a.slices, a.restarts, a.threshold
    );
    for p in &report.points {
        writeln!(s, "{},{},{:e},{}", p.length, p.total_time, p.infidelity, p.converged).expect("string write");
    }
    s
}

pub fn scan_summary(a: &ScanArgs, report: &ScanReport) -> Value {
    let lengths: Vec<Value> = report
        .lengths
        .iter()
        .map(|s| {
            let sensitivity: Vec<Value> =
                s.sensitivity.iter().map(|(th, t)| json!({"threshold": th, "t_star": t})).collect();
            json!({"L": s.length, "t_star": s.t_star, "v_num": s.v_num, "sensitivity": sensitivity})
        })
        .collect();
    envelope(
        "scan",
        a,
        json!({
            "threshold": report.threshold,
            "fitted_v": report.fitted_v,
            "lengths": lengths,
        }),
    )
}

pub fn scan(a: &ScanArgs) -> Result<Outcome, CliError> {
    let config = scan_config(a)?;
    let report = parallel::speed_limit_scan(&config)?;
    let csv = scan_csv(a, &report);
    if let Some(path) = &a.csv {
        std::fs::write(path, &csv).map_err(|e| CliError::io(path, e))?;
    }
    Ok(Outcome::ok(match a.format {
        Format::Csv => csv,
        Format::Json => pretty(&scan_summary(a, &report)),
    }))
}
