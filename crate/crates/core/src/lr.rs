//! Lieb-Robinson commutator coefficients and light-cone extraction.
//!
//! Three routes bound `c_t(X, Y)`, the largest normalized commutator
//! `||[A(t), B]|| / (||A|| ||B||)` between operators on disjoint regions:
//!
//! * [`c_series`] sums `2 sum_n (2Jt)^n / n! N(n)` with exact walk counts,
//! * [`c_chain_bessel`] uses the closed form `2 I_R(4Jt)` for a chain,
//! * [`c_general`] uses `2 |X| exp(2 e d J t - R)` for any graph of degree `d`.
//!
//! Every value is clamped at 2, the triangle-inequality ceiling.

use alloc::vec::Vec;
use core::f64::consts::E;

use crate::bessel::bessel_i_series;
use crate::error::{Error, Result};
use crate::graph::{graph_distance, Region, SpinGraph, WalkCounter};

/// Triangle-inequality ceiling on every commutator coefficient.
pub const COEFFICIENT_CAP: f64 = 2.0;
/// Default arrival threshold for light-cone extraction.
pub const DEFAULT_THRESHOLD: f64 = 0.5;
/// Default relative tolerance of the walk series.
pub const DEFAULT_SERIES_TOL: f64 = 1e-12;
/// Default cap on the number of walk-series terms.
pub const DEFAULT_SERIES_TERMS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Formula {
    Series,
    ChainBessel,
    GeneralExponential,
}

impl Formula {
    pub fn name(self) -> &'static str {
        match self {
            Formula::Series => "series",
            Formula::ChainBessel => "chain_bessel",
            Formula::GeneralExponential => "general_exponential",
        }
    }
}

/// Inputs a bound was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundInputs {
    pub j: f64,
    pub t: f64,
    /// Graph distance between the regions; `None` when they are disconnected.
    pub r: Option<usize>,
    pub d: usize,
    pub x_size: usize,
}

/// A commutator coefficient with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BoundResult {
    /// `min(2, raw)`.
    pub value: f64,
    /// The formula before clamping.
    pub raw: f64,
    pub formula: Formula,
    /// Analytic bound on the discarded series tail (series and Bessel only).
    pub truncation_error: Option<f64>,
    /// True when the triangle-inequality ceiling is binding.
    pub clamped: bool,
    /// False when the series stopped at its term cap with the tail above tolerance.
    pub converged: bool,
    pub inputs: BoundInputs,
}

impl BoundResult {
    fn new(raw: f64, formula: Formula, truncation_error: Option<f64>, inputs: BoundInputs) -> Self {
        let clamped = !(raw < COEFFICIENT_CAP);
        Self {
            value: if clamped { COEFFICIENT_CAP } else { raw },
            raw,
            formula,
            truncation_error,
            clamped,
            converged: true,
            inputs,
        }
    }

    /// Value plus truncation slack, still capped at 2.
    pub fn upper(&self) -> f64 {
        (self.value + self.truncation_error.unwrap_or(0.0)).min(COEFFICIENT_CAP)
    }
}

fn check_time(j: f64, t: f64) -> Result<()> {
    if !(j >= 0.0 && j.is_finite()) {
        return Err(Error::InvalidArgument("J must be finite and non-negative"));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidArgument("t must be finite and non-negative"));
    }
    Ok(())
}

/// `min(2, 2 |X| exp(2 e d J t - R))`.
pub fn c_general(x_size: usize, d: usize, j: f64, t: f64, r: usize) -> Result<BoundResult> {
    check_time(j, t)?;
    if r == 0 {
        return Err(Error::InvalidArgument("regions must be separated (R >= 1)"));
    }
    if x_size == 0 || d == 0 {
        return Err(Error::InvalidArgument("|X| and d must be positive"));
    }
    let raw = 2.0 * x_size as f64 * (2.0 * E * d as f64 * j * t - r as f64).exp();
    let inputs = BoundInputs { j, t, r: Some(r), d, x_size };
    Ok(BoundResult::new(raw, Formula::GeneralExponential, None, inputs))
}

/// `min(2, 2 I_R(4Jt))` for single sites at distance `R` on a chain.
pub fn c_chain_bessel(j: f64, t: f64, r: usize) -> Result<BoundResult> {
    check_time(j, t)?;
    let order = u32::try_from(r).map_err(|_| Error::InvalidArgument("R too large"))?;
    let sum = bessel_i_series(order, 4.0 * j * t, crate::bessel::DEFAULT_TOLERANCE);
    let inputs = BoundInputs { j, t, r: Some(r), d: 2, x_size: 1 };
    Ok(BoundResult::new(2.0 * sum.value, Formula::ChainBessel, Some(2.0 * sum.truncation_error), inputs))
}

/// Walk-series bound `min(2, 2 sum_{n>=R} (2Jt)^n / n! N(n))` with `J` taken
/// from the graph's coupling cap.
///
/// Terms are added until the `|X| d^n` majorant of the remaining tail drops
/// below `tol` times the partial sum, or `n_max` terms have been used; in the
/// latter case `converged` is false.
pub fn c_series(
    graph: &SpinGraph,
    x: &Region,
    y: &Region,
    t: f64,
    tol: f64,
    n_max: usize,
) -> Result<BoundResult> {
    let j = graph.coupling_cap();
    check_time(j, t)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument("tolerance must be positive"));
    }
    let r = graph_distance(graph, x, y)?;
    let d = graph.max_degree();
    let inputs = BoundInputs { j, t, r, d, x_size: x.len() };
    let Some(r) = r else {
        return Ok(BoundResult::new(0.0, Formula::Series, Some(0.0), inputs));
    };
    let rate = 2.0 * j * t;
    if rate == 0.0 {
        return Ok(BoundResult::new(0.0, Formula::Series, Some(0.0), inputs));
    }
    let ln_rate = rate.ln();
    let ln_majorant_rate = (rate * d as f64).ln();
    let mut ln_fact = 0.0f64;
    let mut sum = 0.0f64;
    let mut tail = f64::INFINITY;
    let mut converged = false;
    for (n, walks) in WalkCounter::new(graph, x, y)?.enumerate().take(n_max.max(r + 1) + 1) {
        if n > 0 {
            ln_fact += (n as f64).ln();
        }
        if n < r {
            continue;
        }
        sum += (n as f64 * ln_rate - ln_fact).exp() * walks.value();
        if 2.0 * sum >= COEFFICIENT_CAP {
            let mut out = BoundResult::new(2.0 * sum, Formula::Series, Some(0.0), inputs);
            out.converged = true;
            return Ok(out);
        }
        // |X| (d 2Jt)^(n+1) / (n+1)! / (1 - d 2Jt / (n+2))
        let q = rate * d as f64 / (n + 2) as f64;
        tail = if q < 1.0 {
            let ln_next = (n + 1) as f64 * ln_majorant_rate - ln_fact - ((n + 1) as f64).ln();
            x.len() as f64 * ln_next.exp() / (1.0 - q)
        } else {
            f64::INFINITY
        };
        if tail <= tol * sum {
            converged = true;
            break;
        }
        if n >= n_max {
            break;
        }
    }
    let mut out = BoundResult::new(2.0 * sum, Formula::Series, Some(2.0 * tail), inputs);
    out.converged = converged;
    Ok(out)
}

/// Coefficient family indexed by separation, used for light-cone scans.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum BoundModel {
    /// Exponential bound for a graph of maximum degree `d` and source size `x_size`.
    General { x_size: usize, d: usize, j: f64 },
    /// `2 I_R(4Jt)` on an infinite chain.
    ChainBessel { j: f64 },
    /// Exact walk series between the end sites of a chain of `R + 1` sites.
    ChainSeries { j: f64 },
}

impl BoundModel {
    pub fn formula(&self) -> Formula {
        match self {
            BoundModel::General { .. } => Formula::GeneralExponential,
            BoundModel::ChainBessel { .. } => Formula::ChainBessel,
            BoundModel::ChainSeries { .. } => Formula::Series,
        }
    }

    pub fn coupling(&self) -> f64 {
        match *self {
            BoundModel::General { j, .. } | BoundModel::ChainBessel { j } | BoundModel::ChainSeries { j } => j,
        }
    }

    pub fn evaluate(&self, r: usize, t: f64) -> Result<BoundResult> {
        match *self {
            BoundModel::General { x_size, d, j } => c_general(x_size, d, j, t, r),
            BoundModel::ChainBessel { j } => c_chain_bessel(j, t, r),
            BoundModel::ChainSeries { j } => {
                if r == 0 {
                    return Err(Error::InvalidArgument("regions must be separated (R >= 1)"));
                }
                let g = SpinGraph::chain(r + 1, j, 0.0)?;
                let x = Region::single(&g, 0)?;
                let y = Region::single(&g, r)?;
                c_series(&g, &x, &y, t, DEFAULT_SERIES_TOL, DEFAULT_SERIES_TERMS)
            }
        }
    }

    pub fn value(&self, r: usize, t: f64) -> Result<f64> {
        self.evaluate(r, t).map(|b| b.value)
    }
}

/// Smallest `t` with `f(t) = threshold` for a non-decreasing `f` on `t >= 0`.
///
/// The initial bracket is `[0, 10 * scale]` and grows geometrically. Returns
/// 0 when `f(0)` already reaches the threshold.
pub fn first_crossing<F>(mut f: F, threshold: f64, scale: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f(0.0)? >= threshold {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = 10.0 * scale;
    let mut expansions = 0;
    while f(hi)? < threshold {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 || !hi.is_finite() {
            return Err(Error::NoCrossing { threshold });
        }
    }
    while hi - lo > 1e-10 * hi {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < threshold {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn check_threshold(threshold: f64) -> Result<()> {
    if !(threshold > 0.0 && threshold < COEFFICIENT_CAP) {
        return Err(Error::InvalidArgument("threshold must lie in (0, 2)"));
    }
    Ok(())
}

/// Time at which the coefficient at separation `r` first reaches `threshold`.
pub fn light_cone_time(model: &BoundModel, r: usize, threshold: f64) -> Result<f64> {
    check_threshold(threshold)?;
    let j = model.coupling();
    if model.value(r, 0.0)? >= threshold {
        return Ok(0.0);
    }
    if !(j > 0.0) {
        return Err(Error::NoCrossing { threshold });
    }
    first_crossing(|t| model.value(r, t), threshold, r.max(1) as f64 / (2.0 * j))
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::DegenerateFit("need at least two points"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 1e-300) {
        return Err(Error::DegenerateFit("abscissae are all equal"));
    }
    Ok(sxy / sxx)
}

/// Fitted propagation speed: slope of `R` against arrival time over `separations`.
pub fn propagation_speed(model: &BoundModel, separations: &[usize], threshold: f64) -> Result<f64> {
    if separations.len() < 2 {
        return Err(Error::DegenerateFit("need at least two separations"));
    }
    let times = separations
        .iter()
        .map(|&r| light_cone_time(model, r, threshold))
        .collect::<Result<Vec<_>>>()?;
    let rs: Vec<f64> = separations.iter().map(|&r| r as f64).collect();
    fit_slope(&times, &rs)
}

/// One cell of the chain light-cone contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightConeCell {
    pub r: usize,
    pub t: f64,
    /// `min(1, 2 I_R(4Jt))`.
    pub value: f64,
}

/// Contour data for `2 I_R(4Jt)` truncated above 1, in `R`-major order over
/// `R = 0..=r_max` and `steps` evenly spaced times in `[0, t_max]`.
pub fn light_cone_grid(r_max: usize, t_max: f64, steps: usize, j: f64) -> Result<Vec<LightConeCell>> {
    check_time(j, t_max)?;
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be positive"));
    }
    let mut cells = Vec::with_capacity((r_max + 1) * steps);
    for r in 0..=r_max {
        for k in 0..steps {
            let t = if steps == 1 { 0.0 } else { t_max * k as f64 / (steps - 1) as f64 };
            let c = c_chain_bessel(j, t, r)?;
            cells.push(LightConeCell { r, t, value: c.raw.min(1.0) });
        }
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn chain_regions(l: usize, a: usize, b: usize) -> (SpinGraph, Region, Region) {
        let g = SpinGraph::chain(l, 1.0, 0.0).unwrap();
        let x = Region::single(&g, a).unwrap();
        let y = Region::single(&g, b).unwrap();
        (g, x, y)
    }

    #[test]
    fn general_examples() {
        let c = c_general(1, 2, 1.0, 0.0, 3).unwrap();
        assert_relative_eq!(c.value, 2.0 * (-3.0f64).exp(), max_relative = 1e-14);
        assert_relative_eq!(c.value, 0.09957, epsilon = 1e-5);
        assert!(!c.clamped);
        let c = c_general(1, 2, 1.0, 10.0 / (2.0 * E * 2.0), 10).unwrap();
        assert_relative_eq!(c.raw, 2.0, max_relative = 1e-12);
        assert_eq!(c.value, 2.0);
        assert!(c_general(1, 2, 1.0, 50.0, 3).unwrap().clamped);
        assert!(c_general(1, 2, 1.0, 1.0, 0).is_err());
        assert!(c_general(1, 2, 1.0, -1.0, 3).is_err());
    }

    #[test]
    fn bessel_examples() {
        assert_eq!(c_chain_bessel(1.0, 0.0, 1).unwrap().value, 0.0);
        assert_eq!(c_chain_bessel(1.0, 0.0, 0).unwrap().value, 2.0);
        let c = c_chain_bessel(1.0, 0.25, 6).unwrap();
        assert_relative_eq!(c.value, 4.497_732_295_429_514_7e-5, max_relative = 1e-10);
        assert!(c.truncation_error.unwrap() < 1e-15);
    }

    #[test]
    fn series_examples() {
        let (g, x, y) = chain_regions(3, 0, 2);
        assert_eq!(c_series(&g, &x, &y, 0.0, 1e-12, 100).unwrap().value, 0.0);
        // leading term 4 J^2 t^2; next contributions are O(t^4)
        let t = 1e-3;
        let c = c_series(&g, &x, &y, t, 1e-14, 100).unwrap();
        assert_relative_eq!(c.value, 4.0 * t * t, max_relative = 1e-5);
        assert!(c.converged);
    }

    #[test]
    fn series_rejects_overlap() {
        let g = SpinGraph::chain(3, 1.0, 0.0).unwrap();
        let x = Region::new(&g, [0, 1]).unwrap();
        let y = Region::new(&g, [1, 2]).unwrap();
        assert_eq!(c_series(&g, &x, &y, 1.0, 1e-12, 100), Err(Error::RegionsOverlap));
    }

    #[test]
    fn series_disconnected_is_zero() {
        let g = SpinGraph::new(alloc::vec![2; 4], [(0, 1), (2, 3)], 1.0, 0.0).unwrap();
        let x = Region::single(&g, 0).unwrap();
        let y = Region::single(&g, 3).unwrap();
        let c = c_series(&g, &x, &y, 5.0, 1e-12, 100).unwrap();
        assert_eq!(c.value, 0.0);
        assert_eq!(c.inputs.r, None);
    }

    #[test]
    fn series_flags_early_stop() {
        let (g, x, y) = chain_regions(12, 0, 11);
        let c = c_series(&g, &x, &y, 0.5, 1e-12, 12).unwrap();
        assert!(!c.converged);
        assert!(c.truncation_error.unwrap() > 0.0);
    }

    #[test]
    fn series_below_bessel_on_chain() {
        for &(l, a, b) in &[(6, 0, 5), (9, 2, 6), (5, 1, 2)] {
            let (g, x, y) = chain_regions(l, a, b);
            for k in 1..40 {
                let t = 0.05 * k as f64;
                let s = c_series(&g, &x, &y, t, 1e-13, 400).unwrap();
                let bes = c_chain_bessel(1.0, t, b - a).unwrap();
                assert!(s.value <= bes.upper() + 1e-12, "t={t} {} > {}", s.value, bes.value);
            }
        }
    }

    #[test]
    fn light_cone_examples() {
        let model = BoundModel::ChainBessel { j: 1.0 };
        let t = light_cone_time(&model, 30, 0.5).unwrap();
        assert!((30.0 / t - 6.0).abs() < 0.6, "speed {}", 30.0 / t);
        assert_relative_eq!(model.value(30, t).unwrap(), 0.5, max_relative = 1e-8);
        let general = BoundModel::General { x_size: 1, d: 2, j: 1.0 };
        let t0 = general.value(3, 0.0).unwrap();
        assert_eq!(light_cone_time(&general, 3, t0).unwrap(), 0.0);
        assert!(matches!(
            light_cone_time(&BoundModel::ChainBessel { j: 0.0 }, 3, 0.5),
            Err(Error::NoCrossing { .. })
        ));
        assert!(light_cone_time(&model, 3, 2.0).is_err());
    }

    #[test]
    fn arrival_time_increases_with_distance() {
        for model in [
            BoundModel::ChainBessel { j: 1.0 },
            BoundModel::General { x_size: 1, d: 2, j: 1.0 },
            BoundModel::ChainSeries { j: 1.0 },
        ] {
            let mut last = -1.0;
            for r in 1..25 {
                let t = light_cone_time(&model, r, 0.5).unwrap();
                assert!(t > last, "{model:?} r={r}");
                last = t;
            }
        }
    }

    #[test]
    fn general_speed() {
        let model = BoundModel::General { x_size: 1, d: 2, j: 1.0 };
        let rs: Vec<usize> = (50..=100).step_by(10).collect();
        let v = propagation_speed(&model, &rs, 0.5).unwrap();
        assert_relative_eq!(v, 4.0 * E, max_relative = 1e-6);
        assert!(propagation_speed(&model, &[4], 0.5).is_err());
        assert!(propagation_speed(&BoundModel::ChainBessel { j: 0.0 }, &[4, 5], 0.5).is_err());
    }

    #[test]
    fn grid_shape_and_corner() {
        let cells = light_cone_grid(10, 2.0, 5, 1.0).unwrap();
        assert_eq!(cells.len(), 11 * 5);
        assert_eq!(cells[0].value, 1.0);
        assert_eq!((cells[5].r, cells[5].t), (1, 0.0));
    }
}
