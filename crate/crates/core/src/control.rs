//! Piecewise-constant field control of end-to-end state transfer on a
//! Heisenberg chain, restricted to the single-excitation sector.
//!
//! With `H = -J/2 sum sigma_n . sigma_{n+1} + sum B_n(t) sigma^z_n`, the sector
//! with one flipped spin is spanned by `|n>` (flip on site `n`). Hopping is
//! `-J`; the fields put `2 B_n` on the diagonal. Site-independent constants
//! only change a global phase and are dropped. The two boundary sites differ
//! from the bulk by a constant `J`, which is likewise dropped: it is a static
//! field the unconstrained controls can absorb.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::lr::fit_slope;
use crate::sim::checks::trial_rng;

pub type RMatrix = DMatrix<f64>;
type ZVector = DVector<Complex64>;

/// Default threshold on infidelity for calling a transfer successful.
pub const DEFAULT_SUCCESS_THRESHOLD: f64 = 1e-2;

/// Tridiagonal single-excitation Hamiltonian for fields `B_n`.
pub fn single_excitation_hamiltonian(length: usize, j: f64, fields: &[f64]) -> Result<RMatrix> {
    if length < 2 {
        return Err(Error::InvalidArgument("chain needs at least two sites"));
    }
    if fields.len() != length {
        return Err(Error::DimensionMismatch { expected: length, found: fields.len() });
    }
    if !j.is_finite() || fields.iter().any(|b| !b.is_finite()) {
        return Err(Error::InvalidArgument("couplings and fields must be finite"));
    }
    let mut h = RMatrix::zeros(length, length);
    for n in 0..length {
        h[(n, n)] = 2.0 * fields[n];
        if n + 1 < length {
            h[(n, n + 1)] = -j;
            h[(n + 1, n)] = -j;
        }
    }
    Ok(h)
}

/// Largest `|dE/dk|` over the single-excitation band of a free chain of
/// `length` sites, from finite differences of `E_m = eig_m` against
/// `k_m = pi m / (length + 1)`. Tends to `2 J`.
pub fn max_group_velocity(length: usize, j: f64) -> Result<f64> {
    let h = single_excitation_hamiltonian(length, j, &vec![0.0; length])?;
    let mut e: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    e.sort_by(f64::total_cmp);
    let dk = PI / (length + 1) as f64;
    Ok(e.windows(2).map(|w| (w[1] - w[0]) / dk).fold(0.0, f64::max))
}

/// Field amplitudes per slice and site.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ControlPulse {
    pub length: usize,
    pub slice_duration: f64,
    /// `fields[slice][site]`.
    pub fields: Vec<Vec<f64>>,
    pub amplitude_cap: Option<f64>,
}

impl ControlPulse {
    pub fn new(length: usize, total_time: f64, fields: Vec<Vec<f64>>, amplitude_cap: Option<f64>) -> Result<Self> {
        if length < 2 {
            return Err(Error::InvalidArgument("chain needs at least two sites"));
        }
        if fields.is_empty() {
            return Err(Error::InvalidArgument("pulse needs at least one slice"));
        }
        if !(total_time > 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidArgument("total time must be positive"));
        }
        for row in &fields {
            if row.len() != length {
                return Err(Error::DimensionMismatch { expected: length, found: row.len() });
            }
            if row.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidArgument("fields must be finite"));
            }
            if let Some(cap) = amplitude_cap {
                if let Some(b) = row.iter().find(|b| b.abs() > cap) {
                    return Err(Error::NormCapExceeded { norm: b.abs(), cap });
                }
            }
        }
        let slice_duration = total_time / fields.len() as f64;
        Ok(Self { length, slice_duration, fields, amplitude_cap })
    }

    pub fn zero(length: usize, slice_count: usize, total_time: f64) -> Result<Self> {
        Self::new(length, total_time, vec![vec![0.0; length]; slice_count], None)
    }

    pub fn slice_count(&self) -> usize {
        self.fields.len()
    }

    pub fn total_time(&self) -> f64 {
        self.slice_duration * self.fields.len() as f64
    }

    fn flat(&self) -> Vec<f64> {
        self.fields.iter().flatten().copied().collect()
    }

    fn with_flat(&self, x: &[f64]) -> Self {
        let fields = x.chunks(self.length).map(|c| c.to_vec()).collect();
        Self { fields, ..self.clone() }
    }
}

fn propagate(v: &RMatrix, values: &[f64], dt: f64, psi: &ZVector) -> ZVector {
    let mut w = real_tr_times(v, psi);
    for (c, &e) in w.iter_mut().zip(values) {
        *c *= Complex64::from_polar(1.0, -e * dt);
    }
    real_times(v, &w)
}

fn real_times(v: &RMatrix, w: &ZVector) -> ZVector {
    let re = v * w.map(|z| z.re);
    let im = v * w.map(|z| z.im);
    ZVector::from_fn(re.len(), |i, _| Complex64::new(re[i], im[i]))
}

fn real_tr_times(v: &RMatrix, w: &ZVector) -> ZVector {
    let re = v.tr_mul(&w.map(|z| z.re));
    let im = v.tr_mul(&w.map(|z| z.im));
    ZVector::from_fn(re.len(), |i, _| Complex64::new(re[i], im[i]))
}

fn basis(length: usize, n: usize) -> ZVector {
    let mut v = ZVector::zeros(length);
    v[n] = Complex64::new(1.0, 0.0);
    v
}

fn spectra(pulse: &ControlPulse, j: f64) -> Result<Vec<SymmetricEigen<f64, nalgebra::Dyn>>> {
    pulse
        .fields
        .iter()
        .map(|row| Ok(single_excitation_hamiltonian(pulse.length, j, row)?.symmetric_eigen()))
        .collect()
}

/// `<L-1| U |0>` for the pulse.
pub fn transfer_amplitude(pulse: &ControlPulse, j: f64) -> Result<Complex64> {
    let mut psi = basis(pulse.length, 0);
    for eig in spectra(pulse, j)? {
        psi = propagate(&eig.eigenvectors, eig.eigenvalues.as_slice(), pulse.slice_duration, &psi);
    }
    Ok(psi[pulse.length - 1])
}

/// `1 - |<L-1| U |0>|^2`.
pub fn infidelity(pulse: &ControlPulse, j: f64) -> Result<f64> {
    Ok((1.0 - transfer_amplitude(pulse, j)?.norm_sqr()).clamp(0.0, 1.0))
}

/// Full `L x L` propagator of the pulse, for unitarity checks.
pub fn pulse_unitary(pulse: &ControlPulse, j: f64) -> Result<DMatrix<Complex64>> {
    let l = pulse.length;
    let mut u = DMatrix::<Complex64>::identity(l, l);
    for eig in spectra(pulse, j)? {
        for c in 0..l {
            let col = propagate(&eig.eigenvectors, eig.eigenvalues.as_slice(), pulse.slice_duration, &u.column(c).into());
            u.set_column(c, &col);
        }
    }
    Ok(u)
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Infidelity and its exact gradient with respect to every field.
///
/// For slice `k` with `H_k = V diag(l) V^T`, `dU_k/dB_n = V (G o V^T dH V) V^T`
/// where `G_ab = (e^{-i l_a dt} - e^{-i l_b dt}) / (l_a - l_b)`, written as
/// `-i dt e^{-i (l_a + l_b) dt / 2} sinc((l_a - l_b) dt / 2)` so the diagonal
/// and near-degenerate pairs need no special case.
pub fn infidelity_gradient(pulse: &ControlPulse, j: f64) -> Result<(f64, Vec<f64>)> {
    let l = pulse.length;
    let dt = pulse.slice_duration;
    let eigs = spectra(pulse, j)?;
    let mut forward = Vec::with_capacity(eigs.len() + 1);
    forward.push(basis(l, 0));
    for eig in &eigs {
        let next = propagate(&eig.eigenvectors, eig.eigenvalues.as_slice(), dt, forward.last().unwrap());
        forward.push(next);
    }
    let amp = forward.last().unwrap()[l - 1];
    let mut grad = vec![0.0; eigs.len() * l];
    let mut chi = basis(l, l - 1);
    for (k, eig) in eigs.iter().enumerate().rev() {
        let v = &eig.eigenvectors;
        let lam = eig.eigenvalues.as_slice();
        let u = real_tr_times(v, &chi);
        let w = real_tr_times(v, &forward[k]);
        // P_ab = G_ab w_b, Q = P V^T.
        let p = DMatrix::<Complex64>::from_fn(l, l, |a, b| {
            let phase = Complex64::from_polar(1.0, -(lam[a] + lam[b]) * dt / 2.0);
            Complex64::new(0.0, -dt) * phase * sinc((lam[a] - lam[b]) * dt / 2.0) * w[b]
        });
        let vc = v.map(|x| Complex64::new(x, 0.0));
        let q = &p * vc.transpose();
        for n in 0..l {
            let mut da = Complex64::new(0.0, 0.0);
            for a in 0..l {
                da += u[a].conj() * v[(n, a)] * q[(a, n)];
            }
            da *= 2.0;
            grad[k * l + n] = -2.0 * (amp.conj() * da).re;
        }
        // chi_{k-1} = U_k^dagger chi_k
        chi = propagate(v, lam, -dt, &chi);
    }
    Ok(((1.0 - amp.norm_sqr()).clamp(0.0, 1.0), grad))
}

/// Central finite-difference gradient with step `h`.
pub fn finite_difference_gradient(pulse: &ControlPulse, j: f64, h: f64) -> Result<Vec<f64>> {
    let x = pulse.flat();
    let mut g = vec![0.0; x.len()];
    for i in 0..x.len() {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fp = 1.0 - transfer_amplitude(&pulse.with_flat(&xp), j)?.norm_sqr();
        let fm = 1.0 - transfer_amplitude(&pulse.with_flat(&xm), j)?.norm_sqr();
        g[i] = (fp - fm) / (2.0 * h);
    }
    Ok(g)
}

/// `||a - b|| / ||b||`.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    let norm: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if norm == 0.0 {
        diff
    } else {
        diff / norm
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct OptimizerConfig {
    pub max_iterations: usize,
    /// Stop once the infidelity drops below this.
    pub target: f64,
    /// Stop once the gradient norm drops below this.
    pub gradient_tol: f64,
    /// L-BFGS history length.
    pub memory: usize,
    pub amplitude_cap: Option<f64>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self { max_iterations: 400, target: 1e-6, gradient_tol: 1e-9, memory: 10, amplitude_cap: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TransferResult {
    pub pulse: ControlPulse,
    pub infidelity: f64,
    pub total_time: f64,
    pub iterations: usize,
    /// Stopped on the target or on a vanishing gradient rather than on the
    /// iteration cap.
    pub converged: bool,
    /// Restart that produced this pulse.
    pub restart: usize,
}

/// Fields are `cap * tanh(x)` under an amplitude cap, `x` otherwise.
struct Param {
    cap: Option<f64>,
}

impl Param {
    fn fields(&self, x: &[f64]) -> Vec<f64> {
        match self.cap {
            Some(c) => x.iter().map(|v| c * v.tanh()).collect(),
            None => x.to_vec(),
        }
    }

    fn chain(&self, x: &[f64], g: &mut [f64]) {
        if let Some(c) = self.cap {
            for (gi, xi) in g.iter_mut().zip(x) {
                *gi *= c * (1.0 - xi.tanh().powi(2));
            }
        }
    }

    fn initial(&self, b: &[f64]) -> Vec<f64> {
        match self.cap {
            Some(c) => b.iter().map(|v| (v / c).clamp(-0.999_999, 0.999_999).atanh()).collect(),
            None => b.to_vec(),
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// L-BFGS with Armijo backtracking, from `start`.
pub fn optimize_pulse(start: &ControlPulse, j: f64, config: &OptimizerConfig) -> Result<(ControlPulse, f64, usize, bool)> {
    let param = Param { cap: config.amplitude_cap };
    let template = ControlPulse { amplitude_cap: None, ..start.clone() };
    let eval = |x: &[f64]| -> Result<(f64, Vec<f64>)> {
        let (f, mut g) = infidelity_gradient(&template.with_flat(&param.fields(x)), j)?;
        param.chain(x, &mut g);
        Ok((f, g))
    };
    let mut x = param.initial(&start.flat());
    let (mut f, mut g) = eval(&x)?;
    let mut hist: Vec<(Vec<f64>, Vec<f64>, f64)> = Vec::new();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < config.max_iterations {
        let gnorm = dot(&g, &g).sqrt();
        if f <= config.target || gnorm <= config.gradient_tol {
            converged = true;
            break;
        }
        // Two-loop recursion.
        let mut q = g.clone();
        let mut alphas = Vec::with_capacity(hist.len());
        for (s, y, rho) in hist.iter().rev() {
            let a = rho * dot(s, &q);
            q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
            alphas.push(a);
        }
        let gamma = hist.last().map_or(1.0 / gnorm.max(1e-300), |(s, y, _)| dot(s, y) / dot(y, y));
        q.iter_mut().for_each(|qi| *qi *= gamma);
        for ((s, y, rho), a) in hist.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
        }
        let mut d: Vec<f64> = q.iter().map(|v| -v).collect();
        let mut slope = dot(&g, &d);
        if slope >= 0.0 {
            hist.clear();
            d = g.iter().map(|v| -v / gnorm.max(1e-300)).collect();
            slope = dot(&g, &d);
        }
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let xn: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let (fn_, gn) = eval(&xn)?;
            if fn_ <= f + 1e-4 * step * slope {
                accepted = Some((xn, fn_, gn));
                break;
            }
            step *= 0.5;
        }
        iterations += 1;
        let Some((xn, fn_, gn)) = accepted else {
            // No descent along d: treat as stationary.
            converged = true;
            break;
        };
        let s: Vec<f64> = xn.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-16 {
            hist.push((s, y, 1.0 / sy));
            if hist.len() > config.memory {
                hist.remove(0);
            }
        }
        x = xn;
        f = fn_;
        g = gn;
    }
    if !converged && (f <= config.target || dot(&g, &g).sqrt() <= config.gradient_tol) {
        converged = true;
    }
    let pulse = ControlPulse { amplitude_cap: config.amplitude_cap, ..template.with_flat(&param.fields(&x)) };
    let f = infidelity(&pulse, j)?;
    Ok((pulse, f, iterations, converged))
}

/// Initial fields uniform in `[-J, J]` (clipped to the cap if one is set).
pub fn random_pulse<R: Rng + ?Sized>(
    length: usize,
    j: f64,
    total_time: f64,
    slice_count: usize,
    cap: Option<f64>,
    rng: &mut R,
) -> Result<ControlPulse> {
    let span = j.abs().max(f64::MIN_POSITIVE);
    let limit = cap.map_or(span, |c| span.min(c));
    let fields = (0..slice_count)
        .map(|_| (0..length).map(|_| rng.random_range(-limit..=limit)).collect())
        .collect();
    ControlPulse::new(length, total_time, fields, cap)
}

/// Best of `restarts` optimizations from random starts; restart `r` draws
/// from the stream `(seed, r)`. Stops early once a restart reaches the
/// target, so extra restarts never make the result worse.
#[allow(clippy::too_many_arguments)]
pub fn grape_optimize(
    length: usize,
    j: f64,
    total_time: f64,
    slice_count: usize,
    restarts: usize,
    seed: u64,
    config: &OptimizerConfig,
) -> Result<TransferResult> {
    if length < 3 {
        return Err(Error::InvalidArgument("chain needs at least three sites"));
    }
    if slice_count < 4 {
        return Err(Error::InvalidArgument("need at least four slices"));
    }
    if restarts == 0 {
        return Err(Error::InvalidArgument("need at least one restart"));
    }
    let mut best: Option<TransferResult> = None;
    for r in 0..restarts {
        let result = single_restart(length, j, total_time, slice_count, seed, r, config)?;
        let done = result.infidelity <= config.target;
        if best.as_ref().is_none_or(|b| result.infidelity < b.infidelity) {
            best = Some(result);
        }
        if done {
            break;
        }
    }
    Ok(best.expect("at least one restart"))
}

/// One optimization from the random start for restart `restart`.
pub fn single_restart(
    length: usize,
    j: f64,
    total_time: f64,
    slice_count: usize,
    seed: u64,
    restart: usize,
    config: &OptimizerConfig,
) -> Result<TransferResult> {
    let mut rng = trial_rng(seed, restart);
    let start = random_pulse(length, j, total_time, slice_count, config.amplitude_cap, &mut rng)?;
    let (pulse, infidelity, iterations, converged) = optimize_pulse(&start, j, config)?;
    Ok(TransferResult { pulse, infidelity, total_time, iterations, converged, restart })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanPoint {
    pub length: usize,
    pub total_time: f64,
    pub infidelity: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LengthSummary {
    pub length: usize,
    /// Smallest evaluated time with infidelity below the threshold.
    pub t_star: Option<f64>,
    /// `L / t_star`.
    pub v_num: Option<f64>,
    /// `(threshold, t_star)` for neighbouring thresholds.
    pub sensitivity: Vec<(f64, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanReport {
    pub threshold: f64,
    pub points: Vec<ScanPoint>,
    pub lengths: Vec<LengthSummary>,
    /// `1 / slope` of `t_star` against `L`.
    pub fitted_v: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanConfig {
    pub lengths: Vec<usize>,
    pub j: f64,
    /// Grid times are `factor * L / (2 J)`.
    pub factors: Vec<f64>,
    pub slices: usize,
    pub restarts: usize,
    pub seed: u64,
    pub threshold: f64,
    /// Bisection steps between the last failing and first successful grid
    /// time.
    pub refine_steps: usize,
    pub optimizer: OptimizerConfig,
}

impl ScanConfig {
    /// `factors` from `lo` to `hi` in steps of `step`.
    pub fn factor_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| lo + step * k as f64).collect()
    }

    /// Stream seed for one grid point, independent of evaluation order.
    pub fn point_seed(&self, length: usize, index: usize) -> u64 {
        self.seed ^ ((length as u64) << 40) ^ ((index as u64) << 20)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lengths.is_empty() || self.factors.is_empty() {
            return Err(Error::InvalidArgument("scan needs lengths and time factors"));
        }
        if !(self.j > 0.0) {
            return Err(Error::InvalidArgument("J must be positive"));
        }
        if self.factors.iter().any(|f| !(*f > 0.0)) {
            return Err(Error::InvalidArgument("time factors must be positive"));
        }
        Ok(())
    }

    pub fn time(&self, length: usize, index: usize) -> f64 {
        self.factors[index] * length as f64 / (2.0 * self.j)
    }

    fn run_at(&self, length: usize, t: f64, seed: u64) -> Result<ScanPoint> {
        let r = grape_optimize(length, self.j, t, self.slices, self.restarts, seed, &self.optimizer)?;
        Ok(ScanPoint { length, total_time: t, infidelity: r.infidelity, converged: r.converged })
    }

    /// Optimized transfer at grid point `index` for chain length `length`.
    pub fn run_point(&self, length: usize, index: usize) -> Result<ScanPoint> {
        self.run_at(length, self.time(length, index), self.point_seed(length, index))
    }

    /// Bisection between the last failing and the first successful grid
    /// time of one chain length. Returns the extra points evaluated.
    pub fn refine(&self, length: usize, grid: &[ScanPoint]) -> Result<Vec<ScanPoint>> {
        let mut own: Vec<&ScanPoint> = grid.iter().filter(|p| p.length == length).collect();
        own.sort_by(|a, b| a.total_time.total_cmp(&b.total_time));
        let Some(first) = own.iter().position(|p| p.infidelity < self.threshold) else {
            return Ok(Vec::new());
        };
        if first == 0 {
            return Ok(Vec::new());
        }
        let (mut lo, mut hi) = (own[first - 1].total_time, own[first].total_time);
        let mut extra = Vec::with_capacity(self.refine_steps);
        for step in 0..self.refine_steps {
            let mid = 0.5 * (lo + hi);
            let p = self.run_at(length, mid, self.point_seed(length, self.factors.len() + step))?;
            if p.infidelity < self.threshold {
                hi = mid;
            } else {
                lo = mid;
            }
            extra.push(p);
        }
        Ok(extra)
    }
}

fn t_star(points: &[ScanPoint], threshold: f64) -> Option<f64> {
    points.iter().filter(|p| p.infidelity < threshold).map(|p| p.total_time).reduce(f64::min)
}

/// Summaries and the speed fit from already computed points, which are
/// sorted by length and time.
pub fn summarize_scan(config: &ScanConfig, mut points: Vec<ScanPoint>) -> ScanReport {
    points.sort_by(|a, b| a.length.cmp(&b.length).then(a.total_time.total_cmp(&b.total_time)));
    let lengths: Vec<LengthSummary> = config
        .lengths
        .iter()
        .map(|&l| {
            let own: Vec<ScanPoint> = points.iter().copied().filter(|p| p.length == l).collect();
            let ts = t_star(&own, config.threshold);
            let sensitivity = [config.threshold * 10.0, config.threshold / 10.0]
                .iter()
                .map(|&th| (th, t_star(&own, th)))
                .collect();
            LengthSummary { length: l, t_star: ts, v_num: ts.map(|t| l as f64 / t), sensitivity }
        })
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        lengths.iter().filter_map(|s| s.t_star.map(|t| (s.length as f64, t))).unzip();
    let fitted_v = if xs.len() >= 2 { fit_slope(&xs, &ys).ok().filter(|s| *s > 0.0).map(|s| 1.0 / s) } else { None };
    ScanReport { threshold: config.threshold, points, lengths, fitted_v }
}

/// Sequential scan over every `(L, T)` grid point, followed by bisection
/// refinement of each `t_star`.
pub fn speed_limit_scan(config: &ScanConfig) -> Result<ScanReport> {
    config.validate()?;
    let mut points = Vec::new();
    for &l in &config.lengths {
        let grid = (0..config.factors.len()).map(|k| config.run_point(l, k)).collect::<Result<Vec<_>>>()?;
        let extra = config.refine(l, &grid)?;
        points.extend(grid);
        points.extend(extra);
    }
    Ok(summarize_scan(config, points))
}
