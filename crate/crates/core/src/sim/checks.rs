//! Randomized end-to-end checks of the task bounds against exact dynamics.
//!
//! Every suite draws trial `k` from a ChaCha stream keyed by `(seed, k)`, so
//! a single failing trial can be replayed without rerunning the rest.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Region, SpinGraph};
use crate::linalg::{self, CMatrix, CVector};
use crate::lr::{self, c_chain_bessel, c_series, DEFAULT_SERIES_TERMS};
use crate::sim::hamiltonian::{random_excitation_preserving, random_piecewise, PiecewiseHamiltonian};
use crate::sim::observables::{
    bell_fidelities, commutator_coefficient_from_unitary, max_entangled_fidelity, max_pauli_correlator,
    transfer_fidelity,
};
use crate::sim::state::{embed, StateVector};
use crate::task::{self, ENTANGLEMENT_HYPOTHESIS_MAX};

/// Slack on every `measured <= bound` comparison.
pub const BOUND_SLACK: f64 = 1e-8;
/// Slack for the unitary trace-distance inequality.
pub const LEMMA_SLACK: f64 = 1e-9;
/// Tolerance on `[H, sum Z] = 0`.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Largest `J t` sampled by the dominance and transfer suites.
pub const TRANSFER_JT_MAX: f64 = 2.0;
/// Largest `J t` sampled by the entanglement suite.
pub const ENTANGLE_JT_MAX: f64 = 1.0;
/// Series tolerance used when a bound is compared with measurements.
const SERIES_TOL: f64 = 1e-14;

/// Independent generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// One sampled instance with its measured value and bound.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Instance {
    pub seed: u64,
    pub trial: usize,
    pub length: usize,
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
    /// Distance to violation: `bound - measured` for ceilings,
    /// `measured - bound` for floors.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SuiteReport {
    pub suite: &'static str,
    pub trials: usize,
    pub violations: usize,
    pub min_margin: f64,
    /// Instance with the smallest margin.
    pub worst: Option<Instance>,
    /// Violating instances, in trial order.
    pub failures: Vec<Instance>,
}

impl SuiteReport {
    pub fn new(suite: &'static str) -> Self {
        Self { suite, trials: 0, violations: 0, min_margin: f64::INFINITY, worst: None, failures: Vec::new() }
    }

    /// Adds one instance; margins below `-slack` count as violations.
    pub fn record(&mut self, inst: Instance, slack: f64) {
        self.trials += 1;
        if inst.margin < -slack {
            self.violations += 1;
            self.failures.push(inst.clone());
        }
        if inst.margin < self.min_margin {
            self.min_margin = inst.margin;
            self.worst = Some(inst);
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }

    /// Concatenates reports of the same suite.
    pub fn merge(mut self, other: SuiteReport) -> SuiteReport {
        self.trials += other.trials;
        self.violations += other.violations;
        self.failures.extend(other.failures);
        if other.min_margin < self.min_margin {
            self.min_margin = other.min_margin;
            self.worst = other.worst;
        }
        self
    }
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required"));
    }
    Ok(())
}

fn check_lengths(lengths: &RangeInclusive<usize>, min: usize) -> Result<()> {
    if lengths.is_empty() || *lengths.start() < min {
        return Err(Error::InvalidArgument("chain length range is empty or too short"));
    }
    Ok(())
}

fn two_sites<R: Rng + ?Sized>(length: usize, rng: &mut R) -> (usize, usize) {
    let x = rng.random_range(0..length);
    let mut y = rng.random_range(0..length - 1);
    if y >= x {
        y += 1;
    }
    (x, y)
}

/// Random time-dependent chain Hamiltonian with `J = 1`, `B = 1`, one to four
/// slices and total duration `total_time`.
fn random_chain<R: Rng + ?Sized>(length: usize, total_time: f64, rng: &mut R) -> Result<PiecewiseHamiltonian> {
    let g = SpinGraph::chain(length, 1.0, 1.0)?;
    let slices = rng.random_range(1..=4);
    random_piecewise(&g, slices, total_time, rng)
}

/// Empirical commutator coefficient against `min(2, c_series)` for single
/// sites on random chains, with `J t <= jt_max`.
pub fn dominance_trial(seed: u64, trial: usize, lengths: RangeInclusive<usize>, jt_max: f64) -> Result<Instance> {
    let mut rng = trial_rng(seed, trial);
    let length = rng.random_range(lengths);
    let h = random_chain(length, jt_max, &mut rng)?;
    let (xv, yv) = two_sites(length, &mut rng);
    let t = rng.random_range(0.0..=jt_max);
    let g = h.graph();
    let (x, y) = (Region::single(g, xv)?, Region::single(g, yv)?);
    let u = h.propagator()?.unitary(t)?;
    let measured = commutator_coefficient_from_unitary(&u, h.layout(), &x, &y)?;
    let bound = c_series(g, &x, &y, t, SERIES_TOL, DEFAULT_SERIES_TERMS)?.value;
    Ok(Instance { seed, trial, length, x: vec![xv], y: vec![yv], t, measured, bound, margin: bound - measured })
}

pub fn dominance_suite(trials: usize, lengths: RangeInclusive<usize>, seed: u64) -> Result<SuiteReport> {
    check_trials(trials)?;
    check_lengths(&lengths, 2)?;
    let mut report = SuiteReport::new("dominance");
    for k in 0..trials {
        report.record(dominance_trial(seed, k, lengths.clone(), TRANSFER_JT_MAX)?, BOUND_SLACK);
    }
    Ok(report)
}

/// Fidelity of the reduced states on `Y` with and without a Haar-random
/// unitary kick on `X`, against `1 - c_series`.
pub fn transfer_trial(seed: u64, trial: usize, lengths: RangeInclusive<usize>, jt_max: f64) -> Result<Instance> {
    let mut rng = trial_rng(seed, trial);
    let length = rng.random_range(lengths);
    let h = random_chain(length, jt_max, &mut rng)?;
    let (xv, yv) = two_sites(length, &mut rng);
    let t = rng.random_range(0.0..=jt_max);
    let layout = h.layout();
    let psi = linalg::random_state(layout.total(), &mut rng);
    let a = embed(&linalg::random_unitary(2, &mut rng), layout.dims(), &[xv])?;
    let u = h.propagator()?.unitary(t)?;
    let measured = transfer_fidelity(&u, layout, &psi, &a, &[yv])?;
    let g = h.graph();
    let c = c_series(g, &Region::single(g, xv)?, &Region::single(g, yv)?, t, SERIES_TOL, DEFAULT_SERIES_TERMS)?;
    let bound = task::transfer_fidelity_floor(c.value, 1.0)?.value;
    Ok(Instance { seed, trial, length, x: vec![xv], y: vec![yv], t, measured, bound, margin: measured - bound })
}

pub fn transfer_suite(trials: usize, lengths: RangeInclusive<usize>, seed: u64) -> Result<SuiteReport> {
    check_trials(trials)?;
    check_lengths(&lengths, 2)?;
    let mut report = SuiteReport::new("transfer");
    for k in 0..trials {
        report.record(transfer_trial(seed, k, lengths.clone(), TRANSFER_JT_MAX)?, BOUND_SLACK);
    }
    Ok(report)
}

/// Outcome of one entanglement trial: the correlator comparison and, when
/// the correlator ceiling is small enough, the entangled-fidelity one.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EntangleOutcome {
    pub correlator: Instance,
    pub fidelity: Option<Instance>,
    /// Largest root fidelity with the four Bell states.
    pub bell_fidelity: f64,
}

/// Random product state on a chain, evolved under a random local
/// Hamiltonian; compares the end-to-end Pauli correlator with the ceiling for
/// the midpoint cut, and the closest maximally entangled state with the
/// entangled-fidelity ceiling.
pub fn entangle_trial(seed: u64, trial: usize, lengths: RangeInclusive<usize>, jt_max: f64) -> Result<EntangleOutcome> {
    let mut rng = trial_rng(seed, trial);
    let length = rng.random_range(lengths);
    let h = random_chain(length, jt_max, &mut rng)?;
    // Bias towards short times, where the fidelity ceiling applies.
    let t = jt_max * rng.random_range(0.0f64..=1.0).powi(2);
    let factors: Vec<CVector> = (0..length).map(|_| linalg::random_state(2, &mut rng)).collect();
    let psi0 = StateVector::product(&factors)?;
    let psi = h.propagator()?.evolve(&psi0, t)?;

    let g = h.graph();
    let (xv, yv) = (0, length - 1);
    let x = Region::single(g, xv)?;
    let y = Region::single(g, yv)?;
    let z = Region::new(g, 0..length / 2)?;
    let zbar = z.complement().expect("cut leaves both sides non-empty");
    let c1 = c_series(g, &x, &zbar, t, SERIES_TOL, DEFAULT_SERIES_TERMS)?.value;
    let c2 = c_series(g, &z, &y, t, SERIES_TOL, DEFAULT_SERIES_TERMS)?.value;
    let ceiling = task::correlator_ceiling(0.0, c1, c2)?.value;

    let rho = psi.to_density();
    let measured = max_pauli_correlator(&rho, &x, &y)?.value;
    let correlator = Instance {
        seed,
        trial,
        length,
        x: vec![xv],
        y: vec![yv],
        t,
        measured,
        bound: ceiling,
        margin: ceiling - measured,
    };
    let pair = psi.reduce(&[xv, yv])?;
    let bell_fidelity = bell_fidelities(&pair)?.iter().copied().fold(0.0, f64::max);
    let fidelity = if ceiling <= ENTANGLEMENT_HYPOTHESIS_MAX {
        let bound = task::entangled_fidelity_ceiling(ceiling)?.value;
        let measured = max_entangled_fidelity(&pair)?;
        Some(Instance { margin: bound - measured, measured, bound, ..correlator.clone() })
    } else {
        None
    };
    Ok(EntangleOutcome { correlator, fidelity, bell_fidelity })
}

/// Correlator and entangled-fidelity reports.
pub fn entangle_suite(
    trials: usize,
    lengths: RangeInclusive<usize>,
    seed: u64,
) -> Result<(SuiteReport, SuiteReport)> {
    check_trials(trials)?;
    check_lengths(&lengths, 2)?;
    let mut corr = SuiteReport::new("correlator");
    let mut fid = SuiteReport::new("entangled-fidelity");
    for k in 0..trials {
        let out = entangle_trial(seed, k, lengths.clone(), ENTANGLE_JT_MAX)?;
        corr.record(out.correlator, BOUND_SLACK);
        if let Some(f) = out.fidelity {
            fid.record(f, BOUND_SLACK);
        }
    }
    Ok((corr, fid))
}

/// One sample of the unitary trace-distance inequality.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Lemma1Sample {
    pub trial: usize,
    pub dim: usize,
    /// `||A rho A^dagger - B rho B^dagger||_1`.
    pub lhs: f64,
    /// `2 ||A - B||`.
    pub rhs: f64,
}

fn lemma1_sample(seed: u64, trial: usize, dim: usize) -> Lemma1Sample {
    let mut rng = trial_rng(seed, trial);
    let a = linalg::random_unitary(dim, &mut rng);
    // Odd trials probe nearby unitaries B = A exp(-i eps K).
    let b = if trial % 2 == 1 {
        let eps = 10f64.powf(rng.random_range(-6.0..0.0));
        let k = linalg::random_hermitian(dim, 1.0, &mut rng);
        &a * linalg::eigh(&k).propagator(eps)
    } else {
        linalg::random_unitary(dim, &mut rng)
    };
    let rho = if rng.random_bool(0.5) {
        let psi = linalg::random_state(dim, &mut rng);
        &psi * psi.adjoint()
    } else {
        linalg::random_density(dim, &mut rng)
    };
    let diff = &a * &rho * a.adjoint() - &b * &rho * b.adjoint();
    Lemma1Sample {
        trial,
        dim,
        lhs: linalg::trace_norm_hermitian(&linalg::hermitian_part(&diff)),
        rhs: 2.0 * linalg::operator_norm(&(&a - &b)),
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Lemma1Report {
    pub trials: usize,
    pub dim: usize,
    pub violations: usize,
    /// Largest `lhs / rhs` seen.
    pub max_ratio: f64,
    pub failures: Vec<Lemma1Sample>,
}

impl Lemma1Report {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Haar-random unitary pairs and random states at dimension `dim <= 64`.
pub fn verify_lemma1(trials: usize, dim: usize, seed: u64) -> Result<Lemma1Report> {
    check_trials(trials)?;
    if !(1..=64).contains(&dim) {
        return Err(Error::InvalidArgument("dimension must lie in 1..=64"));
    }
    let mut report = Lemma1Report { trials, dim, violations: 0, max_ratio: 0.0, failures: Vec::new() };
    for k in 0..trials {
        let s = lemma1_sample(seed, k, dim);
        if s.lhs > s.rhs + LEMMA_SLACK {
            report.violations += 1;
            report.failures.push(s.clone());
        }
        if s.rhs > 0.0 {
            report.max_ratio = report.max_ratio.max(s.lhs / s.rhs);
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SpinFlipOutcome {
    pub length: usize,
    pub t: f64,
    /// Probability of finding the last spin up.
    pub p_measured: f64,
    /// `min(2, 2 I_{L-1}(4 J t))`.
    pub c: f64,
    pub p_ceiling: f64,
    pub vacuous: bool,
}

/// Largest `||[H_k, sum Z]||` over the slices.
pub fn total_z_violation(h: &PiecewiseHamiltonian) -> Result<f64> {
    let layout = h.layout();
    if layout.dims().iter().any(|&d| d != 2) {
        return Err(Error::InvalidArgument("spin-flip experiment needs qubit vertices"));
    }
    let n = layout.total();
    let total_z = CMatrix::from_fn(n, n, |i, j| {
        if i != j {
            return linalg::ZERO;
        }
        let ups = (0..layout.dims().len()).filter(|&v| layout.digit(i, v) == 0).count() as f64;
        Complex64::new(2.0 * ups - layout.dims().len() as f64, 0.0)
    });
    let mut worst = 0.0f64;
    for k in 0..h.slices().len() {
        let hk = h.slice_matrix(k)?;
        worst = worst.max(linalg::commutator(&hk, &total_z).norm());
    }
    Ok(worst)
}

/// Starts from the first spin up and the rest down (`|0> = up`) and measures
/// the probability of the last spin being up at time `t`.
pub fn spin_flip_experiment(h: &PiecewiseHamiltonian, t: f64) -> Result<SpinFlipOutcome> {
    let deviation = total_z_violation(h)?;
    if deviation > SYMMETRY_TOL {
        return Err(Error::SymmetryBroken(deviation));
    }
    let length = h.graph().vertex_count();
    if length < 2 {
        return Err(Error::InvalidArgument("need at least two spins"));
    }
    let mut digits = vec![1; length];
    digits[0] = 0;
    let psi0 = StateVector::basis(h.layout().dims(), &digits)?;
    let psi = h.propagator()?.evolve(&psi0, t)?;
    let layout = h.layout();
    let p_measured: f64 = psi
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(i, _)| layout.digit(*i, length - 1) == 0)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    let p_measured = p_measured.clamp(0.0, 1.0);
    let c = c_chain_bessel(h.graph().coupling_cap(), t, length - 1)?.value;
    let ceiling = task::spin_flip_ceiling(c)?;
    Ok(SpinFlipOutcome { length, t, p_measured, c, p_ceiling: ceiling.value, vacuous: ceiling.vacuous })
}

/// Random time-dependent XXZ chains with Z fields, sampled only at times
/// where the coefficient is below 1.
pub fn spinflip_trial(seed: u64, trial: usize, lengths: RangeInclusive<usize>) -> Result<(Instance, SpinFlipOutcome)> {
    let mut rng = trial_rng(seed, trial);
    let length = rng.random_range(lengths);
    let g = SpinGraph::chain(length, 1.0, 1.0)?;
    let r = length - 1;
    let t_edge = lr::first_crossing(|t| c_chain_bessel(1.0, t, r).map(|b| b.value), 1.0, r as f64 / 6.0)?;
    let slices = rng.random_range(1..=4);
    let h = random_excitation_preserving(&g, slices, t_edge, &mut rng)?;
    let t = rng.random_range(0.0..t_edge);
    let out = spin_flip_experiment(&h, t)?;
    let inst = Instance {
        seed,
        trial,
        length,
        x: vec![0],
        y: vec![r],
        t,
        measured: out.p_measured,
        bound: out.p_ceiling,
        margin: out.p_ceiling - out.p_measured,
    };
    Ok((inst, out))
}

pub fn spinflip_suite(trials: usize, lengths: RangeInclusive<usize>, seed: u64) -> Result<SuiteReport> {
    check_trials(trials)?;
    check_lengths(&lengths, 2)?;
    let mut report = SuiteReport::new("spinflip");
    for k in 0..trials {
        report.record(spinflip_trial(seed, k, lengths.clone())?.0, BOUND_SLACK);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::hamiltonian::{xxz_edge, z_field, Slice};
    use crate::sim::pauli::Pauli;
    use approx::assert_relative_eq;

    #[test]
    fn lemma1_small_run() {
        let r = verify_lemma1(60, 8, 7).unwrap();
        assert!(r.passed());
        assert!(r.max_ratio > 0.0 && r.max_ratio <= 1.0 + 1e-9);
        assert!(verify_lemma1(0, 8, 7).is_err());
        assert!(verify_lemma1(1, 65, 7).is_err());
    }

    #[test]
    fn trials_are_replayable() {
        let a = dominance_trial(3, 5, 3..=4, 2.0).unwrap();
        let b = dominance_trial(3, 5, 3..=4, 2.0).unwrap();
        assert_eq!(a, b);
        let c = dominance_trial(3, 6, 3..=4, 2.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn small_suites_pass() {
        assert!(dominance_suite(6, 3..=4, 1).unwrap().passed());
        assert!(transfer_suite(6, 3..=4, 1).unwrap().passed());
        let (c, f) = entangle_suite(6, 3..=4, 1).unwrap();
        assert!(c.passed() && f.passed());
        assert!(spinflip_suite(4, 4..=5, 1).unwrap().passed());
    }

    #[test]
    fn heisenberg_spin_flip() {
        let g = SpinGraph::chain(6, 1.0, 0.0).unwrap();
        let mut s = Slice::new(1.0);
        for v in 0..5 {
            s = s.with_edge(v, v + 1, xxz_edge(1.0, 1.0));
        }
        let h = PiecewiseHamiltonian::new(g, vec![s]).unwrap();
        let at0 = spin_flip_experiment(&h, 0.0).unwrap();
        assert_relative_eq!(at0.p_measured, 0.0, epsilon = 1e-14);
        let out = spin_flip_experiment(&h, 0.2).unwrap();
        assert!(out.p_measured <= out.p_ceiling + BOUND_SLACK);
        assert!(!out.vacuous);
        let late = spin_flip_experiment(&h, 1.0).unwrap();
        assert!(late.vacuous && late.p_ceiling == 1.0);
    }

    #[test]
    fn spin_flip_rejects_broken_symmetry() {
        let g = SpinGraph::chain(2, 1.0, 1.0).unwrap();
        let x = Pauli::X.matrix();
        let h = PiecewiseHamiltonian::new(g, vec![Slice::new(1.0).with_vertex(0, x).with_vertex(1, z_field(0.5))])
            .unwrap();
        assert!(matches!(spin_flip_experiment(&h, 0.5), Err(Error::SymmetryBroken(_))));
    }
}
