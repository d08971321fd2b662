//! Spectral-spread speed limits: overlap floors, orthogonalization times and
//! the classical, quantum and entangling transfer times.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::sim::checks::trial_rng;
use crate::sim::observables::max_entangled_fidelity;
use crate::sim::pauli::{Pauli, PauliString};
use crate::sim::state::{Layout, StateVector, MAX_DIM};

pub use crate::sim::state::bures_angle;

/// Slack on the overlap-floor comparison.
pub const OVERLAP_SLACK: f64 = 1e-10;
/// Values closer than this are ties in the grid search.
pub const TIE_TOL: f64 = 1e-13;
/// Largest spectrum the simplex grid search accepts.
pub const MAX_BRUTE_LEVELS: usize = 5;

/// Sorted energies and their spread.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    energies: Vec<f64>,
    delta_max: f64,
}

impl Spectrum {
    pub fn new(mut energies: Vec<f64>) -> Result<Self> {
        if energies.is_empty() || energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidArgument("energies must be finite and non-empty"));
        }
        energies.sort_by(f64::total_cmp);
        let delta_max = energies[energies.len() - 1] - energies[0];
        Ok(Self { energies, delta_max })
    }

    /// Exact spectrum of a Hermitian matrix.
    pub fn of(h: &CMatrix) -> Result<Self> {
        check_operator(h)?;
        Self::new(linalg::eigvalsh(h))
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn delta_max(&self) -> f64 {
        self.delta_max
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    fn check_hypothesis(&self, t: f64) -> Result<()> {
        if !(t >= 0.0) {
            return Err(Error::InvalidArgument("t must be non-negative"));
        }
        if self.delta_max * t > PI * (1.0 + 1e-12) {
            return Err(Error::OutOfHypothesis("spectral spread times t exceeds pi"));
        }
        Ok(())
    }
}

fn check_operator(h: &CMatrix) -> Result<()> {
    if h.nrows() > MAX_DIM {
        return Err(Error::DimensionTooLarge(h.nrows()));
    }
    linalg::check_hermitian(h)
}

/// `E_max - E_min` of a Hermitian matrix.
pub fn delta_max(h: &CMatrix) -> Result<f64> {
    Ok(Spectrum::of(h)?.delta_max())
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpeedLimitTimes {
    /// Fastest time for two conditional states of the receiver to become
    /// orthogonal.
    pub t_classical: f64,
    /// Orthogonalization time of the receiver's own state.
    pub t_quantum: f64,
    /// Fastest time to reach a maximally entangled state from a product one.
    pub t_entangle: f64,
    pub local_dim: usize,
}

pub fn speed_limit_times(delta: f64, d: usize) -> Result<SpeedLimitTimes> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument("spectral spread must be positive"));
    }
    if d < 2 {
        return Err(Error::InvalidArgument("local dimension must be at least 2"));
    }
    let t_classical = PI / (2.0 * delta);
    Ok(SpeedLimitTimes {
        t_classical,
        t_quantum: 2.0 * t_classical,
        t_entangle: 2.0 / delta * (1.0 / (d as f64).sqrt()).acos(),
        local_dim: d,
    })
}

/// `cos^2(Delta t / 2)`, the least survival probability reachable in time
/// `t`. Requires `Delta t <= pi`.
pub fn overlap_floor(spectrum: &Spectrum, t: f64) -> Result<f64> {
    spectrum.check_hypothesis(t)?;
    Ok((spectrum.delta_max * t / 2.0).cos().powi(2))
}

/// `|sum_k r_k exp(-i E_k t)|^2` for populations `r` over `energies`.
pub fn survival_probability(energies: &[f64], weights: &[f64], t: f64) -> f64 {
    let amp: Complex64 = energies.iter().zip(weights).map(|(&e, &r)| Complex64::from_polar(r, -e * t)).sum();
    amp.norm_sqr()
}

/// `r^T M r` with `M_ij = cos((E_i - E_j) t)`.
pub fn quadratic_form(energies: &[f64], weights: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for (i, (&ei, &ri)) in energies.iter().zip(weights).enumerate() {
        for (&ej, &rj) in energies[..i].iter().zip(weights) {
            acc += 2.0 * ri * rj * ((ei - ej) * t).cos();
        }
        acc += ri * ri;
    }
    acc
}

/// Default grid resolution: 100 steps for up to three levels, 25 beyond.
pub fn default_resolution(levels: usize) -> usize {
    if levels <= 3 {
        100
    } else {
        25
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SimplexMinimum {
    pub weights: Vec<f64>,
    pub value: f64,
}

/// Grid search over the probability simplex with steps of
/// `1 / resolution`. Values within [`TIE_TOL`] of each other count as ties,
/// which go to the lexicographically smallest grid point.
pub fn min_quadratic_form_brute(spectrum: &Spectrum, t: f64, resolution: Option<usize>) -> Result<SimplexMinimum> {
    spectrum.check_hypothesis(t)?;
    let n = spectrum.len();
    if n > MAX_BRUTE_LEVELS {
        return Err(Error::SimplexTooLarge(n));
    }
    let res = resolution.unwrap_or_else(|| default_resolution(n));
    if res == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive"));
    }
    let e = spectrum.energies();
    let mut counts = vec![0usize; n];
    let mut best: Option<SimplexMinimum> = None;
    // Lexicographic enumeration of compositions of `res` into `n` parts.
    fn visit(
        k: usize,
        left: usize,
        counts: &mut Vec<usize>,
        res: usize,
        e: &[f64],
        t: f64,
        best: &mut Option<SimplexMinimum>,
    ) {
        let n = counts.len();
        if k == n - 1 {
            counts[k] = left;
            let w: Vec<f64> = counts.iter().map(|&c| c as f64 / res as f64).collect();
            let value = quadratic_form(e, &w, t);
            if best.as_ref().is_none_or(|b| value < b.value - TIE_TOL) {
                *best = Some(SimplexMinimum { weights: w, value });
            }
            return;
        }
        for c in 0..=left {
            counts[k] = c;
            visit(k + 1, left - c, counts, res, e, t, best);
        }
    }
    visit(0, res, &mut counts, res, e, t, &mut best);
    Ok(best.expect("grid is non-empty"))
}

/// Value of the quadratic form with half the mass on each extreme level.
pub fn endpoint_mass_value(spectrum: &Spectrum, t: f64) -> f64 {
    let n = spectrum.len();
    if n == 1 {
        return 1.0;
    }
    let mut w = vec![0.0; n];
    w[0] = 0.5;
    w[n - 1] = 0.5;
    quadratic_form(spectrum.energies(), &w, t)
}

/// Minimum of a unimodal `f` on `[a, b]` by golden-section search.
pub fn golden_section_min<F: FnMut(f64) -> f64>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AchievabilityReport {
    pub delta_max: f64,
    pub limits: SpeedLimitTimes,
    /// First time the receiver's conditional states are orthogonal.
    pub t_orthogonal: f64,
    /// First time a maximally entangled state is reached from `|++>`.
    pub t_entangled: f64,
    pub entangled_fidelity_at_limit: f64,
    pub conditional_overlap_at_limit: f64,
    /// Bures angle between the conditional states at half the classical time.
    pub bures_angle_early: f64,
    pub passed: bool,
}

/// Tolerance on the measured achievability times.
pub const ACHIEVABILITY_TOL: f64 = 1e-6;

/// Two qubits under `H = Z_1 Z_2`: from `|0+>` with `A = X_1`, `B = 1` the
/// receiver's conditional states become orthogonal at the classical limit,
/// and from `|++>` a maximally entangled state appears at the entangling
/// limit.
pub fn two_qubit_achievability_demo() -> Result<AchievabilityReport> {
    let layout = Layout::new(&[2, 2])?;
    let h = PauliString::new([(0, Pauli::Z), (1, Pauli::Z)])?.full_matrix(&layout)?;
    let eig = linalg::eigh(&h);
    let delta = delta_max(&h)?;
    let limits = speed_limit_times(delta, 2)?;

    let s = FRAC_1_SQRT_2;
    let plus = CVector::from_vec(vec![Complex64::new(s, 0.0), Complex64::new(s, 0.0)]);
    let zero = CVector::from_vec(vec![linalg::ONE, linalg::ZERO]);
    let psi_b = StateVector::product(&[zero, plus.clone()])?;
    let x1 = PauliString::single(0, Pauli::X).full_matrix(&layout)?;
    let psi_a = StateVector::new(&[2, 2], &x1 * psi_b.amplitudes())?;
    let conditional = |t: f64| -> Result<_> {
        let a = psi_a.with_amplitudes(eig.apply_propagator(t, psi_a.amplitudes())).reduce(&[1])?;
        let b = psi_b.with_amplitudes(eig.apply_propagator(t, psi_b.amplitudes())).reduce(&[1])?;
        Ok((a, b))
    };
    // Both conditional states are pure, so tr(rho sigma) is the squared
    // fidelity and is smooth at its zero.
    let overlap = |t: f64| {
        let (a, b) = conditional(t).expect("valid states");
        linalg::trace(&(a.matrix() * b.matrix())).re
    };
    let t_orthogonal = golden_section_min(overlap, 0.0, FRAC_PI_2, 1e-10);

    let pp = StateVector::product(&[plus.clone(), plus])?;
    let fef = |t: f64| {
        let psi = pp.with_amplitudes(eig.apply_propagator(t, pp.amplitudes()));
        -max_entangled_fidelity(&psi.reduce(&[0, 1]).expect("valid state")).expect("two qubits")
    };
    let t_entangled = golden_section_min(fef, 0.0, FRAC_PI_2, 1e-10);

    let (a, b) = conditional(limits.t_classical / 2.0)?;
    let bures_angle_early = bures_angle(&a, &b)?;
    let entangled_fidelity_at_limit = -fef(limits.t_entangle);
    let conditional_overlap_at_limit = overlap(limits.t_classical);
    let passed = (t_orthogonal - limits.t_classical).abs() < ACHIEVABILITY_TOL
        && (t_entangled - limits.t_entangle).abs() < ACHIEVABILITY_TOL
        && bures_angle_early < FRAC_PI_2;
    Ok(AchievabilityReport {
        delta_max: delta,
        limits,
        t_orthogonal,
        t_entangled,
        entangled_fidelity_at_limit,
        conditional_overlap_at_limit,
        bures_angle_early,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct QslReport {
    pub overlap_trials: usize,
    pub overlap_violations: usize,
    /// Smallest `survival - floor` seen.
    pub overlap_min_margin: f64,
    pub simplex_trials: usize,
    pub simplex_violations: usize,
    /// Largest `grid minimum - endpoint value` seen; the endpoint point lies
    /// off odd-resolution grids, so this is at most `1 / resolution^2`.
    pub simplex_max_gap: f64,
    pub demo: AchievabilityReport,
    pub ratio_exact: bool,
}

impl QslReport {
    pub fn passed(&self) -> bool {
        self.overlap_violations == 0 && self.simplex_violations == 0 && self.demo.passed && self.ratio_exact
    }
}

/// Rounding slack between the grid minimum and the endpoint-mass value.
pub const SIMPLEX_SLACK: f64 = 1e-12;

/// Largest amount the grid minimum may exceed the true minimum: moving the
/// endpoint point to the nearest grid point changes the form by at most
/// `1 / resolution^2`.
pub fn grid_slack(resolution: usize) -> f64 {
    1.0 / (resolution * resolution) as f64 + SIMPLEX_SLACK
}

fn random_spectrum<R: Rng + ?Sized>(levels: usize, rng: &mut R) -> Result<(Spectrum, f64)> {
    let spread = rng.random_range(0.1..5.0);
    let mut e: Vec<f64> = (0..levels).map(|_| rng.random_range(0.0..spread)).collect();
    e[0] = 0.0;
    e[levels - 1] = spread;
    let spectrum = Spectrum::new(e)?;
    let t = PI * rng.random_range(0.0..=1.0) / spread;
    Ok((spectrum, t))
}

/// Overlap floor on random spectra with up to six levels and random
/// populations, and the grid oracle on spectra with up to `max_brute` levels.
pub fn qsl_suite(trials: usize, max_brute: usize, seed: u64) -> Result<QslReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required"));
    }
    let mut overlap_violations = 0;
    let mut overlap_min_margin = f64::INFINITY;
    for k in 0..trials {
        let mut rng = trial_rng(seed, k);
        let levels = rng.random_range(2..=6);
        let (spectrum, t) = random_spectrum(levels, &mut rng)?;
        let psi = linalg::random_state(levels, &mut rng);
        let weights: Vec<f64> = psi.iter().map(|c| c.norm_sqr()).collect();
        let margin = survival_probability(spectrum.energies(), &weights, t) - overlap_floor(&spectrum, t)?;
        overlap_min_margin = overlap_min_margin.min(margin);
        if margin < -OVERLAP_SLACK {
            overlap_violations += 1;
        }
    }
    let mut simplex_trials = 0;
    let mut simplex_violations = 0;
    let mut simplex_max_gap = 0.0f64;
    for levels in 2..=max_brute.min(MAX_BRUTE_LEVELS) {
        for k in 0..8 {
            let mut rng = trial_rng(seed ^ 0x5151, levels * 100 + k);
            let (spectrum, t) = random_spectrum(levels, &mut rng)?;
            let grid = min_quadratic_form_brute(&spectrum, t, None)?;
            let endpoint = endpoint_mass_value(&spectrum, t);
            let gap = grid.value - endpoint;
            simplex_trials += 1;
            simplex_max_gap = simplex_max_gap.max(gap);
            if gap < -SIMPLEX_SLACK || gap > grid_slack(default_resolution(levels)) {
                simplex_violations += 1;
            }
        }
    }
    let demo = two_qubit_achievability_demo()?;
    let ratio_exact = [0.3, 1.0, 2.0, 7.5].iter().all(|&d| {
        let s = speed_limit_times(d, 3).expect("positive spread");
        s.t_quantum == 2.0 * s.t_classical
    });
    Ok(QslReport {
        overlap_trials: trials,
        overlap_violations,
        overlap_min_margin,
        simplex_trials,
        simplex_violations,
        simplex_max_gap,
        demo,
        ratio_exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::state::DensityMatrix;
    use approx::assert_relative_eq;
    use core::f64::consts::{FRAC_PI_3, FRAC_PI_4};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delta_examples() {
        let layout = Layout::new(&[2, 2]).unwrap();
        let zz = PauliString::new([(0, Pauli::Z), (1, Pauli::Z)]).unwrap().full_matrix(&layout).unwrap();
        assert_relative_eq!(delta_max(&zz).unwrap(), 2.0, epsilon = 1e-14);
        assert_eq!(delta_max(&CMatrix::zeros(3, 3)).unwrap(), 0.0);
        assert_relative_eq!(delta_max(&linalg::identity(4)).unwrap(), 0.0, epsilon = 1e-14);
        let mut bad = linalg::identity(2);
        bad[(0, 1)] = linalg::ONE;
        assert!(delta_max(&bad).is_err());
    }

    #[test]
    fn closed_form_times() {
        let s = speed_limit_times(2.0, 2).unwrap();
        assert_relative_eq!(s.t_classical, FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(s.t_quantum, FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(s.t_entangle, FRAC_PI_4, epsilon = 1e-15);
        assert_relative_eq!(speed_limit_times(2.0, 4).unwrap().t_entangle, FRAC_PI_3, epsilon = 1e-15);
        for d in 2..6 {
            let s = speed_limit_times(1.3, d).unwrap();
            assert_eq!(s.t_quantum, 2.0 * s.t_classical);
            assert!(s.t_classical <= s.t_entangle + 1e-15 && s.t_entangle < s.t_quantum);
        }
        assert!(speed_limit_times(0.0, 2).is_err());
    }

    #[test]
    fn floor_examples() {
        let s = Spectrum::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(overlap_floor(&s, 0.0).unwrap(), 1.0);
        assert_relative_eq!(overlap_floor(&s, FRAC_PI_2).unwrap(), 0.0, epsilon = 1e-15);
        assert_relative_eq!(overlap_floor(&s, FRAC_PI_4).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(overlap_floor(&s, 2.0), Err(Error::OutOfHypothesis(_))));
    }

    #[test]
    fn brute_examples() {
        let two = Spectrum::new(vec![0.0, PI]).unwrap();
        let m = min_quadratic_form_brute(&two, 1.0, None).unwrap();
        assert_relative_eq!(m.weights[0], 0.5);
        assert_relative_eq!(m.value, 0.0, epsilon = 1e-15);

        let three = Spectrum::new(vec![0.0, 0.5 * PI, PI]).unwrap();
        let m = min_quadratic_form_brute(&three, 1.0, None).unwrap();
        assert_eq!(m.weights, vec![0.5, 0.0, 0.5]);

        let at_zero = min_quadratic_form_brute(&three, 0.0, Some(10)).unwrap();
        assert_relative_eq!(at_zero.value, 1.0, epsilon = 1e-14);
        assert_eq!(at_zero.weights, vec![0.0, 0.0, 1.0]);

        let six = Spectrum::new(vec![0.0; 6]).unwrap();
        assert!(matches!(min_quadratic_form_brute(&six, 0.1, None), Err(Error::SimplexTooLarge(6))));
    }

    #[test]
    fn demo_hits_limits() {
        let r = two_qubit_achievability_demo().unwrap();
        assert!(r.passed, "{r:?}");
        assert!((r.t_orthogonal - FRAC_PI_4).abs() < 1e-6);
        assert!((r.t_entangled - FRAC_PI_4).abs() < 1e-6);
        assert_relative_eq!(r.entangled_fidelity_at_limit, 1.0, epsilon = 1e-12);
        assert!(r.bures_angle_early < FRAC_PI_2);
    }

    #[test]
    fn bures_angle_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let s: Vec<DensityMatrix> = (0..3)
                .map(|_| DensityMatrix::new(&[2, 2], linalg::random_density(4, &mut rng)).unwrap())
                .collect();
            let ab = bures_angle(&s[0], &s[1]).unwrap();
            let bc = bures_angle(&s[1], &s[2]).unwrap();
            let ac = bures_angle(&s[0], &s[2]).unwrap();
            assert!(ac <= ab + bc + 1e-10);
            let reduced_ab = bures_angle(&s[0].reduce(&[1]).unwrap(), &s[1].reduce(&[1]).unwrap()).unwrap();
            assert!(reduced_ab <= ab + 1e-10);
        }
    }

    #[test]
    fn small_suite_passes() {
        let r = qsl_suite(50, 4, 3).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
