//! Task-level guarantees derived from a commutator coefficient.


use crate::error::{Error, Result};
use crate::lr::{first_crossing, BoundModel, COEFFICIENT_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum TaskKind {
    TransferFidelityFloor,
    SpinFlipCeiling,
    EntangledFidelityCeiling,
    CorrelatorCeiling,
}

/// A task bound; `vacuous` marks the trivial value returned when the
/// underlying inequality carries no information.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TaskBound {
    pub kind: TaskKind,
    pub value: f64,
    pub vacuous: bool,
}

fn non_negative(v: f64, what: &'static str) -> Result<()> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(Error::InvalidArgument(what));
    }
    Ok(())
}

/// Floor on the fidelity between the receiver's reduced states with and
/// without a sender operation of norm `norm_a`: `max(0, 1 - c ||A||)`.
pub fn transfer_fidelity_floor(c: f64, norm_a: f64) -> Result<TaskBound> {
    non_negative(c, "c must be non-negative")?;
    non_negative(norm_a, "norm of A must be non-negative")?;
    let raw = 1.0 - c * norm_a;
    Ok(TaskBound {
        kind: TaskKind::TransferFidelityFloor,
        value: raw.max(0.0),
        vacuous: raw <= 0.0,
    })
}

/// Ceiling `c (2 - c)` on the probability that an excitation injected at one
/// end of a number-conserving chain is found at the other end.
///
/// For `c > 1` the squaring step behind the ceiling is invalid and the
/// trivial value 1 is returned, flagged vacuous.
pub fn spin_flip_ceiling(c: f64) -> Result<TaskBound> {
    non_negative(c, "c must be non-negative")?;
    let (value, vacuous) = if c <= 1.0 { (c * (2.0 - c), c >= 1.0) } else { (1.0, true) };
    Ok(TaskBound { kind: TaskKind::SpinFlipCeiling, value, vacuous })
}

/// Largest correlation amplitude for which [`entangled_fidelity_ceiling`] is claimed.
pub const ENTANGLEMENT_HYPOTHESIS_MAX: f64 = 2.0 / 3.0;

/// Ceiling `sqrt(79/81 + 2f/27 - f^2/18)` on the fidelity of a weakly
/// correlated bipartite state with any maximally entangled state.
pub fn entangled_fidelity_ceiling(f: f64) -> Result<TaskBound> {
    non_negative(f, "f must be non-negative")?;
    if f > ENTANGLEMENT_HYPOTHESIS_MAX + 1e-15 {
        return Err(Error::OutOfHypothesis("correlation bound f must not exceed 2/3"));
    }
    let value = (79.0 / 81.0 + 2.0 * f / 27.0 - f * f / 18.0).sqrt().min(1.0);
    Ok(TaskBound { kind: TaskKind::EntangledFidelityCeiling, value, vacuous: value >= 1.0 })
}

/// Ceiling `f0 + 2 [(c_x_zbar + 1)(c_z_y + 1) - 1]` on connected correlators
/// after evolution, clamped at 2.
pub fn correlator_ceiling(f0: f64, c_x_zbar: f64, c_z_y: f64) -> Result<TaskBound> {
    non_negative(f0, "f0 must be non-negative")?;
    non_negative(c_x_zbar, "c(X, Zbar) must be non-negative")?;
    non_negative(c_z_y, "c(Z, Y) must be non-negative")?;
    let raw = f0 + 2.0 * ((c_x_zbar + 1.0) * (c_z_y + 1.0) - 1.0);
    Ok(TaskBound {
        kind: TaskKind::CorrelatorCeiling,
        value: raw.min(COEFFICIENT_CAP),
        vacuous: raw >= COEFFICIENT_CAP,
    })
}

/// Correlator ceiling between regions at separation `r` with the cut placed
/// at the midpoint; odd separations use the shorter half for both factors.
pub fn midpoint_correlator_ceiling(model: &BoundModel, r: usize, t: f64, f0: f64) -> Result<TaskBound> {
    if r < 2 {
        return Err(Error::InvalidArgument("separation must be at least 2 to place a cut"));
    }
    let half = r / 2;
    let g = model.value(half, t)?;
    correlator_ceiling(f0, g, g)
}

/// Time at which the midpoint correlator ceiling first reaches `threshold`.
pub fn entanglement_light_cone(model: &BoundModel, r: usize, f0: f64, threshold: f64) -> Result<f64> {
    if !(threshold > f0 && threshold < COEFFICIENT_CAP) {
        return Err(Error::InvalidArgument("threshold must lie in (f0, 2)"));
    }
    let j = model.coupling();
    if !(j > 0.0) {
        return Err(Error::NoCrossing { threshold });
    }
    first_crossing(
        |t| midpoint_correlator_ceiling(model, r, t, f0).map(|b| b.value),
        threshold,
        r as f64 / (2.0 * j),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lr::{fit_slope, light_cone_time};
    use alloc::vec::Vec;
    use approx::assert_relative_eq;

    #[test]
    fn transfer_examples() {
        assert_eq!(transfer_fidelity_floor(0.0, 1.0).unwrap().value, 1.0);
        assert_relative_eq!(transfer_fidelity_floor(0.1, 1.0).unwrap().value, 0.9);
        let b = transfer_fidelity_floor(2.0, 1.0).unwrap();
        assert_eq!(b.value, 0.0);
        assert!(b.vacuous);
        assert!(transfer_fidelity_floor(-0.1, 1.0).is_err());
    }

    #[test]
    fn spin_flip_examples() {
        assert_eq!(spin_flip_ceiling(0.0).unwrap().value, 0.0);
        assert_eq!(spin_flip_ceiling(1.0).unwrap().value, 1.0);
        assert_relative_eq!(spin_flip_ceiling(0.1).unwrap().value, 0.19);
        let b = spin_flip_ceiling(1.5).unwrap();
        assert_eq!((b.value, b.vacuous), (1.0, true));
        for k in 0..=100 {
            let c = k as f64 / 100.0;
            let floor = transfer_fidelity_floor(c, 1.0).unwrap().value;
            assert_relative_eq!(spin_flip_ceiling(c).unwrap().value, 1.0 - floor * floor, epsilon = 1e-15);
        }
    }

    #[test]
    fn entangled_examples() {
        assert_relative_eq!(entangled_fidelity_ceiling(0.0).unwrap().value, (79.0f64 / 81.0).sqrt());
        assert_relative_eq!(entangled_fidelity_ceiling(0.0).unwrap().value, 0.987_577_157, epsilon = 1e-9);
        assert_relative_eq!(entangled_fidelity_ceiling(2.0 / 3.0).unwrap().value, 1.0, epsilon = 1e-15);
        assert_relative_eq!(
            entangled_fidelity_ceiling(0.3).unwrap().value,
            0.996_258_432,
            epsilon = 1e-9
        );
        assert!(matches!(entangled_fidelity_ceiling(0.7), Err(Error::OutOfHypothesis(_))));
        let mut last = 0.0;
        for k in 0..66 {
            let v = entangled_fidelity_ceiling(k as f64 / 100.0).unwrap().value;
            assert!(v >= last && v < 1.0);
            last = v;
        }
    }

    #[test]
    fn correlator_examples() {
        assert_relative_eq!(correlator_ceiling(0.05, 0.0, 0.0).unwrap().value, 0.05);
        assert_relative_eq!(correlator_ceiling(0.0, 0.1, 0.1).unwrap().value, 0.42, epsilon = 1e-14);
        let b = correlator_ceiling(0.0, 2.0, 2.0).unwrap();
        assert_eq!((b.value, b.vacuous), (2.0, true));
    }

    #[test]
    fn entanglement_cone_is_twice_as_fast() {
        let model = BoundModel::ChainBessel { j: 1.0 };
        assert_eq!(midpoint_correlator_ceiling(&model, 20, 0.0, 0.03).unwrap().value, 0.03);
        let rs: Vec<usize> = (20..=60).collect();
        let te: Vec<f64> = rs.iter().map(|&r| entanglement_light_cone(&model, r, 0.0, 0.5).unwrap()).collect();
        let tt: Vec<f64> = rs.iter().map(|&r| light_cone_time(&model, r, 0.5).unwrap()).collect();
        let rf: Vec<f64> = rs.iter().map(|&r| r as f64).collect();
        let ve = fit_slope(&te, &rf).unwrap();
        let vt = fit_slope(&tt, &rf).unwrap();
        assert!((ve - 12.0).abs() < 0.15 * 12.0, "{ve}");
        assert!((ve / vt - 2.0).abs() < 0.1, "{}", ve / vt);
    }
}
