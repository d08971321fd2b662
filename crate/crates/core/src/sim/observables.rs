//! Localization, correlators, commutator coefficients and two-qubit
//! entanglement witnesses.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Region;
use crate::linalg::{self, CMatrix, CVector, I};
use crate::sim::hamiltonian::PiecewiseHamiltonian;
use crate::sim::pauli::PauliString;
use crate::sim::state::{embed, partial_trace, DensityMatrix, Layout};

/// `[A]_X`: the average of `U A U^dagger` over Haar unitaries on the
/// complement of `X`, which equals `tr_{X^c}(A) / dim(X^c)` tensored with the
/// identity on `X^c`.
pub fn localize(op: &CMatrix, dims: &[usize], x: &[usize]) -> Result<CMatrix> {
    let layout = Layout::new(dims)?;
    if op.nrows() != layout.total() || op.ncols() != layout.total() {
        return Err(Error::DimensionMismatch { expected: layout.total(), found: op.nrows() });
    }
    if x.is_empty() {
        let tr = linalg::trace(op) / Complex64::new(layout.total() as f64, 0.0);
        return Ok(linalg::identity(layout.total()) * tr);
    }
    let reduced = partial_trace(op, dims, x)?;
    let rest = layout.total() / layout.sub_dim(x);
    embed(&(reduced / Complex64::new(rest as f64, 0.0)), dims, x)
}

/// Re-indexes a Pauli string onto the subsystem `vertices` (ascending).
fn remap(s: &PauliString, vertices: &[usize]) -> PauliString {
    let factors = s
        .factors()
        .iter()
        .map(|&(v, p)| (vertices.binary_search(&v).expect("vertex inside subsystem"), p));
    PauliString::new(factors).expect("distinct vertices")
}

fn union_support(a: &PauliString, b: &PauliString) -> Vec<usize> {
    let mut v = a.support();
    v.extend(b.support());
    v.sort_unstable();
    v
}

/// `tr(rho A B) - tr(rho A) tr(rho B)` for Paulis on disjoint supports.
pub fn connected_correlator(rho: &DensityMatrix, a: &PauliString, b: &PauliString) -> Result<f64> {
    if !a.is_disjoint(b) {
        return Err(Error::RegionsOverlap);
    }
    if a.factors().is_empty() || b.factors().is_empty() {
        return Ok(0.0);
    }
    let support = union_support(a, b);
    let reduced = rho.reduce(&support)?;
    let layout = Layout::new(reduced.dims())?;
    let (la, lb) = (remap(a, &support), remap(b, &support));
    let ab = PauliString::new(la.factors().iter().chain(lb.factors()).copied())?;
    let m = reduced.matrix();
    let value = ab.trace_with(&layout, m)? - la.trace_with(&layout, m)? * lb.trace_with(&layout, m)?;
    Ok(value.re)
}

/// Largest `|<AB>_c|` over non-identity Pauli strings `A` on `X`, `B` on `Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatorMax {
    pub value: f64,
    pub a: PauliString,
    pub b: PauliString,
}

pub fn max_pauli_correlator(rho: &DensityMatrix, x: &Region, y: &Region) -> Result<CorrelatorMax> {
    if !x.is_disjoint(y) {
        return Err(Error::RegionsOverlap);
    }
    let support: Vec<usize> = x.union(y).vertices().to_vec();
    let reduced = rho.reduce(&support)?;
    let layout = Layout::new(reduced.dims())?;
    let m = reduced.matrix();
    let xs = PauliString::all_on(x);
    let ys = PauliString::all_on(y);
    let ex = xs.iter().map(|a| remap(a, &support).trace_with(&layout, m)).collect::<Result<Vec<_>>>()?;
    let ey = ys.iter().map(|b| remap(b, &support).trace_with(&layout, m)).collect::<Result<Vec<_>>>()?;
    let mut best = CorrelatorMax { value: -1.0, a: PauliString::identity(), b: PauliString::identity() };
    for (a, ea) in xs.iter().zip(&ex) {
        for (b, eb) in ys.iter().zip(&ey) {
            let ab = PauliString::new(a.factors().iter().chain(b.factors()).copied())?;
            let value = (remap(&ab, &support).trace_with(&layout, m)? - ea * eb).re.abs();
            if value > best.value {
                best = CorrelatorMax { value, a: a.clone(), b: b.clone() };
            }
        }
    }
    Ok(best)
}

/// Largest `||[U^dagger A U, B]||` over non-identity Pauli strings `A` on `X`
/// and `B` on `Y`. The commutator of two Hermitian operators is
/// anti-Hermitian, so its operator norm is the largest `|eigenvalue|` of
/// `i [.,.]`. This is a lower bound on the supremum over all unit-norm
/// operators.
pub fn commutator_coefficient_from_unitary(u: &CMatrix, layout: &Layout, x: &Region, y: &Region) -> Result<f64> {
    if !x.is_disjoint(y) {
        return Err(Error::RegionsOverlap);
    }
    if u.nrows() != layout.total() {
        return Err(Error::DimensionMismatch { expected: layout.total(), found: u.nrows() });
    }
    let ys = PauliString::all_on(y);
    let mut best = 0.0f64;
    for a in PauliString::all_on(x) {
        let evolved = u.ad_mul(&a.left_mul(layout, u)?);
        for b in &ys {
            let c = b.right_mul(layout, &evolved)? - b.left_mul(layout, &evolved)?;
            best = best.max(linalg::hermitian_norm(&(c * I)));
        }
    }
    Ok(best)
}

/// Empirical commutator coefficient of the evolution up to time `t`.
pub fn empirical_commutator_coefficient(h: &PiecewiseHamiltonian, x: &Region, y: &Region, t: f64) -> Result<f64> {
    let u = h.propagator()?.unitary(t)?;
    commutator_coefficient_from_unitary(&u, h.layout(), x, y)
}

/// `Phi+, Phi-, Psi+, Psi-` in the `|q0 q1>` basis.
pub fn bell_states() -> [CVector; 4] {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let v = |a: [f64; 4]| CVector::from_iterator(4, a.iter().map(|&c| s * c));
    [v([1.0, 0.0, 0.0, 1.0]), v([1.0, 0.0, 0.0, -1.0]), v([0.0, 1.0, 1.0, 0.0]), v([0.0, 1.0, -1.0, 0.0])]
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::InvalidArgument("expected a two-qubit state"));
    }
    Ok(())
}

/// Root fidelity of a two-qubit state with each Bell state.
pub fn bell_fidelities(rho: &DensityMatrix) -> Result<[f64; 4]> {
    check_two_qubit(rho)?;
    let m = rho.matrix();
    Ok(bell_states().map(|phi| phi.dotc(&(m * &phi)).re.max(0.0).sqrt()))
}

/// `max <Psi| rho |Psi>` over all maximally entangled two-qubit `Psi`.
///
/// In the magic basis every maximally entangled state is a real unit vector
/// up to a global phase, so the maximum is the top eigenvalue of the real
/// part of `rho` written in that basis.
pub fn fully_entangled_fraction(rho: &DensityMatrix) -> Result<f64> {
    check_two_qubit(rho)?;
    let [phi_p, phi_m, psi_p, psi_m] = bell_states();
    let magic = CMatrix::from_columns(&[phi_p, phi_m * I, psi_p * I, psi_m]);
    let r = magic.ad_mul(&(rho.matrix() * &magic));
    let re = r.map(|z| Complex64::new(z.re, 0.0));
    Ok(*linalg::eigvalsh(&re).last().expect("4x4"))
}

/// Root fidelity with the closest maximally entangled two-qubit state.
pub fn max_entangled_fidelity(rho: &DensityMatrix) -> Result<f64> {
    Ok(fully_entangled_fraction(rho)?.max(0.0).sqrt())
}

/// Fidelity between the reduced states on `y` of `U psi` and `U A psi`.
pub fn transfer_fidelity(u: &CMatrix, layout: &Layout, psi: &CVector, a: &CMatrix, y: &[usize]) -> Result<f64> {
    if psi.len() != layout.total() || a.nrows() != layout.total() {
        return Err(Error::DimensionMismatch { expected: layout.total(), found: psi.len() });
    }
    let plain = u * psi;
    let kicked = u * (a * psi);
    let reduce = |v: &CVector| -> Result<DensityMatrix> {
        let m = v * v.adjoint();
        DensityMatrix::new(
            &y.iter().map(|&k| layout.dims()[k]).collect::<Vec<_>>(),
            linalg::hermitian_part(&partial_trace(&m, layout.dims(), y)?),
        )
    };
    crate::sim::state::fidelity(&reduce(&plain)?, &reduce(&kicked)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SpinGraph;
    use crate::sim::hamiltonian::{random_piecewise, xxz_edge, Slice};
    use crate::sim::pauli::Pauli;
    use crate::sim::state::StateVector;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn localize_examples() {
        let dims = [2, 2];
        let x1 = embed(&Pauli::X.matrix(), &dims, &[0]).unwrap();
        assert!((localize(&x1, &dims, &[0]).unwrap() - &x1).norm() < 1e-14);
        assert!(localize(&x1, &dims, &[1]).unwrap().norm() < 1e-14);
        let id = linalg::identity(4);
        assert!((localize(&id, &dims, &[1]).unwrap() - &id).norm() < 1e-14);
    }

    #[test]
    fn localize_contracts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let dims = [2, 2, 2];
        let a = linalg::ginibre(8, &mut rng);
        let la = localize(&a, &dims, &[0, 2]).unwrap();
        assert!(linalg::operator_norm(&la) <= linalg::operator_norm(&a) + 1e-12);
        assert!((localize(&la, &dims, &[0, 2]).unwrap() - &la).norm() < 1e-12);
        let b = embed(&linalg::ginibre(2, &mut rng), &dims, &[1]).unwrap();
        assert!(linalg::commutator(&la, &b).norm() < 1e-12);
    }

    #[test]
    fn correlator_examples() {
        let bell = StateVector::new(&[2, 2], bell_states()[0].clone()).unwrap().to_density();
        let (x0, x1) = (PauliString::single(0, Pauli::X), PauliString::single(1, Pauli::X));
        assert_relative_eq!(connected_correlator(&bell, &x0, &x1).unwrap(), 1.0, epsilon = 1e-14);
        assert!(connected_correlator(&bell, &x0, &PauliString::single(0, Pauli::Z)).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let factors: Vec<CVector> = (0..3).map(|_| linalg::random_state(2, &mut rng)).collect();
        let prod = StateVector::product(&factors).unwrap().to_density();
        let g = SpinGraph::chain(3, 1.0, 0.0).unwrap();
        let x = Region::single(&g, 0).unwrap();
        let y = Region::new(&g, [1, 2]).unwrap();
        assert!(max_pauli_correlator(&prod, &x, &y).unwrap().value < 1e-14);
    }

    #[test]
    fn commutator_coefficient_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let g = SpinGraph::chain(3, 1.0, 1.0).unwrap();
        let h = random_piecewise(&g, 2, 1.0, &mut rng).unwrap();
        let x = Region::single(&g, 0).unwrap();
        let y = Region::single(&g, 2).unwrap();
        assert!(empirical_commutator_coefficient(&h, &x, &y, 0.0).unwrap() < 1e-14);
        let c = empirical_commutator_coefficient(&h, &x, &y, 1.0).unwrap();
        assert!(c > 0.0 && c <= 2.0 + 1e-12);
    }

    #[test]
    fn heisenberg_pair_stays_below_series() {
        let g = SpinGraph::chain(2, 1.0, 0.0).unwrap();
        let h = PiecewiseHamiltonian::new(g.clone(), alloc::vec![Slice::new(1.0).with_edge(0, 1, xxz_edge(1.0, 1.0))])
            .unwrap();
        let (x, y) = (Region::single(&g, 0).unwrap(), Region::single(&g, 1).unwrap());
        for &t in &[0.05, 0.1, 0.2] {
            let measured = empirical_commutator_coefficient(&h, &x, &y, t).unwrap();
            let bound = crate::lr::c_series(&g, &x, &y, t, 1e-14, 400).unwrap().value;
            assert!(measured <= bound.min(2.0) + 1e-8, "{measured} > {bound}");
        }
    }

    #[test]
    fn entangled_fraction_examples() {
        let bell = StateVector::new(&[2, 2], bell_states()[3].clone()).unwrap().to_density();
        assert_relative_eq!(fully_entangled_fraction(&bell).unwrap(), 1.0, epsilon = 1e-12);
        let zero = StateVector::basis(&[2, 2], &[0, 0]).unwrap().to_density();
        assert_relative_eq!(fully_entangled_fraction(&zero).unwrap(), 0.5, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(&[2, 2]).unwrap();
        assert_relative_eq!(fully_entangled_fraction(&mixed).unwrap(), 0.25, epsilon = 1e-12);
        assert_relative_eq!(bell_fidelities(&bell).unwrap()[3], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn entangled_fraction_dominates_local_rotations() {
        // Every maximally entangled state is (U x 1) Phi+.
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let rho = DensityMatrix::new(&[2, 2], linalg::random_density(4, &mut rng)).unwrap();
        let fef = fully_entangled_fraction(&rho).unwrap();
        let mut best = 0.0f64;
        for _ in 0..4000 {
            let u = linalg::random_unitary(2, &mut rng).kronecker(&linalg::identity(2));
            let phi = u * &bell_states()[0];
            let v = phi.dotc(&(rho.matrix() * &phi)).re;
            assert!(v <= fef + 1e-12);
            best = best.max(v);
        }
        assert!(fef - best < 5e-3);
    }

    #[test]
    fn transfer_fidelity_of_identity_kick_is_one() {
        let layout = Layout::new(&[2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let psi = linalg::random_state(4, &mut rng);
        let u = linalg::random_unitary(4, &mut rng);
        let f = transfer_fidelity(&u, &layout, &psi, &linalg::identity(4), &[1]).unwrap();
        assert_relative_eq!(f, 1.0, epsilon = 1e-10);
    }
}
