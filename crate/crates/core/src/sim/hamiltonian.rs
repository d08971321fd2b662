//! Piecewise-constant local Hamiltonians and their exact propagators.

use alloc::vec::Vec;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::SpinGraph;
use crate::linalg::{self, CMatrix, HermitianEigen};
use crate::sim::pauli::Pauli;
use crate::sim::state::{embed, Layout, StateVector, STATE_TOL};

/// Time slice with constant vertex and edge operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub duration: f64,
    /// `(vertex, operator on that vertex)`.
    pub vertex_terms: Vec<(usize, CMatrix)>,
    /// `((u, v), operator on u (x) v)` with factors in the order given.
    pub edge_terms: Vec<((usize, usize), CMatrix)>,
}

impl Slice {
    pub fn new(duration: f64) -> Self {
        Self { duration, vertex_terms: Vec::new(), edge_terms: Vec::new() }
    }

    pub fn with_vertex(mut self, v: usize, op: CMatrix) -> Self {
        self.vertex_terms.push((v, op));
        self
    }

    pub fn with_edge(mut self, u: usize, v: usize, op: CMatrix) -> Self {
        self.edge_terms.push(((u, v), op));
        self
    }
}

/// Time-dependent Hamiltonian `H(t) = sum_v Phi1(v, t) + sum_e Phi2(e, t)`
/// that is constant on each slice, with `||Phi1|| <= B` and `||Phi2|| <= J`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseHamiltonian {
    graph: SpinGraph,
    slices: Vec<Slice>,
    layout: Layout,
}

fn within_cap(norm: f64, cap: f64) -> bool {
    norm <= cap * (1.0 + 1e-12) + 1e-14
}

impl PiecewiseHamiltonian {
    pub fn new(graph: SpinGraph, slices: Vec<Slice>) -> Result<Self> {
        let layout = Layout::new(graph.local_dims())?;
        if slices.is_empty() {
            return Err(Error::InvalidArgument("at least one slice is required"));
        }
        let dims = graph.local_dims();
        for s in &slices {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(Error::InvalidArgument("slice durations must be positive"));
            }
            for (v, op) in &s.vertex_terms {
                let d = *dims.get(*v).ok_or(Error::VertexOutOfRange { vertex: *v, count: dims.len() })?;
                if op.nrows() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: op.nrows() });
                }
                linalg::check_hermitian(op)?;
                let norm = linalg::hermitian_norm(op);
                if !within_cap(norm, graph.field_cap()) {
                    return Err(Error::NormCapExceeded { norm, cap: graph.field_cap() });
                }
            }
            for ((u, v), op) in &s.edge_terms {
                if !graph.has_edge(*u, *v) {
                    return Err(Error::InvalidArgument("edge term on a pair that is not an edge"));
                }
                let d = dims[*u] * dims[*v];
                if op.nrows() != d {
                    return Err(Error::DimensionMismatch { expected: d, found: op.nrows() });
                }
                linalg::check_hermitian(op)?;
                let norm = linalg::hermitian_norm(op);
                if !within_cap(norm, graph.coupling_cap()) {
                    return Err(Error::NormCapExceeded { norm, cap: graph.coupling_cap() });
                }
            }
        }
        Ok(Self { graph, slices, layout })
    }

    pub fn graph(&self) -> &SpinGraph {
        &self.graph
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn total_time(&self) -> f64 {
        self.slices.iter().map(|s| s.duration).sum()
    }

    /// Full-space matrix of slice `k`.
    pub fn slice_matrix(&self, k: usize) -> Result<CMatrix> {
        let slice = &self.slices[k];
        let dims = self.layout.dims();
        let n = self.layout.total();
        let mut h = CMatrix::zeros(n, n);
        for (v, op) in &slice.vertex_terms {
            h += embed(op, dims, &[*v])?;
        }
        for ((u, v), op) in &slice.edge_terms {
            h += embed(op, dims, &[*u, *v])?;
        }
        Ok(linalg::hermitian_part(&h))
    }

    /// Diagonalizes every slice once.
    pub fn propagator(&self) -> Result<Propagator<'_>> {
        let spectra = (0..self.slices.len())
            .map(|k| self.slice_matrix(k).map(|h| linalg::eigh(&h)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Propagator { hamiltonian: self, spectra })
    }
}

/// Cached per-slice eigendecompositions of a [`PiecewiseHamiltonian`].
pub struct Propagator<'h> {
    hamiltonian: &'h PiecewiseHamiltonian,
    spectra: Vec<HermitianEigen>,
}

impl Propagator<'_> {
    fn check_time(&self, t: f64) -> Result<()> {
        let total = self.hamiltonian.total_time();
        if !(t >= 0.0 && t <= total * (1.0 + 1e-12)) {
            return Err(Error::InvalidArgument("time outside the Hamiltonian's schedule"));
        }
        Ok(())
    }

    /// Slice index and the time spent in it, for each slice touched before `t`.
    fn schedule(&self, t: f64) -> impl Iterator<Item = (usize, f64)> + '_ {
        let mut remaining = t;
        self.hamiltonian.slices.iter().enumerate().filter_map(move |(k, s)| {
            if remaining <= 0.0 {
                return None;
            }
            let dt = s.duration.min(remaining);
            remaining -= dt;
            Some((k, dt))
        })
    }

    /// `U(t) = U_k(dt_k) ... U_1(dt_1)`.
    pub fn unitary(&self, t: f64) -> Result<CMatrix> {
        self.check_time(t)?;
        let n = self.hamiltonian.layout.total();
        let mut u = linalg::identity(n);
        for (k, dt) in self.schedule(t) {
            u = self.spectra[k].propagator(dt) * u;
        }
        Ok(u)
    }

    pub fn evolve(&self, psi0: &StateVector, t: f64) -> Result<StateVector> {
        self.check_time(t)?;
        if psi0.dims() != self.hamiltonian.layout.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.hamiltonian.layout.total(),
                found: psi0.amplitudes().len(),
            });
        }
        let mut amps = psi0.amplitudes().clone();
        for (k, dt) in self.schedule(t) {
            amps = self.spectra[k].apply_propagator(dt, &amps);
        }
        debug_assert!((amps.norm() - 1.0).abs() < STATE_TOL);
        Ok(psi0.with_amplitudes(amps))
    }
}

/// Convenience wrapper: evolve `psi0` under `h` up to time `t`.
pub fn evolve(h: &PiecewiseHamiltonian, psi0: &StateVector, t: f64) -> Result<StateVector> {
    h.propagator()?.evolve(psi0, t)
}

/// Two-qubit operator `sum_k c_k P_k (x) Q_k`.
pub fn two_site(terms: &[(Pauli, Pauli, f64)]) -> CMatrix {
    terms.iter().fold(CMatrix::zeros(4, 4), |acc, &(p, q, c)| {
        acc + p.matrix().kronecker(&q.matrix()) * Complex64::new(c, 0.0)
    })
}

/// `XX + YY + delta ZZ` rescaled to operator norm `j`.
pub fn xxz_edge(j: f64, delta: f64) -> CMatrix {
    let op = two_site(&[(Pauli::X, Pauli::X, 1.0), (Pauli::Y, Pauli::Y, 1.0), (Pauli::Z, Pauli::Z, delta)]);
    let norm = linalg::hermitian_norm(&op);
    op * Complex64::new(j / norm, 0.0)
}

/// `h Z` on one qubit.
pub fn z_field(h: f64) -> CMatrix {
    Pauli::Z.matrix() * Complex64::new(h, 0.0)
}

/// Random schedule of `slice_count` slices summing to `total_time`; every
/// edge of the graph carries a random Hermitian coupling with norm in
/// `[0.5 J, J]` and every vertex a random field with norm at most `B`.
pub fn random_piecewise<R: Rng + ?Sized>(
    graph: &SpinGraph,
    slice_count: usize,
    total_time: f64,
    rng: &mut R,
) -> Result<PiecewiseHamiltonian> {
    if slice_count == 0 || !(total_time > 0.0) {
        return Err(Error::InvalidArgument("need a positive number of slices and total time"));
    }
    let weights: Vec<f64> = (0..slice_count).map(|_| rng.random_range(0.2..1.0)).collect();
    let wsum: f64 = weights.iter().sum();
    let dims = graph.local_dims();
    let slices = weights
        .iter()
        .map(|w| {
            let mut s = Slice::new(total_time * w / wsum);
            for &(u, v) in graph.edges() {
                let norm = graph.coupling_cap() * rng.random_range(0.5..=1.0);
                s.edge_terms.push(((u, v), linalg::random_hermitian(dims[u] * dims[v], norm, rng)));
            }
            for (v, &d) in dims.iter().enumerate() {
                let norm = graph.field_cap() * rng.random_range(0.0..=1.0);
                s.vertex_terms.push((v, linalg::random_hermitian(d, norm, rng)));
            }
            s
        })
        .collect();
    PiecewiseHamiltonian::new(graph.clone(), slices)
}

/// Random excitation-preserving schedule on a qubit graph: XXZ couplings of
/// norm at most `J` with random anisotropy and random Z fields.
pub fn random_excitation_preserving<R: Rng + ?Sized>(
    graph: &SpinGraph,
    slice_count: usize,
    total_time: f64,
    rng: &mut R,
) -> Result<PiecewiseHamiltonian> {
    if slice_count == 0 || !(total_time > 0.0) {
        return Err(Error::InvalidArgument("need a positive number of slices and total time"));
    }
    let slices = (0..slice_count)
        .map(|_| {
            let mut s = Slice::new(total_time / slice_count as f64);
            for &(u, v) in graph.edges() {
                let j = graph.coupling_cap() * rng.random_range(0.5..=1.0);
                s.edge_terms.push(((u, v), xxz_edge(j, rng.random_range(-1.5..1.5))));
            }
            for v in 0..graph.vertex_count() {
                s.vertex_terms.push((v, z_field(graph.field_cap() * rng.random_range(-1.0..=1.0))));
            }
            s
        })
        .collect();
    PiecewiseHamiltonian::new(graph.clone(), slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::FRAC_PI_2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let g = SpinGraph::chain(3, 1.0, 1.0).unwrap();
        let h = PiecewiseHamiltonian::new(g, alloc::vec![Slice::new(1.0)]).unwrap();
        let psi = StateVector::basis(&[2, 2, 2], &[1, 0, 1]).unwrap();
        let out = evolve(&h, &psi, 0.7).unwrap();
        assert!((out.amplitudes() - psi.amplitudes()).norm() < 1e-14);
    }

    #[test]
    fn rabi_flip() {
        let g = SpinGraph::chain(1, 0.0, FRAC_PI_2).unwrap();
        let x = Pauli::X.matrix() * Complex64::new(FRAC_PI_2, 0.0);
        let h = PiecewiseHamiltonian::new(g, alloc::vec![Slice::new(1.0).with_vertex(0, x)]).unwrap();
        let psi = StateVector::basis(&[2], &[0]).unwrap();
        let out = evolve(&h, &psi, 1.0).unwrap();
        assert_relative_eq!(out.amplitudes()[1].norm(), 1.0, epsilon = 1e-14);
        assert_relative_eq!(out.amplitudes()[1].im, -1.0, epsilon = 1e-14);
    }

    #[test]
    fn norm_caps_enforced() {
        let g = SpinGraph::chain(2, 1.0, 0.5).unwrap();
        let s = Slice::new(1.0).with_vertex(0, z_field(0.6));
        assert!(matches!(
            PiecewiseHamiltonian::new(g.clone(), alloc::vec![s]),
            Err(Error::NormCapExceeded { .. })
        ));
        let s = Slice::new(1.0).with_edge(0, 1, xxz_edge(1.2, 1.0));
        assert!(PiecewiseHamiltonian::new(g.clone(), alloc::vec![s]).is_err());
        assert!(PiecewiseHamiltonian::new(g.clone(), alloc::vec![Slice::new(0.0)]).is_err());
        let s = Slice::new(1.0).with_edge(0, 1, xxz_edge(1.0, 1.0));
        assert!(PiecewiseHamiltonian::new(g, alloc::vec![s]).is_ok());
    }

    #[test]
    fn unitarity_and_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = SpinGraph::chain(4, 1.0, 0.7).unwrap();
        let h = random_piecewise(&g, 3, 2.0, &mut rng).unwrap();
        let prop = h.propagator().unwrap();
        let psi = StateVector::new(&[2; 4], linalg::random_state(16, &mut rng)).unwrap();
        for &t in &[0.0, 0.3, 1.1, 2.0] {
            let u = prop.unitary(t).unwrap();
            assert!((u.adjoint() * &u - linalg::identity(16)).norm() < 1e-10);
            let a = prop.evolve(&psi, t).unwrap();
            assert_relative_eq!(a.norm(), 1.0, epsilon = 1e-10);
            assert!((u * psi.amplitudes() - a.amplitudes()).norm() < 1e-10);
        }
        assert!(prop.unitary(2.5).is_err());
    }

    #[test]
    fn xxz_norm() {
        assert_relative_eq!(linalg::hermitian_norm(&xxz_edge(0.8, 1.0)), 0.8, epsilon = 1e-12);
        assert_relative_eq!(linalg::hermitian_norm(&xxz_edge(0.8, -0.3)), 0.8, epsilon = 1e-12);
    }
}
