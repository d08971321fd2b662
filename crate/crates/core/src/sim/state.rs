//! Tensor-product layout, pure and mixed states, and distance measures.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};

/// Tolerance on state invariants (norm, trace, positivity).
pub const STATE_TOL: f64 = 1e-10;
/// Largest full Hilbert-space dimension the simulator accepts.
pub const MAX_DIM: usize = 4096;

/// Row-major tensor layout: vertex 0 is the most significant digit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    total: usize,
}

impl Layout {
    pub fn new(dims: &[usize]) -> Result<Self> {
        let mut strides = vec![0; dims.len()];
        let mut total = 1usize;
        for (v, &d) in dims.iter().enumerate().rev() {
            strides[v] = total;
            total = total.checked_mul(d).ok_or(Error::DimensionTooLarge(usize::MAX))?;
        }
        if total > MAX_DIM {
            return Err(Error::DimensionTooLarge(total));
        }
        Ok(Self { dims: dims.to_vec(), strides, total })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn digit(&self, index: usize, vertex: usize) -> usize {
        (index / self.strides[vertex]) % self.dims[vertex]
    }

    pub fn stride(&self, vertex: usize) -> usize {
        self.strides[vertex]
    }

    /// Dimension of the subsystem on `vertices`.
    pub fn sub_dim(&self, vertices: &[usize]) -> usize {
        vertices.iter().map(|&v| self.dims[v]).product()
    }

    /// For every full index, its index within the `vertices` subsystem
    /// (ordered as given) and within the complementary subsystem.
    pub fn split(&self, vertices: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let rest: Vec<usize> = (0..self.dims.len()).filter(|v| !vertices.contains(v)).collect();
        let mut keep_idx = Vec::with_capacity(self.total);
        let mut rest_idx = Vec::with_capacity(self.total);
        for i in 0..self.total {
            keep_idx.push(self.sub_index(i, vertices));
            rest_idx.push(self.sub_index(i, &rest));
        }
        (keep_idx, rest_idx)
    }

    fn sub_index(&self, index: usize, vertices: &[usize]) -> usize {
        vertices.iter().fold(0, |acc, &v| acc * self.dims[v] + self.digit(index, v))
    }
}

fn check_vertices(layout: &Layout, vertices: &[usize]) -> Result<()> {
    let n = layout.dims().len();
    for (k, &v) in vertices.iter().enumerate() {
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, count: n });
        }
        if vertices[..k].contains(&v) {
            return Err(Error::InvalidArgument("repeated vertex"));
        }
    }
    if vertices.is_empty() {
        return Err(Error::InvalidArgument("empty subsystem"));
    }
    Ok(())
}

/// Normalized pure state over a tensor-product layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    layout: Layout,
}

impl StateVector {
    pub fn new(dims: &[usize], amplitudes: CVector) -> Result<Self> {
        let layout = Layout::new(dims)?;
        if amplitudes.len() != layout.total() {
            return Err(Error::DimensionMismatch { expected: layout.total(), found: amplitudes.len() });
        }
        if (amplitudes.norm() - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument("state vector must have unit norm"));
        }
        Ok(Self { amplitudes, layout })
    }

    /// Computational basis state with the given per-vertex digits.
    pub fn basis(dims: &[usize], digits: &[usize]) -> Result<Self> {
        let layout = Layout::new(dims)?;
        if digits.len() != dims.len() || digits.iter().zip(dims).any(|(d, n)| d >= n) {
            return Err(Error::InvalidArgument("basis digits do not match the layout"));
        }
        let index: usize = digits.iter().enumerate().map(|(v, &d)| d * layout.stride(v)).sum();
        let mut amplitudes = CVector::zeros(layout.total());
        amplitudes[index] = linalg::ONE;
        Ok(Self { amplitudes, layout })
    }

    /// Tensor product of single-vertex states, vertex 0 first.
    pub fn product(factors: &[CVector]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        let mut amps = CVector::from_element(1, linalg::ONE);
        for f in factors {
            amps = amps.kronecker(f);
        }
        let norm = amps.norm();
        if norm == 0.0 {
            return Err(Error::InvalidArgument("zero factor in product state"));
        }
        Self::new(&dims, amps / Complex64::new(norm, 0.0))
    }

    /// Same layout, new amplitudes (caller keeps them normalized).
    pub(crate) fn with_amplitudes(&self, amplitudes: CVector) -> Self {
        Self { amplitudes, layout: self.layout.clone() }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn dims(&self) -> &[usize] {
        self.layout.dims()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn overlap(&self, other: &StateVector) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn to_density(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix { matrix: m, dims: self.dims().to_vec() }
    }

    /// Reduced state on `keep` (kept subsystem ordered as given).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        check_vertices(&self.layout, keep)?;
        let (ki, ri) = self.layout.split(keep);
        let dk = self.layout.sub_dim(keep);
        let dr = self.layout.total() / dk;
        let mut psi = CMatrix::zeros(dk, dr);
        for (i, a) in self.amplitudes.iter().enumerate() {
            psi[(ki[i], ri[i])] = *a;
        }
        let matrix = linalg::hermitian_part(&(&psi * psi.adjoint()));
        Ok(DensityMatrix { matrix, dims: keep.iter().map(|&v| self.layout.dims()[v]).collect() })
    }
}

/// Density matrix over a tensor-product layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity to [`STATE_TOL`].
    pub fn new(dims: &[usize], matrix: CMatrix) -> Result<Self> {
        let layout = Layout::new(dims)?;
        if matrix.nrows() != layout.total() || matrix.ncols() != layout.total() {
            return Err(Error::DimensionMismatch { expected: layout.total(), found: matrix.nrows() });
        }
        linalg::check_hermitian(&matrix)?;
        let tr = linalg::trace(&matrix);
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidArgument("density matrix must have unit trace"));
        }
        let lowest = linalg::eigvalsh(&matrix)[0];
        if lowest < -STATE_TOL {
            return Err(Error::NotPositive(lowest));
        }
        Ok(Self { matrix: linalg::hermitian_part(&matrix), dims: dims.to_vec() })
    }

    pub fn maximally_mixed(dims: &[usize]) -> Result<Self> {
        let n = Layout::new(dims)?.total();
        Ok(Self { matrix: linalg::identity(n) / Complex64::new(n as f64, 0.0), dims: dims.to_vec() })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn purity(&self) -> f64 {
        linalg::trace(&(&self.matrix * &self.matrix)).re
    }

    /// `tr(rho O)`.
    pub fn expectation(&self, op: &CMatrix) -> Complex64 {
        // tr(rho O) = sum_ij rho_ij O_ji
        let n = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.matrix[(i, j)] * op[(j, i)];
            }
        }
        acc
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: u.nrows() });
        }
        let m = u * &self.matrix * u.adjoint();
        Ok(Self { matrix: linalg::hermitian_part(&m), dims: self.dims.clone() })
    }

    /// Reduced state on `keep` (kept subsystem ordered as given).
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        Ok(DensityMatrix {
            matrix: partial_trace(&self.matrix, &self.dims, keep)?,
            dims: keep.iter().map(|&v| self.dims[v]).collect(),
        })
    }
}

/// Partial trace of an operator over everything outside `keep`.
pub fn partial_trace(op: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    let layout = Layout::new(dims)?;
    check_vertices(&layout, keep)?;
    if op.nrows() != layout.total() || op.ncols() != layout.total() {
        return Err(Error::DimensionMismatch { expected: layout.total(), found: op.nrows() });
    }
    let (ki, ri) = layout.split(keep);
    let dk = layout.sub_dim(keep);
    let dr = layout.total() / dk;
    // full index of (k, r)
    let mut full = vec![0usize; dk * dr];
    for i in 0..layout.total() {
        full[ki[i] * dr + ri[i]] = i;
    }
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for r in 0..dr {
                acc += op[(full[a * dr + r], full[b * dr + r])];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(out)
}

/// `op` acting on `vertices` (ordered as given), tensored with the identity
/// on every other vertex.
pub fn embed(op: &CMatrix, dims: &[usize], vertices: &[usize]) -> Result<CMatrix> {
    let layout = Layout::new(dims)?;
    check_vertices(&layout, vertices)?;
    let dk = layout.sub_dim(vertices);
    if op.nrows() != dk || op.ncols() != dk {
        return Err(Error::DimensionMismatch { expected: dk, found: op.nrows() });
    }
    let (ki, ri) = layout.split(vertices);
    let n = layout.total();
    let dr = n / dk;
    let mut full = vec![0usize; n];
    for i in 0..n {
        full[ki[i] * dr + ri[i]] = i;
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        let r = ri[i];
        for b in 0..dk {
            let v = op[(ki[i], b)];
            if v != linalg::ZERO {
                out[(i, full[b * dr + r])] = v;
            }
        }
    }
    Ok(out)
}

fn check_same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: sigma.dim() });
    }
    Ok(())
}

/// Root fidelity `tr sqrt(sqrt(sigma) rho sqrt(sigma))`, in `[0, 1]`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    let s = linalg::psd_sqrt(sigma.matrix())?;
    let inner = &s * rho.matrix() * &s;
    let eig = linalg::eigvalsh(&inner);
    let scale = eig.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut total = 0.0;
    for v in eig {
        if v < -1e-12 * scale {
            return Err(Error::NotPositive(v));
        }
        total += v.max(0.0).sqrt();
    }
    Ok(total.min(1.0))
}

/// Trace distance `||rho - sigma||_1`, in `[0, 2]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_same_dim(rho, sigma)?;
    Ok(linalg::trace_norm_hermitian(&(rho.matrix() - sigma.matrix())))
}

/// Bures angle `arccos F(rho, sigma)`, in `[0, pi/2]`.
pub fn bures_angle(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(fidelity(rho, sigma)?.clamp(0.0, 1.0).acos())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ket(a: f64, b: f64) -> CVector {
        CVector::from_vec(vec![Complex64::new(a, 0.0), Complex64::new(b, 0.0)])
    }

    fn bell() -> StateVector {
        let s = FRAC_1_SQRT_2;
        let amps = CVector::from_vec(vec![
            Complex64::new(s, 0.0),
            linalg::ZERO,
            linalg::ZERO,
            Complex64::new(s, 0.0),
        ]);
        StateVector::new(&[2, 2], amps).unwrap()
    }

    #[test]
    fn product_state_reduces_to_factor() {
        let psi = StateVector::product(&[ket(1.0, 0.0), ket(0.6, 0.8), ket(0.0, 1.0)]).unwrap();
        let r = psi.reduce(&[1]).unwrap();
        let expected = ket(0.6, 0.8) * ket(0.6, 0.8).adjoint();
        assert!((r.matrix() - expected).norm() < 1e-14);
        let full = psi.to_density().reduce(&[1]).unwrap();
        assert!((full.matrix() - r.matrix()).norm() < 1e-14);
    }

    #[test]
    fn bell_pair_marginal_is_mixed() {
        let r = bell().reduce(&[0]).unwrap();
        let eig = linalg::eigvalsh(r.matrix());
        assert_relative_eq!(eig[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(eig[1], 0.5, epsilon = 1e-14);
        assert_relative_eq!(r.purity(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn reduce_orders_kept_vertices() {
        let psi = StateVector::basis(&[2, 3, 2], &[1, 2, 0]).unwrap();
        let r = psi.reduce(&[2, 1]).unwrap();
        assert_eq!(r.dims(), &[2, 3]);
        assert_relative_eq!(r.matrix()[(2, 2)].re, 1.0);
    }

    #[test]
    fn fidelity_examples() {
        let zero = StateVector::basis(&[2], &[0]).unwrap().to_density();
        let one = StateVector::basis(&[2], &[1]).unwrap().to_density();
        let mixed = DensityMatrix::maximally_mixed(&[2]).unwrap();
        assert_relative_eq!(fidelity(&zero, &zero).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(fidelity(&zero, &one).unwrap(), 0.0, epsilon = 1e-7);
        assert_relative_eq!(fidelity(&zero, &mixed).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-12);
        assert!(fidelity(&zero, &DensityMatrix::maximally_mixed(&[2, 2]).unwrap()).is_err());
    }

    #[test]
    fn distance_examples() {
        let zero = StateVector::basis(&[2], &[0]).unwrap().to_density();
        let one = StateVector::basis(&[2], &[1]).unwrap().to_density();
        let plus = StateVector::new(&[2], ket(FRAC_1_SQRT_2, FRAC_1_SQRT_2)).unwrap().to_density();
        assert_relative_eq!(trace_distance(&zero, &zero).unwrap(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(trace_distance(&zero, &one).unwrap(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(bures_angle(&zero, &zero).unwrap(), 0.0, epsilon = 1e-6);
        assert_relative_eq!(bures_angle(&zero, &one).unwrap(), FRAC_PI_2, epsilon = 1e-7);
        assert_relative_eq!(bures_angle(&zero, &plus).unwrap(), FRAC_PI_4, epsilon = 1e-12);
    }

    #[test]
    fn density_validation() {
        let bad = linalg::identity(2);
        assert!(DensityMatrix::new(&[2], bad).is_err());
        let mut neg = linalg::identity(2);
        neg[(0, 0)] = Complex64::new(1.5, 0.0);
        neg[(1, 1)] = Complex64::new(-0.5, 0.0);
        assert!(matches!(DensityMatrix::new(&[2], neg), Err(Error::NotPositive(_))));
    }

    #[test]
    fn embed_then_trace_recovers_operator() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = linalg::random_hermitian(4, 1.0, &mut rng);
        let dims = [2, 2, 2];
        let full = embed(&a, &dims, &[2, 0]).unwrap();
        let back = partial_trace(&full, &dims, &[2, 0]).unwrap() / Complex64::new(2.0, 0.0);
        assert!((back - a).norm() < 1e-13);
    }

    #[test]
    fn rejects_oversized_layout() {
        assert!(matches!(Layout::new(&[2; 13]), Err(Error::DimensionTooLarge(8192))));
    }
}
