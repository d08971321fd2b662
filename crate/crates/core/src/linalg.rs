//! Dense complex linear algebra helpers on top of `nalgebra`.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest dimension for which operator norms use a dense eigensolve.
pub const DENSE_NORM_LIMIT: usize = 1024;
/// Tolerance for Hermiticity checks.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigen-decomposition `H = V diag(values) V^dagger` with ascending values.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub fn check_hermitian(m: &CMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let dev = hermitian_deviation(m);
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if dev > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    Ok(())
}

/// Symmetrized copy `(M + M^dagger) / 2`, removing rounding asymmetry.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn eigh(m: &CMatrix) -> HermitianEigen {
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), order.len(), |i, j| eig.eigenvectors[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

impl HermitianEigen {
    /// `exp(-i H tau)`.
    pub fn propagator(&self, tau: f64) -> CMatrix {
        let phases: Vec<Complex64> =
            self.values.iter().map(|&e| Complex64::from_polar(1.0, -e * tau)).collect();
        self.reconstruct(&phases)
    }

    /// `V diag(values) V^dagger` for an arbitrary diagonal.
    pub fn reconstruct(&self, diag: &[Complex64]) -> CMatrix {
        let mut scaled = self.vectors.clone();
        for (j, &p) in diag.iter().enumerate() {
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= p);
        }
        scaled * self.vectors.adjoint()
    }

    /// `exp(-i H tau) psi` without forming the propagator.
    pub fn apply_propagator(&self, tau: f64, psi: &CVector) -> CVector {
        let mut coeffs = self.vectors.ad_mul(psi);
        for (c, &e) in coeffs.iter_mut().zip(&self.values) {
            *c *= Complex64::from_polar(1.0, -e * tau);
        }
        &self.vectors * coeffs
    }
}

/// Operator norm of a Hermitian matrix: largest absolute eigenvalue.
pub fn hermitian_norm(m: &CMatrix) -> f64 {
    let v = eigvalsh(m);
    v.first().map_or(0.0, |lo| lo.abs().max(v.last().unwrap().abs()))
}

/// Operator (spectral) norm, via `M^dagger M` up to [`DENSE_NORM_LIMIT`]
/// and power iteration beyond.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.ncols() <= DENSE_NORM_LIMIT {
        let gram = m.ad_mul(m);
        eigvalsh(&gram).last().map_or(0.0, |v| v.max(0.0).sqrt())
    } else {
        power_norm(m, 1e-10, 10_000)
    }
}

/// Power iteration on `M^dagger M` from a fixed dense start vector.
pub fn power_norm(m: &CMatrix, tol: f64, max_iter: usize) -> f64 {
    let n = m.ncols();
    let mut v = CVector::from_fn(n, |i, _| Complex64::new(1.0 + (i % 7) as f64 * 0.1, (i % 3) as f64 * 0.05));
    v /= Complex64::new(v.norm(), 0.0);
    let mut last = 0.0;
    for _ in 0..max_iter {
        let w = m.ad_mul(&(m * &v));
        let lambda = w.norm();
        if lambda == 0.0 {
            return 0.0;
        }
        v = w / Complex64::new(lambda, 0.0);
        if (lambda - last).abs() <= tol * lambda {
            return lambda.sqrt();
        }
        last = lambda;
    }
    last.sqrt()
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigvalsh(m).iter().map(|v| v.abs()).sum()
}

/// Principal square root of a positive semidefinite matrix. Eigenvalues in
/// `[-1e-12 * scale, 0)` are clipped to zero; anything lower is an error.
pub fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let eig = eigh(m);
    let scale = eig.values.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    let mut roots = Vec::with_capacity(eig.values.len());
    for &v in &eig.values {
        if v < -1e-12 * scale {
            return Err(Error::NotPositive(v));
        }
        roots.push(Complex64::new(v.max(0.0).sqrt(), 0.0));
    }
    Ok(eig.reconstruct(&roots))
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

/// Complex Ginibre matrix with standard-normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// Haar-distributed unitary from the QR factorization of a Ginibre matrix,
/// with the phases of `R`'s diagonal absorbed into `Q`.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Full-rank density matrix `G G^dagger / tr(G G^dagger)`.
pub fn random_density<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    let m = &g * g.adjoint();
    let tr = trace(&m).re;
    hermitian_part(&(m / Complex64::new(tr, 0.0)))
}

/// Random unit vector.
pub fn random_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(n, |_, _| gaussian(rng));
    let norm = v.norm();
    v / Complex64::new(norm, 0.0)
}

/// Random Hermitian matrix rescaled to operator norm `norm`.
pub fn random_hermitian<R: Rng + ?Sized>(n: usize, norm: f64, rng: &mut R) -> CMatrix {
    let g = ginibre(n, rng);
    let h = hermitian_part(&g);
    let current = hermitian_norm(&h);
    if current == 0.0 {
        return CMatrix::zeros(n, n);
    }
    h * Complex64::new(norm / current, 0.0)
}
