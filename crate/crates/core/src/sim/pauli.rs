//! Pauli strings and their fast action on dense operators.

use alloc::vec::Vec;
use core::fmt;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::Region;
use crate::linalg::{self, CMatrix, I, ONE, ZERO};
use crate::sim::state::Layout;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn matrix(self) -> CMatrix {
        let m = match self {
            Pauli::I => [ONE, ZERO, ZERO, ONE],
            Pauli::X => [ZERO, ONE, ONE, ZERO],
            Pauli::Y => [ZERO, -I, I, ZERO],
            Pauli::Z => [ONE, ZERO, ZERO, -ONE],
        };
        CMatrix::from_row_slice(2, 2, &m)
    }

    /// `P |bit> = phase |bit'>`.
    fn action(self, bit: usize) -> (usize, Complex64) {
        match (self, bit) {
            (Pauli::I, b) => (b, ONE),
            (Pauli::X, b) => (b ^ 1, ONE),
            (Pauli::Y, 0) => (1, I),
            (Pauli::Y, _) => (0, -I),
            (Pauli::Z, 0) => (0, ONE),
            (Pauli::Z, _) => (1, -ONE),
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c.to_ascii_uppercase() {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Tensor product of single-qubit Paulis; identity factors are dropped.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    factors: Vec<(usize, Pauli)>,
}

impl PauliString {
    pub fn new(factors: impl IntoIterator<Item = (usize, Pauli)>) -> Result<Self> {
        let mut list: Vec<(usize, Pauli)> = factors.into_iter().filter(|(_, p)| *p != Pauli::I).collect();
        list.sort_unstable();
        if list.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("a vertex appears twice in a Pauli string"));
        }
        Ok(Self { factors: list })
    }

    pub fn single(vertex: usize, p: Pauli) -> Self {
        Self::new([(vertex, p)]).expect("single factor")
    }

    pub fn identity() -> Self {
        Self { factors: Vec::new() }
    }

    /// Every non-identity Pauli string supported inside `region`.
    pub fn all_on(region: &Region) -> Vec<PauliString> {
        let verts = region.vertices();
        let total = 4usize.pow(verts.len() as u32);
        const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
        (1..total)
            .map(|mut code| {
                let mut factors = Vec::with_capacity(verts.len());
                for &v in verts.iter().rev() {
                    factors.push((v, ALL[code % 4]));
                    code /= 4;
                }
                PauliString::new(factors).expect("distinct vertices")
            })
            .collect()
    }

    pub fn factors(&self) -> &[(usize, Pauli)] {
        &self.factors
    }

    pub fn support(&self) -> Vec<usize> {
        self.factors.iter().map(|(v, _)| *v).collect()
    }

    pub fn is_disjoint(&self, other: &PauliString) -> bool {
        self.factors.iter().all(|(v, _)| other.factors.iter().all(|(w, _)| v != w))
    }

    /// Matrix on the support alone, factors in ascending vertex order.
    pub fn support_matrix(&self) -> CMatrix {
        self.factors
            .iter()
            .fold(linalg::identity(1), |acc, (_, p)| acc.kronecker(&p.matrix()))
    }

    fn check(&self, layout: &Layout) -> Result<()> {
        for &(v, _) in &self.factors {
            match layout.dims().get(v) {
                None => return Err(Error::VertexOutOfRange { vertex: v, count: layout.dims().len() }),
                Some(2) => {}
                Some(_) => return Err(Error::InvalidArgument("Pauli factors need qubit vertices")),
            }
        }
        Ok(())
    }

    /// `P |i> = phase_i |target_i>` for every basis index `i`.
    fn permutation(&self, layout: &Layout) -> (Vec<usize>, Vec<Complex64>) {
        let mut targets = Vec::with_capacity(layout.total());
        let mut phases = Vec::with_capacity(layout.total());
        for i in 0..layout.total() {
            let mut j = i;
            let mut phase = ONE;
            for &(v, p) in &self.factors {
                let bit = layout.digit(i, v);
                let (nb, ph) = p.action(bit);
                j = j - bit * layout.stride(v) + nb * layout.stride(v);
                phase *= ph;
            }
            targets.push(j);
            phases.push(phase);
        }
        (targets, phases)
    }

    /// Dense matrix on the full space.
    pub fn full_matrix(&self, layout: &Layout) -> Result<CMatrix> {
        self.check(layout)?;
        let (targets, phases) = self.permutation(layout);
        let n = layout.total();
        let mut m = CMatrix::zeros(n, n);
        for k in 0..n {
            m[(targets[k], k)] = phases[k];
        }
        Ok(m)
    }

    /// `tr(M P)` in `O(n)`.
    pub fn trace_with(&self, layout: &Layout, m: &CMatrix) -> Result<Complex64> {
        self.check(layout)?;
        let (targets, phases) = self.permutation(layout);
        Ok((0..layout.total()).map(|k| m[(k, targets[k])] * phases[k]).sum())
    }

    /// `P M` in `O(n^2)`.
    pub fn left_mul(&self, layout: &Layout, m: &CMatrix) -> Result<CMatrix> {
        self.check(layout)?;
        let (targets, phases) = self.permutation(layout);
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for k in 0..m.nrows() {
            for c in 0..m.ncols() {
                out[(targets[k], c)] = phases[k] * m[(k, c)];
            }
        }
        Ok(out)
    }

    /// `M P` in `O(n^2)`.
    pub fn right_mul(&self, layout: &Layout, m: &CMatrix) -> Result<CMatrix> {
        self.check(layout)?;
        let (targets, phases) = self.permutation(layout);
        let mut out = CMatrix::zeros(m.nrows(), m.ncols());
        for k in 0..m.ncols() {
            for r in 0..m.nrows() {
                out[(r, k)] = m[(r, targets[k])] * phases[k];
            }
        }
        Ok(out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        for (k, (v, p)) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", p.as_char(), v)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SpinGraph;
    use crate::sim::state::embed;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn algebra() {
        let (x, y, z) = (Pauli::X.matrix(), Pauli::Y.matrix(), Pauli::Z.matrix());
        assert!((&x * &y - &z * I).norm() < 1e-15);
        assert!((&x * &x - linalg::identity(2)).norm() < 1e-15);
    }

    #[test]
    fn full_matrix_matches_embedding() {
        let layout = Layout::new(&[2, 2, 2]).unwrap();
        let s = PauliString::new([(0, Pauli::Y), (2, Pauli::X)]).unwrap();
        let dense = embed(&s.support_matrix(), layout.dims(), &[0, 2]).unwrap();
        assert!((s.full_matrix(&layout).unwrap() - dense).norm() < 1e-15);
    }

    #[test]
    fn fast_products() {
        let layout = Layout::new(&[2, 2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let m = linalg::ginibre(8, &mut rng);
        let s = PauliString::new([(1, Pauli::Y), (2, Pauli::Z)]).unwrap();
        let p = s.full_matrix(&layout).unwrap();
        assert!((s.left_mul(&layout, &m).unwrap() - &p * &m).norm() < 1e-13);
        assert!((s.right_mul(&layout, &m).unwrap() - &m * &p).norm() < 1e-13);
    }

    #[test]
    fn trace_against_dense() {
        let layout = Layout::new(&[2, 2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = linalg::ginibre(8, &mut rng);
        let s = PauliString::new([(0, Pauli::X), (2, Pauli::Y)]).unwrap();
        let dense = linalg::trace(&(&m * s.full_matrix(&layout).unwrap()));
        assert!((s.trace_with(&layout, &m).unwrap() - dense).norm() < 1e-12);
    }

    #[test]
    fn enumeration_counts() {
        let g = SpinGraph::chain(4, 1.0, 0.0).unwrap();
        let r = Region::new(&g, [1, 3]).unwrap();
        let all = PauliString::all_on(&r);
        assert_eq!(all.len(), 15);
        assert!(all.iter().all(|s| s.support().iter().all(|v| r.contains(*v))));
    }

    #[test]
    fn rejects_duplicates_and_qutrits() {
        assert!(PauliString::new([(0, Pauli::X), (0, Pauli::Z)]).is_err());
        let layout = Layout::new(&[3, 2]).unwrap();
        assert!(PauliString::single(0, Pauli::X).full_matrix(&layout).is_err());
    }
}
