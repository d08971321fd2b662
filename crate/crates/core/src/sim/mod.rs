//! Exact dense simulation of graph-local spin Hamiltonians.

pub mod checks;
pub mod hamiltonian;
pub mod observables;
pub mod pauli;
pub mod state;

pub use hamiltonian::{evolve, PiecewiseHamiltonian, Propagator, Slice};
pub use observables::{connected_correlator, empirical_commutator_coefficient, localize};
pub use pauli::{Pauli, PauliString};
pub use state::{bures_angle, fidelity, partial_trace, trace_distance, DensityMatrix, Layout, StateVector};
