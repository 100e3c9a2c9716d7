//! Exact lattice engine.
//!
//! Statevector storage and gate kernels, second-order Trotter segments, a
//! Krylov matrix-exponential propagator, a Lanczos ground-state solver,
//! expectation values and overlaps, and Born-rule measurement sampling with
//! an optional depolarizing noise channel. Hamiltonians are only ever
//! applied term-wise; no operator matrix is materialized.

mod eigen;
mod evolve;
mod sample;
mod state;
mod tridiag;

pub use eigen::{ground_state, ground_state_deflated, lowest_eigenvalues, GroundState};

pub(crate) mod evolve_internals {
    pub(crate) use super::evolve::{apply_layer, split_layers};
}

pub(crate) use state::imag_yz_bracket;
pub use evolve::{exact_evolve, trotter_segment};
pub use sample::{
    apply_two_site_pauli, flips_x_parity, random_pauli_code, sample_measurements, MeasBasis,
    ShotBatch,
};
pub use state::{apply_hamiltonian, mera_gate_matrix, StateVector, TwoQubitGate, MAX_SITES};
