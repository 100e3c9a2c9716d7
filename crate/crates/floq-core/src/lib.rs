//! Numerical laboratory for periodically driven critical spin chains.
//!
//! The library has two halves that check each other:
//!
//! * [`cft`] — closed-form continuum predictions. A single-harmonic coupling
//!   deformation generates SU(1,1) Mobius dynamics; one 2x2 matrix per drive
//!   segment determines the dynamical phase (heating / non-heating), the
//!   Loschmidt echo, the energy density profile, and the positions where
//!   energy localizes.
//! * [`lattice`], [`sim`], [`mera`] — the digital side. Spin-chain
//!   Hamiltonians as explicit Pauli-term lists, an exact statevector engine
//!   (gates, Trotter steps, Krylov time evolution, Lanczos ground states,
//!   Born-rule sampling), and a hierarchical variational circuit that
//!   prepares the critical ground state.
//!
//! [`experiment`] orchestrates full runs and the shot-level measurement
//! pipeline (parity post-selection, reference normalization, bootstrap
//! confidence intervals, central-charge fitting).
//!
//! # Conventions
//!
//! These are fixed once, here, and shared by every module:
//!
//! * **Bit order.** Basis state `x` of an `N`-site chain assigns site `i` the
//!   bit `(x >> i) & 1`. Bit value 0 is the `Z = +1` eigenstate `|0>`, bit
//!   value 1 is `Z = -1`. Bitstrings render site 0 first (leftmost).
//! * **Two-qubit gate basis.** A gate on sites `(i, j)` uses the 4-dim basis
//!   index `m = 2*b_i + b_j` (first listed site is the high bit).
//! * **Rotations.** `apply_rx(theta)` implements `exp(-i theta X/2)`,
//!   `apply_rzz(theta)` implements `exp(-i theta Z_i Z_j / 2)`, and
//!   `apply_rxx(theta)` implements `exp(-i theta X_i X_j / 2)`.
//! * **Geometry.** Site `i` sits at position `x = i`, the bond between sites
//!   `i` and `i+1` at `x = i + 1/2`; the chain is periodic with circumference
//!   `L` (defaults to the site count). Continuum coordinates live in
//!   `[0, L)` and wrap.
//! * **Time.** Lattice segment durations are rescaled to continuum time by
//!   the model velocity, `t_cft = v * t_lattice`, before any Mobius matrix
//!   is built.
//!
//! The crate is `no_std` (with `alloc`); all file formats and IO live in the
//! companion CLI crate.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(test)]
#[macro_use]
extern crate std;

pub mod cft;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod mera;
pub mod sim;

pub(crate) mod util;

pub use error::{Error, Result};
