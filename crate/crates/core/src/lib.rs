//! Entanglement of three trapped-atom qubits driven by two-mode squeezed light.
//!
//! Two atoms (`A1`, `A2`) sit in cavity `c1`, a third atom (`B`) in a remote
//! cavity `c2`. Each cavity receives one mode of a two-mode squeezed vacuum
//! through a beam splitter. After a resonant interaction time `tau = g t` the
//! field is traced out, leaving an 8x8 three-qubit density matrix.
//!
//! The crate is organised as:
//!
//! - [`fock_field`]: beam-splitter amplitudes and the weights of the injected
//!   two-mode field in the Fock basis.
//! - [`tavis_cummings`]: resonant block unitaries and the closed-form reduced
//!   three-qubit state.
//! - [`entanglement`]: partial transposes (global, K-way, selective),
//!   negativities, pure-state decomposition, linear entropy, fidelities.
//! - [`oracle`]: brute-force truncated Hilbert-space evolution, independent of
//!   every closed form, used to validate them.
//!
//! Basis ordering for all 8x8 matrices is `|i1 i2 i3>` with index
//! `i1 + 2 i2 + 4 i3` (`i1` = A1, `i2` = A2, `i3` = B).

pub mod entanglement;
pub mod error;
pub mod fock_field;
pub mod linalg;
pub mod oracle;
pub mod sum;
pub mod tavis_cummings;

pub use error::{Error, Result};

use nalgebra::{SMatrix, SVector};
use num_complex::Complex64;

/// Complex scalar used throughout.
pub type C64 = Complex64;
/// Operator on the three-qubit space.
pub type Matrix8 = SMatrix<C64, 8, 8>;
/// Three-qubit state vector.
pub type Vector8 = SVector<C64, 8>;
