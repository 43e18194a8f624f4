//! Even/odd Bloch correlation analysis for multiqubit states.
//!
//! An n-qubit state expands over tensor products of Pauli matrices; grouping
//! the terms by how many qubits they touch splits the correlations into an
//! even component P_e and an odd component P_o. For pure states the two
//! components lock each other down to a remarkable degree, and this crate
//! implements that machinery end to end:
//!
//! - exact Pauli-string algebra in symplectic form ([`pauli`]),
//! - Bloch decomposition, weight filtering and the even/odd split ([`state`]),
//! - the state inversion map in operator, reduction-sum, Bloch and
//!   generalized-flip form ([`inversion`]),
//! - spectra checks and the reconstruction of one correlation component from
//!   the other, including the uniqueness certificate and ground-state
//!   Hamiltonians ([`reconstruction`]),
//! - evolution under odd-weight Hamiltonians with its conserved overlap and
//!   parity structure ([`dynamics`]),
//! - biseparability screening of pure states from low-weight odd
//!   correlations alone ([`entanglement`]),
//! - slow, independent oracles for all of the above ([`oracle`]) and the
//!   text file formats used by the CLI ([`io`]).
//!
//! ```
//! use evenodd::{even_odd_split, random_pure_state};
//!
//! // On an odd number of qubits the inversion overlap vanishes and the odd
//! // correlations carry the whole state.
//! let psi = random_pure_state(5, 42);
//! let split = even_odd_split(&psi)?;
//! assert!(split.alpha() < 1e-9);
//!
//! let cert = evenodd::reconstruction::uda_certify(&split.po_matrix()?, 5)?;
//! assert!(cert.state.fidelity(&psi) > 1.0 - 1e-9);
//! # Ok::<(), evenodd::Error>(())
//! ```

pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod inversion;
pub mod io;
pub mod linalg;
pub mod oracle;
pub mod pauli;
pub mod reconstruction;
pub mod rng;
pub mod state;

pub use error::{Error, ErrorClass};
pub use linalg::{hermitian_eig, CMatrix, CVector, HermitianEig};
pub use pauli::{PauliLetter, PauliString};
pub use state::{
    bloch_decompose, even_odd_split, partial_trace, random_mixed_state, random_pure_state,
    BlochVector, EvenOddSplit, QuantumState,
};
