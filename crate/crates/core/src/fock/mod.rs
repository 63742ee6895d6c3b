//! Fock-basis amplitudes of Gaussian and polynomial states.

mod gaussian;
mod lattice;
pub mod oracle;

pub use gaussian::{fock_amplitudes, gaussian_fock_amplitude, GaussianState, MAX_PHOTONS};
pub use lattice::Lattice;
pub use oracle::{truncated_oracle_state, OracleOp, TdmPolynomial, TruncatedState};
