//! Vibronic spectra beyond the Condon approximation, simulated with
//! linear combinations of Gaussian boson samplers.

pub mod cli;
pub mod error;
pub mod fock;
pub mod io;
pub mod gauss;
pub mod ht;
pub mod linalg;
pub mod molecule;
pub mod spectrum;

pub use error::{Error, Result};
