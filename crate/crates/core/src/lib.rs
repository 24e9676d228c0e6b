//! Norm-parallelism and Birkhoff–James orthogonality in the Hilbert
//! `M_d(ℂ)`-module `M_{d×m}(ℂ)`, with certificate-producing predicates for
//! module elements and adjointable operators.

pub mod error;
pub mod harness;
pub mod modspace;
pub mod numkernel;
pub mod opspace;
pub mod parallelcore;
pub mod search;
pub mod serial;

pub use error::{Error, Result};
