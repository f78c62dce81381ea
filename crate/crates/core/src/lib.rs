//! Yang-Lee zeros, correlation asymptotics and entanglement for the
//! non-Hermitian SSH chain and the complex-anisotropy XXZ chain.

pub mod entanglement;
pub mod error;
pub mod numerics;
pub mod ssh;
pub mod xxz;

pub use error::{Error, Result};
