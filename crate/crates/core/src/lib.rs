//! Simulation and classification of information leakage in qudit encrypted
//! cloning.
//!
//! An unknown qudit `|psi>_A` is spread over `n` signal/noise pairs by a
//! Weyl-Heisenberg encoder. This crate builds that register, computes reduced
//! states of arbitrary subsets of the storage register both by brute force
//! ([`protocol::oracle_reduced`]) and in closed form ([`analytic`]), and
//! classifies each subset as fully informative, partially informative or
//! completely uninformative ([`classify`]).

pub mod analytic;
pub mod classify;
pub mod error;
pub mod linalg;
pub mod modnum;
pub mod pauli;
pub mod protocol;
pub mod sweep;

pub use error::{Error, Result};
pub use modnum::Dim;
