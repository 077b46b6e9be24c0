//! Desk-scale lab for the combinatorics and analysis of thin frequency sets:
//! relation counting and quasi-independent extraction, matroid partitioning
//! over GF(p), Orlicz/subgaussian norm estimation, Riesz products and L1
//! interpolation, packing nets and entropy integrals, Mehler-kernel operators
//! with certified tensor decompositions, constant-weight code packings, and
//! BMO norms on the discretized circle.

pub mod bmo;
pub mod cli;
pub mod codes;
mod error;
pub mod gaussian;
pub mod matroid;
pub mod relations;
pub mod riesz;
pub mod spectrum;
pub mod subgauss;

pub use error::{Error, Result};
