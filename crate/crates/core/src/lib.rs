//! Random 2-QSAT instances with product constraints: generation,
//! satisfiability, frozen-qubit structure and exact ground-space dimensions.

pub mod constraint;
pub mod counting;
pub mod error;
pub mod exactq;
pub mod graph;
pub mod instance;
pub mod seed;
pub mod stats;
pub mod structure;
pub mod sweep;
