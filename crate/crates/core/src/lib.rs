//! Schematic CERES: cut-elimination by resolution for proof schemata.
//!
//! The crate covers the schematic term language, the sequent calculi with
//! proof links, characteristic clause-set and projection schemata,
//! resolution refutation schemata, and the assembly of atomic-cut normal
//! forms for each instance of the parameter.

pub mod acnf;
pub mod calculus;
pub mod charset;
pub mod clause;
pub mod dsl;
pub mod projection;
pub mod resolution;
pub mod term;
