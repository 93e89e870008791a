//! Exact and high-precision machinery for finding and certifying torsion
//! specialisations of elliptic schemes at sums of roots of unity.

pub mod arith;
pub mod precise;
pub mod cyclotomic;
pub mod extension;
pub mod elliptic;
pub mod analytic;
pub mod torus;
pub mod search;
pub mod counting;
pub mod cli;
