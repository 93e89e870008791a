//! Period lattices, elliptic logarithms and Betti coordinates, generic over
//! the scalar type ([`Complex64`](num_complex::Complex64) for screening,
//! [`Complex`](crate::precise::Complex) for certified work).

pub mod betti;
pub mod ellog;
pub mod lattice;
pub mod reconstruct;

pub use betti::{a_coordinates, betti_coordinates, theta_map, BettiCoords, LatticeCache, LogPoint};
pub use ellog::{elliptic_log, exp_map, EllipticLog};
pub use lattice::{period_lattice, PeriodLattice};
pub use reconstruct::{rational_reconstruct, ReconstructError};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalyticError {
    #[error("singular curve")]
    Singular,
    #[error("no convergence at {bits} bits")]
    NoConvergence { bits: u32 },
    #[error("degenerate lattice")]
    DegenerateLattice,
    #[error("zero coordinate")]
    ZeroCoordinate,
    #[error("evaluation hit a pole")]
    Pole,
    #[error("point too close to a branch locus for {bits} bits")]
    Unstable { bits: u32 },
}
