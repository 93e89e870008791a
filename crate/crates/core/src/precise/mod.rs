pub mod complex;
pub mod real;
pub mod roots;

pub use complex::{Complex, Cx};
pub use real::Real;
