pub mod curve;
pub mod divpoly;
pub mod prescreen;
pub mod scheme;

pub use curve::{CurvePoint, WeierstrassCurve};
pub use divpoly::{division_polynomial, torsion_order_x, DivisionPolynomials, DivisionValues};
pub use prescreen::{torsion_prescreen, Prescreen, ReducedSection};
pub use scheme::{BadKind, BadPoint, BadSet, EllipticScheme, SchemeError, SchemeJson, Specialization, SpecializeError};
