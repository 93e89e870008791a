pub mod field;
pub mod sl2;
pub mod tuple;

pub use field::{cyclotomic_polynomial, euler_phi, CyclotomicField, CyclotomicNumber};
pub use sl2::{sl2_torsion_order, Sl2Order};
pub use tuple::RootOfUnityTuple;
