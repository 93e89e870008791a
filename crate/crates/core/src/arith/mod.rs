pub mod expr;
pub mod fp;
pub mod linalg;
pub mod poly;
pub mod quotient;
pub mod ratfunc;
pub mod ring;
