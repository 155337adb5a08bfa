//! Loop-group construction of timelike minimal surfaces in Nil₃.

pub mod factorization;
mod linalg;
pub mod loops;
pub mod paracomplex;
pub mod geometry;
pub mod pipeline;
