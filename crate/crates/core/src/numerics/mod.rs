//! Quadrature, interpolation and root finding shared by the solvers.

pub mod cheb;
pub mod quad;
pub mod roots;
pub mod special;
