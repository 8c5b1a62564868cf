//! Stationary plasma sheaths on a half-line: kinetic and fluid descriptions.

pub mod dists;
pub mod error;
pub mod hydro;
pub mod kernels;
pub mod numerics;
pub mod sagdeev;
pub mod sheath;

pub use error::{Result, SheathError};
