//! Wall potential from the balance of ion and electron fluxes.

use sheath_core::dists::{DistributionSpec, ElectronModel};
use sheath_core::numerics::roots::bisect;
use sheath_core::SheathError;

/// Solves `n_e(phi_0) v_e = flux(f_inf)` on `[-phi_max, phi_max]`.
///
/// Only the absorbing wall is covered: `f_b` must vanish and `alpha` must be 0.
pub fn reduce_wall_potential(
    f_inf: &DistributionSpec,
    f_b: &DistributionSpec,
    alpha: f64,
    v_e: f64,
    electrons: &ElectronModel,
    phi_max: f64,
) -> Result<f64, SheathError> {
    if !f_b.is_zero() || alpha != 0.0 {
        return Err(SheathError::ReductionUnsupported);
    }
    if !(v_e.is_finite() && v_e != 0.0) {
        return Err(SheathError::InvalidInput("v_e must be finite and nonzero".into()));
    }
    let ratio = f_inf.flux() / v_e;
    if !(ratio > 0.0) {
        return Err(SheathError::NoRoot(format!("flux / v_e = {ratio} is not positive")));
    }
    if (ratio - 1.0).abs() <= f64::EPSILON {
        return Ok(0.0);
    }
    bisect(|phi| electrons.density(phi) - ratio, -phi_max, phi_max, 1e-15)
        .ok_or_else(|| SheathError::NoRoot(format!("n_e does not reach {ratio} on [-{phi_max}, {phi_max}]")))
}
