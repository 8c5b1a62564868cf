//! Ion density as a function of the potential.
//!
//! Every kernel depends on `xi1` only, so each density is a 1D integral against the
//! marginal of the far-field (or wall) distribution. Square-root singularities are
//! removed by substitution before any quadrature runs.

use serde::Serialize;

use crate::dists::{BoundaryConfig, DistributionSpec, MarginalPiece};
use crate::error::{Result, SheathError};
use crate::numerics::quad::{integrate, QuadOptions};

/// Which density formula applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DensityKind {
    /// `phi_b >= 0`, no wall emission, no reflection.
    Absorbing,
    /// `phi_b > 0` with emission or reflection.
    Attractive,
    /// `phi_b < 0`.
    Repulsive,
}

/// Inputs shared by all density evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelContext {
    pub f_inf: DistributionSpec,
    pub f_b: DistributionSpec,
    pub bc: BoundaryConfig,
    pub quad: QuadOptions,
    /// Hoelder exponent for the bound checks.
    pub r: f64,
}

impl KernelContext {
    pub fn new(f_inf: DistributionSpec, f_b: DistributionSpec, bc: BoundaryConfig) -> Result<Self> {
        f_inf.validate()?;
        f_b.validate()?;
        bc.validate()?;
        Ok(Self { f_inf, f_b, bc, quad: QuadOptions::default(), r: 3.0 })
    }

    /// Formula selected by the wall data.
    pub fn kind(&self) -> DensityKind {
        if self.bc.phi_b < 0.0 {
            DensityKind::Repulsive
        } else {
            self.attractive_kind()
        }
    }

    /// Formula for nonnegative potentials.
    pub fn attractive_kind(&self) -> DensityKind {
        if self.f_b.is_zero() && self.bc.alpha == 0.0 {
            DensityKind::Absorbing
        } else {
            DensityKind::Attractive
        }
    }

    /// `int f (-xi1) / sqrt(xi1^2 + 2 phi)`.
    pub fn rho_i(&self, phi: f64) -> Result<f64> {
        if phi < 0.0 {
            return Err(SheathError::Domain { phi });
        }
        Ok(self.f_inf.integrate_against(|x| -x / (x * x + 2.0 * phi).sqrt(), &[], &self.quad))
    }

    /// Attractive density: far-field term with `|xi1|` plus the wall-emission term.
    pub fn rho_i_plus(&self, phi: f64) -> Result<f64> {
        if phi < 0.0 {
            return Err(SheathError::Domain { phi });
        }
        let far = self.f_inf.integrate_against(|x| x.abs() / (x * x + 2.0 * phi).sqrt(), &[], &self.quad);
        Ok(far + self.wall_term(phi))
    }

    /// Repulsive density, written as `int_0^inf G(sqrt(z^2 + a^2)) dz` with `a^2 = -2 phi`.
    pub fn rho_i_minus(&self, phi: f64) -> Result<f64> {
        if phi > 0.0 {
            return Err(SheathError::Domain { phi });
        }
        let a = (-2.0 * phi).sqrt();
        let mut total = 0.0;
        for p in self.f_inf.pieces() {
            for (sign, t_lo, t_hi) in half_lines(&p) {
                if t_hi <= a {
                    continue;
                }
                let t0 = t_lo.max(a);
                let (z0, z1) = ((t0 * t0 - a * a).max(0.0).sqrt(), (t_hi * t_hi - a * a).sqrt());
                total += integrate(|z| p.value(sign * (z * z + a * a).sqrt()), z0, z1, &self.quad);
            }
        }
        Ok(total)
    }

    /// Density by the given formula.
    pub fn density(&self, kind: DensityKind, phi: f64) -> Result<f64> {
        match kind {
            DensityKind::Absorbing => self.rho_i(phi),
            DensityKind::Attractive => self.rho_i_plus(phi),
            DensityKind::Repulsive => self.rho_i_minus(phi),
        }
    }

    /// Density at `phi = 0`.
    pub fn density_at_zero(&self, kind: DensityKind) -> f64 {
        match kind {
            DensityKind::Absorbing => self.f_inf.integrate_against(|x| -x.signum(), &[], &self.quad),
            _ => self.f_inf.integrate_against(|_| 1.0, &[], &self.quad),
        }
    }

    /// `(density(phi) - density(0)) / phi`, evaluated without cancellation; at `phi = 0`
    /// this is the derivative, minus the Bohm integral.
    pub fn density_slope(&self, kind: DensityKind, phi: f64) -> Result<f64> {
        match kind {
            DensityKind::Absorbing | DensityKind::Attractive if phi < 0.0 => return Err(SheathError::Domain { phi }),
            DensityKind::Repulsive if phi > 0.0 => return Err(SheathError::Domain { phi }),
            _ => {}
        }
        if phi == 0.0 && self.f_inf.kinetic_bohm_integral().value().is_infinite() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(match kind {
            DensityKind::Absorbing => self.f_inf.integrate_against(
                |x| {
                    let s = (x * x + 2.0 * phi).sqrt();
                    2.0 * x.signum() / (s * (x.abs() + s))
                },
                &[],
                &self.quad,
            ),
            DensityKind::Attractive => {
                let far = self.f_inf.integrate_against(
                    |x| {
                        let s = (x * x + 2.0 * phi).sqrt();
                        -2.0 / (s * (x.abs() + s))
                    },
                    &[],
                    &self.quad,
                );
                let wall = if phi == 0.0 {
                    let edge = (2.0 * self.bc.phi_b).sqrt();
                    if self.f_b.marginal(edge) == 0.0 { 0.0 } else { f64::INFINITY }
                } else {
                    self.wall_term(phi) / phi
                };
                far + wall
            }
            DensityKind::Repulsive => self.repulsive_slope(phi),
        })
    }

    fn repulsive_slope(&self, phi: f64) -> f64 {
        let a = (-2.0 * phi).sqrt();
        let mut smooth = 0.0;
        let mut trapped = 0.0;
        for p in self.f_inf.pieces() {
            for (sign, t_lo, t_hi) in half_lines(&p) {
                if t_hi > a {
                    let t0 = t_lo.max(a);
                    let (z0, z1) = ((t0 * t0 - a * a).max(0.0).sqrt(), (t_hi * t_hi - a * a).sqrt());
                    smooth += integrate(
                        |z| {
                            let t = (z * z + a * a).sqrt();
                            p.value(sign * t) / (t * (t + z))
                        },
                        z0,
                        z1,
                        &self.quad,
                    );
                }
                if t_lo < a {
                    trapped += integrate(|t| p.value(sign * t), t_lo, t_hi.min(a), &self.quad);
                }
            }
        }
        if trapped == 0.0 {
            -2.0 * smooth
        } else {
            -2.0 * smooth + trapped / (-phi)
        }
    }

    /// Second term of the attractive density, after `z = sqrt(xi1^2 + 2(phi - phi_b))`.
    pub fn wall_term(&self, phi: f64) -> f64 {
        if self.f_b.is_zero() || phi <= 0.0 {
            return 0.0;
        }
        let phi_b = self.bc.phi_b;
        let lower = (2.0 * (phi - phi_b).max(0.0)).sqrt();
        let upper = (2.0 * phi).sqrt();
        let shift = 2.0 * (phi_b - phi);
        let mut pts = vec![lower];
        for p in self.f_b.pieces() {
            for edge in [p.lo, p.hi] {
                let d = edge * edge - shift;
                if d > 0.0 && d.sqrt() > lower && d.sqrt() < upper {
                    pts.push(d.sqrt());
                }
            }
        }
        pts.push(upper);
        pts.sort_by(f64::total_cmp);
        let g = |z: f64| self.f_b.marginal((z * z + shift).max(0.0).sqrt());
        let sum: f64 = pts.windows(2).map(|w| integrate(g, w[0], w[1], &self.quad)).sum();
        2.0 / (1.0 - self.bc.alpha) * sum
    }

    /// Checks the a-priori density bounds at each sample.
    pub fn bound_check(&self, samples: &[f64]) -> BoundReport {
        let mut entries = Vec::with_capacity(samples.len());
        let rp = self.r / (self.r - 1.0);
        let mass = self.f_inf.mass();
        for &phi in samples {
            let (rho, bound) = if phi >= 0.0 && self.bc.phi_b >= 0.0 {
                let rho = self.density(self.attractive_kind(), phi).unwrap_or(f64::NAN);
                let bound = if self.f_b.is_zero() {
                    mass
                } else {
                    let phi_b = self.bc.phi_b;
                    let edge = (2.0 * phi_b).sqrt();
                    let c = 2.0 / (1.0 - self.bc.alpha) * hoelder_kernel(2.0 * (phi_b - phi), edge, rp).powf(1.0 / rp);
                    mass + c * lr_norm(&self.f_b, 0.0, edge, self.r, &self.quad)
                };
                (rho, bound)
            } else if phi <= 0.0 && self.bc.phi_b <= 0.0 {
                let rho = self.rho_i_minus(phi).unwrap_or(f64::NAN);
                let m = phi.abs();
                let reach = 2.0 * m.sqrt();
                let c_m = if m == 0.0 { 0.0 } else { (2.0 * hoelder_kernel(-2.0 * phi, reach, rp)).powf(1.0 / rp) };
                let bound = 2f64.sqrt() * mass + c_m * lr_norm(&self.f_inf, -reach, reach, self.r, &self.quad);
                (rho, bound)
            } else {
                (f64::NAN, f64::NAN)
            };
            entries.push(BoundEntry { phi, rho, bound, slack: bound - rho });
        }
        BoundReport::from_entries(entries)
    }
}

fn half_lines(p: &MarginalPiece) -> Vec<(f64, f64, f64)> {
    let mut out = Vec::new();
    if p.hi > 0.0 {
        out.push((1.0, p.lo.max(0.0), p.hi));
    }
    if p.lo < 0.0 {
        out.push((-1.0, (-p.hi).max(0.0), -p.lo));
    }
    out
}

/// `int xi^r' (xi^2 - d)^(-r'/2) dxi` from `sqrt(max(d, 0))` to `upper`, via
/// `sqrt(xi^2 - d) = t^k`, `k = 1/(2 - r')`, which leaves the smooth integrand `k xi^(r'-1)`.
pub fn hoelder_kernel(d: f64, upper: f64, rp: f64) -> f64 {
    let top = upper * upper - d;
    if top <= 0.0 {
        return 0.0;
    }
    let k = 1.0 / (2.0 - rp);
    let z0 = (-d).max(0.0).sqrt();
    let (t0, t1) = (z0.powf(1.0 / k), top.sqrt().powf(1.0 / k));
    integrate(
        |t: f64| {
            let xi = (t.powf(2.0 * k) + d).max(0.0).sqrt();
            k * xi.powf(rp - 1.0)
        },
        t0,
        t1,
        &QuadOptions::default(),
    )
}

/// `(int_a^b g(xi1)^r dxi1)^(1/r)` for the marginal `g`.
pub fn lr_norm(f: &DistributionSpec, a: f64, b: f64, r: f64, opts: &QuadOptions) -> f64 {
    let mut pts = vec![a, b];
    for p in f.pieces() {
        pts.extend([p.lo, p.hi].into_iter().filter(|x| *x > a && *x < b));
    }
    pts.sort_by(f64::total_cmp);
    let s: f64 = pts.windows(2).map(|w| integrate(|x| f.marginal(x).powf(r), w[0], w[1], opts)).sum();
    s.powf(1.0 / r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundEntry {
    pub phi: f64,
    pub rho: f64,
    pub bound: f64,
    pub slack: f64,
}

/// Per-sample density bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub entries: Vec<BoundEntry>,
    pub min_slack: Option<f64>,
    pub max_slack: Option<f64>,
    pub pass: bool,
}

impl BoundReport {
    fn from_entries(entries: Vec<BoundEntry>) -> Self {
        let min_slack = entries.iter().map(|e| e.slack).reduce(f64::min);
        let max_slack = entries.iter().map(|e| e.slack).reduce(f64::max);
        let pass = entries.iter().all(|e| e.slack >= 0.0);
        Self { entries, min_slack, max_slack, pass }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dists::{delta_bump, make_delta_family, Bump, DeltaFamily, GeneralParams, Mollifier};

    fn cold(eps: f64) -> KernelContext {
        KernelContext::new(delta_bump(2.0, eps, Mollifier::Even).unwrap(), DistributionSpec::zero(), BoundaryConfig::absorbing(0.1)).unwrap()
    }

    #[test]
    fn rho_at_zero_is_mass() {
        let c = cold(0.01);
        assert!((c.rho_i(0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((c.rho_i_plus(0.0).unwrap() - 1.0).abs() < 1e-9);
        assert!((c.rho_i_minus(0.0).unwrap() - 1.0).abs() < 1e-9);
        assert_eq!(c.rho_i(-0.1).unwrap_err().code(), "DOMAIN");
        assert_eq!(c.rho_i_minus(0.1).unwrap_err().code(), "DOMAIN");
    }

    #[test]
    fn slope_matches_difference_quotient() {
        let c = cold(0.05);
        for &phi in &[1e-3, 0.1, 0.7] {
            let direct = (c.rho_i(phi).unwrap() - c.density_at_zero(DensityKind::Absorbing)) / phi;
            assert!((c.density_slope(DensityKind::Absorbing, phi).unwrap() - direct).abs() < 1e-10 / phi.min(1.0));
        }
        let k = c.f_inf.kinetic_bohm_integral().value();
        assert!((c.density_slope(DensityKind::Absorbing, 0.0).unwrap() + k).abs() < 1e-12);

        let rep = KernelContext { bc: BoundaryConfig::absorbing(-0.5), ..c.clone() };
        for &phi in &[-1e-3, -0.3, -1.9, -2.5] {
            let direct = (rep.rho_i_minus(phi).unwrap() - rep.density_at_zero(DensityKind::Repulsive)) / phi;
            assert!((rep.density_slope(DensityKind::Repulsive, phi).unwrap() - direct).abs() < 1e-9 / phi.abs().min(1.0), "{phi}");
        }
        assert!((rep.density_slope(DensityKind::Repulsive, 0.0).unwrap() + k).abs() < 1e-12);
    }

    #[test]
    fn repulsive_kernel_matches_direct_form_away_from_singularity() {
        let f = DistributionSpec::from_bumps(vec![Bump::on_axis(0.6, -1.5, 0.3), Bump::on_axis(0.4, 1.2, 0.2)]);
        let c = KernelContext::new(f.clone(), DistributionSpec::zero(), BoundaryConfig::absorbing(-1.0)).unwrap();
        let phi = -0.3;
        let direct = f.integrate_against(|x| if x * x + 2.0 * phi > 0.0 { x.abs() / (x * x + 2.0 * phi).sqrt() } else { 0.0 }, &[], &QuadOptions::default());
        assert!((c.rho_i_minus(phi).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn wall_term_continuous_across_phi_b() {
        let f_b = DistributionSpec::from_bumps(vec![Bump::on_axis(0.05, 0.6, 0.2)]).with_cutoff(crate::dists::Cutoff::Positive);
        let f_inf = DistributionSpec::from_bumps(vec![Bump::on_axis(1.0 / 1.3, -2.0, 0.05), Bump::on_axis(0.3 / 1.3, 2.0, 0.05)]);
        let c = KernelContext::new(f_inf, f_b, BoundaryConfig::new(0.5, 0.3).unwrap()).unwrap();
        assert_eq!(c.kind(), DensityKind::Attractive);
        let l = c.rho_i_plus(0.5 - 1e-12).unwrap();
        let r = c.rho_i_plus(0.5 + 1e-12).unwrap();
        assert!((l - r).abs() < 1e-8);
        assert!(c.wall_term(0.4) > 0.0 && c.wall_term(0.1) == 0.0);
    }

    #[test]
    fn second_term_vanishes_for_fast_emission() {
        let p = GeneralParams { m_b: 0.2, m_inf: 0.8 / 1.5, v_b: 2.0, v_inf: 2.0, alpha: 0.5 };
        let (fb, finf) = make_delta_family(&DeltaFamily::General { params: p, phi_b: 0.05 }, 0.05, Mollifier::Even).unwrap();
        let c = KernelContext::new(finf, fb, BoundaryConfig::new(0.05, 0.5).unwrap()).unwrap();
        for &phi in &[0.0, 0.02, 0.05] {
            assert_eq!(c.wall_term(phi), 0.0);
        }
    }

    #[test]
    fn bounds_hold() {
        let c = cold(0.05);
        let s: Vec<f64> = (0..20).map(|i| 0.1 * i as f64 / 19.0).collect();
        let rep = c.bound_check(&s);
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.entries.len(), 20);
        let empty = c.bound_check(&[]);
        assert!(empty.entries.is_empty() && empty.min_slack.is_none());
    }

    #[test]
    fn hoelder_kernel_closed_form() {
        // r' = 3/2, d = 0: int_0^u xi^{3/2} xi^{-3/2} = u
        assert!((hoelder_kernel(0.0, 0.7, 1.5) - 0.7).abs() < 1e-12);
        // d = 0.3, upper 1: reference from an independent singular-weight quadrature.
        assert!((hoelder_kernel(0.3, 1.0, 1.5) - 1.469_301_665_553_722_5).abs() < 1e-9);
    }
}
