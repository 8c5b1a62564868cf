//! Cold-ion fluid models and the delta-mass convergence study.
//!
//! Both fluid models are sums of cold beams `w v / sqrt(v^2 + 2 phi)`, so their
//! pseudopotentials go through the same profile solver as the kinetic problem.

use rayon::prelude::*;
use serde::Serialize;

use crate::dists::{make_delta_family, BoundaryConfig, DeltaFamily, DistributionSpec, ElectronModel, GeneralParams, Mollifier};
use crate::error::{Result, SheathError};
use crate::kernels::KernelContext;
use crate::sagdeev::{build_sagdeev, log_grid, Classification, Extent, Pseudopotential, SagdeevOptions, Side};
use crate::sheath::{Moments, PotentialProfile, SheathSolution};

/// Fraction of the beam turning point `-v^2/2` usable on the repulsive side.
const EDGE_FRACTION: f64 = 0.99;

/// Which fluid model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HydroModel {
    EulerPoisson { u_inf: f64 },
    Generalized(GeneralParams),
}

impl HydroModel {
    /// `(weight, speed)` of each cold beam.
    fn beams(&self) -> Vec<(f64, f64)> {
        match *self {
            HydroModel::EulerPoisson { u_inf } => vec![(1.0, u_inf)],
            HydroModel::Generalized(p) => [(p.m_b, p.v_b), ((1.0 + p.alpha) * p.m_inf, p.v_inf)]
                .into_iter()
                .filter(|(w, _)| *w > 0.0)
                .collect(),
        }
    }

    pub fn density(&self, phi: f64) -> f64 {
        self.beams().iter().map(|(w, v)| w * v / (v * v + 2.0 * phi).sqrt()).sum()
    }

    /// `rho u`.
    pub fn flux(&self) -> f64 {
        match *self {
            HydroModel::EulerPoisson { u_inf } => -u_inf,
            HydroModel::Generalized(p) => p.flux(),
        }
    }

    pub fn velocity(&self, phi: f64) -> f64 {
        match *self {
            HydroModel::EulerPoisson { u_inf } => -(u_inf * u_inf + 2.0 * phi).sqrt(),
            HydroModel::Generalized(_) => self.flux() / self.density(phi),
        }
    }

    /// `(rho(phi) - 1) / phi` without cancellation.
    fn density_slope(&self, phi: f64) -> f64 {
        self.beams()
            .iter()
            .map(|(w, v)| {
                let s = (v * v + 2.0 * phi).sqrt();
                -2.0 * w / (s * (v + s))
            })
            .sum()
    }

    /// Lowest potential the beams can climb.
    fn turning_point(&self) -> f64 {
        self.beams().iter().fold(f64::NEG_INFINITY, |m, (_, v)| m.max(-0.5 * v * v))
    }

    fn validate(&self) -> Result<()> {
        match self {
            HydroModel::EulerPoisson { u_inf } if !(*u_inf >= 1.0) => Err(SheathError::BohmViolated(*u_inf)),
            HydroModel::Generalized(p) => {
                p.check_velocity1().map_err(SheathError::Velocity1Violated)?;
                crate::dists::check_alpha(p.alpha)
            }
            _ => Ok(()),
        }
    }
}

/// A fluid solution on a uniform grid.
#[derive(Debug, Clone)]
pub struct HydroSolution {
    pub model: HydroModel,
    pub profile: PotentialProfile,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    /// `sup B` or `inf B` of the fluid pseudopotential.
    pub extent: Extent,
    pub classification: Classification,
}

impl HydroSolution {
    pub fn x(&self) -> &[f64] {
        &self.profile.x
    }

    pub fn phi(&self) -> &[f64] {
        &self.profile.phi
    }

    pub fn phi_at(&self, x: f64) -> f64 {
        self.profile.phi_at(x)
    }

    pub fn rho_at(&self, x: f64) -> f64 {
        self.model.density(self.phi_at(x))
    }

    /// `max |k u D u - D phi|` with `k = 1` for Euler–Poisson and `((1+alpha)/(1-alpha))^2`
    /// for the reflecting model without emission; `None` when emission is present.
    pub fn momentum_residual(&self) -> Option<f64> {
        let k = match self.model {
            HydroModel::EulerPoisson { .. } => 1.0,
            HydroModel::Generalized(p) if p.m_b == 0.0 => ((1.0 + p.alpha) / (1.0 - p.alpha)).powi(2),
            HydroModel::Generalized(_) => return None,
        };
        let h = self.profile.x[1] - self.profile.x[0];
        let du = derivative(&self.u, h);
        let dphi = derivative(&self.profile.phi, h);
        Some(self.u.iter().zip(&du).zip(&dphi).map(|((u, du), dp)| (k * u * du - dp).abs()).fold(0.0, f64::max))
    }

    /// `max |D(rho u)|`.
    pub fn mass_residual(&self) -> f64 {
        let m: Vec<f64> = self.rho.iter().zip(&self.u).map(|(r, u)| r * u).collect();
        let h = self.profile.x[1] - self.profile.x[0];
        derivative(&m, h).iter().fold(0.0, |a, d| a.max(d.abs()))
    }
}

fn derivative(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| match i {
            0 => (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h),
            i if i == n - 1 => (3.0 * v[i] - 4.0 * v[i - 1] + v[i - 2]) / (2.0 * h),
            i if i >= 2 && i + 2 < n => (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h),
            i => (v[i + 1] - v[i - 1]) / (2.0 * h),
        })
        .collect()
}

/// Solver settings shared by the fluid and kinetic paths.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroOptions {
    pub sagdeev: SagdeevOptions,
    pub points: usize,
}

impl Default for HydroOptions {
    fn default() -> Self {
        Self { sagdeev: SagdeevOptions::default(), points: crate::sheath::DEFAULT_POINTS }
    }
}

/// Solves the chosen fluid model for `phi(0) = phi_b`.
pub fn solve_hydro(model: HydroModel, phi_b: f64, electrons: &ElectronModel, opts: &HydroOptions) -> Result<HydroSolution> {
    model.validate()?;
    let side = Side::of(phi_b);
    let reach = match side {
        Side::Attractive => opts.sagdeev.phi_max,
        Side::Repulsive => opts.sagdeev.phi_max.min(-EDGE_FRACTION * model.turning_point()),
    };
    let (lo, hi) = match side {
        Side::Attractive => (0.0, reach),
        Side::Repulsive => (-reach, 0.0),
    };
    electrons.check_positive(lo, hi)?;
    let q = |phi: f64| model.density_slope(phi) - electrons.excess_over_phi(phi);
    let d2v0 = q(0.0);
    let potential = Pseudopotential::build(side, reach, q, d2v0, &[]);
    let grid = log_grid(side, reach, opts.sagdeev.grid);
    let classification = potential.classify(d2v0, opts.sagdeev.tau, &grid);
    match classification {
        Classification::Violated => return Err(SheathError::BohmViolated(d2v0)),
        Classification::MarginalEmpty => return Err(SheathError::NoSolutionEmptyB),
        _ => {}
    }
    let extent = potential.extent(&grid, classification);
    let bound = extent.magnitude().unwrap_or(0.0);
    if phi_b.abs() >= bound {
        return Err(SheathError::PhiBOutOfRange { phi_b, bound });
    }
    let rate = (classification == Classification::Strict).then(|| d2v0.sqrt());
    let profile = PotentialProfile::from_potential(&potential, phi_b, rate, opts.points)?;
    let rho = profile.phi.iter().map(|&p| model.density(p)).collect();
    let u = profile.phi.iter().map(|&p| model.velocity(p)).collect();
    Ok(HydroSolution { model, profile, rho, u, extent, classification })
}

/// Euler–Poisson with far-field speed `u_inf`.
pub fn solve_euler_poisson(u_inf: f64, phi_b: f64, electrons: &ElectronModel, opts: &HydroOptions) -> Result<HydroSolution> {
    solve_hydro(HydroModel::EulerPoisson { u_inf }, phi_b, electrons, opts)
}

/// The reflecting and emitting fluid model.
pub fn solve_generalized(params: GeneralParams, phi_b: f64, electrons: &ElectronModel, opts: &HydroOptions) -> Result<HydroSolution> {
    solve_hydro(HydroModel::Generalized(params), phi_b, electrons, opts)
}

/// Family used by [`delta_mass_study`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyScenario {
    Absorbing { u_inf: f64 },
    General(GeneralParams),
}

impl StudyScenario {
    fn family(&self, phi_b: f64) -> DeltaFamily {
        match *self {
            StudyScenario::Absorbing { u_inf } => DeltaFamily::Absorbing { u_inf },
            StudyScenario::General(params) => DeltaFamily::General { params, phi_b },
        }
    }

    fn model(&self) -> HydroModel {
        match *self {
            StudyScenario::Absorbing { u_inf } => HydroModel::EulerPoisson { u_inf },
            StudyScenario::General(p) => HydroModel::Generalized(p),
        }
    }

    fn alpha(&self) -> f64 {
        match self {
            StudyScenario::Absorbing { .. } => 0.0,
            StudyScenario::General(p) => p.alpha,
        }
    }
}

/// Errors between kinetic and fluid solutions over a list of spreads.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceStudy {
    pub eps: Vec<f64>,
    pub err_rho: Vec<f64>,
    pub err_flux: Vec<f64>,
    pub err_phi: Vec<f64>,
    /// Log-log slope of the summed error; needs three or more spreads.
    pub slope: Option<f64>,
    /// Slopes of `err_rho`, `err_flux`, `err_phi`.
    pub component_slopes: Option<[f64; 3]>,
    #[serde(rename = "C0_estimate")]
    pub c0_estimate: f64,
    /// Absorbing family with non-Boltzmann electrons.
    pub outside_theorem: bool,
}

impl ConvergenceStudy {
    pub fn total(&self) -> Vec<f64> {
        (0..self.eps.len()).map(|i| self.err_rho[i] + self.err_flux[i] + self.err_phi[i]).collect()
    }

    /// Each error sequence strictly decreases as the spread shrinks.
    pub fn monotone(&self) -> bool {
        let mut order: Vec<usize> = (0..self.eps.len()).collect();
        order.sort_by(|&a, &b| self.eps[b].total_cmp(&self.eps[a]));
        [&self.err_rho, &self.err_flux, &self.err_phi]
            .iter()
            .all(|e| order.windows(2).all(|w| e[w[1]] < e[w[0]]))
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Settings for [`delta_mass_study`].
#[derive(Debug, Clone, PartialEq)]
pub struct StudyOptions {
    pub solver: HydroOptions,
    pub mollifier: Mollifier,
    pub electrons: ElectronModel,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self { solver: HydroOptions::default(), mollifier: Mollifier::Offset, electrons: ElectronModel::Boltzmann }
    }
}

/// Kinetic solution for one spread of the family.
pub fn kinetic_member(scenario: &StudyScenario, phi_b: f64, eps: f64, opts: &StudyOptions) -> Result<SheathSolution> {
    let (f_b, f_inf): (DistributionSpec, DistributionSpec) = make_delta_family(&scenario.family(phi_b), eps, opts.mollifier)?;
    let bc = BoundaryConfig::new(phi_b, scenario.alpha())?;
    let ctx = KernelContext::new(f_inf, f_b, bc)?;
    let data = build_sagdeev(&ctx, &opts.electrons, Side::of(phi_b), &opts.solver.sagdeev)?;
    SheathSolution::solve(&data, phi_b, opts.solver.points)
}

/// One spread of a study: the kinetic solution and its moments.
#[derive(Debug, Clone)]
pub struct StudyMember {
    pub eps: f64,
    pub solution: SheathSolution,
    pub moments: Moments,
}

/// Sup-norm distances between kinetic solutions and their fluid limit.
pub fn delta_mass_study(scenario: StudyScenario, phi_b: f64, eps_list: &[f64], opts: &StudyOptions) -> Result<ConvergenceStudy> {
    delta_mass_runs(scenario, phi_b, eps_list, opts).map(|(study, _)| study)
}

/// [`delta_mass_study`], also returning the kinetic members in the order of `eps_list`.
pub fn delta_mass_runs(
    scenario: StudyScenario,
    phi_b: f64,
    eps_list: &[f64],
    opts: &StudyOptions,
) -> Result<(ConvergenceStudy, Vec<StudyMember>)> {
    if eps_list.is_empty() {
        return Err(SheathError::InvalidInput("empty eps list".into()));
    }
    let limit = scenario.family(phi_b).eps0();
    if let Some(&eps) = eps_list.iter().find(|&&e| !(e > 0.0 && e < limit)) {
        return Err(SheathError::RejectEps { eps, limit });
    }
    let fluid = solve_hydro(scenario.model(), phi_b, &opts.electrons, &opts.solver)?;
    let members: Vec<StudyMember> = eps_list
        .par_iter()
        .map(|&eps| {
            let solution = kinetic_member(&scenario, phi_b, eps, opts)?;
            let moments = solution.moments();
            Ok(StudyMember { eps, solution, moments })
        })
        .collect::<Result<_>>()?;
    let rows: Vec<[f64; 3]> = members
        .iter()
        .map(|m| {
            let mut err = [0.0f64; 3];
            for (i, &x) in m.solution.profile.x.iter().enumerate() {
                let phi_h = fluid.phi_at(x);
                err[0] = err[0].max((m.moments.rho[i] - fluid.model.density(phi_h)).abs());
                err[1] = err[1].max((m.moments.flux[i] - fluid.model.flux()).abs());
                err[2] = err[2].max((m.solution.profile.phi[i] - phi_h).abs());
            }
            err
        })
        .collect();
    let eps = eps_list.to_vec();
    let pick = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let (err_rho, err_flux, err_phi) = (pick(0), pick(1), pick(2));
    let total: Vec<f64> = rows.iter().map(|r| r.iter().sum()).collect();
    let fit = eps.len() >= 3;
    let study = ConvergenceStudy {
        slope: fit.then(|| log_log_slope(&eps, &total)),
        component_slopes: fit.then(|| [log_log_slope(&eps, &err_rho), log_log_slope(&eps, &err_flux), log_log_slope(&eps, &err_phi)]),
        c0_estimate: total.iter().zip(&eps).map(|(t, e)| t / e).fold(0.0, f64::max),
        outside_theorem: matches!(scenario, StudyScenario::Absorbing { .. }) && opts.electrons != ElectronModel::Boltzmann,
        eps,
        err_rho,
        err_flux,
        err_phi,
    };
    Ok((study, members))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> HydroOptions {
        HydroOptions::default()
    }

    #[test]
    fn euler_poisson_identities() {
        let sol = solve_euler_poisson(2.0, 0.1, &ElectronModel::Boltzmann, &opts()).unwrap();
        for (&r, &p) in sol.rho.iter().zip(sol.phi()) {
            assert!((r * (4.0 + 2.0 * p).sqrt() - 2.0).abs() < 1e-12);
        }
        assert!(sol.momentum_residual().unwrap() < 1e-6);
        assert!(sol.mass_residual() < 1e-8);
        assert!(sol.phi().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn euler_poisson_refusals() {
        let e = solve_euler_poisson(0.5, 0.1, &ElectronModel::Boltzmann, &opts()).unwrap_err();
        assert_eq!(e.code(), "BOHM_VIOLATED");
        let poly = ElectronModel::polynomial(vec![1.0, -1.0, 1.0]).unwrap();
        let small = HydroOptions { sagdeev: SagdeevOptions { phi_max: 2.0, ..Default::default() }, ..opts() };
        let e = solve_euler_poisson(2.0, 1.5, &poly, &small).unwrap_err();
        assert_eq!(e.code(), "PHI_B_OUT_OF_RANGE");
    }

    #[test]
    fn trivial_fluid_state() {
        let sol = solve_euler_poisson(2.0, 0.0, &ElectronModel::Boltzmann, &opts()).unwrap();
        assert!(sol.rho.iter().all(|&r| r == 1.0));
        assert!(sol.u.iter().all(|&u| u == -2.0));
    }

    #[test]
    fn reflecting_model_without_emission() {
        let p = GeneralParams { m_b: 0.0, m_inf: 1.0 / 1.5, v_b: 1.0, v_inf: 2.0, alpha: 0.5 };
        let sol = solve_generalized(p, -0.05, &ElectronModel::Boltzmann, &opts()).unwrap();
        assert!(sol.momentum_residual().unwrap() < 1e-6);
        let far = *sol.u.last().unwrap();
        assert!((far - (p.alpha - 1.0) / (p.alpha + 1.0) * p.v_inf).abs() < 1e-6);
    }

    #[test]
    fn generalized_reduces_to_euler_poisson() {
        let p = GeneralParams { m_b: 0.0, m_inf: 1.0, v_b: 1.0, v_inf: 2.0, alpha: 0.0 };
        let g = solve_generalized(p, 0.1, &ElectronModel::Boltzmann, &opts()).unwrap();
        let e = solve_euler_poisson(2.0, 0.1, &ElectronModel::Boltzmann, &opts()).unwrap();
        for (a, b) in g.phi().iter().zip(e.phi()) {
            assert!((a - b).abs() < 1e-8);
        }
        for (a, b) in g.u.iter().zip(&e.u) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn generalized_flux_is_constant() {
        let p = GeneralParams { m_b: 0.2, m_inf: 0.8 / 1.5, v_b: 2.0, v_inf: 2.0, alpha: 0.5 };
        let sol = solve_generalized(p, 0.05, &ElectronModel::Boltzmann, &opts()).unwrap();
        for (r, u) in sol.rho.iter().zip(&sol.u) {
            assert!((r * u - p.flux()).abs() < 1e-10);
        }
        let bad = GeneralParams { m_inf: 0.4, ..p };
        assert_eq!(solve_generalized(bad, 0.05, &ElectronModel::Boltzmann, &opts()).unwrap_err().code(), "VELOCITY1_VIOLATED");
    }

    #[test]
    fn slope_of_power_law() {
        let x = [0.2, 0.1, 0.05];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powf(1.5)).collect();
        assert!((log_log_slope(&x, &y) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn single_spread_has_no_slope() {
        let o = StudyOptions { solver: HydroOptions { points: 2000, ..opts() }, ..Default::default() };
        let s = delta_mass_study(StudyScenario::Absorbing { u_inf: 2.0 }, 0.05, &[0.1], &o).unwrap();
        assert!(s.slope.is_none());
        assert!(s.err_rho[0] > 0.0 && s.err_flux[0] > 0.0 && s.err_phi[0] > 0.0);
        let e = delta_mass_study(StudyScenario::Absorbing { u_inf: 2.0 }, 0.05, &[0.6], &o).unwrap_err();
        assert_eq!(e.code(), "REJECT_EPS");
    }
}
