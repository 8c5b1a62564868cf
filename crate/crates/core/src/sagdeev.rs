//! Sagdeev potentials, the Bohm classification, and the positivity bound of `V`.

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::dists::{BohmIntegral, ElectronModel};
use crate::error::{Result, SheathError};
use crate::kernels::{DensityKind, KernelContext};
use crate::numerics::cheb::{ChebOptions, PiecewiseCheb};
use crate::numerics::quad::gl24;
use crate::numerics::roots::bisect;

/// Default scan range for the positivity bound.
pub const DEFAULT_PHI_MAX: f64 = 10.0;
/// Default number of grid points.
pub const DEFAULT_GRID: usize = 10_000;
/// Half-width of the marginal band around `d2V0 = 0`.
pub const DEFAULT_TAU: f64 = 2e-4;
/// Chebyshev tolerance for the reduced force; kept above the quadrature noise floor.
const FIT_TOL: f64 = 1e-11;

/// Sign of the wall potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Attractive,
    Repulsive,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Attractive => 1.0,
            Side::Repulsive => -1.0,
        }
    }

    pub fn of(phi_b: f64) -> Self {
        if phi_b < 0.0 { Side::Repulsive } else { Side::Attractive }
    }
}

/// A pseudopotential `V(phi) = int_0^phi t q(t) dt` on one side of zero, with the
/// reduced force `q = (rho - n_e) / phi` held as a piecewise Chebyshev series in `|phi|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pseudopotential {
    side: Side,
    reach: f64,
    slope: PiecewiseCheb,
    cumulative: Vec<f64>,
    at_zero: f64,
}

impl Pseudopotential {
    /// `q` receives signed potentials; `breaks` are magnitudes where `q` may lose smoothness.
    pub fn build<Q: Fn(f64) -> f64>(side: Side, reach: f64, q: Q, at_zero: f64, breaks: &[f64]) -> Self {
        let s = side.sign();
        let slope = PiecewiseCheb::build(|p| q(s * p), 0.0, reach, breaks, &ChebOptions { tol: FIT_TOL, ..ChebOptions::default() });
        let mut cumulative = Vec::with_capacity(slope.pieces.len());
        let mut acc = 0.0;
        for piece in &slope.pieces {
            cumulative.push(acc);
            acc += gl24().integrate(|t| t * piece.eval(t), piece.a, piece.b);
        }
        Self { side, reach, slope, cumulative, at_zero }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// Largest `|phi|` covered.
    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// `(rho - n_e) / phi`.
    pub fn reduced_force(&self, phi: f64) -> f64 {
        if phi == 0.0 { self.at_zero } else { self.slope.eval(phi.abs()) }
    }

    /// `rho - n_e`.
    pub fn force(&self, phi: f64) -> f64 {
        phi * self.reduced_force(phi)
    }

    /// `V(phi) / phi^2`, accurate down to `phi = 0`.
    pub fn value_over_square(&self, phi: f64) -> f64 {
        let p = phi.abs();
        if p == 0.0 {
            return 0.5 * self.at_zero;
        }
        let k = self.slope.locate(p);
        let piece = &self.slope.pieces[k];
        if k == 0 {
            gl24().integrate(|t| t * piece.eval(t * p), 0.0, 1.0)
        } else {
            (self.cumulative[k] + gl24().integrate(|t| t * piece.eval(t), piece.a, p)) / (p * p)
        }
    }

    pub fn value(&self, phi: f64) -> f64 {
        self.value_over_square(phi) * phi * phi
    }

    /// Edges of the pieces of the reduced-force fit, in `|phi|`.
    pub fn piece_edges(&self) -> Vec<f64> {
        self.slope.pieces.iter().map(|p| p.a).chain([self.reach]).collect()
    }

    /// `V''(0)`.
    pub fn curvature_at_zero(&self) -> f64 {
        self.at_zero
    }

    /// First sign change of `V` away from zero, by grid scan then bisection.
    fn first_root(&self, grid: &[f64]) -> Option<f64> {
        let k = grid.iter().skip(1).position(|&p| self.value(p) <= 0.0)? + 1;
        bisect(|p| self.value(p), grid[k - 1].abs().max(grid[1].abs() * 1e-3) * self.side.sign(), grid[k], 1e-10)
    }

    /// Verdict from the curvature at zero and the sign of `V` on the first grid points.
    pub fn classify(&self, d2v0: f64, tau: f64, grid: &[f64]) -> Classification {
        if !d2v0.is_finite() || d2v0 < -tau {
            Classification::Violated
        } else if d2v0 > tau {
            Classification::Strict
        } else if grid.iter().skip(1).take(10).all(|&p| self.value(p) > 0.0) {
            Classification::MarginalSolvable
        } else {
            Classification::MarginalEmpty
        }
    }

    /// Positivity bound on `grid`, for solvable classifications.
    pub fn extent(&self, grid: &[f64], classification: Classification) -> Extent {
        if !classification.solvable() {
            return Extent::NotApplicable;
        }
        match self.first_root(grid) {
            Some(r) => Extent::Finite(r),
            None => Extent::Unbounded(grid[grid.len() - 1]),
        }
    }
}

/// Solvability verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, DeriveSerialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Classification {
    Strict,
    MarginalSolvable,
    MarginalEmpty,
    Violated,
}

impl Classification {
    pub fn label(self) -> &'static str {
        match self {
            Classification::Strict => "STRICT",
            Classification::MarginalSolvable => "MARGINAL_SOLVABLE",
            Classification::MarginalEmpty => "MARGINAL_EMPTY",
            Classification::Violated => "VIOLATED",
        }
    }

    pub fn is_marginal(self) -> bool {
        matches!(self, Classification::MarginalSolvable | Classification::MarginalEmpty)
    }

    pub fn solvable(self) -> bool {
        matches!(self, Classification::Strict | Classification::MarginalSolvable)
    }
}

/// `sup B` (or `inf B`): where `V` first stops being positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extent {
    Finite(f64),
    Unbounded(f64),
    NotApplicable,
}

impl Extent {
    /// Largest admissible `|phi_b|` (exclusive).
    pub fn magnitude(self) -> Option<f64> {
        match self {
            Extent::Finite(v) => Some(v.abs()),
            Extent::Unbounded(v) => Some(v.abs()),
            Extent::NotApplicable => None,
        }
    }
}

impl Serialize for Extent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extent::Finite(v) => s.serialize_f64(*v),
            Extent::Unbounded(v) => {
                let mut m = s.serialize_map(Some(1))?;
                m.serialize_entry("unbounded", v)?;
                m.end()
            }
            Extent::NotApplicable => s.serialize_str("NOT_APPLICABLE"),
        }
    }
}

impl Serialize for BohmIntegral {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            BohmIntegral::Finite(v) => s.serialize_f64(*v),
            BohmIntegral::Infinite => s.serialize_str("INFINITE"),
        }
    }
}

/// Build settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SagdeevOptions {
    pub phi_max: f64,
    pub grid: usize,
    pub tau: f64,
}

impl Default for SagdeevOptions {
    fn default() -> Self {
        Self { phi_max: DEFAULT_PHI_MAX, grid: DEFAULT_GRID, tau: DEFAULT_TAU }
    }
}

/// Everything known about `V` on one side.
#[derive(Debug, Clone)]
pub struct SagdeevData {
    pub side: Side,
    pub kind: DensityKind,
    pub phi_max: f64,
    pub tau: f64,
    pub grid: Vec<f64>,
    pub v_values: Vec<f64>,
    pub d2v0: f64,
    /// Fourth- and second-order one-sided difference estimates of `d2V0`.
    pub d2v0_fd4: f64,
    pub d2v0_fd2: f64,
    pub k: BohmIntegral,
    pub extent: Extent,
    pub classification: Classification,
    pub potential: Pseudopotential,
    pub ctx: KernelContext,
    pub electrons: ElectronModel,
}

/// Log-refined grid from `0` to `sign * phi_max`.
pub fn log_grid(side: Side, phi_max: f64, n: usize) -> Vec<f64> {
    let decades = 6.0;
    let span = 10f64.powf(decades) - 1.0;
    (0..n)
        .map(|k| {
            let t = k as f64 / (n - 1) as f64;
            side.sign() * phi_max * (10f64.powf(decades * t) - 1.0) / span
        })
        .collect()
}

/// Builds `V` (or `V+`, `V-`) and classifies the data.
pub fn build_sagdeev(ctx: &KernelContext, electrons: &ElectronModel, side: Side, opts: &SagdeevOptions) -> Result<SagdeevData> {
    let mass = ctx.f_inf.mass();
    if (mass - 1.0).abs() >= 1e-8 {
        return Err(SheathError::NeutralityViolation { mass });
    }
    match (side, ctx.bc.phi_b) {
        (Side::Attractive, p) if p < 0.0 => return Err(SheathError::InvalidInput("attractive side needs phi_b >= 0".into())),
        (Side::Repulsive, p) if p > 0.0 => return Err(SheathError::InvalidInput("repulsive side needs phi_b <= 0".into())),
        _ => {}
    }
    if !(opts.phi_max > 0.0 && opts.grid >= 16) {
        return Err(SheathError::InvalidInput("phi_max must be positive and grid at least 16".into()));
    }
    let s = side.sign();
    let (lo, hi) = if s > 0.0 { (0.0, opts.phi_max) } else { (-opts.phi_max, 0.0) };
    electrons.check_positive(lo, hi)?;

    let kind = match side {
        Side::Attractive => ctx.attractive_kind(),
        Side::Repulsive => DensityKind::Repulsive,
    };
    let k = ctx.f_inf.kinetic_bohm_integral();
    let q = |phi: f64| ctx.density_slope(kind, phi).unwrap_or(f64::NAN) - electrons.excess_over_phi(phi);

    let fd = |order4: bool| {
        let h = 1e-3 * s;
        let w = |j: f64| (j * h) * q(j * h);
        if order4 {
            (48.0 * w(1.0) - 36.0 * w(2.0) + 16.0 * w(3.0) - 3.0 * w(4.0)) / (12.0 * h)
        } else {
            (4.0 * w(1.0) - w(2.0)) / (2.0 * h)
        }
    };
    let (d2v0_fd4, d2v0_fd2) = if k == BohmIntegral::Infinite { (f64::NEG_INFINITY, f64::NEG_INFINITY) } else { (fd(true), fd(false)) };
    let d2v0 = match (k, kind) {
        (BohmIntegral::Infinite, _) => f64::NEG_INFINITY,
        (BohmIntegral::Finite(kv), DensityKind::Absorbing) => 1.0 - kv,
        _ => d2v0_fd4,
    };

    let mut breaks = Vec::new();
    if kind == DensityKind::Attractive && ctx.bc.phi_b > 0.0 {
        breaks.push(ctx.bc.phi_b);
    }
    if kind == DensityKind::Repulsive {
        for p in ctx.f_inf.pieces() {
            breaks.extend([p.lo, p.hi].iter().map(|e| 0.5 * e * e));
        }
    }
    let at_zero = if d2v0.is_finite() { q(0.0) } else { d2v0 };
    let potential = Pseudopotential::build(side, opts.phi_max, q, at_zero, &breaks);
    let grid = log_grid(side, opts.phi_max, opts.grid);
    let v_values: Vec<f64> = grid.iter().map(|&p| potential.value(p)).collect();

    let classification = potential.classify(d2v0, opts.tau, &grid);
    let extent = potential.extent(&grid, classification);

    Ok(SagdeevData {
        side,
        kind,
        phi_max: opts.phi_max,
        tau: opts.tau,
        grid,
        v_values,
        d2v0,
        d2v0_fd4,
        d2v0_fd2,
        k,
        extent,
        classification,
        potential,
        ctx: ctx.clone(),
        electrons: electrons.clone(),
    })
}

/// Summary emitted by `check-bohm`.
#[derive(Debug, Clone, PartialEq, DeriveSerialize)]
pub struct BohmReport {
    #[serde(rename = "K")]
    pub k: BohmIntegral,
    /// `None` when the Bohm integral diverges.
    #[serde(rename = "d2V0")]
    pub d2v0: Option<f64>,
    pub classification: Classification,
    #[serde(rename = "supB", skip_serializing_if = "Option::is_none")]
    pub sup_b: Option<Extent>,
    #[serde(rename = "infB", skip_serializing_if = "Option::is_none")]
    pub inf_b: Option<Extent>,
    pub phi_max: f64,
}

pub fn bohm_report(data: &SagdeevData) -> BohmReport {
    let (sup_b, inf_b) = match data.side {
        Side::Attractive => (Some(data.extent), None),
        Side::Repulsive => (None, Some(data.extent)),
    };
    BohmReport {
        k: data.k,
        d2v0: data.d2v0.is_finite().then_some(data.d2v0),
        classification: data.classification,
        sup_b,
        inf_b,
        phi_max: data.phi_max,
    }
}

/// `sup B` (attractive) or `inf B` (repulsive).
pub fn sup_b(data: &SagdeevData) -> Result<Extent> {
    if data.classification.solvable() {
        Ok(data.extent)
    } else {
        Err(SheathError::NotApplicable(data.classification.label().into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dists::{delta_bump, BoundaryConfig, DistributionSpec, Mollifier};

    fn cold(u: f64, eps: f64, phi_b: f64) -> KernelContext {
        KernelContext::new(delta_bump(u, eps, Mollifier::Even).unwrap(), DistributionSpec::zero(), BoundaryConfig::absorbing(phi_b)).unwrap()
    }

    #[test]
    fn pseudopotential_integrates_exactly() {
        // q = 1 + phi: V = phi^2/2 + phi^3/3
        let v = Pseudopotential::build(Side::Attractive, 4.0, |p| 1.0 + p, 1.0, &[1.0]);
        for &p in &[1e-9, 1e-3, 0.5, 1.0, 3.7] {
            let exact = p * p / 2.0 + p * p * p / 3.0;
            assert!((v.value(p) - exact).abs() < 1e-14 * exact.max(1e-300) + 1e-15, "{p}");
        }
        let r = Pseudopotential::build(Side::Repulsive, 2.0, |p| 1.0 + p, 1.0, &[]);
        assert!((r.value(-1.0) - (0.5 - 1.0 / 3.0)).abs() < 1e-14);
    }

    #[test]
    fn cold_beam_curvature_and_value() {
        let data = build_sagdeev(&cold(2.0, 0.01, 0.1), &ElectronModel::Boltzmann, Side::Attractive, &SagdeevOptions::default()).unwrap();
        assert!((data.d2v0 - 0.75).abs() < 5e-3);
        assert!((data.d2v0_fd4 - data.d2v0).abs() < 1e-4);
        assert!((data.d2v0_fd2 - data.d2v0).abs() < 1e-2);
        let expect = 2.0 * 5f64.sqrt() - 4.0 + (-0.5f64).exp() - 1.0;
        assert!((data.potential.value(0.5) - expect).abs() < 5e-3);
        assert_eq!(data.v_values[0], 0.0);
        assert_eq!(data.classification, Classification::Strict);
        assert_eq!(data.extent, Extent::Unbounded(10.0));
    }

    #[test]
    fn violated_and_infinite() {
        let data = build_sagdeev(&cold(0.8, 0.01, 0.1), &ElectronModel::Boltzmann, Side::Attractive, &SagdeevOptions::default()).unwrap();
        assert_eq!(data.classification, Classification::Violated);
        assert_eq!(sup_b(&data).unwrap_err().code(), "NOT_APPLICABLE");
        let f = DistributionSpec::from_bumps(vec![crate::dists::Bump::on_axis(1.0, 0.0, 0.5)]);
        let ctx = KernelContext::new(f, DistributionSpec::zero(), BoundaryConfig::absorbing(0.1)).unwrap();
        let data = build_sagdeev(&ctx, &ElectronModel::Boltzmann, Side::Attractive, &SagdeevOptions::default()).unwrap();
        assert_eq!(data.k, BohmIntegral::Infinite);
        assert_eq!(data.classification, Classification::Violated);
    }

    #[test]
    fn neutrality_is_enforced() {
        let f = DistributionSpec::from_bumps(vec![crate::dists::Bump::on_axis(0.9, -2.0, 0.1)]);
        let ctx = KernelContext::new(f, DistributionSpec::zero(), BoundaryConfig::absorbing(0.1)).unwrap();
        let e = build_sagdeev(&ctx, &ElectronModel::Boltzmann, Side::Attractive, &SagdeevOptions::default()).unwrap_err();
        assert_eq!(e.code(), "NEUTRALITY_VIOLATION");
    }

    #[test]
    fn log_grid_shape() {
        let g = log_grid(Side::Repulsive, 10.0, 100);
        assert_eq!(g[0], 0.0);
        assert!((g[99] + 10.0).abs() < 1e-12);
        assert!(g.windows(2).all(|w| w[1] < w[0]));
    }
}
