//! Velocity distributions built from one smooth bump, their moments, and the
//! concentrating families used for the cold-ion limit.

use std::f64::consts::PI;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Result, SheathError};
use crate::numerics::quad::{integrate, QuadOptions};
use crate::numerics::roots::bisect;
use crate::numerics::special::flat_integral;

/// Supports closer than this to `xi1 = 0` make the Bohm integral infinite.
pub const ZERO_SUPPORT_GAP: f64 = 1e-6;

/// The canonical bump `A exp(-1/(1-|xi|^2))` on the unit ball, with unit integral.
pub struct BumpProfile;

impl BumpProfile {
    /// The constant `A`.
    pub fn normalization() -> f64 {
        static A: OnceLock<f64> = OnceLock::new();
        *A.get_or_init(|| {
            let opts = QuadOptions { abs_tol: 1e-17, rel_tol: 1e-15, max_intervals: 400 };
            let radial = integrate(
                |r: f64| if r < 1.0 { r * r * (-1.0 / (1.0 - r * r)).exp() } else { 0.0 },
                0.0,
                1.0,
                &opts,
            );
            1.0 / (4.0 * PI * radial)
        })
    }

    /// Value at a point with squared norm `r2`.
    pub fn value(r2: f64) -> f64 {
        if r2 >= 1.0 {
            0.0
        } else {
            Self::normalization() * (-1.0 / (1.0 - r2)).exp()
        }
    }

    /// Integral over the two transverse directions at first coordinate `s`.
    pub fn marginal(s: f64) -> f64 {
        let w = 1.0 - s * s;
        if w <= 0.0 {
            0.0
        } else {
            PI * Self::normalization() * flat_integral(w)
        }
    }
}

/// One translated, scaled copy of the bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bump {
    pub mass: f64,
    pub center: [f64; 3],
    pub width: f64,
}

impl Bump {
    pub fn new(mass: f64, center: [f64; 3], width: f64) -> Self {
        Self { mass, center, width }
    }

    /// Bump centred on the `xi1` axis.
    pub fn on_axis(mass: f64, c1: f64, width: f64) -> Self {
        Self::new(mass, [c1, 0.0, 0.0], width)
    }

    fn eval(&self, xi: [f64; 3]) -> f64 {
        let e = self.width;
        let r2 = ((xi[0] - self.center[0]).powi(2)
            + (xi[1] - self.center[1]).powi(2)
            + (xi[2] - self.center[2]).powi(2))
            / (e * e);
        self.mass * BumpProfile::value(r2) / (e * e * e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Cutoff {
    #[default]
    None,
    Positive,
    Negative,
}

impl Cutoff {
    fn keeps(self, xi1: f64) -> bool {
        match self {
            Cutoff::None => true,
            Cutoff::Positive => xi1 > 0.0,
            Cutoff::Negative => xi1 < 0.0,
        }
    }
}

/// Part of the `xi1`-marginal contributed by one bump, supported on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalPiece {
    pub lo: f64,
    pub hi: f64,
    mass: f64,
    c1: f64,
    width: f64,
    shift: Option<f64>,
}

impl MarginalPiece {
    pub fn value(&self, xi1: f64) -> f64 {
        if xi1 <= self.lo || xi1 >= self.hi {
            return 0.0;
        }
        let s = match self.shift {
            Some(e) => (xi1 * xi1 - e).max(0.0).sqrt(),
            None => xi1,
        };
        self.mass / self.width * BumpProfile::marginal((s - self.c1) / self.width)
    }
}

/// A velocity distribution: a sum of bumps, optionally restricted to a half-space
/// and optionally composed with the energy shift `xi1 -> sqrt(xi1^2 - e)` on `xi1 > 0`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSpec {
    pub bumps: Vec<Bump>,
    #[serde(default)]
    pub cutoff: Cutoff,
    #[serde(default)]
    pub energy_shift: Option<f64>,
}

/// Kinetic Bohm integral `int f / xi1^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BohmIntegral {
    Finite(f64),
    Infinite,
}

impl BohmIntegral {
    pub fn value(self) -> f64 {
        match self {
            BohmIntegral::Finite(k) => k,
            BohmIntegral::Infinite => f64::INFINITY,
        }
    }
}

impl DistributionSpec {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_bumps(bumps: Vec<Bump>) -> Self {
        Self { bumps, ..Self::default() }
    }

    pub fn with_cutoff(mut self, cutoff: Cutoff) -> Self {
        self.cutoff = cutoff;
        self
    }

    pub fn with_energy_shift(mut self, shift: f64) -> Self {
        self.energy_shift = Some(shift);
        self
    }

    pub fn validate(&self) -> Result<()> {
        for b in &self.bumps {
            if !(b.mass >= 0.0 && b.mass.is_finite()) {
                return Err(SheathError::InvalidInput(format!("bump mass {} must be nonnegative", b.mass)));
            }
            if !(b.width > 0.0 && b.width < 1.0) {
                return Err(SheathError::InvalidInput(format!("bump width {} must lie in (0, 1)", b.width)));
            }
            if b.center.iter().any(|c| !c.is_finite()) {
                return Err(SheathError::InvalidInput("bump center must be finite".into()));
            }
        }
        if self.energy_shift.is_some_and(|e| !e.is_finite()) {
            return Err(SheathError::InvalidInput("energy shift must be finite".into()));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.pieces().is_empty()
    }

    /// Pointwise value.
    pub fn eval(&self, xi: [f64; 3]) -> f64 {
        if !self.cutoff.keeps(xi[0]) {
            return 0.0;
        }
        let arg = match self.energy_shift {
            Some(e) => {
                let d = xi[0] * xi[0] - e;
                if xi[0] <= 0.0 || d <= 0.0 {
                    return 0.0;
                }
                [d.sqrt(), xi[1], xi[2]]
            }
            None => xi,
        };
        self.bumps.iter().map(|b| b.eval(arg)).sum()
    }

    /// Marginal pieces with their `xi1` supports.
    pub fn pieces(&self) -> Vec<MarginalPiece> {
        let mut out = Vec::new();
        for b in self.bumps.iter().filter(|b| b.mass > 0.0) {
            let (s_lo, s_hi) = (b.center[0] - b.width, b.center[0] + b.width);
            let (mut lo, mut hi) = match self.energy_shift {
                Some(e) => {
                    let s_min = s_lo.max(0.0).max((-e).max(0.0).sqrt());
                    if s_hi <= s_min {
                        continue;
                    }
                    ((s_min * s_min + e).max(0.0).sqrt(), (s_hi * s_hi + e).sqrt())
                }
                None => (s_lo, s_hi),
            };
            match self.cutoff {
                Cutoff::None => {}
                Cutoff::Positive => lo = lo.max(0.0),
                Cutoff::Negative => hi = hi.min(0.0),
            }
            if hi > lo {
                out.push(MarginalPiece { lo, hi, mass: b.mass, c1: b.center[0], width: b.width, shift: self.energy_shift });
            }
        }
        out
    }

    /// `g(xi1) = int f dxi'`.
    pub fn marginal(&self, xi1: f64) -> f64 {
        self.pieces().iter().map(|p| p.value(xi1)).sum()
    }

    /// `int g(xi1) k(xi1) dxi1`, splitting each piece at zero and at `breaks`.
    pub fn integrate_against<K: Fn(f64) -> f64>(&self, k: K, breaks: &[f64], opts: &QuadOptions) -> f64 {
        self.pieces()
            .iter()
            .map(|p| {
                let mut pts = vec![p.lo];
                pts.extend(breaks.iter().copied().chain([0.0]).filter(|x| *x > p.lo && *x < p.hi));
                pts.push(p.hi);
                pts.sort_by(f64::total_cmp);
                pts.windows(2).map(|w| integrate(|x| p.value(x) * k(x), w[0], w[1], opts)).sum::<f64>()
            })
            .sum()
    }

    pub fn mass(&self) -> f64 {
        self.integrate_against(|_| 1.0, &[], &QuadOptions::default())
    }

    pub fn flux(&self) -> f64 {
        self.integrate_against(|x| x, &[], &QuadOptions::default())
    }

    pub fn kinetic_bohm_integral(&self) -> BohmIntegral {
        let pieces = self.pieces();
        if pieces.iter().any(|p| p.lo < ZERO_SUPPORT_GAP && p.hi > -ZERO_SUPPORT_GAP) {
            return BohmIntegral::Infinite;
        }
        BohmIntegral::Finite(self.integrate_against(|x| 1.0 / (x * x), &[], &QuadOptions::default()))
    }

    /// Largest `|xi1|` on the support.
    pub fn speed_bound(&self) -> f64 {
        self.pieces().iter().fold(0.0_f64, |m, p| m.max(p.lo.abs()).max(p.hi.abs()))
    }

    /// Largest transverse reach `|xi' - 0|` of any bump.
    pub fn transverse_bound(&self) -> f64 {
        self.bumps.iter().fold(0.0_f64, |m, b| m.max(b.center[1].hypot(b.center[2]) + b.width))
    }
}

/// Electron density as a function of the potential.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElectronModel {
    Boltzmann,
    /// `sum c_k phi^k` with `c_0 = 1`, `c_1 = -1`.
    Polynomial(Vec<f64>),
}

impl ElectronModel {
    pub fn polynomial(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() < 2 || (coeffs[0] - 1.0).abs() > 1e-12 || (coeffs[1] + 1.0).abs() > 1e-12 {
            return Err(SheathError::InvalidInput(
                "electron polynomial needs n_e(0) = 1 and n_e'(0) = -1".into(),
            ));
        }
        Ok(Self::Polynomial(coeffs))
    }

    pub fn density(&self, phi: f64) -> f64 {
        match self {
            Self::Boltzmann => (-phi).exp(),
            Self::Polynomial(c) => c.iter().rev().fold(0.0, |acc, a| acc * phi + a),
        }
    }

    pub fn d1(&self, phi: f64) -> f64 {
        match self {
            Self::Boltzmann => -(-phi).exp(),
            Self::Polynomial(c) => c.iter().enumerate().skip(1).rev().fold(0.0, |acc, (k, a)| acc * phi + k as f64 * a),
        }
    }

    pub fn d2(&self, phi: f64) -> f64 {
        match self {
            Self::Boltzmann => (-phi).exp(),
            Self::Polynomial(c) => c
                .iter()
                .enumerate()
                .skip(2)
                .rev()
                .fold(0.0, |acc, (k, a)| acc * phi + (k * (k - 1)) as f64 * a),
        }
    }

    /// `(n_e(phi) - 1) / phi`, continuous at zero.
    pub fn excess_over_phi(&self, phi: f64) -> f64 {
        match self {
            Self::Boltzmann => {
                if phi == 0.0 {
                    -1.0
                } else {
                    (-phi).exp_m1() / phi
                }
            }
            Self::Polynomial(c) => c.iter().skip(1).rev().fold(0.0, |acc, a| acc * phi + a),
        }
    }

    /// Errors unless the density stays positive on `[lo, hi]`.
    pub fn check_positive(&self, lo: f64, hi: f64) -> Result<()> {
        let n = 2000;
        for i in 0..=n {
            let phi = lo + (hi - lo) * i as f64 / n as f64;
            if self.density(phi) <= 0.0 {
                return Err(SheathError::InvalidInput(format!("electron density is not positive at phi = {phi}")));
            }
        }
        Ok(())
    }
}

/// Wall data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryConfig {
    pub phi_b: f64,
    pub alpha: f64,
    pub v_e: Option<f64>,
}

impl BoundaryConfig {
    pub fn new(phi_b: f64, alpha: f64) -> Result<Self> {
        let bc = Self { phi_b, alpha, v_e: None };
        bc.validate()?;
        Ok(bc)
    }

    pub fn absorbing(phi_b: f64) -> Self {
        Self { phi_b, alpha: 0.0, v_e: None }
    }

    pub fn with_v_e(mut self, v_e: f64) -> Self {
        self.v_e = Some(v_e);
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !self.phi_b.is_finite() {
            return Err(SheathError::InvalidInput("phi_b must be finite".into()));
        }
        Ok(())
    }
}

pub fn check_alpha(alpha: f64) -> Result<()> {
    if alpha == 1.0 {
        Err(SheathError::RejectAlphaOne)
    } else if !(0.0..1.0).contains(&alpha) {
        Err(SheathError::InvalidAlpha(alpha))
    } else {
        Ok(())
    }
}

/// Outcome of [`check_necessary_conditions`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub samples: usize,
    pub max_residual: f64,
    pub pass: bool,
}

pub const CONDITION_TOL: f64 = 1e-8;

/// Samples the compatibility identities linking `f_inf`, `f_b` and the wall data.
///
/// Residuals are relative: `|lhs - rhs| / max(1, |lhs|, |rhs|)`.
pub fn check_necessary_conditions(
    f_inf: &DistributionSpec,
    f_b: &DistributionSpec,
    bc: &BoundaryConfig,
) -> Result<ConditionReport> {
    check_alpha(bc.alpha)?;
    if bc.phi_b == 0.0 {
        return Err(SheathError::InvalidInput("compatibility conditions need phi_b != 0".into()));
    }
    let phi_b = bc.phi_b;
    let strip = if phi_b < 0.0 { (2.0 * phi_b.abs()).sqrt() } else { 0.0 };

    let reach = f_inf.speed_bound().max(f_b.speed_bound()).max(strip) + 1.0;
    let mut xi1: Vec<f64> = (0..240).map(|i| -reach + 2.0 * reach * (i as f64 + 0.5) / 240.0).collect();
    let fractions = [0.0, 0.25, -0.25, 0.5, -0.5, 0.8, -0.8];
    for b in &f_inf.bumps {
        for f in fractions {
            let x = b.center[0] + f * b.width;
            xi1.push(x);
            xi1.push(-x);
        }
    }
    for b in &f_b.bumps {
        for f in fractions {
            let s = b.center[0] + f * b.width;
            let s_eff = match f_b.energy_shift {
                Some(e) => (s * s + e).max(0.0).sqrt(),
                None => s,
            };
            let d = s_eff * s_eff - 2.0 * phi_b;
            if d > 0.0 {
                xi1.push(d.sqrt());
            }
        }
    }
    let mut transverse = vec![[0.0, 0.0]];
    for b in f_inf.bumps.iter().chain(&f_b.bumps) {
        transverse.push([b.center[1], b.center[2]]);
        transverse.push([b.center[1] + 0.4 * b.width, b.center[2]]);
    }

    let rel = |a: f64, b: f64| (a - b).abs() / 1f64.max(a.abs()).max(b.abs());
    let mut samples = 0;
    let mut worst = 0.0_f64;
    for &x in &xi1 {
        for t in &transverse {
            let xi = [x, t[0], t[1]];
            let r = if x > strip && x > 0.0 {
                let lhs = f_inf.eval(xi);
                let rhs = f_b.eval([(x * x + 2.0 * phi_b).sqrt(), t[0], t[1]]) + bc.alpha * f_inf.eval([-x, t[0], t[1]]);
                rel(lhs, rhs)
            } else if phi_b < 0.0 && x.abs() < strip {
                rel(f_inf.eval(xi), f_inf.eval([-x, t[0], t[1]]))
            } else {
                continue;
            };
            samples += 1;
            worst = worst.max(r);
        }
    }
    Ok(ConditionReport { samples, max_residual: worst, pass: worst <= CONDITION_TOL })
}

/// How the unit-ball mollifier sits inside the ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mollifier {
    /// The bump itself, centred at the origin.
    #[default]
    Even,
    /// The bump shrunk by half and centred at `(1/2, 0, 0)`: first moment `1/2`.
    Offset,
}

impl Mollifier {
    /// Center offset and width of `eps^-3 psi((xi - c) / eps)` along `+xi1`.
    fn place(self, eps: f64) -> (f64, f64) {
        match self {
            Mollifier::Even => (0.0, eps),
            Mollifier::Offset => (0.5 * eps, 0.5 * eps),
        }
    }
}

/// Parameters of the reflecting/emitting family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneralParams {
    pub m_b: f64,
    pub m_inf: f64,
    pub v_b: f64,
    pub v_inf: f64,
    pub alpha: f64,
}

impl GeneralParams {
    /// Checks `m_b + (1+alpha) m_inf = 1` and `m_b/v_b^2 + (1+alpha) m_inf/v_inf^2 < 1`.
    pub fn check_velocity1(&self) -> std::result::Result<(), String> {
        let p = self;
        if p.m_b < 0.0 || p.m_inf < 0.0 || p.v_b <= 0.0 || p.v_inf <= 0.0 {
            return Err("masses must be nonnegative and speeds positive".into());
        }
        let mass = p.m_b + (1.0 + p.alpha) * p.m_inf;
        if (mass - 1.0).abs() > 1e-12 {
            return Err(format!("m_b + (1+alpha) m_inf = {mass}, expected 1"));
        }
        let bohm = self.cold_bohm_sum();
        if bohm >= 1.0 {
            return Err(format!("m_b/v_b^2 + (1+alpha) m_inf/v_inf^2 = {bohm}, expected < 1"));
        }
        Ok(())
    }

    pub fn cold_bohm_sum(&self) -> f64 {
        self.m_b / (self.v_b * self.v_b) + (1.0 + self.alpha) * self.m_inf / (self.v_inf * self.v_inf)
    }

    /// Far-field flux `m_b v_b + (alpha - 1) m_inf v_inf`.
    pub fn flux(&self) -> f64 {
        self.m_b * self.v_b + (self.alpha - 1.0) * self.m_inf * self.v_inf
    }

    /// Half the spread at which the worst-case Bohm sum reaches 1.
    pub fn eps0(&self) -> f64 {
        let v_min = self.v_b.min(self.v_inf);
        let worst = |e: f64| {
            let term = |m: f64, v: f64| if m > 0.0 { m / (v - e).powi(2) } else { 0.0 };
            term(self.m_b, self.v_b) + term((1.0 + self.alpha) * self.m_inf, self.v_inf) - 1.0
        };
        let hi = v_min * (1.0 - 1e-12);
        match bisect(worst, 0.0, hi, 1e-13) {
            Some(e) => 0.5 * e,
            None => 0.5 * v_min,
        }
    }
}

/// Which concentrating family to build.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaFamily {
    Absorbing { u_inf: f64 },
    General { params: GeneralParams, phi_b: f64 },
}

impl DeltaFamily {
    /// Largest admissible spread for the cold-ion limit.
    pub fn eps0(&self) -> f64 {
        match self {
            DeltaFamily::Absorbing { u_inf } => 0.5 * (u_inf - 1.0),
            DeltaFamily::General { params, .. } => params.eps0(),
        }
    }
}

/// The far-field bump `eps^-3 psi((xi + u e1) / eps)` with no admissibility gate.
pub fn delta_bump(u_inf: f64, eps: f64, mollifier: Mollifier) -> Result<DistributionSpec> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SheathError::RejectEps { eps, limit: 1.0 });
    }
    let (shift, width) = mollifier.place(eps);
    Ok(DistributionSpec::from_bumps(vec![Bump::on_axis(1.0, -u_inf + shift, width)]))
}

/// Returns `(f_b, f_inf)` for the chosen family.
pub fn make_delta_family(
    family: &DeltaFamily,
    eps: f64,
    mollifier: Mollifier,
) -> Result<(DistributionSpec, DistributionSpec)> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(SheathError::RejectEps { eps, limit: 1.0 });
    }
    match *family {
        DeltaFamily::Absorbing { u_inf } => {
            let limit = 0.5 * (u_inf - 1.0);
            if eps >= limit {
                return Err(SheathError::RejectEps { eps, limit });
            }
            Ok((DistributionSpec::zero(), delta_bump(u_inf, eps, mollifier)?))
        }
        DeltaFamily::General { params: p, phi_b } => {
            check_alpha(p.alpha)?;
            p.check_velocity1().map_err(SheathError::RejectVelocity1)?;
            let (shift, width) = mollifier.place(eps);
            let mut inf = vec![Bump::on_axis(p.m_inf, -p.v_inf + shift, width)];
            if p.m_b > 0.0 {
                inf.push(Bump::on_axis(p.m_b, p.v_b + shift, width));
            }
            if p.alpha > 0.0 {
                inf.push(Bump::on_axis(p.alpha * p.m_inf, p.v_inf - shift, width));
            }
            let f_b = if p.m_b > 0.0 {
                DistributionSpec::from_bumps(vec![Bump::on_axis(p.m_b, p.v_b + shift, width)]).with_energy_shift(2.0 * phi_b)
            } else {
                DistributionSpec::zero()
            };
            Ok((f_b, DistributionSpec::from_bumps(inf)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bump_marginal_matches_transverse_quadrature() {
        let o = QuadOptions { abs_tol: 1e-15, rel_tol: 1e-13, max_intervals: 400 };
        for &s in &[0.0f64, 0.3, 0.71, 0.95] {
            let rmax = (1.0 - s * s).sqrt();
            let q = 2.0 * PI * integrate(|r: f64| r * BumpProfile::value(s * s + r * r), 0.0, rmax, &o);
            assert!((BumpProfile::marginal(s) - q).abs() < 1e-13, "s={s}");
        }
    }

    #[test]
    fn unit_mass_and_even_flux() {
        let o = QuadOptions::default();
        let total = integrate(BumpProfile::marginal, -1.0, 1.0, &o);
        assert!((total - 1.0).abs() < 1e-12);
        let f = DistributionSpec::from_bumps(vec![Bump::new(1.0, [0.3, -0.2, 0.5], 0.4)]);
        assert!((f.mass() - 1.0).abs() < 1e-9);
        let centred = DistributionSpec::from_bumps(vec![Bump::on_axis(1.0, 0.0, 0.5)]);
        assert!(centred.flux().abs() < 1e-12);
    }

    #[test]
    fn delta_family_moments() {
        let f = delta_bump(2.0, 0.01, Mollifier::Even).unwrap();
        assert!((f.flux() + 2.0).abs() < 1e-9);
        let k = f.kinetic_bohm_integral().value();
        assert!((k - 0.25).abs() < 2e-4);
        let (fb, finf) = make_delta_family(&DeltaFamily::Absorbing { u_inf: 2.0 }, 0.1, Mollifier::Even).unwrap();
        assert!(fb.is_zero());
        assert!((finf.mass() - 1.0).abs() < 1e-9);
        assert!((finf.flux() + 2.0).abs() < 1e-9);
        let p = finf.pieces()[0];
        assert!((p.lo + 2.1).abs() < 1e-15 && (p.hi + 1.9).abs() < 1e-15);
    }

    #[test]
    fn offset_mollifier_shifts_the_mean() {
        let f = delta_bump(2.0, 0.2, Mollifier::Offset).unwrap();
        assert!((f.mass() - 1.0).abs() < 1e-9);
        assert!((f.flux() - (-2.0 + 0.1)).abs() < 1e-9);
    }

    #[test]
    fn bohm_integral_infinite_near_zero() {
        let f = DistributionSpec::from_bumps(vec![Bump::on_axis(1.0, 0.0, 0.3)]);
        assert_eq!(f.kinetic_bohm_integral(), BohmIntegral::Infinite);
        let cut = DistributionSpec::from_bumps(vec![Bump::on_axis(1.0, -0.2, 0.3)]).with_cutoff(Cutoff::Negative);
        assert_eq!(cut.kinetic_bohm_integral(), BohmIntegral::Infinite);
    }

    #[test]
    fn family_rejections() {
        let bad = GeneralParams { m_b: 0.2, m_inf: 0.4, v_b: 2.0, v_inf: 2.0, alpha: 0.5 };
        let r = make_delta_family(&DeltaFamily::General { params: bad, phi_b: 0.05 }, 0.05, Mollifier::Even);
        assert_eq!(r.unwrap_err().code(), "REJECT_VELOCITY1");
        let r = make_delta_family(&DeltaFamily::Absorbing { u_inf: 2.0 }, 0.5, Mollifier::Even);
        assert_eq!(r.unwrap_err().code(), "REJECT_EPS");
        let one = GeneralParams { alpha: 1.0, ..bad };
        let r = make_delta_family(&DeltaFamily::General { params: one, phi_b: 0.05 }, 0.05, Mollifier::Even);
        assert_eq!(r.unwrap_err(), SheathError::RejectAlphaOne);
    }

    #[test]
    fn general_reduces_to_absorbing() {
        let p = GeneralParams { m_b: 0.0, m_inf: 1.0, v_b: 2.0, v_inf: 2.0, alpha: 0.0 };
        for m in [Mollifier::Even, Mollifier::Offset] {
            let g = make_delta_family(&DeltaFamily::General { params: p, phi_b: 0.1 }, 0.1, m).unwrap();
            let a = make_delta_family(&DeltaFamily::Absorbing { u_inf: 2.0 }, 0.1, m).unwrap();
            assert_eq!(g, a);
        }
        assert!((p.eps0() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn necessary_conditions() {
        let (fb, finf) = make_delta_family(&DeltaFamily::Absorbing { u_inf: 2.0 }, 0.1, Mollifier::Even).unwrap();
        let bc = BoundaryConfig::absorbing(0.1);
        let rep = check_necessary_conditions(&finf, &fb, &bc).unwrap();
        assert!(rep.pass && rep.samples >= 200 && rep.max_residual == 0.0);

        let wrong = DistributionSpec::from_bumps(vec![Bump::on_axis(1.0, 2.0, 0.1)]);
        let rep = check_necessary_conditions(&wrong, &fb, &bc).unwrap();
        assert!(!rep.pass && rep.max_residual > 0.5);

        let p = GeneralParams { m_b: 0.2, m_inf: 0.8 / 1.5, v_b: 2.0, v_inf: 2.0, alpha: 0.5 };
        for phi_b in [0.05, -0.05] {
            for m in [Mollifier::Even, Mollifier::Offset] {
                let (fb, finf) = make_delta_family(&DeltaFamily::General { params: p, phi_b }, 0.05, m).unwrap();
                let rep = check_necessary_conditions(&finf, &fb, &BoundaryConfig::new(phi_b, 0.5).unwrap()).unwrap();
                assert!(rep.pass, "{phi_b} {rep:?}");
            }
        }
        let bc1 = BoundaryConfig { phi_b: 0.1, alpha: 1.0, v_e: None };
        assert_eq!(check_necessary_conditions(&finf, &fb, &bc1).unwrap_err(), SheathError::RejectAlphaOne);
    }

    #[test]
    fn electron_models() {
        let b = ElectronModel::Boltzmann;
        assert_eq!(b.density(0.0), 1.0);
        assert_eq!(b.excess_over_phi(0.0), -1.0);
        assert!((b.excess_over_phi(1e-9) + 1.0 - 0.5e-9).abs() < 1e-15);
        let p = ElectronModel::polynomial(vec![1.0, -1.0, 1.0]).unwrap();
        assert_eq!(p.density(2.0), 3.0);
        assert_eq!(p.d1(2.0), 3.0);
        assert_eq!(p.d2(2.0), 2.0);
        assert_eq!(p.excess_over_phi(2.0), 1.0);
        assert!(ElectronModel::polynomial(vec![1.0, -0.5]).is_err());
    }

    fn bump_strategy() -> impl Strategy<Value = Bump> {
        (0.0..2.0f64, -3.0..3.0f64, -1.0..1.0f64, 0.01..0.9f64).prop_map(|(m, c1, c2, w)| Bump::new(m, [c1, c2, 0.0], w))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn moments_are_additive(a in bump_strategy(), b in bump_strategy()) {
            let fa = DistributionSpec::from_bumps(vec![a]);
            let fb = DistributionSpec::from_bumps(vec![b]);
            let both = DistributionSpec::from_bumps(vec![a, b]);
            prop_assert!((both.mass() - fa.mass() - fb.mass()).abs() < 1e-9);
            prop_assert!((both.flux() - fa.flux() - fb.flux()).abs() < 1e-9);
            match (both.kinetic_bohm_integral(), fa.kinetic_bohm_integral(), fb.kinetic_bohm_integral()) {
                (BohmIntegral::Finite(k), BohmIntegral::Finite(ka), BohmIntegral::Finite(kb)) => {
                    prop_assert!((k - ka - kb).abs() < 1e-9 * (1.0 + k));
                }
                (BohmIntegral::Infinite, x, y) => prop_assert!(x == BohmIntegral::Infinite || y == BohmIntegral::Infinite),
                _ => prop_assert!(false),
            }
        }

        #[test]
        fn flux_bounded_by_speed(a in bump_strategy()) {
            let f = DistributionSpec::from_bumps(vec![a]);
            prop_assert!(f.flux().abs() <= f.speed_bound() * f.mass() + 1e-12);
            prop_assert!(f.eval(a.center) >= 0.0);
        }
    }
}
