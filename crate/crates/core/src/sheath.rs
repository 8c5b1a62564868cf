//! Potential profiles, kinetic reconstruction and the checks run on a solved sheath.
//!
//! The profile is computed with `|phi|` as the independent variable. Writing
//! `u = ln(|phi| / |phi_b|)`, the distance from the wall is `x(u) = int_u^0 y`,
//! `y = 1 / sqrt(2 V / phi^2)`, which stays smooth down to the tail threshold.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::dists::ElectronModel;
use crate::error::{Result, SheathError};
use crate::kernels::{DensityKind, KernelContext};
use crate::numerics::cheb::{ChebOptions, ChebPiece, PiecewiseCheb};
use crate::numerics::quad::{integrate, QuadOptions};
use crate::sagdeev::{Classification, Extent, Pseudopotential, SagdeevData, Side};

/// Ratio `|phi_tail| / |phi_b|` at which the exponential tail takes over.
pub const TAIL_FRACTION: f64 = 1e-6;
/// Default number of uniform x samples.
pub const DEFAULT_POINTS: usize = 10_000;
/// Decades of tail kept after the matching point.
const TAIL_DECADES: f64 = 3.0;

#[derive(Debug, Clone)]
struct ProfileMap {
    potential: Pseudopotential,
    sign: f64,
    magnitude: f64,
    y: PiecewiseCheb,
    primitive: Vec<ChebPiece>,
    offsets: Vec<f64>,
    x_tail: f64,
}

impl ProfileMap {
    fn build(potential: &Pseudopotential, phi_b: f64) -> Self {
        let magnitude = phi_b.abs();
        let u_min = TAIL_FRACTION.ln();
        let breaks: Vec<f64> = potential
            .piece_edges()
            .into_iter()
            .filter(|&e| e > 0.0 && e < magnitude)
            .map(|e| (e / magnitude).ln())
            .collect();
        let y = PiecewiseCheb::build(
            |u| 1.0 / (2.0 * potential.value_over_square(magnitude * u.exp())).sqrt(),
            u_min,
            0.0,
            &breaks,
            &ChebOptions { tol: 1e-12, ..ChebOptions::default() },
        );
        let primitive: Vec<ChebPiece> = y.pieces.iter().map(ChebPiece::antiderivative).collect();
        let mut offsets = Vec::with_capacity(primitive.len());
        let mut acc = 0.0;
        for p in &primitive {
            offsets.push(acc);
            acc += p.eval(p.b);
        }
        Self { potential: potential.clone(), sign: phi_b.signum(), magnitude, y, primitive, offsets, x_tail: acc }
    }

    /// `u` with `x(u) = x`, for `0 <= x <= x_tail`.
    fn invert(&self, x: f64) -> f64 {
        let target = (self.x_tail - x).clamp(0.0, self.x_tail);
        let k = self.offsets.partition_point(|&o| o <= target).saturating_sub(1);
        let (prim, piece) = (&self.primitive[k], &self.y.pieces[k]);
        let t = target - self.offsets[k];
        let (mut lo, mut hi) = (prim.a, prim.b);
        let span = prim.eval(hi);
        let mut u = lo + (hi - lo) * (t / span).clamp(0.0, 1.0);
        for _ in 0..100 {
            let g = prim.eval(u) - t;
            if g > 0.0 { hi = u } else { lo = u }
            let mut next = u - g / piece.eval(u);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - u).abs() <= 4.0 * f64::EPSILON * u.abs().max(1.0) {
                return next;
            }
            u = next;
        }
        u
    }
}

/// A monotone potential `phi(x)` on a uniform grid.
#[derive(Debug, Clone)]
pub struct PotentialProfile {
    pub side: Side,
    pub phi_b: f64,
    pub x: Vec<f64>,
    pub phi: Vec<f64>,
    pub dphi: Vec<f64>,
    /// Exponential rate of the attached tail; absent for marginal and trivial profiles.
    pub tail_rate: Option<f64>,
    /// `(x_tail, phi_tail)`.
    pub tail_start: (f64, f64),
    /// Marginal case: no exponential tail guarantee.
    pub marginal: bool,
    map: Option<ProfileMap>,
}

impl PotentialProfile {
    /// The zero potential, sampled on `[0, 1]`.
    pub fn trivial(side: Side, points: usize) -> Self {
        let x = uniform(1.0, points);
        let n = x.len();
        Self { side, phi_b: 0.0, x, phi: vec![0.0; n], dphi: vec![0.0; n], tail_rate: None, tail_start: (0.0, 0.0), marginal: false, map: None }
    }

    /// Solves `(phi')^2 = 2 V(phi)` from `phi(0) = phi_b`, attaching `e^{-c x}` decay when
    /// `tail_rate` is given.
    pub fn from_potential(potential: &Pseudopotential, phi_b: f64, tail_rate: Option<f64>, points: usize) -> Result<Self> {
        let side = potential.side();
        if phi_b == 0.0 {
            return Ok(Self::trivial(side, points));
        }
        if Side::of(phi_b) != side || phi_b.abs() > potential.reach() {
            return Err(SheathError::InvalidInput(format!("phi_b = {phi_b} lies outside the pseudopotential range")));
        }
        if points < 8 {
            return Err(SheathError::InvalidInput("at least 8 grid points are needed".into()));
        }
        let map = ProfileMap::build(potential, phi_b);
        let x_tail = map.x_tail;
        let x_end = match tail_rate {
            Some(c) => x_tail + TAIL_DECADES * std::f64::consts::LN_10 / c,
            None => x_tail,
        };
        let mut profile = Self {
            side,
            phi_b,
            x: uniform(x_end, points),
            phi: Vec::new(),
            dphi: Vec::new(),
            tail_rate,
            tail_start: (x_tail, phi_b * TAIL_FRACTION),
            marginal: tail_rate.is_none(),
            map: Some(map),
        };
        profile.phi = profile.x.iter().map(|&x| profile.phi_at(x)).collect();
        profile.phi[0] = phi_b;
        profile.dphi = profile.x.iter().map(|&x| profile.dphi_at(x)).collect();
        Ok(profile)
    }

    pub fn is_trivial(&self) -> bool {
        self.map.is_none()
    }

    pub fn potential(&self) -> Option<&Pseudopotential> {
        self.map.as_ref().map(|m| &m.potential)
    }

    /// `phi` at any `x >= 0`.
    pub fn phi_at(&self, x: f64) -> f64 {
        let Some(m) = &self.map else { return 0.0 };
        let (x_tail, phi_tail) = self.tail_start;
        if x <= x_tail {
            m.sign * m.magnitude * m.invert(x).exp()
        } else {
            match self.tail_rate {
                Some(c) => phi_tail * (-c * (x - x_tail)).exp(),
                None => phi_tail,
            }
        }
    }

    /// `phi'` at any `x >= 0`.
    pub fn dphi_at(&self, x: f64) -> f64 {
        let Some(m) = &self.map else { return 0.0 };
        let phi = self.phi_at(x);
        match self.tail_rate {
            Some(c) if x > self.tail_start.0 => -c * phi,
            _ => -m.sign * phi.abs() * (2.0 * m.potential.value_over_square(phi)).sqrt(),
        }
    }

    /// `max |D phi^2 - 2 V(phi)|`, `D` a fourth-order difference of the samples.
    pub fn first_integral_residual(&self) -> f64 {
        let Some(m) = &self.map else { return 0.0 };
        let d = derivative4(&self.phi, self.x[1] - self.x[0]);
        d.iter().zip(&self.phi).map(|(dp, &p)| (dp * dp - 2.0 * m.potential.value(p)).abs()).fold(0.0, f64::max)
    }

    /// `max |D^2 phi - (rho - n_e)(phi)|` over interior points, centred second differences.
    pub fn poisson_residual(&self) -> f64 {
        let Some(m) = &self.map else { return 0.0 };
        let h = self.x[1] - self.x[0];
        self.phi
            .windows(3)
            .map(|w| ((w[0] - 2.0 * w[1] + w[2]) / (h * h) - m.potential.force(w[1])).abs())
            .fold(0.0, f64::max)
    }
}

fn uniform(end: f64, points: usize) -> Vec<f64> {
    let n = points.max(2);
    (0..n).map(|k| end * k as f64 / (n - 1) as f64).collect()
}

fn derivative4(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            if i >= 2 && i + 2 < n {
                (v[i - 2] - 8.0 * v[i - 1] + 8.0 * v[i + 1] - v[i + 2]) / (12.0 * h)
            } else if i < 2 {
                (-25.0 * v[i] + 48.0 * v[i + 1] - 36.0 * v[i + 2] + 16.0 * v[i + 3] - 3.0 * v[i + 4]) / (12.0 * h)
            } else {
                (25.0 * v[i] - 48.0 * v[i - 1] + 36.0 * v[i - 2] - 16.0 * v[i - 3] + 3.0 * v[i - 4]) / (12.0 * h)
            }
        })
        .collect()
}

/// Checks that `phi_b` is reachable under the classification of `data` and solves for the profile.
pub fn solve_phi(data: &SagdeevData, phi_b: f64, points: usize) -> Result<PotentialProfile> {
    if phi_b == 0.0 {
        return Ok(PotentialProfile::trivial(data.side, points));
    }
    if Side::of(phi_b) != data.side {
        return Err(SheathError::InvalidInput(format!("phi_b = {phi_b} is on the wrong side of zero")));
    }
    if data.kind == DensityKind::Attractive && phi_b != data.ctx.bc.phi_b {
        return Err(SheathError::InvalidInput("the attractive density was built for a different phi_b".into()));
    }
    match data.classification {
        Classification::Violated => return Err(SheathError::NoSolutionCriterion),
        Classification::MarginalEmpty => return Err(SheathError::NoSolutionEmptyB),
        _ => {}
    }
    let bound = match data.extent {
        Extent::Finite(b) | Extent::Unbounded(b) => b.abs(),
        Extent::NotApplicable => return Err(SheathError::NoSolutionCriterion),
    };
    if phi_b.abs() >= bound {
        return Err(SheathError::PhiBOutOfRange { phi_b, bound });
    }
    let rate = (data.classification == Classification::Strict).then(|| data.d2v0.sqrt());
    PotentialProfile::from_potential(&data.potential, phi_b, rate, points)
}

/// Result of [`fit_decay_rate`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub amplitude: f64,
    pub marginal: bool,
}

/// Least-squares fit of `ln|phi| = ln C - c x` over the last decade before the tail.
pub fn fit_decay_rate(profile: &PotentialProfile) -> Result<DecayFit> {
    let (x_tail, phi_tail) = profile.tail_start;
    if profile.is_trivial() || profile.phi_b.abs() < 10.0 * phi_tail.abs() {
        return Err(SheathError::InsufficientDecay);
    }
    let ceiling = 10.0 * phi_tail.abs();
    let pts: Vec<(f64, f64)> = profile
        .x
        .iter()
        .zip(&profile.phi)
        .filter(|(&x, &p)| x <= x_tail && p.abs() <= ceiling && p != 0.0)
        .map(|(&x, &p)| (x, p.abs().ln()))
        .collect();
    if pts.len() < 3 {
        return Err(SheathError::InsufficientDecay);
    }
    let n = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / n, b + y / n));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    Ok(DecayFit { rate: -slope, amplitude: (my - slope * mx).exp(), marginal: profile.marginal })
}

/// Density and flux sampled on the profile grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub rho: Vec<f64>,
    pub flux: Vec<f64>,
}

/// A solved sheath: profile plus the data that produced it.
#[derive(Debug, Clone)]
pub struct SheathSolution {
    pub profile: PotentialProfile,
    pub ctx: KernelContext,
    pub electrons: ElectronModel,
    pub kind: DensityKind,
    rho_zero: f64,
}

impl SheathSolution {
    pub fn new(data: &SagdeevData, profile: PotentialProfile) -> Self {
        Self {
            rho_zero: data.ctx.density_at_zero(data.kind),
            kind: data.kind,
            ctx: data.ctx.clone(),
            electrons: data.electrons.clone(),
            profile,
        }
    }

    /// [`solve_phi`] followed by [`SheathSolution::new`].
    pub fn solve(data: &SagdeevData, phi_b: f64, points: usize) -> Result<Self> {
        Ok(Self::new(data, solve_phi(data, phi_b, points)?))
    }

    /// Ion density at potential `phi`, from the fitted force.
    pub fn density_at(&self, phi: f64) -> f64 {
        match self.profile.potential() {
            Some(v) => self.rho_zero + v.force(phi) + self.electrons.density(phi) - 1.0,
            None => self.rho_zero,
        }
    }

    /// Distribution at `(x, xi)`.
    pub fn reconstruct_f(&self, x: f64, xi: [f64; 3]) -> f64 {
        if self.profile.is_trivial() {
            return self.ctx.f_inf.eval(xi);
        }
        self.f_at_potential(self.profile.phi_at(x), xi)
    }

    fn f_at_potential(&self, phi: f64, xi: [f64; 3]) -> f64 {
        let e = xi[0] * xi[0] - 2.0 * phi;
        let far = |t: f64| self.ctx.f_inf.eval([t, xi[1], xi[2]]);
        match self.kind {
            DensityKind::Absorbing => {
                if e > 0.0 && xi[0] < 0.0 { far(-e.sqrt()) } else { 0.0 }
            }
            DensityKind::Attractive => {
                if e > 0.0 {
                    far(xi[0].signum() * e.sqrt())
                } else if e < 0.0 {
                    let t = (e + 2.0 * self.ctx.bc.phi_b).max(0.0).sqrt();
                    self.ctx.f_b.eval([t, xi[1], xi[2]]) / (1.0 - self.ctx.bc.alpha)
                } else {
                    0.0
                }
            }
            DensityKind::Repulsive => {
                if xi[0] == 0.0 { 0.0 } else { far(xi[0].signum() * e.sqrt()) }
            }
        }
    }

    /// `int f(x, xi) dxi'` at potential `phi`.
    pub fn marginal_at_potential(&self, phi: f64, xi1: f64) -> f64 {
        if self.profile.is_trivial() {
            return self.ctx.f_inf.marginal(xi1);
        }
        let e = xi1 * xi1 - 2.0 * phi;
        let far = |t: f64| self.ctx.f_inf.marginal(t);
        match self.kind {
            DensityKind::Absorbing => {
                if e > 0.0 && xi1 < 0.0 { far(-e.sqrt()) } else { 0.0 }
            }
            DensityKind::Attractive => {
                if e > 0.0 {
                    far(xi1.signum() * e.sqrt())
                } else if e < 0.0 {
                    self.ctx.f_b.marginal((e + 2.0 * self.ctx.bc.phi_b).max(0.0).sqrt()) / (1.0 - self.ctx.bc.alpha)
                } else {
                    0.0
                }
            }
            DensityKind::Repulsive => {
                if xi1 == 0.0 { 0.0 } else { far(xi1.signum() * e.sqrt()) }
            }
        }
    }

    /// Where the reconstructed marginal at `phi` may be non-smooth.
    fn xi1_breaks(&self, phi: f64) -> Vec<f64> {
        let mut squares: Vec<f64> = self.ctx.f_inf.pieces().iter().flat_map(|p| [p.lo, p.hi]).map(|e| e * e + 2.0 * phi).collect();
        if self.kind == DensityKind::Attractive {
            let lift = 2.0 * (phi - self.ctx.bc.phi_b);
            squares.extend(self.ctx.f_b.pieces().iter().flat_map(|p| [p.lo, p.hi]).map(|e| e * e + lift));
        }
        let mut pts = vec![0.0];
        for d in squares.into_iter().filter(|d| *d >= 0.0) {
            pts.extend([d.sqrt(), -d.sqrt()]);
        }
        if phi > 0.0 {
            let r = (2.0 * phi).sqrt();
            pts.extend([r, -r]);
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `int xi1^k f(x, xi) dxi` at potential `phi`, by quadrature in `xi1`.
    pub fn velocity_moment(&self, phi: f64, k: i32) -> f64 {
        let pts = self.xi1_breaks(phi);
        let opts = QuadOptions::default();
        pts.windows(2).map(|w| integrate(|v| v.powi(k) * self.marginal_at_potential(phi, v), w[0], w[1], &opts)).sum()
    }

    /// Density curve from the fitted force and flux curve by direct quadrature of the
    /// reconstructed distribution.
    pub fn moments(&self) -> Moments {
        let rho = self.profile.phi.iter().map(|&p| self.density_at(p)).collect();
        let flux = self.profile.phi.par_iter().map(|&p| self.velocity_moment(p, 1)).collect();
        Moments { rho, flux }
    }

    pub fn poisson_residual(&self) -> f64 {
        self.profile.poisson_residual()
    }

    pub fn first_integral_residual(&self) -> f64 {
        self.profile.first_integral_residual()
    }

    /// Writes `x,phi,dphi,rho,flux,n_e` rows after a `# scenario sha256=...` line.
    pub fn write_csv<W: Write>(&self, moments: &Moments, scenario_hash: &str, out: &mut W) -> io::Result<()> {
        writeln!(out, "# scenario sha256={scenario_hash}")?;
        writeln!(out, "x,phi,dphi,rho,flux,n_e")?;
        let p = &self.profile;
        for i in 0..p.x.len() {
            writeln!(
                out,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                p.x[i],
                p.phi[i],
                p.dphi[i],
                moments.rho[i],
                moments.flux[i],
                self.electrons.density(p.phi[i])
            )?;
        }
        Ok(())
    }
}
