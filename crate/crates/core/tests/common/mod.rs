#![allow(dead_code)]

use std::sync::OnceLock;

use sheath_core::dists::{delta_bump, make_delta_family, BoundaryConfig, Bump, Cutoff, DeltaFamily, DistributionSpec, ElectronModel, GeneralParams, Mollifier};
use sheath_core::kernels::KernelContext;
use sheath_core::sagdeev::{build_sagdeev, SagdeevData, SagdeevOptions, Side};
use sheath_core::sheath::{SheathSolution, DEFAULT_POINTS};

pub const NORMALIZED: GeneralParams = GeneralParams { m_b: 0.2, m_inf: 0.8 / 1.5, v_b: 2.0, v_inf: 2.0, alpha: 0.5 };

pub struct Case {
    pub name: &'static str,
    pub phi_b: f64,
    pub data: SagdeevData,
    pub solution: SheathSolution,
}

fn case(name: &'static str, ctx: KernelContext, phi_b: f64) -> Case {
    let data = build_sagdeev(&ctx, &ElectronModel::Boltzmann, Side::of(phi_b), &SagdeevOptions::default()).unwrap();
    let solution = SheathSolution::solve(&data, phi_b, DEFAULT_POINTS).unwrap();
    Case { name, phi_b, data, solution }
}

pub fn absorbing_ctx(u_inf: f64, phi_b: f64) -> KernelContext {
    let f = delta_bump(u_inf, 0.01, Mollifier::Even).unwrap();
    KernelContext::new(f, DistributionSpec::zero(), BoundaryConfig::absorbing(phi_b)).unwrap()
}

pub fn emitting_ctx() -> KernelContext {
    let f_inf = DistributionSpec::from_bumps(vec![Bump::on_axis(1.0 / 1.3, -2.0, 0.1), Bump::on_axis(0.3 / 1.3, 2.0, 0.1)]);
    let f_b = DistributionSpec::from_bumps(vec![Bump::on_axis(0.05, 0.6, 0.2)]).with_cutoff(Cutoff::Positive);
    KernelContext::new(f_inf, f_b, BoundaryConfig::new(0.5, 0.3).unwrap()).unwrap()
}

pub fn repulsive_ctx() -> KernelContext {
    let (f_b, f_inf) = make_delta_family(&DeltaFamily::General { params: NORMALIZED, phi_b: -0.1 }, 0.01, Mollifier::Even).unwrap();
    KernelContext::new(f_inf, f_b, BoundaryConfig::new(-0.1, 0.5).unwrap()).unwrap()
}

/// Attractive absorbing cold beam.
pub fn absorbing() -> &'static Case {
    static C: OnceLock<Case> = OnceLock::new();
    C.get_or_init(|| case("absorbing", absorbing_ctx(2.0, 0.1), 0.1))
}

/// Attractive wall with an emitted population.
pub fn emitting() -> &'static Case {
    static C: OnceLock<Case> = OnceLock::new();
    C.get_or_init(|| case("emitting", emitting_ctx(), 0.5))
}

/// Repulsive wall, reflecting and emitting.
pub fn repulsive() -> &'static Case {
    static C: OnceLock<Case> = OnceLock::new();
    C.get_or_init(|| case("repulsive", repulsive_ctx(), -0.1))
}

pub fn all() -> [&'static Case; 3] {
    [absorbing(), emitting(), repulsive()]
}
