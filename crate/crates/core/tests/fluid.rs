use sheath_core::dists::{ElectronModel, GeneralParams, Mollifier};
use sheath_core::hydro::{delta_mass_study, log_log_slope, solve_euler_poisson, solve_generalized, HydroOptions, HydroSolution, StudyOptions, StudyScenario};

fn sup_gap(a: &HydroSolution, b: &HydroSolution) -> f64 {
    let x_end = a.x().last().unwrap().min(*b.x().last().unwrap());
    (0..=400).map(|k| x_end * k as f64 / 400.0).map(|x| (a.phi_at(x) - b.phi_at(x)).abs()).fold(0.0, f64::max)
}

fn blend(t: f64, alpha: f64) -> GeneralParams {
    GeneralParams { m_b: t, m_inf: (1.0 - t) / (1.0 + alpha), v_b: 2.0, v_inf: 2.0, alpha }
}

#[test]
fn euler_poisson_conserves_mass_and_momentum() {
    let sol = solve_euler_poisson(2.0, 0.1, &ElectronModel::Boltzmann, &HydroOptions::default()).unwrap();
    let mass = sol.rho.iter().zip(sol.phi()).map(|(r, p)| (r * (4.0 + 2.0 * p).sqrt() - 2.0).abs()).fold(0.0, f64::max);
    assert!(mass < 1e-8, "{mass}");
    assert!(sol.momentum_residual().unwrap() < 1e-6);
    assert!(sol.mass_residual() < 1e-8);
}

#[test]
fn generalized_model_reduces_to_euler_poisson() {
    let opts = HydroOptions::default();
    let e = ElectronModel::Boltzmann;
    let ep = solve_euler_poisson(2.0, 0.1, &e, &opts).unwrap();
    let same = solve_generalized(blend(0.0, 0.0), 0.1, &e, &opts).unwrap();
    assert!(sup_gap(&ep, &same) < 1e-13);
    // equal speeds: the emitted beam leaves the fluid unchanged, so move v_b instead
    let gaps: Vec<f64> = [0.04, 0.02]
        .iter()
        .map(|&t| {
            let p = GeneralParams { v_b: 3.0, ..blend(t, 0.0) };
            sup_gap(&ep, &solve_generalized(p, 0.1, &e, &opts).unwrap())
        })
        .collect();
    assert!(gaps[0] > 0.0 && gaps[1] < gaps[0]);
    assert!((gaps[0] / gaps[1] - 2.0).abs() < 0.1, "{gaps:?}");
}

#[test]
fn reflecting_model_balances_momentum() {
    let sol = solve_generalized(blend(0.0, 0.3), -0.2, &ElectronModel::Boltzmann, &HydroOptions::default()).unwrap();
    assert!(sol.momentum_residual().unwrap() < 1e-6);
    assert!(sol.mass_residual() < 1e-8);
}

#[test]
fn delta_mass_errors_shrink_linearly() {
    let opts = StudyOptions { mollifier: Mollifier::Offset, ..Default::default() };
    let eps = [0.2, 0.1, 0.05];
    let study = delta_mass_study(StudyScenario::Absorbing { u_inf: 2.0 }, 0.05, &eps, &opts).unwrap();
    assert!(study.monotone());
    let slope = study.slope.unwrap();
    assert!((slope - 1.0).abs() < 0.2, "{slope}");
    let bound: Vec<f64> = eps.iter().map(|e| study.c0_estimate * e).collect();
    assert!(study.total().iter().zip(&bound).all(|(t, b)| t <= &(b * (1.0 + 1e-12))));
    assert!((log_log_slope(&eps, &bound) - 1.0).abs() < 1e-12);
}
