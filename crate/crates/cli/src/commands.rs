//! Subcommand dispatch.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use sheath_core::dists::check_necessary_conditions;
use sheath_core::hydro::{delta_mass_runs, solve_hydro, HydroSolution, StudyOptions};
use sheath_core::sagdeev::{bohm_report, build_sagdeev, Classification, SagdeevData, Side};
use sheath_core::sheath::{fit_decay_rate, SheathSolution};
use sheath_core::SheathError;

use crate::error::CliError;
use crate::scenario::{scenario_hash, Scenario};
use crate::wall::reduce_wall_potential;

/// Number of potentials sampled by `validate`.
const BOUND_SAMPLES: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckBohm,
    Solve,
    Hydro,
    SweepEps,
    ReduceWall,
    Validate,
}

/// Command-line overrides of the `[solver]` section.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub tolerance: Option<f64>,
    pub phi_max: Option<f64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub command: Command,
    pub scenario: PathBuf,
    pub out: Option<PathBuf>,
    pub overrides: Overrides,
}

/// JSON body for standard output, plus the refusal that decides the exit code, if any.
#[derive(Debug)]
pub struct Report {
    pub body: Value,
    pub failure: Option<CliError>,
}

impl Report {
    fn ok(body: Value) -> Self {
        Self { body, failure: None }
    }
}

struct Loaded {
    scenario: Scenario,
    hash: String,
}

fn load(inv: &Invocation) -> Result<Loaded, CliError> {
    let bytes = fs::read(&inv.scenario)?;
    let text = String::from_utf8(bytes.clone()).map_err(|_| CliError::invalid("scenario is not UTF-8"))?;
    let mut scenario = Scenario::parse(&text)?;
    let o = inv.overrides;
    if let Some(t) = o.tolerance {
        scenario.solver.tau = t;
    }
    if let Some(p) = o.phi_max {
        scenario.solver.phi_max = p;
    }
    if let Some(g) = o.grid {
        scenario.solver.grid = g;
    }
    let scenario = Scenario::parse(&scenario.to_toml())?;
    Ok(Loaded { scenario, hash: scenario_hash(&bytes) })
}

fn out_file(inv: &Invocation, name: &str) -> Result<Option<PathBuf>, CliError> {
    match &inv.out {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Ok(Some(dir.join(name)))
        }
        None => Ok(None),
    }
}

fn write_json(path: &Path, body: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(body)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

fn sagdeev(s: &Scenario) -> Result<SagdeevData, CliError> {
    let ctx = s.kernel_context()?;
    let side = Side::of(s.boundary.phi_b);
    Ok(build_sagdeev(&ctx, &s.electron_model()?, side, &s.sagdeev_options())?)
}

fn verdict(c: Classification) -> Option<CliError> {
    match c {
        Classification::Violated => Some(CliError::Core(SheathError::NoSolutionCriterion)),
        Classification::MarginalEmpty => Some(CliError::Core(SheathError::NoSolutionEmptyB)),
        _ => None,
    }
}

/// Runs one subcommand.
pub fn run(inv: &Invocation) -> Result<Report, CliError> {
    let Loaded { scenario, hash } = load(inv)?;
    match inv.command {
        Command::CheckBohm => check_bohm(inv, &scenario),
        Command::Solve => solve(inv, &scenario, &hash),
        Command::Hydro => hydro(inv, &scenario, &hash),
        Command::SweepEps => sweep(inv, &scenario, &hash),
        Command::ReduceWall => reduce_wall(&scenario),
        Command::Validate => validate(&scenario),
    }
}

fn check_bohm(inv: &Invocation, s: &Scenario) -> Result<Report, CliError> {
    let data = sagdeev(s)?;
    let body = serde_json::to_value(bohm_report(&data))?;
    if let Some(path) = out_file(inv, "bohm.json")? {
        write_json(&path, &body)?;
    }
    Ok(Report { failure: verdict(data.classification), body })
}

fn solve(inv: &Invocation, s: &Scenario, hash: &str) -> Result<Report, CliError> {
    let data = sagdeev(s)?;
    let sol = SheathSolution::solve(&data, s.boundary.phi_b, s.solver.grid)?;
    let moments = sol.moments();
    let flux = sol.ctx.f_inf.flux();
    let flux_dev = moments.flux.iter().fold(0.0_f64, |m, f| m.max((f - flux).abs()));
    let decay = fit_decay_rate(&sol.profile).ok();
    let mut flags = Vec::new();
    if sol.profile.marginal {
        flags.push("MARGINAL_TAIL");
    }
    let csv = match out_file(inv, "profile.csv")? {
        Some(path) => {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            sol.write_csv(&moments, hash, &mut w)?;
            w.flush()?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let body = json!({
        "classification": data.classification,
        "phi_b": s.boundary.phi_b,
        "points": sol.profile.x.len(),
        "x_end": sol.profile.x.last(),
        "tail_rate": sol.profile.tail_rate,
        "tail_start": [sol.profile.tail_start.0, sol.profile.tail_start.1],
        "decay_fit": decay,
        "flags": flags,
        "first_integral_residual": sol.first_integral_residual(),
        "poisson_residual": sol.poisson_residual(),
        "flux": flux,
        "max_flux_deviation": flux_dev,
        "csv": csv,
    });
    Ok(Report::ok(body))
}

fn write_hydro_csv<W: Write>(sol: &HydroSolution, hash: &str, out: &mut W) -> std::io::Result<()> {
    writeln!(out, "# scenario sha256={hash}")?;
    writeln!(out, "x,phi,dphi,rho,u")?;
    let p = &sol.profile;
    for i in 0..p.x.len() {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.x[i], p.phi[i], p.dphi[i], sol.rho[i], sol.u[i])?;
    }
    Ok(())
}

fn hydro(inv: &Invocation, s: &Scenario, hash: &str) -> Result<Report, CliError> {
    let model = s.hydro_model()?;
    let sol = solve_hydro(model, s.boundary.phi_b, &s.electron_model()?, &s.hydro_options())?;
    let csv = match out_file(inv, "hydro.csv")? {
        Some(path) => {
            let mut w = BufWriter::new(fs::File::create(&path)?);
            write_hydro_csv(&sol, hash, &mut w)?;
            w.flush()?;
            Some(path.display().to_string())
        }
        None => None,
    };
    let body = json!({
        "model": model,
        "phi_b": s.boundary.phi_b,
        "classification": sol.classification,
        "extent": sol.extent,
        "points": sol.profile.x.len(),
        "flux": model.flux(),
        "momentum_residual": sol.momentum_residual(),
        "mass_residual": sol.mass_residual(),
        "csv": csv,
    });
    Ok(Report::ok(body))
}

fn sweep(inv: &Invocation, s: &Scenario, hash: &str) -> Result<Report, CliError> {
    let sweep = s.sweep.as_ref().ok_or_else(|| CliError::invalid("sweep-eps needs a [sweep] section"))?;
    let opts = StudyOptions { solver: s.hydro_options(), mollifier: sweep.mollifier, electrons: s.electron_model()? };
    let (study, members) = delta_mass_runs(s.study_scenario()?, s.boundary.phi_b, &sweep.eps, &opts)?;
    let mut body = serde_json::to_value(&study)?;
    if inv.out.is_some() {
        let mut files = Vec::new();
        for (i, m) in members.iter().enumerate() {
            let path = out_file(inv, &format!("profile_eps_{i}.csv"))?.expect("out dir");
            let mut w = BufWriter::new(fs::File::create(&path)?);
            m.solution.write_csv(&m.moments, hash, &mut w)?;
            w.flush()?;
            files.push(path.display().to_string());
        }
        body["profiles"] = json!(files);
        write_json(&out_file(inv, "study.json")?.expect("out dir"), &body)?;
    }
    Ok(Report::ok(body))
}

fn reduce_wall(s: &Scenario) -> Result<Report, CliError> {
    let (f_b, f_inf) = s.distributions()?;
    let v_e = s.boundary.v_e.unwrap_or(f64::NAN);
    let phi0 = reduce_wall_potential(&f_inf, &f_b, s.boundary.alpha, v_e, &s.electron_model()?, s.solver.phi_max)?;
    Ok(Report::ok(json!({ "phi_0": phi0, "flux": f_inf.flux(), "v_e": v_e })))
}

fn validate(s: &Scenario) -> Result<Report, CliError> {
    let ctx = s.kernel_context()?;
    let conditions = check_necessary_conditions(&ctx.f_inf, &ctx.f_b, &ctx.bc)?;
    let phi_b = s.boundary.phi_b;
    let reach = if phi_b == 0.0 { 1.0 } else { phi_b };
    let samples: Vec<f64> = (1..=BOUND_SAMPLES).map(|k| reach * k as f64 / BOUND_SAMPLES as f64).collect();
    let bounds = ctx.bound_check(&samples);
    let mass = ctx.f_inf.mass();
    let neutral = (mass - 1.0).abs() < 1e-8;
    let body = json!({
        "mass": mass,
        "quasi_neutral": neutral,
        "conditions": conditions,
        "bounds": bounds,
    });
    let failure = if !neutral {
        Some(CliError::Core(SheathError::NeutralityViolation { mass }))
    } else if !conditions.pass {
        Some(CliError::invalid(format!("necessary conditions fail, residual {}", conditions.max_residual)))
    } else if !bounds.pass {
        Some(CliError::invalid("density bounds fail"))
    } else {
        None
    };
    Ok(Report { body, failure })
}

/// Runs the invocation, printing the report on stdout and any refusal as JSON on stderr.
pub fn execute(inv: &Invocation) -> i32 {
    let (body, failure) = match run(inv) {
        Ok(Report { body, failure }) => (Some(body), failure),
        Err(e) => (None, Some(e)),
    };
    if let Some(b) = body {
        println!("{}", serde_json::to_string_pretty(&b).unwrap_or_default());
    }
    match failure {
        Some(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
        None => 0,
    }
}
