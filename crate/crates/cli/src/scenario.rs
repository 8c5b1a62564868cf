//! Scenario files.
//!
//! A scenario is TOML with five sections; only `[ions]` and `[boundary]` are required.
//!
//! ```toml
//! [ions]
//! kind = "absorbing"        # or "general", or "explicit"
//! u_inf = 2.0
//! eps = 0.01
//! mollifier = "even"        # or "offset"
//!
//! [electrons]
//! model = "boltzmann"       # or "polynomial" with coefficients = [1.0, -1.0, ...]
//!
//! [boundary]
//! phi_b = 0.1
//! alpha = 0.0
//! v_e = -4.0                # only read by reduce-wall
//!
//! [solver]
//! phi_max = 10.0
//! grid = 10000
//! tau = 2e-4
//!
//! [sweep]
//! eps = [0.2, 0.1, 0.05, 0.025]
//! mollifier = "offset"
//! ```
//!
//! `kind = "general"` takes `m_b`, `m_inf`, `v_b`, `v_inf`, `eps`, `mollifier`; `alpha` comes
//! from `[boundary]`. `kind = "explicit"` takes `far_field` and optionally `wall`, each a
//! distribution with `bumps = [{ mass, center, width }, ...]`, `cutoff` and `energy_shift`.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use sheath_core::dists::{
    delta_bump, make_delta_family, BoundaryConfig, DeltaFamily, DistributionSpec, ElectronModel, GeneralParams, Mollifier,
};
use sheath_core::hydro::{HydroModel, HydroOptions, StudyScenario};
use sheath_core::kernels::KernelContext;
use sheath_core::sagdeev::{SagdeevOptions, DEFAULT_GRID, DEFAULT_PHI_MAX, DEFAULT_TAU};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Ions {
    Absorbing {
        u_inf: f64,
        eps: f64,
        #[serde(default)]
        mollifier: Mollifier,
    },
    General {
        m_b: f64,
        m_inf: f64,
        v_b: f64,
        v_inf: f64,
        eps: f64,
        #[serde(default)]
        mollifier: Mollifier,
    },
    Explicit {
        far_field: DistributionSpec,
        #[serde(default)]
        wall: DistributionSpec,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum Electrons {
    Boltzmann,
    Polynomial { coefficients: Vec<f64> },
}

impl Default for Electrons {
    fn default() -> Self {
        Electrons::Boltzmann
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Boundary {
    pub phi_b: f64,
    #[serde(default)]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v_e: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Solver {
    pub phi_max: f64,
    pub grid: usize,
    pub tau: f64,
}

impl Default for Solver {
    fn default() -> Self {
        Self { phi_max: DEFAULT_PHI_MAX, grid: DEFAULT_GRID, tau: DEFAULT_TAU }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub eps: Vec<f64>,
    #[serde(default = "offset")]
    pub mollifier: Mollifier,
}

fn offset() -> Mollifier {
    Mollifier::Offset
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub ions: Ions,
    #[serde(default)]
    pub electrons: Electrons,
    pub boundary: Boundary,
    #[serde(default)]
    pub solver: Solver,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let s: Scenario = toml::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }

    fn validate(&self) -> Result<(), CliError> {
        let s = &self.solver;
        if !(s.phi_max > 0.0 && s.phi_max.is_finite() && s.grid >= 16 && s.tau >= 0.0) {
            return Err(CliError::invalid("solver needs phi_max > 0, grid >= 16 and tau >= 0"));
        }
        if !self.boundary.phi_b.is_finite() {
            return Err(CliError::invalid("phi_b must be finite"));
        }
        self.electron_model()?;
        Ok(())
    }

    pub fn electron_model(&self) -> Result<ElectronModel, CliError> {
        Ok(match &self.electrons {
            Electrons::Boltzmann => ElectronModel::Boltzmann,
            Electrons::Polynomial { coefficients } => ElectronModel::polynomial(coefficients.clone())?,
        })
    }

    pub fn boundary_config(&self) -> Result<BoundaryConfig, CliError> {
        let b = &self.boundary;
        let bc = BoundaryConfig::new(b.phi_b, b.alpha)?;
        Ok(match b.v_e {
            Some(v) => bc.with_v_e(v),
            None => bc,
        })
    }

    fn general_params(&self) -> Option<GeneralParams> {
        match self.ions {
            Ions::General { m_b, m_inf, v_b, v_inf, .. } => {
                Some(GeneralParams { m_b, m_inf, v_b, v_inf, alpha: self.boundary.alpha })
            }
            _ => None,
        }
    }

    /// `(f_b, f_inf)`.
    pub fn distributions(&self) -> Result<(DistributionSpec, DistributionSpec), CliError> {
        let phi_b = self.boundary.phi_b;
        Ok(match &self.ions {
            Ions::Absorbing { u_inf, eps, mollifier } => (DistributionSpec::zero(), delta_bump(*u_inf, *eps, *mollifier)?),
            Ions::General { eps, mollifier, .. } => {
                let params = self.general_params().expect("general ions");
                make_delta_family(&DeltaFamily::General { params, phi_b }, *eps, *mollifier)?
            }
            Ions::Explicit { far_field, wall } => (wall.clone(), far_field.clone()),
        })
    }

    pub fn kernel_context(&self) -> Result<KernelContext, CliError> {
        let (f_b, f_inf) = self.distributions()?;
        Ok(KernelContext::new(f_inf, f_b, self.boundary_config()?)?)
    }

    pub fn sagdeev_options(&self) -> SagdeevOptions {
        SagdeevOptions { phi_max: self.solver.phi_max, grid: self.solver.grid, tau: self.solver.tau }
    }

    pub fn hydro_options(&self) -> HydroOptions {
        HydroOptions { sagdeev: self.sagdeev_options(), points: self.solver.grid }
    }

    /// Fluid limit of a family scenario.
    pub fn hydro_model(&self) -> Result<HydroModel, CliError> {
        match self.ions {
            Ions::Absorbing { u_inf, .. } => Ok(HydroModel::EulerPoisson { u_inf }),
            Ions::General { .. } => Ok(HydroModel::Generalized(self.general_params().expect("general ions"))),
            Ions::Explicit { .. } => Err(CliError::invalid("fluid models need kind = \"absorbing\" or \"general\"")),
        }
    }

    pub fn study_scenario(&self) -> Result<StudyScenario, CliError> {
        match self.hydro_model()? {
            HydroModel::EulerPoisson { u_inf } => Ok(StudyScenario::Absorbing { u_inf }),
            HydroModel::Generalized(p) => Ok(StudyScenario::General(p)),
        }
    }
}

/// Hex SHA-256 of the scenario file bytes.
pub fn scenario_hash(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const GENERAL: &str = r#"
[ions]
kind = "general"
m_b = 0.2
m_inf = 0.5333333333333333
v_b = 2.0
v_inf = 2.0
eps = 0.01

[boundary]
phi_b = -0.05
alpha = 0.5

[sweep]
eps = [0.2, 0.1]
"#;

    #[test]
    fn round_trip_is_lossless() {
        let s = Scenario::parse(GENERAL).unwrap();
        let again = Scenario::parse(&s.to_toml()).unwrap();
        assert_eq!(s, again);
        assert_eq!(s.sweep.as_ref().unwrap().mollifier, Mollifier::Offset);
        assert_eq!(s.solver, Solver::default());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = GENERAL.replace("alpha = 0.5", "alpha = 0.5\nbeta = 1.0");
        assert_eq!(Scenario::parse(&bad).unwrap_err().code(), "INVALID_INPUT");
        let bad = GENERAL.replace("eps = 0.01", "eps = 0.01\nwidth = 2");
        assert!(Scenario::parse(&bad).is_err());
    }

    #[test]
    fn explicit_distributions() {
        let text = r#"
[ions]
kind = "explicit"
far_field = { bumps = [{ mass = 1.0, center = [-2.0, 0.0, 0.0], width = 0.1 }] }
wall = { bumps = [{ mass = 0.05, center = [0.6, 0.0, 0.0], width = 0.2 }], cutoff = "positive" }

[electrons]
model = "polynomial"
coefficients = [1.0, -1.0, 1.0]

[boundary]
phi_b = 0.5
alpha = 0.3
"#;
        let s = Scenario::parse(text).unwrap();
        let ctx = s.kernel_context().unwrap();
        assert!((ctx.f_inf.mass() - 1.0).abs() < 1e-9);
        assert!(!ctx.f_b.is_zero());
        assert_eq!(s.hydro_model().unwrap_err().code(), "INVALID_INPUT");
    }

    #[test]
    fn hash_is_hex_sha256() {
        let h = scenario_hash(b"abc");
        assert_eq!(h, "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }
}
