use thiserror::Error;

/// Every refusal the library can produce.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SheathError {
    #[error("refraction rate alpha = 1 is not admissible")]
    RejectAlphaOne,
    #[error("alpha = {0} is outside [0, 1)")]
    InvalidAlpha(f64),
    #[error("velocity condition fails: {0}")]
    RejectVelocity1(String),
    #[error("eps = {eps} must lie in (0, {limit})")]
    RejectEps { eps: f64, limit: f64 },
    #[error("phi = {phi} lies outside the kernel domain")]
    Domain { phi: f64 },
    #[error("far-field mass {mass} differs from 1 by more than 1e-8")]
    NeutralityViolation { mass: f64 },
    #[error("operation needs a solvable classification, found {0}")]
    NotApplicable(String),
    #[error("Bohm criterion violated: no solution exists")]
    NoSolutionCriterion,
    #[error("marginal Bohm case with empty positivity set: no solution exists")]
    NoSolutionEmptyB,
    #[error("|phi_b| = {phi_b} is not below the positivity bound {bound}")]
    PhiBOutOfRange { phi_b: f64, bound: f64 },
    #[error("profile decays over fewer than one decade before the tail")]
    InsufficientDecay,
    #[error("u_inf = {0} is below the sound speed")]
    BohmViolated(f64),
    #[error("fluid velocity condition fails: {0}")]
    Velocity1Violated(String),
    #[error("no wall potential balances the fluxes: {0}")]
    NoRoot(String),
    #[error("wall reduction needs f_b = 0 and alpha = 0")]
    ReductionUnsupported,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl SheathError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Self::RejectAlphaOne => "REJECT_ALPHA_ONE",
            Self::InvalidAlpha(_) => "INVALID_ALPHA",
            Self::RejectVelocity1(_) => "REJECT_VELOCITY1",
            Self::RejectEps { .. } => "REJECT_EPS",
            Self::Domain { .. } => "DOMAIN",
            Self::NeutralityViolation { .. } => "NEUTRALITY_VIOLATION",
            Self::NotApplicable(_) => "NOT_APPLICABLE",
            Self::NoSolutionCriterion => "NO_SOLUTION_CRITERION",
            Self::NoSolutionEmptyB => "NO_SOLUTION_EMPTY_B",
            Self::PhiBOutOfRange { .. } => "PHI_B_OUT_OF_RANGE",
            Self::InsufficientDecay => "INSUFFICIENT_DECAY",
            Self::BohmViolated(_) => "BOHM_VIOLATED",
            Self::Velocity1Violated(_) => "VELOCITY1_VIOLATED",
            Self::NoRoot(_) => "NO_ROOT",
            Self::ReductionUnsupported => "REDUCTION_UNSUPPORTED",
            Self::InvalidInput(_) => "INVALID_INPUT",
        }
    }

    /// True for refusals that mean "the problem has no solution" rather than bad input.
    pub fn is_no_solution(&self) -> bool {
        matches!(
            self,
            Self::NoSolutionCriterion
                | Self::NoSolutionEmptyB
                | Self::PhiBOutOfRange { .. }
                | Self::BohmViolated(_)
                | Self::NoRoot(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, SheathError>;
