use std::fmt;

use thiserror::Error;

/// Which arm of a two-arm trial a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Arm {
    Control,
    Treated,
}

impl fmt::Display for Arm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arm::Control => f.write_str("control"),
            Arm::Treated => f.write_str("treated"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("correlation {rho} outside admissible range [{lower}, {upper}]{}", arm_suffix(.arm))]
    RhoOutOfBounds { rho: f64, lower: f64, upper: f64, arm: Option<Arm> },

    #[error("no treatment effect (odds ratio 1): required sample size is infinite")]
    EffectAbsent,

    #[error("degenerate estimate: {0}")]
    DegenerateEstimate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn arm_suffix(arm: &Option<Arm>) -> String {
    match arm {
        Some(a) => format!(" in {a} arm"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Tags an out-of-range correlation with the arm it was detected in.
    pub(crate) fn in_arm(self, arm: Arm) -> Self {
        match self {
            Error::RhoOutOfBounds { rho, lower, upper, .. } => {
                Error::RhoOutOfBounds { rho, lower, upper, arm: Some(arm) }
            }
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
