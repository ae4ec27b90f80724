use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The positive parameter ℏ. In the holomorphic-space modules the same number
/// plays the role of the Gaussian variance parameter `t`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PlanckScale(f64);

impl PlanckScale {
    pub fn new(hbar: f64) -> Result<Self> {
        if hbar.is_finite() && hbar > 0.0 {
            Ok(PlanckScale(hbar))
        } else {
            Err(Error::invalid(format!("hbar must be positive and finite, got {hbar}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn sqrt(self) -> f64 {
        self.0.sqrt()
    }
}

impl TryFrom<f64> for PlanckScale {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        PlanckScale::new(v)
    }
}

impl From<PlanckScale> for f64 {
    fn from(s: PlanckScale) -> f64 {
        s.0
    }
}

impl std::fmt::Display for PlanckScale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}
