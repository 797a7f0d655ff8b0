use serde::{Deserialize, Serialize};

use crate::bundle::Scale;
use crate::error::{Error, Result};
use crate::geometry::DEFAULT_NODE_BUDGET;

/// Overrides that deliberately break a pipeline, for exercising its failure paths.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DebugHooks {
    /// Replaces the 1-cocycle `c` of the two-dimensional example (values per overlap component).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cocycle: Option<Vec<i64>>,
    /// Replaces the half-scale exponential push.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

impl DebugHooks {
    pub fn is_empty(&self) -> bool {
        self.cocycle.is_none() && self.scale.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub n: usize,
    /// Defaults to `n / 2` when absent.
    pub epsilon: Option<f64>,
    pub r: f64,
    /// Lattice step of the connectivity scan; planned from the node budget when absent.
    pub step: Option<f64>,
    /// Thickening of `∂G_eps`; defaults to the lattice step.
    pub delta: Option<f64>,
    pub samples: usize,
    pub tol_cocycle: f64,
    pub tol_chern: f64,
    pub tol_fd: f64,
    pub seed: u64,
    pub safety: f64,
    pub budget_nodes: usize,
    #[serde(default, skip_serializing_if = "DebugHooks::is_empty")]
    pub debug: DebugHooks,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            n: 2,
            epsilon: None,
            r: 4.0,
            step: None,
            delta: None,
            samples: 1000,
            tol_cocycle: 1e-9,
            tol_chern: 1e-6,
            tol_fd: 1e-5,
            seed: 7,
            safety: 0.5,
            budget_nodes: DEFAULT_NODE_BUDGET,
            debug: DebugHooks::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn with_n(n: usize) -> Self {
        ScenarioConfig {
            n,
            ..Default::default()
        }
    }

    pub fn eps(&self) -> f64 {
        self.epsilon.unwrap_or(self.n as f64 / 2.0)
    }

    /// Checks shared by both pipelines. `eps >= n` is allowed: the dimension-`n` pipeline
    /// reports it as a failed (refused) step rather than a configuration error.
    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::Invalid(format!("{name} must be positive and finite, got {v}")))
            }
        };
        if self.n < 2 {
            return Err(Error::Invalid(format!("n must be at least 2, got {}", self.n)));
        }
        if self.n > 6 {
            return Err(Error::Invalid(format!("n = {} exceeds the supported maximum of 6", self.n)));
        }
        pos("epsilon", self.eps())?;
        pos("r", self.r)?;
        if let Some(s) = self.step {
            pos("step", s)?;
        }
        if let Some(d) = self.delta {
            pos("delta", d)?;
        }
        pos("tol-cocycle", self.tol_cocycle)?;
        pos("tol-chern", self.tol_chern)?;
        pos("tol-fd", self.tol_fd)?;
        if !(self.safety > 0.0 && self.safety < 1.0) {
            return Err(Error::Invalid(format!("safety must lie in (0, 1), got {}", self.safety)));
        }
        if self.samples == 0 {
            return Err(Error::Invalid("samples must be positive".into()));
        }
        if self.budget_nodes == 0 {
            return Err(Error::Invalid("budget-nodes must be positive".into()));
        }
        Ok(())
    }
}
