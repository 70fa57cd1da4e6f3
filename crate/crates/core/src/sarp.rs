//! A single adaptive cubic-regularization step: solve the regularized model
//! at the current point, accept or reject by the realized-vs-predicted
//! decrease ratio ρ, and update the regularization weight σ.
//!
//! The ratio's denominator is the decrease of the *unregularized*
//! second-order Taylor model, so an exactly quadratic objective yields
//! ρ = 1. The σ policy is endpoint-deterministic: a very successful step
//! (ρ ≥ η2) shrinks σ to max(σ_min, γ1·σ), a merely successful one
//! (η1 ≤ ρ < η2) keeps it, and an unsuccessful one grows it to γ3·σ. A
//! degenerate model decrease — at second-order critical points the model
//! step vanishes — is classed unsuccessful so σ keeps growing and the
//! outer loop retains control.

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubic_subsolver::{solve_cubic_model, ModelSolution, SubsolverMode};
use crate::problems::ObjectiveOracle;

/// Model decreases at or below this are treated as no step at all.
pub const DEGENERATE_DECREASE: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("ratio thresholds must satisfy 0 < eta1 <= eta2 < 1, got eta1={eta1}, eta2={eta2}")]
    BadEtas { eta1: f64, eta2: f64 },
    #[error("growth factors must satisfy 0 < gamma1 < 1 < gamma2 < gamma3, got gamma1={gamma1}, gamma2={gamma2}, gamma3={gamma3}")]
    BadGammas { gamma1: f64, gamma2: f64, gamma3: f64 },
    #[error("regularization weights must satisfy 0 < sigma_min <= sigma0, got sigma_min={sigma_min}, sigma0={sigma0}")]
    BadSigmas { sigma_min: f64, sigma0: f64 },
    #[error("inner tolerance theta must be positive, got {0}")]
    BadTheta(f64),
}

/// Parameters of the adaptive-regularization step.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SarpConfig {
    /// Initial regularization weight σ0.
    pub sigma0: f64,
    /// Floor for σ after very successful steps.
    pub sigma_min: f64,
    /// Shrink factor applied to σ on very successful steps (γ1 < 1).
    pub gamma1: f64,
    /// Nominal mild-growth factor γ2; the deterministic update never
    /// consults it, but the worst-case iteration bound does.
    pub gamma2: f64,
    /// Growth factor applied to σ on unsuccessful steps (γ3 > γ2).
    pub gamma3: f64,
    /// Acceptance threshold η1 on the decrease ratio.
    pub eta1: f64,
    /// Very-successful threshold η2 ≥ η1.
    pub eta2: f64,
    /// Inner model tolerance θ for the subsolver's acceptance conditions.
    pub theta: f64,
}

impl Default for SarpConfig {
    fn default() -> Self {
        Self {
            sigma0: 2.0,
            sigma_min: 1e-16,
            gamma1: 0.5,
            gamma2: 1.1,
            gamma3: 2.0,
            eta1: 0.1,
            eta2: 0.9,
            theta: 1e-4,
        }
    }
}

impl SarpConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(0.0 < self.eta1 && self.eta1 <= self.eta2 && self.eta2 < 1.0) {
            return Err(ConfigError::BadEtas {
                eta1: self.eta1,
                eta2: self.eta2,
            });
        }
        if !(0.0 < self.gamma1
            && self.gamma1 < 1.0
            && 1.0 < self.gamma2
            && self.gamma2 < self.gamma3)
        {
            return Err(ConfigError::BadGammas {
                gamma1: self.gamma1,
                gamma2: self.gamma2,
                gamma3: self.gamma3,
            });
        }
        if !(0.0 < self.sigma_min && self.sigma_min <= self.sigma0) {
            return Err(ConfigError::BadSigmas {
                sigma_min: self.sigma_min,
                sigma0: self.sigma0,
            });
        }
        if self.theta <= 0.0 {
            return Err(ConfigError::BadTheta(self.theta));
        }
        Ok(())
    }
}

/// Result of one adaptive step from x under weight σ.
#[derive(Debug, Clone)]
pub struct SarpOutcome {
    /// The accepted point: x + s when the ratio test passed, x otherwise.
    pub z: DVector<f64>,
    /// Objective value at z.
    pub f_z: f64,
    /// Regularization weight for the next step.
    pub sigma_next: f64,
    /// Realized-over-predicted decrease ratio ρ; NaN when the model
    /// decrease was degenerate, −∞ when the trial value was not finite.
    pub rho: f64,
    /// Whether the step was accepted (ρ ≥ η1).
    pub successful: bool,
    /// Distance actually moved, ‖z − x‖ (zero on rejection).
    pub step_norm: f64,
    /// Decrease of the unregularized Taylor model along the attempted
    /// step — the denominator of ρ.
    pub model_decrease: f64,
    /// The inner model solution (step, residuals, mode used).
    pub model: ModelSolution,
}

/// Runs one adaptive step: minimize the cubic model of `oracle` at `x`
/// under weight `sigma`, apply the ratio test, and report the next point
/// and weight. `rng` is consumed only by degenerate subsolver tie-breaks.
pub fn sarp_step<O: ObjectiveOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &O,
    x: &DVector<f64>,
    sigma: f64,
    config: &SarpConfig,
    mode: SubsolverMode,
    rng: &mut R,
) -> SarpOutcome {
    let g = oracle.gradient(x);
    let h = oracle.hessian(x);
    let model = solve_cubic_model(&g, &h, sigma, config.theta, mode, rng);
    let model_decrease = model.model_decrease;

    if model_decrease <= DEGENERATE_DECREASE {
        // No usable step: reject and escalate σ.
        return SarpOutcome {
            z: x.clone(),
            f_z: oracle.value(x),
            sigma_next: config.gamma3 * sigma,
            rho: f64::NAN,
            successful: false,
            step_norm: 0.0,
            model_decrease,
            model,
        };
    }

    let f_x = oracle.value(x);
    let candidate = x + &model.step;
    let f_candidate = oracle.value(&candidate);
    let rho = if f_candidate.is_finite() {
        (f_x - f_candidate) / model_decrease
    } else {
        f64::NEG_INFINITY
    };

    let (z, f_z, sigma_next, successful) = if rho >= config.eta2 {
        (
            candidate,
            f_candidate,
            config.sigma_min.max(config.gamma1 * sigma),
            true,
        )
    } else if rho >= config.eta1 {
        (candidate, f_candidate, sigma, true)
    } else {
        (x.clone(), f_x, config.gamma3 * sigma, false)
    };

    let step_norm = if successful { model.step.norm() } else { 0.0 };
    SarpOutcome {
        z,
        f_z,
        sigma_next,
        rho,
        successful,
        step_norm,
        model_decrease,
        model,
    }
}
