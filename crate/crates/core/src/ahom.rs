//! The adaptive high-order driver.
//!
//! Each iteration takes one adaptive cubic-regularization step, measures
//! first/second/third-order criticality at the accepted point, and — when
//! the projected third-derivative mass dominates the gradient's scale —
//! attempts a tensor-aligned escape step of length χ3/(βκ). The escape is
//! kept only when the realized decrease clears the ratio test Φ ≥ ξ1;
//! otherwise κ grows by ζ, shrinking future escape steps until they start
//! paying off. κ never changes except on a failed escape, which bounds the
//! number of failures whenever the third derivative's Lipschitz constant
//! is finite.

use std::fmt;
use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubic_subsolver::SubsolverMode;
use crate::problems::{ObjectiveOracle, ProblemMeta};
use crate::sarp::{sarp_step, SarpConfig};
use crate::third_order::{atn, critical_measures, CompetitiveSubspace};

/// A run stops once the objective or an iterate coordinate passes this
/// magnitude: the objective is then unbounded below along the trajectory
/// and further arithmetic only marches toward overflow.
pub const DIVERGENCE_LIMIT: f64 = 1e100;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Sarp(#[from] crate::sarp::ConfigError),
    #[error("escape acceptance threshold xi1 must lie in (0, 1), got {0}")]
    BadXi1(f64),
    #[error("kappa growth factor zeta must exceed 1, got {0}")]
    BadZeta(f64),
    #[error("amplification parameter beta must be positive, got {0}")]
    BadBeta(f64),
    #[error("initial kappa must be positive, got {0}")]
    BadKappa0(f64),
    #[error("tolerances must be positive, got eps1={eps1}, eps2={eps2}, eps3={eps3}")]
    BadTolerances { eps1: f64, eps2: f64, eps3: f64 },
    #[error("time budget must be positive, got {0}")]
    BadTimeBudget(f64),
}

/// Full parameter set for a run: the inner step's constants plus the
/// escape machinery's.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct AhomConfig {
    pub sarp: SarpConfig,
    /// Which subsolver the inner step uses.
    pub subsolver_mode: SubsolverMode,
    /// Escape acceptance threshold ξ1 ∈ (0, 1).
    pub xi1: f64,
    /// κ growth factor ζ > 1, applied on failed escapes.
    pub zeta: f64,
    /// Amplification parameter β of the direction search and the
    /// competitive-subspace threshold.
    pub beta: f64,
    /// Initial κ.
    pub kappa0: f64,
    /// Gradient-norm tolerance ε1.
    pub eps1: f64,
    /// Negative-curvature tolerance ε2.
    pub eps2: f64,
    /// Projected third-derivative tolerance ε3.
    pub eps3: f64,
    pub max_iters: usize,
    pub max_time_s: f64,
    /// Seed for the run's private generator (subsolver tie-breaks and
    /// direction draws).
    pub seed: u64,
}

impl Default for AhomConfig {
    fn default() -> Self {
        Self {
            sarp: SarpConfig::default(),
            subsolver_mode: SubsolverMode::Krylov,
            xi1: 1e-9,
            zeta: 1.1,
            beta: 20.0,
            kappa0: 1e-6,
            eps1: 1e-6,
            eps2: 1e-6,
            eps3: 1e-6,
            max_iters: 5000,
            max_time_s: 600.0,
            seed: 0,
        }
    }
}

impl AhomConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sarp.validate()?;
        if !(0.0 < self.xi1 && self.xi1 < 1.0) {
            return Err(ConfigError::BadXi1(self.xi1));
        }
        if self.zeta <= 1.0 {
            return Err(ConfigError::BadZeta(self.zeta));
        }
        if self.beta <= 0.0 {
            return Err(ConfigError::BadBeta(self.beta));
        }
        if self.kappa0 <= 0.0 {
            return Err(ConfigError::BadKappa0(self.kappa0));
        }
        if !(self.eps1 > 0.0 && self.eps2 > 0.0 && self.eps3 > 0.0) {
            return Err(ConfigError::BadTolerances {
                eps1: self.eps1,
                eps2: self.eps2,
                eps3: self.eps3,
            });
        }
        if self.max_time_s <= 0.0 {
            return Err(ConfigError::BadTimeBudget(self.max_time_s));
        }
        Ok(())
    }
}

/// What one trace row's step amounted to. The driver's rows use the three
/// escape kinds (`escape_skipped` when the trigger never fired); plain
/// adaptive-step kinds are used by the second-order baseline's rows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    SarpSuccess,
    SarpFail,
    EscapeSuccess,
    EscapeFail,
    EscapeSkipped,
}

impl StepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StepKind::SarpSuccess => "sarp_success",
            StepKind::SarpFail => "sarp_fail",
            StepKind::EscapeSuccess => "escape_success",
            StepKind::EscapeFail => "escape_fail",
            StepKind::EscapeSkipped => "escape_skipped",
        }
    }
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One iteration's trace row. σ and κ are the values the iteration
/// *started* with; ρ is the inner step's ratio; Φ and Δ are present only
/// when an escape was attempted; f and step_norm describe the point the
/// iteration ended at.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iter: usize,
    pub f: f64,
    pub chi1: f64,
    pub chi2: f64,
    pub chi3: f64,
    pub sigma: f64,
    pub kappa: f64,
    pub rho: f64,
    pub phi: Option<f64>,
    pub delta: Option<f64>,
    pub step_kind: StepKind,
    pub step_norm: f64,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// All three measures fell below their tolerances.
    Converged,
    /// Iteration or wall-time budget ran out first.
    BudgetExhausted,
}

/// A finished run: the final iterate, its value, and the full trace.
#[derive(Debug, Clone)]
pub struct AhomResult {
    pub x: DVector<f64>,
    pub f: f64,
    pub status: RunStatus,
    pub trace: Vec<IterationRecord>,
    /// κ after the last iteration (needed to reproduce the final
    /// measures, which depend on it).
    pub final_kappa: f64,
}

/// Result of one attempted escape step from z.
#[derive(Debug, Clone)]
pub struct EscapeOutcome {
    pub x_next: DVector<f64>,
    pub f_next: f64,
    pub kappa_next: f64,
    /// Realized-over-guaranteed decrease ratio Φ; −∞ when the trial value
    /// was not finite.
    pub phi: f64,
    /// Guaranteed decrease Δ = χ3⁴/(24β⁴κ³).
    pub delta: f64,
    /// `EscapeSuccess` or `EscapeFail`.
    pub kind: StepKind,
}

/// Attempts the tensor-aligned escape from `z`: draws a direction u in the
/// competitive subspace, steps x⁺ = z − (χ3/(βκ))·u, and accepts iff the
/// realized decrease is at least ξ1 times the guaranteed amount Δ. On
/// rejection the iterate stays and κ grows by ζ.
///
/// The caller must have checked the escape trigger χ3 ≥ β(24·χ1·κ²)^{1/3}
/// and that the subspace is nonempty.
pub fn escape_attempt<O: ObjectiveOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &O,
    z: &DVector<f64>,
    subspace: &CompetitiveSubspace,
    kappa: f64,
    config: &AhomConfig,
    rng: &mut R,
) -> EscapeOutcome {
    let aligned = atn(subspace, config.beta, rng)
        .expect("escape requires a nonempty competitive subspace");
    let chi3 = subspace.chi3;
    let step_len = chi3 / (config.beta * kappa);
    let candidate = z - aligned.direction.scale(step_len);
    let f_z = oracle.value(z);
    let f_candidate = oracle.value(&candidate);
    let delta = chi3.powi(4) / (24.0 * config.beta.powi(4) * kappa.powi(3));
    let phi = if f_candidate.is_finite() {
        (f_z - f_candidate) / delta
    } else {
        f64::NEG_INFINITY
    };
    if phi >= config.xi1 {
        EscapeOutcome {
            x_next: candidate,
            f_next: f_candidate,
            kappa_next: kappa,
            phi,
            delta,
            kind: StepKind::EscapeSuccess,
        }
    } else {
        EscapeOutcome {
            x_next: z.clone(),
            f_next: f_z,
            kappa_next: config.zeta * kappa,
            phi,
            delta,
            kind: StepKind::EscapeFail,
        }
    }
}

/// Runs the driver from `x0` until all three criticality tolerances hold
/// at the accepted point of some iteration, or a budget runs out.
pub fn ahom_run<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    x0: &DVector<f64>,
    config: &AhomConfig,
) -> Result<AhomResult, ConfigError> {
    config.validate()?;
    assert!(
        x0.iter().all(|v| v.is_finite()),
        "initial point must be finite"
    );
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut x = x0.clone();
    let mut f = oracle.value(&x);
    let mut sigma = config.sarp.sigma0;
    let mut kappa = config.kappa0;
    let mut trace = Vec::new();

    for iter in 0..config.max_iters {
        let sigma_entering = sigma;
        let kappa_entering = kappa;

        let inner = sarp_step(oracle, &x, sigma, &config.sarp, config.subsolver_mode, &mut rng);
        sigma = inner.sigma_next;
        let z = inner.z;
        let f_z = inner.f_z;

        if !f_z.is_finite() || f_z <= -DIVERGENCE_LIMIT || z.amax() >= DIVERGENCE_LIMIT {
            // Numerically diverged: f is unbounded below along this
            // trajectory. Keep the last point and stop.
            x = z;
            f = f_z;
            break;
        }

        let measures = critical_measures(oracle, &z, config.beta, kappa);

        if measures.chi1 <= config.eps1
            && measures.chi2 <= config.eps2
            && measures.chi3 <= config.eps3
        {
            trace.push(IterationRecord {
                iter,
                f: f_z,
                chi1: measures.chi1,
                chi2: measures.chi2,
                chi3: measures.chi3,
                sigma: sigma_entering,
                kappa: kappa_entering,
                rho: inner.rho,
                phi: None,
                delta: None,
                step_kind: StepKind::EscapeSkipped,
                step_norm: inner.step_norm,
                wall_time_s: started.elapsed().as_secs_f64(),
            });
            return Ok(AhomResult {
                x: z,
                f: f_z,
                status: RunStatus::Converged,
                trace,
                final_kappa: kappa,
            });
        }

        let threshold = config.beta * (24.0 * measures.chi1 * kappa * kappa).cbrt();
        let triggered = measures.chi3 >= threshold && !measures.subspace.basis.is_empty();
        let (x_next, f_next, phi, delta, kind) = if triggered {
            let escape = escape_attempt(oracle, &z, &measures.subspace, kappa, config, &mut rng);
            kappa = escape.kappa_next;
            (
                escape.x_next,
                escape.f_next,
                Some(escape.phi),
                Some(escape.delta),
                escape.kind,
            )
        } else {
            (z, f_z, None, None, StepKind::EscapeSkipped)
        };

        trace.push(IterationRecord {
            iter,
            f: f_next,
            chi1: measures.chi1,
            chi2: measures.chi2,
            chi3: measures.chi3,
            sigma: sigma_entering,
            kappa: kappa_entering,
            rho: inner.rho,
            phi,
            delta,
            step_kind: kind,
            step_norm: (&x_next - &x).norm(),
            wall_time_s: started.elapsed().as_secs_f64(),
        });
        x = x_next;
        f = f_next;

        if started.elapsed().as_secs_f64() > config.max_time_s {
            break;
        }
    }

    Ok(AhomResult {
        x,
        f,
        status: RunStatus::BudgetExhausted,
        trace,
        final_kappa: kappa,
    })
}

/// Worst-case envelopes implied by the run's constants and whatever
/// smoothness constants the problem publishes. Absent constants yield
/// absent bounds.
#[derive(Debug, Clone, Serialize)]
pub struct TheoreticalBounds {
    /// Largest σ any step can reach: max(σ0, 3γ3·L/(2(1−η2))).
    pub sigma_max: Option<f64>,
    /// Largest κ any run can reach: max(κ0, ζ·L3/(2−ξ1)).
    pub kappa_max: Option<f64>,
    /// Cap on failed escapes: ⌈ln(κ_max/κ0)/ln ζ⌉.
    pub u_third1_cap: Option<usize>,
    /// Per-iteration worst-case decrease constant (the max of four terms;
    /// diagnostic only).
    pub omega: Option<f64>,
    /// Worst-case total iteration count; needs the initial value and the
    /// problem's lower bound on top of both Lipschitz constants.
    pub total_iter_cap: Option<f64>,
}

/// Computes the envelopes above. `f0` is the objective value at the
/// intended start point; it only feeds `total_iter_cap` and may be omitted.
pub fn theoretical_bounds(
    config: &AhomConfig,
    meta: &ProblemMeta,
    f0: Option<f64>,
) -> TheoreticalBounds {
    let s = &config.sarp;
    let sigma_max = meta
        .known_l
        .map(|l| s.sigma0.max(s.gamma3 * l * 3.0 / (2.0 * (1.0 - s.eta2))));
    let kappa_max = meta
        .known_l3
        .map(|l3| config.kappa0.max(config.zeta * l3 / (2.0 - config.xi1)));
    let u_third1_cap =
        kappa_max.map(|km| ((km / config.kappa0).ln() / config.zeta.ln()).ceil().max(0.0) as usize);

    let omega = match (sigma_max, kappa_max, meta.known_l) {
        (Some(sm), Some(km), Some(l)) => {
            let lead = 3.0 / (s.eta1 * s.sigma_min);
            let slope_term = lead * (l + s.theta + sm).powf(1.5);
            let curvature_term = lead * (l + s.theta + 2.0 * sm).powi(3);
            let tensor_term =
                lead * (24.0 * config.beta.powi(3) * km * km * (l + s.theta + sm)).powf(1.5);
            let escape_term = config.beta * km.powi(3) / config.xi1;
            Some(
                slope_term
                    .max(curvature_term)
                    .max(tensor_term)
                    .max(escape_term),
            )
        }
        _ => None,
    };

    let total_iter_cap = match (omega, kappa_max, sigma_max, meta.lower_bound, f0) {
        (Some(om), Some(km), Some(sm), Some(f_low), Some(f0)) => {
            let gap = (f0 - f_low).max(0.0);
            let eps_pow = config
                .eps1
                .powf(-1.5)
                .max(config.eps2.powf(-3.0))
                .max(config.eps3.powf(-4.0))
                .max(config.eps3.powf(-4.5));
            let main = 2.0 * om * gap * eps_pow + (km / config.kappa0).ln() / config.zeta.ln();
            let inflate = 1.0 + s.gamma1.ln().abs() / s.gamma2.ln();
            let sigma_drift = (sm / s.sigma0).ln() / s.gamma2.ln();
            Some((main * inflate + sigma_drift).ceil())
        }
        _ => None,
    };

    TheoreticalBounds {
        sigma_max,
        kappa_max,
        u_third1_cap,
        omega,
        total_iter_cap,
    }
}
