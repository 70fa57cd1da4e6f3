//! Reference optimizers the comparisons are run against: gradient descent
//! with Armijo backtracking, the full adaptive cubic-regularization loop
//! (ARC), and a Steihaug-CG trust-region method (TR).
//!
//! All three share a budget and the first- and second-order tolerances.
//! GD stops at approximate first-order criticality; ARC and TR stop only
//! once the smallest Hessian eigenvalue is nonnegative up to `eps2` as
//! well. None of them look at third derivatives, which is exactly why
//! they stall on degenerate saddles.

use std::time::Instant;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ahom::{RunStatus, StepKind, DIVERGENCE_LIMIT};
use crate::cubic_subsolver::SubsolverMode;
use crate::linalg;
use crate::problems::ObjectiveOracle;
use crate::sarp::{sarp_step, SarpConfig};

/// Below this Armijo step length the line search has degenerated into
/// rounding noise and the run is cut off instead of spinning.
const MIN_ARMIJO_STEP: f64 = 1e-20;

/// Steihaug-CG may run at most this multiple of the dimension in
/// iterations before returning its current interior point.
const CG_MAX_ITERS_PER_DIM: usize = 2;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error(transparent)]
    Sarp(#[from] crate::sarp::ConfigError),
    #[error("armijo parameters need 0 < c1 < 1, 0 < backtrack < 1, initial step > 0; got c1={c1}, backtrack={backtrack}, initial_step={initial_step}")]
    BadArmijo {
        c1: f64,
        backtrack: f64,
        initial_step: f64,
    },
    #[error("trust-region radii must satisfy 0 < initial <= max, got initial={initial}, max={max}")]
    BadRadii { initial: f64, max: f64 },
    #[error("trust-region ratios need 0 < accept < very_good < 1, shrink in (0,1), grow > 1; got accept={accept}, very_good={very_good}, shrink={shrink}, grow={grow}")]
    BadRatios {
        accept: f64,
        very_good: f64,
        shrink: f64,
        grow: f64,
    },
    #[error("relative CG tolerance must lie in (0, 1), got {0}")]
    BadCgTol(f64),
    #[error("tolerances must be positive, got eps1={eps1}, eps2={eps2}")]
    BadTolerances { eps1: f64, eps2: f64 },
    #[error("time budget must be positive, got {0}")]
    BadTimeBudget(f64),
}

/// Armijo backtracking constants for gradient descent.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GdArmijo {
    /// Sufficient-decrease coefficient on t·‖∇f‖².
    pub c1: f64,
    /// Multiplier applied to the trial step after each rejection.
    pub backtrack: f64,
    /// First trial step length. A full unit step is enough to vault a
    /// cubic saddle shelf and sail off down an unbounded slope, so the
    /// default starts an order of magnitude shorter and lets the search
    /// grow nothing — only shrink.
    pub initial_step: f64,
}

impl Default for GdArmijo {
    fn default() -> Self {
        GdArmijo {
            c1: 1e-4,
            backtrack: 0.5,
            initial_step: 0.1,
        }
    }
}

/// Radius-management constants for the trust-region method.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TrustRegion {
    pub initial_radius: f64,
    pub max_radius: f64,
    /// Steps with ratio at or above this are taken.
    pub accept_ratio: f64,
    /// Boundary steps with ratio at or above this grow the radius.
    pub very_good_ratio: f64,
    pub shrink: f64,
    pub grow: f64,
    /// Steihaug-CG stops once the model-gradient norm falls below this
    /// times the starting gradient norm.
    pub cg_rel_tol: f64,
}

impl Default for TrustRegion {
    fn default() -> Self {
        TrustRegion {
            initial_radius: 5.0,
            max_radius: 1e4,
            accept_ratio: 0.25,
            very_good_ratio: 0.75,
            shrink: 0.25,
            grow: 2.0,
            cg_rel_tol: 1e-10,
        }
    }
}

/// Shared settings for all baseline runs. The ARC loop reuses the
/// adaptive-regularization step's own constants verbatim.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub sarp: SarpConfig,
    pub gd: GdArmijo,
    pub tr: TrustRegion,
    pub eps1: f64,
    pub eps2: f64,
    pub max_iters: usize,
    pub max_time_s: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            sarp: SarpConfig::default(),
            gd: GdArmijo::default(),
            tr: TrustRegion::default(),
            eps1: 1e-6,
            eps2: 1e-6,
            max_iters: 5000,
            max_time_s: 600.0,
        }
    }
}

impl BaselineConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.sarp.validate()?;
        let gd = &self.gd;
        if !(gd.c1 > 0.0 && gd.c1 < 1.0)
            || !(gd.backtrack > 0.0 && gd.backtrack < 1.0)
            || !(gd.initial_step > 0.0)
        {
            return Err(ConfigError::BadArmijo {
                c1: gd.c1,
                backtrack: gd.backtrack,
                initial_step: gd.initial_step,
            });
        }
        let tr = &self.tr;
        if !(tr.initial_radius > 0.0 && tr.initial_radius <= tr.max_radius) {
            return Err(ConfigError::BadRadii {
                initial: tr.initial_radius,
                max: tr.max_radius,
            });
        }
        if !(0.0 < tr.accept_ratio && tr.accept_ratio < tr.very_good_ratio && tr.very_good_ratio < 1.0)
            || !(tr.shrink > 0.0 && tr.shrink < 1.0)
            || !(tr.grow > 1.0)
        {
            return Err(ConfigError::BadRatios {
                accept: tr.accept_ratio,
                very_good: tr.very_good_ratio,
                shrink: tr.shrink,
                grow: tr.grow,
            });
        }
        if !(tr.cg_rel_tol > 0.0 && tr.cg_rel_tol < 1.0) {
            return Err(ConfigError::BadCgTol(tr.cg_rel_tol));
        }
        if !(self.eps1 > 0.0 && self.eps2 > 0.0) {
            return Err(ConfigError::BadTolerances {
                eps1: self.eps1,
                eps2: self.eps2,
            });
        }
        if !(self.max_time_s > 0.0) {
            return Err(ConfigError::BadTimeBudget(self.max_time_s));
        }
        Ok(())
    }
}

/// One logged baseline iteration. Measures are taken at the
/// end-of-iteration point; `sigma` and `radius` are the values the
/// iteration *entered* with. Fields a method does not produce stay
/// `None` and serialize as empty trace columns.
#[derive(Debug, Clone)]
pub struct BaselineRecord {
    pub iter: usize,
    pub f: f64,
    pub chi1: f64,
    pub chi2: Option<f64>,
    pub sigma: Option<f64>,
    pub rho: Option<f64>,
    /// Trust-region radius (diagnostic only; not a trace column).
    pub radius: Option<f64>,
    pub step_kind: Option<StepKind>,
    /// Distance moved this iteration; 0 on rejected steps.
    pub step_norm: f64,
    pub wall_time_s: f64,
}

/// A finished baseline run.
#[derive(Debug, Clone)]
pub struct BaselineResult {
    pub x: DVector<f64>,
    pub f: f64,
    pub status: RunStatus,
    pub trace: Vec<BaselineRecord>,
}

/// True once an iterate has left the numerically trustworthy region;
/// the run is stopped rather than allowed to overflow into NaNs.
fn diverged(f: f64, x: &DVector<f64>) -> bool {
    !f.is_finite() || f <= -DIVERGENCE_LIMIT || x.amax() >= DIVERGENCE_LIMIT
}

/// Gradient descent with Armijo backtracking. Stops at first-order
/// criticality (‖∇f‖ ≤ eps1), on budget exhaustion, or when the line
/// search can no longer find a decrease at representable step lengths.
pub fn gd_run<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    x0: &DVector<f64>,
    config: &BaselineConfig,
) -> Result<BaselineResult, ConfigError> {
    config.validate()?;
    assert!(
        x0.iter().all(|v| v.is_finite()),
        "starting point must be finite"
    );
    let start = Instant::now();

    let mut x = x0.clone();
    let mut f = oracle.value(&x);
    let mut g = oracle.gradient(&x);
    let mut chi1 = g.norm();
    let mut trace = Vec::new();
    let mut status = RunStatus::BudgetExhausted;

    loop {
        if chi1 <= config.eps1 {
            status = RunStatus::Converged;
            break;
        }
        if trace.len() >= config.max_iters
            || start.elapsed().as_secs_f64() >= config.max_time_s
        {
            break;
        }

        let grad_sq = chi1 * chi1;
        let mut t = config.gd.initial_step;
        let mut accepted = None;
        while t >= MIN_ARMIJO_STEP {
            let candidate = &x - &g * t;
            let f_candidate = oracle.value(&candidate);
            if f_candidate.is_finite() && f_candidate <= f - config.gd.c1 * t * grad_sq {
                accepted = Some((candidate, f_candidate, t));
                break;
            }
            t *= config.gd.backtrack;
        }
        let Some((candidate, f_candidate, t)) = accepted else {
            break;
        };

        let step_norm = chi1 * t;
        x = candidate;
        f = f_candidate;
        if diverged(f, &x) {
            break;
        }
        g = oracle.gradient(&x);
        chi1 = g.norm();
        trace.push(BaselineRecord {
            iter: trace.len(),
            f,
            chi1,
            chi2: None,
            sigma: None,
            rho: None,
            radius: None,
            step_kind: None,
            step_norm,
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }

    Ok(BaselineResult {
        x,
        f,
        status,
        trace,
    })
}

/// First- and second-order criticality at `x`: the gradient norm and
/// the negative part of the smallest Hessian eigenvalue.
fn second_order_measures<O: ObjectiveOracle + ?Sized>(oracle: &O, x: &DVector<f64>) -> (f64, f64) {
    let chi1 = oracle.gradient(x).norm();
    let chi2 = (-linalg::min_eigenvalue(&oracle.hessian(x))).max(0.0);
    (chi1, chi2)
}

/// The full ARC loop: the adaptive cubic-regularization step iterated to
/// joint (eps1, eps2) criticality. `rng` is consumed only by degenerate
/// subsolver tie-breaks, exactly as in `sarp_step`.
pub fn arc_run<O: ObjectiveOracle + ?Sized, R: Rng + ?Sized>(
    oracle: &O,
    x0: &DVector<f64>,
    config: &BaselineConfig,
    mode: SubsolverMode,
    rng: &mut R,
) -> Result<BaselineResult, ConfigError> {
    config.validate()?;
    assert!(
        x0.iter().all(|v| v.is_finite()),
        "starting point must be finite"
    );
    let start = Instant::now();

    let mut x = x0.clone();
    let mut f = oracle.value(&x);
    let (mut chi1, mut chi2) = second_order_measures(oracle, &x);
    let mut sigma = config.sarp.sigma0;
    let mut trace = Vec::new();
    let mut status = RunStatus::BudgetExhausted;

    loop {
        if chi1 <= config.eps1 && chi2 <= config.eps2 {
            status = RunStatus::Converged;
            break;
        }
        if trace.len() >= config.max_iters
            || start.elapsed().as_secs_f64() >= config.max_time_s
        {
            break;
        }

        let entering_sigma = sigma;
        let out = sarp_step(oracle, &x, sigma, &config.sarp, mode, rng);
        sigma = out.sigma_next;
        x = out.z;
        f = out.f_z;
        if diverged(f, &x) {
            break;
        }
        let measures = second_order_measures(oracle, &x);
        chi1 = measures.0;
        chi2 = measures.1;
        trace.push(BaselineRecord {
            iter: trace.len(),
            f,
            chi1,
            chi2: Some(chi2),
            sigma: Some(entering_sigma),
            rho: Some(out.rho),
            radius: None,
            step_kind: Some(if out.successful {
                StepKind::SarpSuccess
            } else {
                StepKind::SarpFail
            }),
            step_norm: out.step_norm,
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }

    Ok(BaselineResult {
        x,
        f,
        status,
        trace,
    })
}

/// Moves `s` along `d` to the trust-region boundary: the positive τ with
/// ‖s + τd‖ = radius. Caller guarantees ‖s‖ < radius and d ≠ 0.
fn to_boundary(s: &DVector<f64>, d: &DVector<f64>, radius: f64) -> DVector<f64> {
    let ss = s.norm_squared();
    let sd = s.dot(d);
    let dd = d.norm_squared();
    if dd == 0.0 {
        return s.clone();
    }
    let disc = (sd * sd + dd * (radius * radius - ss)).max(0.0);
    let tau = (-sd + disc.sqrt()) / dd;
    s + d * tau
}

/// Steihaug's truncated CG on the quadratic model gᵀs + ½sᵀHs within
/// ‖s‖ ≤ radius. Search directions live in the Krylov space of g, so a
/// zero gradient yields a zero step even at indefinite points — the
/// classic second-order stall this method is included to exhibit.
fn steihaug_cg<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    x: &DVector<f64>,
    g: &DVector<f64>,
    radius: f64,
    rel_tol: f64,
) -> DVector<f64> {
    let n = g.len();
    let mut s = DVector::zeros(n);
    let g_norm = g.norm();
    if g_norm == 0.0 {
        return s;
    }
    let h = oracle.hessian(x);
    let tol = rel_tol * g_norm;
    let mut r = g.clone();
    let mut d = -g.clone();
    let mut r_sq = g_norm * g_norm;

    for _ in 0..CG_MAX_ITERS_PER_DIM * n {
        let hd = &h * &d;
        let dhd = d.dot(&hd);
        if dhd <= 0.0 {
            // Negative curvature: the model is unbounded along d, so the
            // best point on this ray is the boundary.
            return to_boundary(&s, &d, radius);
        }
        let alpha = r_sq / dhd;
        let s_next = &s + &d * alpha;
        if s_next.norm() >= radius {
            return to_boundary(&s, &d, radius);
        }
        s = s_next;
        r += &hd * alpha;
        let r_sq_next = r.norm_squared();
        if r_sq_next.sqrt() <= tol {
            break;
        }
        d = -&r + &d * (r_sq_next / r_sq);
        r_sq = r_sq_next;
    }
    s
}

/// Trust-region Newton with a Steihaug-CG subproblem solver and the
/// classic radius update. Stopping rule matches `arc_run`.
pub fn tr_run<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    x0: &DVector<f64>,
    config: &BaselineConfig,
) -> Result<BaselineResult, ConfigError> {
    config.validate()?;
    assert!(
        x0.iter().all(|v| v.is_finite()),
        "starting point must be finite"
    );
    let start = Instant::now();

    let mut x = x0.clone();
    let mut f = oracle.value(&x);
    let mut g = oracle.gradient(&x);
    let mut chi1 = g.norm();
    let mut chi2 = (-linalg::min_eigenvalue(&oracle.hessian(&x))).max(0.0);
    let mut radius = config.tr.initial_radius;
    let mut trace = Vec::new();
    let mut status = RunStatus::BudgetExhausted;

    loop {
        if chi1 <= config.eps1 && chi2 <= config.eps2 {
            status = RunStatus::Converged;
            break;
        }
        if trace.len() >= config.max_iters
            || start.elapsed().as_secs_f64() >= config.max_time_s
        {
            break;
        }

        let entering_radius = radius;
        let s = steihaug_cg(oracle, &x, &g, radius, config.tr.cg_rel_tol);
        let hs = oracle.hessian(&x) * &s;
        let predicted = -(g.dot(&s) + 0.5 * s.dot(&hs));
        let trial = &x + &s;
        let f_trial = oracle.value(&trial);
        // A nonpositive prediction only happens where CG finds no descent
        // at all (stationary g); the ratio is meaningless there and the
        // NaN rejects the step.
        let ratio = if !(predicted > 0.0) {
            f64::NAN
        } else if f_trial.is_finite() {
            (f - f_trial) / predicted
        } else {
            f64::NEG_INFINITY
        };

        let step_norm = s.norm();
        let accepted = ratio >= config.tr.accept_ratio;
        if !accepted {
            radius *= config.tr.shrink;
        } else if ratio >= config.tr.very_good_ratio && step_norm >= 0.99 * entering_radius {
            radius = (config.tr.grow * radius).min(config.tr.max_radius);
        }

        if accepted {
            x = trial;
            f = f_trial;
            if diverged(f, &x) {
                break;
            }
            g = oracle.gradient(&x);
            chi1 = g.norm();
            chi2 = (-linalg::min_eigenvalue(&oracle.hessian(&x))).max(0.0);
        }
        trace.push(BaselineRecord {
            iter: trace.len(),
            f,
            chi1,
            chi2: Some(chi2),
            sigma: None,
            rho: Some(ratio),
            radius: Some(entering_radius),
            step_kind: Some(if accepted {
                StepKind::SarpSuccess
            } else {
                StepKind::SarpFail
            }),
            step_norm: if accepted { step_norm } else { 0.0 },
            wall_time_s: start.elapsed().as_secs_f64(),
        });
    }

    Ok(BaselineResult {
        x,
        f,
        status,
        trace,
    })
}
