//! Adaptive high-order optimization for escaping degenerate saddle points.
//!
//! Second-order methods stall at saddle points where the Hessian is
//! (near-)singular but the third derivative still carries escape
//! information. This crate implements an adaptive high-order method (AHOM)
//! that augments a cubic-regularized Newton step with a third-order escape
//! mechanism: after each inner step it searches for a subspace in which the
//! projected third-derivative tensor dominates the Hessian curvature, draws
//! an escape direction whose cubic form is a guaranteed fraction of the
//! projected tensor norm, and takes an escape step whenever the realized
//! decrease matches the model prediction. The result converges to points
//! that are approximately critical to third order, not merely second order.
//!
//! The crate is organized bottom-up:
//!
//! - [`tensor3`]: dense symmetric third-order tensors and subspace
//!   contractions.
//! - [`problems`]: objective oracles (value through third derivative) for
//!   the benchmark problems, plus a finite-difference cross-check oracle.
//! - [`data_ingest`]: LIBSVM-format parsing and synthetic dataset
//!   generation for the logistic objective.
//! - [`cubic_subsolver`]: exact and Krylov solvers for the cubic-regularized
//!   quadratic model.
//! - [`sarp`]: one adaptive-regularization step (the inner second-order
//!   engine) with the deterministic σ update.
//! - [`third_order`]: the competitive-subspace search, the randomized
//!   escape-direction draw, and the three criticality measures.
//! - [`ahom`]: the outer driver tying the above together, plus the
//!   worst-case bound calculator.
//! - [`baselines`]: gradient descent, cubic-regularized Newton, and
//!   trust-region Newton under the same oracle interface.
//! - [`harness`]: experiment configs, trace/summary serialization, and the
//!   CLI entry points.

pub mod ahom;
pub mod baselines;
pub mod cubic_subsolver;
pub mod data_ingest;
pub mod harness;
pub(crate) mod linalg;
pub mod problems;
pub mod sarp;
pub mod tensor3;
pub mod third_order;

pub use crate::ahom::{
    ahom_run, theoretical_bounds, AhomConfig, AhomResult, IterationRecord, RunStatus, StepKind,
    TheoreticalBounds,
};
pub use crate::baselines::{arc_run, gd_run, tr_run, BaselineConfig, BaselineResult};
pub use crate::cubic_subsolver::{model_value, solve_cubic_model, ModelSolution, SubsolverMode};
pub use crate::problems::{taylor_gap, ObjectiveOracle, ProblemMeta};
pub use crate::sarp::{sarp_step, SarpConfig, SarpOutcome};
pub use crate::tensor3::{SubspaceBasis, SymTensor3};
pub use crate::third_order::{accs, atn, critical_measures, CompetitiveSubspace, CriticalMeasures};
