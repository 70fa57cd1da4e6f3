//! Objective oracles: analytic value/gradient/Hessian/third-derivative
//! access for the benchmark problems.
//!
//! Every problem implements [`ObjectiveOracle`]. The third derivative is
//! exposed both as a dense [`SymTensor3`] and through
//! [`ObjectiveOracle::third_in_basis`], which structured objectives (the
//! logistic loss) override to contract sample-by-sample without ever
//! materializing the ambient cube.

mod finite_diff;
mod logistic;

pub use finite_diff::FiniteDifference;
pub use logistic::{logistic_link_derivatives, make_logistic, LinkDerivatives, Logistic};

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::tensor3::{SubspaceBasis, SymTensor3};

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("label at sample {index} is {value}; labels must be 0 or 1 after mapping")]
    InvalidLabel { index: usize, value: f64 },
    #[error("ridge weight alpha must be nonnegative, got {0}")]
    NegativeAlpha(f64),
    #[error("labels ({labels}) and feature rows ({rows}) disagree")]
    SampleCountMismatch { labels: usize, rows: usize },
}

/// Static facts about a problem that the driver and the bound calculator
/// consume. Lipschitz constants are optional: they are only known in closed
/// form for the analytic problems.
#[derive(Debug, Clone)]
pub struct ProblemMeta {
    pub name: String,
    pub dim: usize,
    /// Combined Lipschitz constant max_k L_k/(k−1)! over the derivative
    /// orders the inner model uses, when known globally.
    pub known_l: Option<f64>,
    /// Lipschitz constant of the third derivative in spectral norm, when
    /// known globally.
    pub known_l3: Option<f64>,
    /// A global lower bound on the objective, when one exists.
    pub lower_bound: Option<f64>,
    /// Starting point used when a run does not specify one.
    pub default_init: DVector<f64>,
}

/// Analytic access to an objective up to third order.
///
/// Evaluations are infallible: points where the objective overflows simply
/// return non-finite values, which the step-acceptance logic treats as
/// rejections.
pub trait ObjectiveOracle {
    fn meta(&self) -> &ProblemMeta;

    fn dim(&self) -> usize {
        self.meta().dim
    }

    fn value(&self, x: &DVector<f64>) -> f64;

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64>;

    /// The full third-derivative tensor ∇³f(x).
    fn third(&self, x: &DVector<f64>) -> SymTensor3;

    /// ∇³f(x) contracted onto an orthonormal basis: T(v_a, v_b, v_c).
    ///
    /// The default route materializes the ambient tensor; structured
    /// objectives override it with a factored contraction.
    fn third_in_basis(&self, x: &DVector<f64>, basis: &SubspaceBasis) -> SymTensor3 {
        self.third(x).contract_to_basis(basis)
    }
}

/// |f(x+s) − third-order Taylor expansion of f around x evaluated at s|.
///
/// For an oracle with L3-Lipschitz third derivative this is at most
/// (L3/24)·‖s‖⁴, which is what the escape-step analysis leans on.
pub fn taylor_gap<O: ObjectiveOracle + ?Sized>(oracle: &O, x: &DVector<f64>, s: &DVector<f64>) -> f64 {
    let taylor = oracle.value(x)
        + oracle.gradient(x).dot(s)
        + 0.5 * (oracle.hessian(x) * s).dot(s)
        + oracle.third(x).cubic_form(s) / 6.0;
    (oracle.value(&(x + s)) - taylor).abs()
}

/// The monkey saddle f(x) = x0³ − 3·x0·x1², a two-dimensional cubic whose
/// origin is a degenerate critical point (zero gradient and zero Hessian)
/// that only the third derivative can certify or escape.
#[derive(Debug, Clone)]
pub struct Monkey {
    meta: ProblemMeta,
}

/// Builds the monkey-saddle problem with its standard starting point (1, 0).
pub fn make_monkey() -> Monkey {
    Monkey {
        meta: ProblemMeta {
            name: "monkey".to_string(),
            dim: 2,
            // The Hessian grows linearly in x, so no global gradient/Hessian
            // Lipschitz constant exists; the third derivative is constant.
            known_l: None,
            known_l3: Some(0.0),
            lower_bound: None,
            default_init: DVector::from_vec(vec![1.0, 0.0]),
        },
    }
}

impl ObjectiveOracle for Monkey {
    fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        x[0].powi(3) - 3.0 * x[0] * x[1] * x[1]
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![
            3.0 * x[0] * x[0] - 3.0 * x[1] * x[1],
            -6.0 * x[0] * x[1],
        ])
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[6.0 * x[0], -6.0 * x[1], -6.0 * x[1], -6.0 * x[0]])
    }

    fn third(&self, _x: &DVector<f64>) -> SymTensor3 {
        let mut t = SymTensor3::zeros(2);
        t.set_sym(0, 0, 0, 6.0);
        t.set_sym(0, 1, 1, -6.0);
        t
    }
}

/// f(x) = x0³/3 + x1⁴/4 − x1²/2. Gradient flow from the standard start
/// (3, 3) funnels into the degenerate critical point (0, 1) with value
/// −1/4, where the Hessian is singular (eigenvalues 0 and 2) but the third
/// derivative is not: escaping it requires third-order information.
#[derive(Debug, Clone)]
pub struct Coercive {
    meta: ProblemMeta,
}

/// Builds the quartic-well problem with its standard starting point (3, 3).
pub fn make_coercive() -> Coercive {
    Coercive {
        meta: ProblemMeta {
            name: "coercive".to_string(),
            dim: 2,
            known_l: None,
            // ∇³f varies only through the (1,1,1) entry 6·x1, so it is
            // 6-Lipschitz in spectral norm.
            known_l3: Some(6.0),
            lower_bound: None,
            default_init: DVector::from_vec(vec![3.0, 3.0]),
        },
    }
}

impl ObjectiveOracle for Coercive {
    fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        x[0].powi(3) / 3.0 + x[1].powi(4) / 4.0 - x[1] * x[1] / 2.0
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![x[0] * x[0], x[1].powi(3) - x[1]])
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::from_diagonal(&DVector::from_vec(vec![
            2.0 * x[0],
            3.0 * x[1] * x[1] - 1.0,
        ]))
    }

    fn third(&self, x: &DVector<f64>) -> SymTensor3 {
        let mut t = SymTensor3::zeros(2);
        t.set_sym(0, 0, 0, 2.0);
        t.set_sym(1, 1, 1, 6.0 * x[1]);
        t
    }
}

/// The convex sanity problem f(x) = ½‖x‖².
#[derive(Debug, Clone)]
pub struct Quadratic {
    meta: ProblemMeta,
}

/// Builds the n-dimensional quadratic bowl starting from (1, …, 1).
pub fn make_quadratic(dim: usize) -> Quadratic {
    Quadratic {
        meta: ProblemMeta {
            name: "quadratic".to_string(),
            dim,
            known_l: Some(1.0),
            known_l3: Some(0.0),
            lower_bound: Some(0.0),
            default_init: DVector::from_element(dim, 1.0),
        },
    }
}

impl ObjectiveOracle for Quadratic {
    fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.norm_squared()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x.clone()
    }

    fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        DMatrix::identity(x.len(), x.len())
    }

    fn third(&self, x: &DVector<f64>) -> SymTensor3 {
        SymTensor3::zeros(x.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::dvector;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    /// Compares every analytic derivative against the finite-difference
    /// oracle at seeded random points. This is the independent check behind
    /// all the hand-derived formulas in this module.
    fn cross_check_against_finite_differences<O: ObjectiveOracle>(oracle: &O, scale: f64) {
        let fd = FiniteDifference::new(oracle, 1e-5);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = oracle.dim();
        for _ in 0..10 {
            let x = DVector::from_fn(n, |_, _| rng.random_range(-scale..scale));
            let g = oracle.gradient(&x);
            let g_fd = fd.gradient(&x);
            assert_relative_eq!((g - &g_fd).norm(), 0.0, epsilon = 1e-5 * (1.0 + g_fd.norm()));
            let h = oracle.hessian(&x);
            let h_fd = fd.hessian(&x);
            assert_relative_eq!((h - &h_fd).norm(), 0.0, epsilon = 1e-5 * (1.0 + h_fd.norm()));
            let t = oracle.third(&x);
            let t_fd = fd.third(&x);
            let mut diff = 0.0_f64;
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        diff = diff.max((t.get(i, j, k) - t_fd.get(i, j, k)).abs());
                    }
                }
            }
            assert!(
                diff <= 1e-4 * (1.0 + t_fd.frobenius_norm()),
                "third derivative disagrees with finite differences by {diff:.3e}"
            );
        }
    }

    #[test]
    fn monkey_matches_finite_differences() {
        cross_check_against_finite_differences(&make_monkey(), 2.0);
    }

    #[test]
    fn coercive_matches_finite_differences() {
        cross_check_against_finite_differences(&make_coercive(), 2.0);
    }

    #[test]
    fn quadratic_matches_finite_differences() {
        cross_check_against_finite_differences(&make_quadratic(4), 2.0);
    }

    #[test]
    fn monkey_values_at_reference_points() {
        let p = make_monkey();
        assert_eq!(p.value(&dvector![1.0, 0.0]), 1.0);
        // The origin is fully degenerate: zero gradient and zero Hessian.
        let origin = dvector![0.0, 0.0];
        assert_eq!(p.gradient(&origin).norm(), 0.0);
        assert_eq!(p.hessian(&origin).norm(), 0.0);
        // But the third derivative is the constant tensor with norm 12.
        assert_relative_eq!(p.third(&origin).frobenius_norm(), 12.0, epsilon = 1e-14);
        assert_eq!(p.meta().known_l3, Some(0.0));
        assert_eq!(p.meta().default_init, dvector![1.0, 0.0]);
    }

    #[test]
    fn coercive_values_at_reference_points() {
        let p = make_coercive();
        assert_eq!(p.gradient(&dvector![3.0, 3.0]), dvector![9.0, 24.0]);
        let degenerate = dvector![0.0, 1.0];
        assert_relative_eq!(p.value(&degenerate), -0.25, epsilon = 1e-15);
        assert_eq!(p.gradient(&degenerate).norm(), 0.0);
        let h = p.hessian(&degenerate);
        assert_eq!(h[(0, 0)], 0.0);
        assert_relative_eq!(h[(1, 1)], 2.0, epsilon = 1e-15);
        let t = p.third(&degenerate);
        assert_eq!(t.get(0, 0, 0), 2.0);
        assert_relative_eq!(t.get(1, 1, 1), 6.0, epsilon = 1e-15);
        assert_eq!(p.meta().known_l3, Some(6.0));
    }

    #[test]
    fn taylor_gap_is_exact_quartic_remainder_for_coercive() {
        // Along e1 the only term beyond third order is x1⁴/4, so the gap is
        // exactly s1⁴/4 = (L3/24)·‖s‖⁴ with L3 = 6: the bound is tight.
        let p = make_coercive();
        let x = dvector![0.0, 1.0];
        for t in [0.1, 0.5, 1.0] {
            let s = dvector![0.0, t];
            assert_relative_eq!(
                taylor_gap(&p, &x, &s),
                0.25 * t.powi(4),
                epsilon = 1e-10,
                max_relative = 1e-8
            );
        }
        // Mixed directions stay below the bound.
        let s = dvector![0.3, -0.4];
        assert!(taylor_gap(&p, &x, &s) <= 6.0 / 24.0 * s.norm().powi(4) + 1e-12);
    }

    #[test]
    fn taylor_gap_vanishes_for_cubic_objective() {
        // The monkey saddle is a cubic polynomial: its third-order Taylor
        // expansion is exact everywhere.
        let p = make_monkey();
        let gap = taylor_gap(&p, &dvector![1.0, -2.0], &dvector![0.7, 0.4]);
        assert!(gap <= 1e-12, "cubic objective has no Taylor remainder, got {gap:.3e}");
    }
}
