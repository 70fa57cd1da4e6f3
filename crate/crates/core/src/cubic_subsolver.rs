//! Solvers for the cubic-regularized quadratic model
//! m(s) = gᵀs + ½·sᵀHs + (σ/3)·‖s‖³.
//!
//! Two modes are provided. `Exact` computes the global minimizer through a
//! symmetric eigendecomposition of H and a safeguarded Newton iteration on
//! the secular equation σ·‖s(λ)‖ = λ with s(λ) = −(H + λI)⁻¹g, including
//! the hard case where the gradient has no component on the most negative
//! eigenspace. `Krylov` runs a Lanczos recurrence seeded by g and solves the
//! reduced model exactly in the growing tridiagonal basis; by construction
//! its iterates never leave span{g, Hg, H²g, …}, so directions invisible to
//! that space (the classic stall of gradient-seeded methods at axis-aligned
//! degenerate saddles) are never found — no random restarts are used. If the
//! Krylov space saturates before the inner acceptance conditions hold, the
//! saturated-space minimizer is returned with `conditions_met = false` and
//! the caller's ratio test provides the safety net.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::linalg::eigh_descending;

/// Newton tolerance on the secular residual |σ‖s(λ)‖ − λ|.
pub const SECULAR_TOL: f64 = 1e-12;
/// Iteration cap for the secular Newton/bisection loop.
pub const SECULAR_MAX_ITERS: usize = 100;
/// A Lanczos residual below this saturates the Krylov space.
pub const KRYLOV_BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubsolverMode {
    Exact,
    Krylov,
}

/// The step returned by [`solve_cubic_model`] together with the quantities
/// the outer loop needs to judge it.
#[derive(Debug, Clone)]
pub struct ModelSolution {
    pub step: DVector<f64>,
    /// Unregularized Taylor decrease T(0) − T(s) = −(gᵀs + ½·sᵀHs).
    pub model_decrease: f64,
    /// First-order model residual ‖g + Hs + σ‖s‖s‖.
    pub chi_m1: f64,
    /// Second-order model residual max(0, −λ_min(∇²m(s))).
    pub chi_m2: f64,
    pub mode_used: SubsolverMode,
    /// Whether the step satisfies the inner acceptance conditions
    /// m(s) < m(0), chi_m1 ≤ θ‖s‖², chi_m2 ≤ θ‖s‖. Always true for exact
    /// solves (up to rounding); false when the Krylov space saturated first.
    pub conditions_met: bool,
}

/// m(s) = gᵀs + ½·sᵀHs + (σ/3)·‖s‖³.
pub fn model_value(g: &DVector<f64>, h: &DMatrix<f64>, sigma: f64, s: &DVector<f64>) -> f64 {
    g.dot(s) + 0.5 * (h * s).dot(s) + sigma / 3.0 * s.norm().powi(3)
}

/// ∇m(s) = g + Hs + σ‖s‖s.
pub fn model_gradient(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    sigma: f64,
    s: &DVector<f64>,
) -> DVector<f64> {
    g + h * s + s * (sigma * s.norm())
}

/// ∇²m(s) = H + σ‖s‖I + σ·ssᵀ/‖s‖; the rank-one term vanishes at s = 0.
fn model_hessian(h: &DMatrix<f64>, sigma: f64, s: &DVector<f64>) -> DMatrix<f64> {
    let n = h.nrows();
    let norm = s.norm();
    let mut out = h + DMatrix::<f64>::identity(n, n) * (sigma * norm);
    if norm > 0.0 {
        // σ·ssᵀ/‖s‖ = (σ‖s‖)·ŝŝᵀ against the unit direction: the entries
        // are bounded by σ‖s‖, whereas the literal σ/‖s‖ factor overflows
        // once a gigantic weight forces a microscopic step.
        let unit = s.unscale(norm);
        out.ger(sigma * norm, &unit, &unit, 1.0);
    }
    out
}

/// The two inner residuals (chi_m1, chi_m2) of the model at s.
pub fn model_measures(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    sigma: f64,
    s: &DVector<f64>,
) -> (f64, f64) {
    let chi_m1 = model_gradient(g, h, sigma, s).norm();
    let mh = model_hessian(h, sigma, s);
    // Extreme weights can still push entries past the representable
    // range; an unverifiable curvature condition counts as violated.
    let chi_m2 = if mh.iter().all(|v| v.is_finite()) {
        let (values, _) = eigh_descending(&mh);
        (-values[values.len() - 1]).max(0.0)
    } else {
        f64::INFINITY
    };
    (chi_m1, chi_m2)
}

/// ‖s(λ)‖ for s(λ) = −(H + λI)⁻¹g expressed in the eigenbasis; +∞ when the
/// shifted matrix is singular against a nonzero gradient component.
fn shifted_step_norm(eigenvalues: &DVector<f64>, g_eig: &DVector<f64>, lambda: f64) -> f64 {
    let mut sum = 0.0;
    for i in 0..eigenvalues.len() {
        if g_eig[i] == 0.0 {
            continue;
        }
        let denom = eigenvalues[i] + lambda;
        if denom <= 0.0 {
            return f64::INFINITY;
        }
        sum += (g_eig[i] / denom).powi(2);
    }
    sum.sqrt()
}

/// Global minimizer of the cubic model via eigendecomposition plus a
/// safeguarded Newton iteration on φ(λ) = σ‖s(λ)‖ − λ.
fn solve_exact<R: Rng + ?Sized>(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    sigma: f64,
    rng: &mut R,
) -> DVector<f64> {
    let n = g.len();
    let (values, vectors) = eigh_descending(h);
    let lambda_min = values[n - 1];
    let lambda_star = (-lambda_min).max(0.0);
    let g_eig = vectors.tr_mul(g);

    // Gradient mass on the most negative eigenspace decides the hard case.
    let eig_tol = 1e-12 * (1.0 + lambda_min.abs());
    let grad_tol = 1e-13 * (1.0 + g.norm());
    let min_space: Vec<usize> = (0..n)
        .filter(|&i| values[i] - lambda_min <= eig_tol)
        .collect();
    let seen_by_gradient = min_space.iter().any(|&i| g_eig[i].abs() > grad_tol);

    if lambda_min < 0.0 && !seen_by_gradient {
        // Gradient is blind to the bottom eigenspace. Solve on its
        // complement at λ = λ*; if that step is already long enough the
        // secular root lies above λ* and the normal path applies, otherwise
        // pad with a bottom eigenvector so that σ‖s‖ = λ* exactly.
        let mut masked = g_eig.clone();
        for &i in &min_space {
            masked[i] = 0.0;
        }
        let perp_norm = shifted_step_norm(&values, &masked, lambda_star);
        if sigma * perp_norm < lambda_star {
            let mut coeffs = DVector::zeros(n);
            for i in 0..n {
                if !min_space.contains(&i) {
                    coeffs[i] = -masked[i] / (values[i] + lambda_star);
                }
            }
            let target = lambda_star / sigma;
            let pad = (target * target - perp_norm * perp_norm).max(0.0).sqrt();
            // Either sign of the bottom eigenvector gives the same model
            // value; break the tie randomly.
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            coeffs[min_space[0]] = sign * pad;
            return &vectors * coeffs;
        }
        // Not the hard case: fall through with the masked gradient so the
        // vanished components stay exactly zero.
        return secular_step(&values, &masked, &vectors, sigma, lambda_star);
    }

    if g.norm() == 0.0 {
        // Zero gradient over a PSD Hessian: the origin is the minimizer.
        return DVector::zeros(n);
    }

    secular_step(&values, &g_eig, &vectors, sigma, lambda_star)
}

/// Newton-with-bisection on φ(x) = σ‖s(λ* + x)‖ − (λ* + x) over x ∈ (0, ∞),
/// then maps the root back to the step −(H + λI)⁻¹g.
///
/// The parametrization by the shift x = λ − λ* matters: the denominators
/// λ_i + λ are formed as (λ_i + λ*) + x, where λ_i + λ* is zero exactly for
/// the bottom eigenvalue. Near-hard-case roots sit at x many orders of
/// magnitude below λ*, where λ itself has no floating-point resolution left
/// but x still does.
fn secular_step(
    values: &DVector<f64>,
    g_eig: &DVector<f64>,
    vectors: &DMatrix<f64>,
    sigma: f64,
    lambda_star: f64,
) -> DVector<f64> {
    let n = values.len();
    let shifted = values.add_scalar(lambda_star);
    let phi = |x: f64| sigma * shifted_step_norm(&shifted, g_eig, x) - (lambda_star + x);

    // Bracket the root: φ is decreasing, nonnegative as x → 0⁺, negative
    // for large x.
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..200 {
        if phi(hi) < 0.0 {
            break;
        }
        lo = hi;
        hi *= 2.0;
    }

    let mut x = 0.5 * (lo + hi);
    for _ in 0..SECULAR_MAX_ITERS {
        let norm = shifted_step_norm(&shifted, g_eig, x);
        let residual = sigma * norm - (lambda_star + x);
        if residual.abs() <= SECULAR_TOL * (1.0 + lambda_star + x) {
            break;
        }
        if residual > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        // Newton step on φ; fall back to bisection when it leaves the
        // bracket or the derivative degenerates.
        let mut next = f64::NAN;
        if norm.is_finite() && norm > 0.0 {
            let mut dsum = 0.0;
            for i in 0..n {
                if g_eig[i] != 0.0 {
                    dsum += g_eig[i] * g_eig[i] / (shifted[i] + x).powi(3);
                }
            }
            let dphi = -sigma * dsum / norm - 1.0;
            if dphi.is_finite() && dphi < 0.0 {
                next = x - residual / dphi;
            }
        }
        x = if next.is_finite() && next > lo && next < hi {
            next
        } else {
            0.5 * (lo + hi)
        };
    }

    let coeffs = DVector::from_fn(n, |i, _| {
        if g_eig[i] == 0.0 {
            0.0
        } else {
            -g_eig[i] / (shifted[i] + x)
        }
    });
    vectors * coeffs
}

/// Lanczos-based solver: grows the gradient-seeded Krylov space one vector
/// at a time, solves the reduced cubic model exactly in the tridiagonal
/// basis, and stops as soon as the full-space acceptance conditions hold or
/// the space saturates.
fn solve_krylov<R: Rng + ?Sized>(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    sigma: f64,
    theta: f64,
    rng: &mut R,
) -> (DVector<f64>, bool) {
    let n = g.len();
    let g_norm = g.norm();
    if g_norm == 0.0 {
        // Empty seed: the Krylov space is trivial and the zero step is all
        // this mode can produce, negative curvature or not.
        return (DVector::zeros(n), false);
    }

    let mut basis: Vec<DVector<f64>> = vec![g / g_norm];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut candidate = DVector::zeros(n);

    let passes = |s: &DVector<f64>| -> bool {
        if model_value(g, h, sigma, s) >= 0.0 {
            return false;
        }
        let s_norm = s.norm();
        let chi_m1 = model_gradient(g, h, sigma, s).norm();
        if chi_m1 > theta * s_norm * s_norm {
            return false;
        }
        let (values, _) = eigh_descending(&model_hessian(h, sigma, s));
        (-values[values.len() - 1]).max(0.0) <= theta * s_norm
    };

    for j in 0..n {
        let v_j = basis[j].clone();
        let mut w = h * &v_j;
        if j > 0 {
            w.axpy(-betas[j - 1], &basis[j - 1], 1.0);
        }
        let alpha = w.dot(&v_j);
        alphas.push(alpha);
        w.axpy(-alpha, &v_j, 1.0);
        // Full reorthogonalization keeps the basis clean at these sizes.
        for b in &basis {
            let overlap = b.dot(&w);
            w.axpy(-overlap, b, 1.0);
        }
        let beta = w.norm();

        // Exact solve of the reduced model in the tridiagonal basis.
        let dim = alphas.len();
        let mut tri = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            tri[(i, i)] = alphas[i];
            if i + 1 < dim {
                tri[(i, i + 1)] = betas[i];
                tri[(i + 1, i)] = betas[i];
            }
        }
        let mut g_red = DVector::zeros(dim);
        g_red[0] = g_norm;
        let y = solve_exact(&g_red, &tri, sigma, rng);
        candidate = DVector::zeros(n);
        for (i, b) in basis.iter().enumerate() {
            candidate.axpy(y[i], b, 1.0);
        }

        if passes(&candidate) {
            return (candidate, true);
        }
        if beta <= KRYLOV_BREAKDOWN_TOL {
            // Invariant subspace reached: the candidate is the exact
            // minimizer over everything the seed can reach.
            return (candidate, false);
        }
        if j + 1 < n {
            betas.push(beta);
            basis.push(w / beta);
        }
    }
    (candidate, false)
}

/// Minimizes the cubic model in the requested mode and reports the step
/// with its residuals. `theta` is the inner acceptance tolerance; `rng`
/// only breaks eigenvector-sign ties in the hard case.
pub fn solve_cubic_model<R: Rng + ?Sized>(
    g: &DVector<f64>,
    h: &DMatrix<f64>,
    sigma: f64,
    theta: f64,
    mode: SubsolverMode,
    rng: &mut R,
) -> ModelSolution {
    assert!(sigma > 0.0, "regularization weight must be positive");
    assert!(theta > 0.0, "inner tolerance must be positive");
    assert_eq!(g.len(), h.nrows(), "gradient and Hessian dimensions differ");

    // A model built from non-finite data (including a gradient whose norm
    // overflows, or an infinite weight after a long rejection streak) has
    // no meaningful minimizer; report a degenerate zero step so callers
    // treat the iteration as unsuccessful instead of propagating NaNs.
    let inputs_finite = sigma.is_finite()
        && g.iter().all(|v| v.is_finite())
        && h.iter().all(|v| v.is_finite())
        && g.norm().is_finite();
    if !inputs_finite {
        return ModelSolution {
            step: DVector::zeros(g.len()),
            model_decrease: 0.0,
            chi_m1: f64::INFINITY,
            chi_m2: f64::INFINITY,
            mode_used: mode,
            conditions_met: false,
        };
    }

    let (step, saturated_ok) = match mode {
        SubsolverMode::Exact => (solve_exact(g, h, sigma, rng), true),
        SubsolverMode::Krylov => solve_krylov(g, h, sigma, theta, rng),
    };

    let (chi_m1, chi_m2) = model_measures(g, h, sigma, &step);
    let model_decrease = -(g.dot(&step) + 0.5 * (h * &step).dot(&step));
    let s_norm = step.norm();
    let conditions_met = match mode {
        SubsolverMode::Exact => {
            model_value(g, h, sigma, &step) < 0.0
                && chi_m1 <= theta * s_norm * s_norm
                && chi_m2 <= theta * s_norm
        }
        SubsolverMode::Krylov => saturated_ok,
    };
    ModelSolution {
        step,
        model_decrease,
        chi_m1,
        chi_m2,
        mode_used: mode,
        conditions_met,
    }
}
