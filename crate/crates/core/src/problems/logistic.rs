//! Nonconvex sigmoid least-squares ("logistic") objective
//! f(w) = ½ Σᵢ (s(wᵀxᵢ) − yᵢ)² + (α/2)‖w‖² with s the logistic sigmoid.
//!
//! The squared sigmoid error is bounded and saturates, which makes the loss
//! nonconvex with large plateaus — exactly the regime where third-order
//! information pays off. All derivatives factor through the scalar link, so
//! the third derivative is Σᵢ g3(zᵢ)·xᵢ⊗xᵢ⊗xᵢ and can be contracted onto a
//! subspace basis sample-by-sample without materializing the ambient cube.

use nalgebra::{DMatrix, DVector};

use crate::tensor3::{SubspaceBasis, SymTensor3};

use super::{ObjectiveOracle, ProblemError, ProblemMeta};

/// Pre-activations are clamped to this magnitude before the link is
/// evaluated; beyond it every link derivative is far below machine epsilon.
const PREACTIVATION_CLAMP: f64 = 500.0;

/// Derivatives of the scalar link ℓ(z) = ½(s(z) − y)² through third order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkDerivatives {
    pub g0: f64,
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
}

/// Numerically stable sigmoid.
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Evaluates ℓ(z) = ½(s(z) − y)² and its first three derivatives in z.
///
/// Uses the sigmoid derivative chain s' = s(1−s), s'' = s'(1−2s),
/// s''' = s''(1−2s) − 2s'², and the product rule on the squared error:
/// ℓ' = (s−y)s', ℓ'' = s'² + (s−y)s'', ℓ''' = 3s's'' + (s−y)s'''.
pub fn logistic_link_derivatives(z: f64, y: f64) -> LinkDerivatives {
    let z = z.clamp(-PREACTIVATION_CLAMP, PREACTIVATION_CLAMP);
    let s = sigmoid(z);
    let d1 = s * (1.0 - s);
    let d2 = d1 * (1.0 - 2.0 * s);
    let d3 = d2 * (1.0 - 2.0 * s) - 2.0 * d1 * d1;
    let err = s - y;
    LinkDerivatives {
        g0: 0.5 * err * err,
        g1: err * d1,
        g2: d1 * d1 + err * d2,
        g3: 3.0 * d1 * d2 + err * d3,
    }
}

/// The sigmoid least-squares objective over a fixed dataset.
#[derive(Debug, Clone)]
pub struct Logistic {
    samples: Vec<DVector<f64>>,
    labels: Vec<f64>,
    alpha: f64,
    meta: ProblemMeta,
}

/// Builds the objective from an m×d feature matrix (rows are samples),
/// {0, 1} labels, and ridge weight α ≥ 0. An empty dataset is allowed and
/// leaves the pure ridge term.
pub fn make_logistic(
    features: &DMatrix<f64>,
    labels: &[f64],
    alpha: f64,
) -> Result<Logistic, ProblemError> {
    if alpha < 0.0 {
        return Err(ProblemError::NegativeAlpha(alpha));
    }
    if features.nrows() != labels.len() {
        return Err(ProblemError::SampleCountMismatch {
            labels: labels.len(),
            rows: features.nrows(),
        });
    }
    for (index, &value) in labels.iter().enumerate() {
        if value != 0.0 && value != 1.0 {
            return Err(ProblemError::InvalidLabel { index, value });
        }
    }
    let dim = features.ncols();
    let samples = (0..features.nrows())
        .map(|i| features.row(i).transpose())
        .collect();
    Ok(Logistic {
        samples,
        labels: labels.to_vec(),
        alpha,
        meta: ProblemMeta {
            name: "logistic".to_string(),
            dim,
            known_l: None,
            known_l3: None,
            // Both the squared error and the ridge term are nonnegative.
            lower_bound: Some(0.0),
            default_init: DVector::zeros(dim),
        },
    })
}

impl Logistic {
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    /// Link derivatives at every sample for the current weights.
    fn links<'s>(
        &'s self,
        w: &'s DVector<f64>,
    ) -> impl Iterator<Item = (&'s DVector<f64>, LinkDerivatives)> + 's {
        self.samples
            .iter()
            .zip(&self.labels)
            .map(move |(x, &y)| (x, logistic_link_derivatives(x.dot(w), y)))
    }
}

impl ObjectiveOracle for Logistic {
    fn meta(&self) -> &ProblemMeta {
        &self.meta
    }

    fn value(&self, w: &DVector<f64>) -> f64 {
        let loss: f64 = self.links(w).map(|(_, l)| l.g0).sum();
        loss + 0.5 * self.alpha * w.norm_squared()
    }

    fn gradient(&self, w: &DVector<f64>) -> DVector<f64> {
        let mut g = w * self.alpha;
        for (x, l) in self.links(w) {
            g.axpy(l.g1, x, 1.0);
        }
        g
    }

    fn hessian(&self, w: &DVector<f64>) -> DMatrix<f64> {
        let n = self.dim();
        let mut h = DMatrix::identity(n, n) * self.alpha;
        for (x, l) in self.links(w) {
            h.ger(l.g2, x, x, 1.0);
        }
        h
    }

    fn third(&self, w: &DVector<f64>) -> SymTensor3 {
        SymTensor3::from_weighted_rank_one_cubes(
            self.dim(),
            self.links(w).map(|(x, l)| (l.g3, x)),
        )
    }

    /// Factored contraction: Σᵢ g3(zᵢ)·(Vᵀxᵢ)⊗³ over the r-dimensional
    /// coordinates, never touching the d³ ambient cube.
    fn third_in_basis(&self, w: &DVector<f64>, basis: &SubspaceBasis) -> SymTensor3 {
        let reduced: Vec<(f64, DVector<f64>)> = self
            .links(w)
            .map(|(x, l)| (l.g3, basis.coordinates(x)))
            .collect();
        SymTensor3::from_weighted_rank_one_cubes(
            basis.rank(),
            reduced.iter().map(|(c, x)| (*c, x)),
        )
    }
}
