//! Finite-difference oracle used to cross-check analytic derivatives.
//!
//! Each order is obtained by central differences of the wrapped oracle's
//! exact next-lower order (gradient from values, Hessian from gradients,
//! third from Hessians), so the truncation error stays O(h²) per order
//! instead of compounding.

use nalgebra::{DMatrix, DVector};

use crate::tensor3::SymTensor3;

use super::ObjectiveOracle;

/// Central-difference derivatives of a wrapped oracle.
pub struct FiniteDifference<'a, O: ObjectiveOracle + ?Sized> {
    inner: &'a O,
    step: f64,
}

impl<'a, O: ObjectiveOracle + ?Sized> FiniteDifference<'a, O> {
    /// Wraps an oracle with base step h; the step used along coordinate i is
    /// h·(1 + |x_i|) so it scales with the evaluation point.
    pub fn new(inner: &'a O, step: f64) -> Self {
        assert!(step > 0.0, "finite-difference step must be positive");
        Self { inner, step }
    }

    fn coordinate_step(&self, x: &DVector<f64>, i: usize) -> f64 {
        self.step * (1.0 + x[i].abs())
    }

    /// ∇f by central differences of values.
    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let n = x.len();
        DVector::from_fn(n, |i, _| {
            let h = self.coordinate_step(x, i);
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            (self.inner.value(&xp) - self.inner.value(&xm)) / (2.0 * h)
        })
    }

    /// ∇²f by central differences of exact gradients, symmetrized.
    pub fn hessian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let n = x.len();
        let mut h_mat = DMatrix::zeros(n, n);
        for i in 0..n {
            let h = self.coordinate_step(x, i);
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            let col = (self.inner.gradient(&xp) - self.inner.gradient(&xm)) / (2.0 * h);
            h_mat.set_column(i, &col);
        }
        (&h_mat + h_mat.transpose()) * 0.5
    }

    /// ∇³f by central differences of exact Hessians, symmetrized over the
    /// three index roles.
    pub fn third(&self, x: &DVector<f64>) -> SymTensor3 {
        let n = x.len();
        let mut slabs = Vec::with_capacity(n);
        for i in 0..n {
            let h = self.coordinate_step(x, i);
            let mut xp = x.clone();
            xp[i] += h;
            let mut xm = x.clone();
            xm[i] -= h;
            slabs.push((self.inner.hessian(&xp) - self.inner.hessian(&xm)) / (2.0 * h));
        }
        let mut t = SymTensor3::zeros(n);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    let avg =
                        (slabs[i][(j, k)] + slabs[j][(i, k)] + slabs[k][(i, j)]) / 3.0;
                    t.set_sym(i, j, k, avg);
                }
            }
        }
        t
    }
}
