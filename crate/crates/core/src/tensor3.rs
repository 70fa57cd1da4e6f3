//! Dense symmetric third-order tensors and orthonormal subspace bases.
//!
//! A [`SymTensor3`] stores all n³ entries explicitly. Symmetry is maintained
//! by the mutating constructors rather than exploited for storage: at the
//! dimensions this crate targets (n ≤ 150) the full cube fits comfortably in
//! memory, and the flat layout keeps the contraction loops branch-free.
//!
//! A [`SubspaceBasis`] is an n×r matrix with orthonormal columns. Because
//! the columns are orthonormal, the Frobenius norm of a tensor contracted
//! onto the basis equals the Frobenius norm of the orthogonal projection of
//! the tensor onto that subspace — the contracted cube is the projected
//! tensor expressed in basis coordinates.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Maximum tolerated deviation of VᵀV from the identity at basis
/// construction.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("basis columns are not orthonormal: max |VᵀV - I| entry is {max_dev:.3e}")]
    NotOrthonormal { max_dev: f64 },
    #[error("basis has {rank} columns but only {ambient_dim} rows; rank cannot exceed the ambient dimension")]
    RankExceedsAmbient { rank: usize, ambient_dim: usize },
}

/// An orthonormal basis of an r-dimensional subspace of ℝⁿ, stored as the
/// columns of an n×r matrix.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    columns: DMatrix<f64>,
}

impl SubspaceBasis {
    /// Wraps an n×r matrix whose columns must already be orthonormal.
    pub fn new(columns: DMatrix<f64>) -> Result<Self, BasisError> {
        let (n, r) = columns.shape();
        if r > n {
            return Err(BasisError::RankExceedsAmbient {
                rank: r,
                ambient_dim: n,
            });
        }
        let gram = columns.tr_mul(&columns);
        let mut max_dev = 0.0_f64;
        for a in 0..r {
            for b in 0..r {
                let target = if a == b { 1.0 } else { 0.0 };
                max_dev = max_dev.max((gram[(a, b)] - target).abs());
            }
        }
        if max_dev > ORTHONORMALITY_TOL {
            return Err(BasisError::NotOrthonormal { max_dev });
        }
        Ok(Self { columns })
    }

    /// The full space ℝⁿ as a basis (identity columns).
    pub fn full(n: usize) -> Self {
        Self {
            columns: DMatrix::identity(n, n),
        }
    }

    /// The trivial zero-dimensional subspace of ℝⁿ.
    pub fn empty(n: usize) -> Self {
        Self {
            columns: DMatrix::zeros(n, 0),
        }
    }

    /// Dimension of the ambient space (number of rows).
    pub fn ambient_dim(&self) -> usize {
        self.columns.nrows()
    }

    /// Dimension of the subspace (number of columns).
    pub fn rank(&self) -> usize {
        self.columns.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.rank() == 0
    }

    pub fn columns(&self) -> &DMatrix<f64> {
        &self.columns
    }

    /// Coordinates of x in this basis: Vᵀx.
    pub fn coordinates(&self, x: &DVector<f64>) -> DVector<f64> {
        self.columns.tr_mul(x)
    }

    /// Embeds basis coordinates back into the ambient space: V·c.
    pub fn lift(&self, coords: &DVector<f64>) -> DVector<f64> {
        &self.columns * coords
    }
}

/// A symmetric third-order tensor T ∈ ℝ^{n×n×n}, stored dense.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor3 {
    dim: usize,
    /// Flat layout: entry (i, j, k) lives at (i·n + j)·n + k.
    data: Vec<f64>,
}

impl SymTensor3 {
    /// The all-zero tensor of dimension n.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![0.0; dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.data[self.idx(i, j, k)]
    }

    /// Sets entry (i, j, k) and all its index permutations to `value`,
    /// preserving symmetry.
    pub fn set_sym(&mut self, i: usize, j: usize, k: usize, value: f64) {
        for (a, b, c) in [
            (i, j, k),
            (i, k, j),
            (j, i, k),
            (j, k, i),
            (k, i, j),
            (k, j, i),
        ] {
            let idx = self.idx(a, b, c);
            self.data[idx] = value;
        }
    }

    /// Adds c·x⊗x⊗x in place. The update is symmetric by construction.
    pub fn accumulate_rank_one_cube(&mut self, c: f64, x: &DVector<f64>) {
        assert_eq!(
            x.len(),
            self.dim,
            "rank-one factor length {} does not match tensor dimension {}",
            x.len(),
            self.dim
        );
        let n = self.dim;
        for i in 0..n {
            let cxi = c * x[i];
            for j in 0..n {
                let cxij = cxi * x[j];
                let row = &mut self.data[(i * n + j) * n..(i * n + j) * n + n];
                for (k, slot) in row.iter_mut().enumerate() {
                    *slot += cxij * x[k];
                }
            }
        }
    }

    /// Builds Σ c_s · x_s⊗x_s⊗x_s over a stream of weighted factors.
    ///
    /// Accumulates only the i ≤ j ≤ k triangle per factor and mirrors once
    /// at the end, so the per-factor cost is n³/6 rather than n³. All
    /// factors must share the given dimension.
    pub fn from_weighted_rank_one_cubes<'a, I>(dim: usize, factors: I) -> Self
    where
        I: IntoIterator<Item = (f64, &'a DVector<f64>)>,
    {
        let n = dim;
        let mut tri = SymTensor3::zeros(n);
        for (c, x) in factors {
            assert_eq!(
                x.len(),
                n,
                "rank-one factor length {} does not match tensor dimension {}",
                x.len(),
                n
            );
            for i in 0..n {
                let cxi = c * x[i];
                for j in i..n {
                    let cxij = cxi * x[j];
                    let base = (i * n + j) * n;
                    let row = &mut tri.data[base + j..base + n];
                    for (off, slot) in row.iter_mut().enumerate() {
                        *slot += cxij * x[j + off];
                    }
                }
            }
        }
        // Mirror the triangle onto the remaining permutations.
        let mut out = SymTensor3::zeros(n);
        for i in 0..n {
            for j in i..n {
                for k in j..n {
                    out.set_sym(i, j, k, tri.get(i, j, k));
                }
            }
        }
        out
    }

    /// The scalar cubic form T(u, u, u).
    pub fn cubic_form(&self, u: &DVector<f64>) -> f64 {
        assert_eq!(
            u.len(),
            self.dim,
            "argument length {} does not match tensor dimension {}",
            u.len(),
            self.dim
        );
        let n = self.dim;
        let mut acc = 0.0;
        for i in 0..n {
            let ui = u[i];
            if ui == 0.0 {
                continue;
            }
            for j in 0..n {
                let uij = ui * u[j];
                let row = &self.data[(i * n + j) * n..(i * n + j) * n + n];
                let mut inner = 0.0;
                for (k, &t) in row.iter().enumerate() {
                    inner += t * u[k];
                }
                acc += uij * inner;
            }
        }
        acc
    }

    /// Contracts one mode with v: M_jk = Σ_i T_ijk v_i. The result is a
    /// symmetric n×n matrix.
    pub fn contract_once(&self, v: &DVector<f64>) -> DMatrix<f64> {
        assert_eq!(
            v.len(),
            self.dim,
            "argument length {} does not match tensor dimension {}",
            v.len(),
            self.dim
        );
        let n = self.dim;
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let vi = v[i];
            if vi == 0.0 {
                continue;
            }
            for j in 0..n {
                let row = &self.data[(i * n + j) * n..(i * n + j) * n + n];
                for (k, &t) in row.iter().enumerate() {
                    m[(j, k)] += vi * t;
                }
            }
        }
        m
    }

    /// Contracts all three modes onto an orthonormal basis V ∈ ℝ^{n×r}:
    /// R_abc = T(v_a, v_b, v_c). The result is the projection of T onto the
    /// subspace, expressed in basis coordinates, and is again symmetric.
    pub fn contract_to_basis(&self, basis: &SubspaceBasis) -> SymTensor3 {
        assert_eq!(
            basis.ambient_dim(),
            self.dim,
            "basis ambient dimension {} does not match tensor dimension {}",
            basis.ambient_dim(),
            self.dim
        );
        let n = self.dim;
        let r = basis.rank();
        let v = basis.columns();
        if r == 0 {
            return SymTensor3::zeros(0);
        }
        // Mode 1: A_(a)(j,k) = Σ_i V_ia T_ijk, done as one (r×n)·(n×n²) product.
        let t_flat = DMatrix::from_row_slice(n, n * n, &self.data);
        let a_flat = v.tr_mul(&t_flat); // r × n²
        // Modes 2 and 3: for each slab a, R_a = Vᵀ A_a V with A_a ∈ ℝ^{n×n}.
        let mut out = SymTensor3::zeros(r);
        for a in 0..r {
            let slab = DMatrix::from_row_slice(n, n, a_flat.row(a).transpose().as_slice());
            let reduced = v.tr_mul(&slab) * v; // r × r
            for b in 0..r {
                for c in 0..r {
                    let idx = out.idx(a, b, c);
                    out.data[idx] = reduced[(b, c)];
                }
            }
        }
        out
    }

    /// The Frobenius norm √(Σ_ijk T_ijk²).
    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// Largest absolute entry; zero for the empty tensor.
    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().fold(0.0, |m, t| m.max(t.abs()))
    }
}
