//! Third-order stationarity machinery.
//!
//! Two operations live here. The competitive subspace search walks the
//! Hessian's eigenvalues from the top down and keeps the largest trailing
//! eigenspace whose projected third-derivative mass dominates the curvature
//! at its head; the projected Frobenius norm over that subspace is the
//! third-order criticality measure χ3. The tensor-aligned search then draws
//! random unit directions inside the subspace until the cubic form along
//! one of them captures at least a 1/β fraction of χ3, and orients it so
//! the cubic form is nonnegative.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::eigh_descending;
use crate::problems::ObjectiveOracle;
use crate::tensor3::{SubspaceBasis, SymTensor3};

/// Draw budget for the tensor-aligned direction search. Exhausting it is
/// pathological (each draw succeeds with probability bounded away from
/// zero); the best draw seen is returned, flagged, rather than aborting.
pub const ATN_MAX_DRAWS: usize = 1000;

/// The trailing eigenspace kept by the competitive subspace search,
/// together with the quantities the escape machinery needs from it.
#[derive(Debug, Clone)]
pub struct CompetitiveSubspace {
    /// Orthonormal basis of the accepted subspace; empty when even the
    /// smallest eigenvalue beats the projected third-derivative mass.
    pub basis: SubspaceBasis,
    /// Frobenius norm of the third derivative projected onto the subspace
    /// (zero when the subspace is empty).
    pub chi3: f64,
    /// Largest Hessian eigenvalue inside the subspace, zero when empty.
    pub tau: f64,
    /// Third derivative expressed in subspace coordinates, cached so the
    /// direction search can evaluate cubic forms at subspace cost.
    pub reduced: SymTensor3,
}

impl CompetitiveSubspace {
    fn empty(ambient_dim: usize) -> Self {
        Self {
            basis: SubspaceBasis::empty(ambient_dim),
            chi3: 0.0,
            tau: 0.0,
            reduced: SymTensor3::zeros(0),
        }
    }
}

/// First-, second-, and third-order criticality at a point, sharing one
/// Hessian eigendecomposition.
#[derive(Debug, Clone)]
pub struct CriticalMeasures {
    /// Gradient norm.
    pub chi1: f64,
    /// Magnitude of the most negative Hessian eigenvalue, zero if none.
    pub chi2: f64,
    /// Projected third-derivative norm over the competitive subspace.
    pub chi3: f64,
    pub subspace: CompetitiveSubspace,
}

/// Competitive subspace search. `eigenvalues` must be sorted descending
/// with `eigenvectors` columns matching; the search accepts the first
/// (largest) trailing eigenspace span{v_i, …, v_{n−1}} whose projected
/// third-derivative mass satisfies χ3²/(12κβ²) ≥ λ_i.
pub fn accs<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    x: &DVector<f64>,
    eigenvalues: &DVector<f64>,
    eigenvectors: &DMatrix<f64>,
    beta: f64,
    kappa: f64,
) -> CompetitiveSubspace {
    assert!(
        beta > 0.0 && kappa > 0.0,
        "subspace search needs positive beta and kappa, got beta={beta}, kappa={kappa}"
    );
    let n = eigenvalues.len();
    assert_eq!(
        (eigenvectors.nrows(), eigenvectors.ncols()),
        (n, n),
        "eigenvector matrix must be square and match the eigenvalue count"
    );
    for i in 1..n {
        assert!(
            eigenvalues[i - 1] >= eigenvalues[i],
            "eigenvalues must be sorted descending"
        );
    }

    let full = SubspaceBasis::new(eigenvectors.clone())
        .expect("Hessian eigenvectors must form an orthonormal basis");
    let rotated = oracle.third_in_basis(x, &full);

    // tail_mass[i] = Σ_{a,b,c ≥ i} W²_{abc}: bucket each squared entry at
    // its minimum index, then suffix-sum, so every candidate's projected
    // mass comes from one pass over the rotated tensor.
    let mut tail_mass = vec![0.0_f64; n + 1];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let w = rotated.get(a, b, c);
                tail_mass[a.min(b).min(c)] += w * w;
            }
        }
    }
    for i in (0..n).rev() {
        tail_mass[i] += tail_mass[i + 1];
    }

    let scale = 12.0 * kappa * beta * beta;
    for i in 0..n {
        if tail_mass[i] / scale >= eigenvalues[i] {
            let rank = n - i;
            let basis = SubspaceBasis::new(eigenvectors.columns(i, rank).into_owned())
                .expect("trailing eigenvector block must stay orthonormal");
            let mut reduced = SymTensor3::zeros(rank);
            for a in 0..rank {
                for b in a..rank {
                    for c in b..rank {
                        reduced.set_sym(a, b, c, rotated.get(i + a, i + b, i + c));
                    }
                }
            }
            return CompetitiveSubspace {
                basis,
                chi3: tail_mass[i].sqrt(),
                tau: eigenvalues[i],
                reduced,
            };
        }
    }
    CompetitiveSubspace::empty(n)
}

/// Evaluates χ1, χ2, χ3 at `x`, running the competitive subspace search on
/// one shared Hessian eigendecomposition.
pub fn critical_measures<O: ObjectiveOracle + ?Sized>(
    oracle: &O,
    x: &DVector<f64>,
    beta: f64,
    kappa: f64,
) -> CriticalMeasures {
    let chi1 = oracle.gradient(x).norm();
    let h = oracle.hessian(x);
    let (eigenvalues, eigenvectors) = eigh_descending(&h);
    let chi2 = (-eigenvalues[eigenvalues.len() - 1]).max(0.0);
    let subspace = accs(oracle, x, &eigenvalues, &eigenvectors, beta, kappa);
    CriticalMeasures {
        chi1,
        chi2,
        chi3: subspace.chi3,
        subspace,
    }
}

/// Result of the tensor-aligned direction search.
#[derive(Debug, Clone)]
pub struct AtnOutcome {
    /// Unit direction in ambient coordinates, lying in the subspace and
    /// oriented so the cubic form along it is nonnegative.
    pub direction: DVector<f64>,
    /// Cubic form of the third derivative along `direction`.
    pub cubic_value: f64,
    /// Random draws consumed.
    pub draws: usize,
    /// True when the draw budget ran out and the best draw seen (still
    /// below the amplification threshold) was returned instead.
    pub below_threshold: bool,
}

/// Tensor-aligned direction search: draws unit directions uniformly in the
/// subspace until the cubic form captures at least `chi3 / beta` in
/// magnitude, then orients the winner to the nonnegative side. Returns
/// `None` only for an empty subspace, which has no directions at all.
pub fn atn<R: Rng + ?Sized>(
    subspace: &CompetitiveSubspace,
    beta: f64,
    rng: &mut R,
) -> Option<AtnOutcome> {
    assert!(beta > 0.0, "direction search needs positive beta, got {beta}");
    let rank = subspace.basis.rank();
    if rank == 0 {
        return None;
    }
    let threshold = subspace.chi3 / beta;
    let mut best: Option<(f64, DVector<f64>, f64)> = None;
    for draw in 1..=ATN_MAX_DRAWS {
        let u = random_unit(rank, rng);
        let cubic = subspace.reduced.cubic_form(&u);
        if cubic.abs() >= threshold {
            return Some(orient(subspace, u, cubic, draw, false));
        }
        if best.as_ref().is_none_or(|(m, _, _)| cubic.abs() > *m) {
            best = Some((cubic.abs(), u, cubic));
        }
    }
    let (_, u, cubic) = best.expect("at least one draw was made");
    Some(orient(subspace, u, cubic, ATN_MAX_DRAWS, true))
}

/// Flips the draw so its cubic form is nonnegative and lifts it back to
/// ambient coordinates.
fn orient(
    subspace: &CompetitiveSubspace,
    coords: DVector<f64>,
    cubic: f64,
    draws: usize,
    below_threshold: bool,
) -> AtnOutcome {
    let (coords, cubic_value) = if cubic > 0.0 {
        (coords, cubic)
    } else {
        (-coords, -cubic)
    };
    AtnOutcome {
        direction: subspace.basis.lift(&coords),
        cubic_value,
        draws,
        below_threshold,
    }
}

/// Uniform draw from the unit sphere via a normalized Gaussian.
fn random_unit<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 0.0 {
            return v / norm;
        }
    }
}
