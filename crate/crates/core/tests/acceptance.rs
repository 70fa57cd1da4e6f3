//! Acceptance suite: ten end-to-end criteria the repository must satisfy,
//! one test per criterion. Each test pins its tolerances in code and prints
//! a single `criterion NN PASS` line with the measured numbers (visible
//! under `--nocapture`); a failed assert is the corresponding FAIL line.

use std::fs;
use std::time::Instant;

use ahom::data_ingest::{map_labels, synthetic_dataset};
use ahom::harness::{check_derivatives, run_experiment, ExperimentConfig};
use ahom::problems::{
    make_coercive, make_logistic, make_monkey, make_quadratic, Logistic, ProblemMeta,
};
use ahom::{
    accs, ahom_run, arc_run, atn, critical_measures, gd_run, model_value, sarp_step,
    solve_cubic_model, taylor_gap, theoretical_bounds, tr_run, AhomConfig, BaselineConfig,
    BaselineResult, CompetitiveSubspace, ObjectiveOracle, RunStatus, StepKind, SubsolverMode,
    SubspaceBasis, SymTensor3,
};
use nalgebra::{dvector, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Objective with a frozen Hessian and third tensor at every point, for
/// driving the subspace search on arbitrary random instances.
struct FrozenOracle {
    meta: ProblemMeta,
    hessian: DMatrix<f64>,
    tensor: SymTensor3,
}

impl FrozenOracle {
    fn new(hessian: DMatrix<f64>, tensor: SymTensor3) -> Self {
        let dim = hessian.nrows();
        FrozenOracle {
            meta: ProblemMeta {
                name: "frozen".to_string(),
                dim,
                known_l: None,
                known_l3: None,
                lower_bound: None,
                default_init: DVector::zeros(dim),
            },
            hessian,
            tensor,
        }
    }
}

impl ObjectiveOracle for FrozenOracle {
    fn meta(&self) -> &ProblemMeta {
        &self.meta
    }
    fn value(&self, _x: &DVector<f64>) -> f64 {
        0.0
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::zeros(x.len())
    }
    fn hessian(&self, _x: &DVector<f64>) -> DMatrix<f64> {
        self.hessian.clone()
    }
    fn third(&self, _x: &DVector<f64>) -> SymTensor3 {
        self.tensor.clone()
    }
}

fn random_symmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-2.0..2.0));
    (&a + a.transpose()).scale(0.5)
}

fn random_tensor<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> SymTensor3 {
    let mut t = SymTensor3::zeros(dim);
    for a in 0..dim {
        for b in a..dim {
            for c in b..dim {
                t.set_sym(a, b, c, rng.random_range(-3.0..3.0));
            }
        }
    }
    t
}

/// Eigendecomposition sorted descending, the layout the subspace search
/// expects.
fn eigh_sorted(h: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = h.nrows();
    let eig = h.clone().symmetric_eigen();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        eig.eigenvalues[j]
            .partial_cmp(&eig.eigenvalues[i])
            .expect("finite eigenvalues")
    });
    let values = DVector::from_fn(n, |i, _| eig.eigenvalues[idx[i]]);
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, idx[j])]);
    (values, vectors)
}

/// Uniform point in the centered ball of the given radius.
fn ball_point<R: Rng + ?Sized>(dim: usize, radius: f64, rng: &mut R) -> DVector<f64> {
    let dir = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
    let norm = dir.norm();
    dir * (rng.random_range(0.0..radius) / norm)
}

fn sonar_scale_logistic() -> Logistic {
    let data = synthetic_dataset(208, 60, 1);
    let labels = map_labels(&data.raw_labels).expect("synthetic labels are two-class");
    make_logistic(&data.features, &labels, 1e-5).expect("synthetic design matrix is well-formed")
}

fn assert_near_quartic_well(name: &str, run: &BaselineResult) {
    assert!(
        (run.f + 0.25).abs() <= 1e-3,
        "{name} must settle within 1e-3 of the well value -0.25, got {}",
        run.f
    );
}

#[test]
fn criterion_01_monkey_escape() {
    let start = Instant::now();
    let problem = make_monkey();
    let x0 = dvector![1.0, 0.0];
    let base = BaselineConfig::default();

    let gd = gd_run(&problem, &x0, &base).expect("default config is valid");
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let arc =
        arc_run(&problem, &x0, &base, SubsolverMode::Krylov, &mut rng).expect("default config");
    let high = ahom_run(&problem, &x0, &AhomConfig::default()).expect("default config");

    assert!(
        gd.f >= 0.0 && gd.f <= 1e-6,
        "GD must stall above the saddle with f in [0, 1e-6], got {}",
        gd.f
    );
    assert_eq!(
        gd.x[1], 0.0,
        "GD never leaves the x1 = 0 axis, so the final second coordinate is exactly zero"
    );
    assert!(
        arc.f >= 0.0 && arc.f <= 1e-6,
        "ARC must stall above the saddle with f in [0, 1e-6], got {}",
        arc.f
    );
    assert!(
        arc.x[1].abs() <= 1e-12,
        "ARC Krylov iterates stay on the axis to within 1e-12, got |x1| = {:.3e}",
        arc.x[1].abs()
    );

    let escape = high.trace.iter().find(|row| row.f <= -10.0).map(|row| row.iter);
    assert!(
        escape.is_some_and(|iter| iter < 100),
        "the third-order method must reach f <= -10 within 100 iterations, trace ends at f = {}",
        high.f
    );

    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 5.0, "monkey scenario must finish within 5 s, took {secs:.2} s");
    println!(
        "criterion 01 PASS — monkey escape: gd f = {:.2e} (x1 = 0), arc f = {:.2e} (|x1| = {:.1e}), \
         third-order f <= -10 at iteration {}, {:.2} s",
        gd.f,
        arc.f,
        arc.x[1].abs(),
        escape.unwrap(),
        secs
    );
}

#[test]
fn criterion_02_coercive_escape() {
    let start = Instant::now();
    let problem = make_coercive();
    let x0 = dvector![3.0, 3.0];
    let base = BaselineConfig::default();

    let gd = gd_run(&problem, &x0, &base).expect("default config");
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let arc =
        arc_run(&problem, &x0, &base, SubsolverMode::Krylov, &mut rng).expect("default config");
    let tr = tr_run(&problem, &x0, &base).expect("default config");
    assert_near_quartic_well("gd", &gd);
    assert_near_quartic_well("arc", &arc);
    assert_near_quartic_well("tr", &tr);

    let high = ahom_run(&problem, &x0, &AhomConfig::default()).expect("default config");
    let escape = high
        .trace
        .iter()
        .find(|row| row.f <= -0.3)
        .map(|row| row.iter);
    assert!(
        escape.is_some_and(|iter| iter < 2000),
        "the third-order method must push below -0.3 within 2000 iterations, trace ends at f = {}",
        high.f
    );

    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 30.0, "coercive scenario must finish within 30 s, took {secs:.2} s");
    println!(
        "criterion 02 PASS — coercive escape: gd f = {:.6}, arc f = {:.6}, tr f = {:.6}, \
         third-order f <= -0.3 at iteration {}, {:.2} s",
        gd.f,
        arc.f,
        tr.f,
        escape.unwrap(),
        secs
    );
}

#[test]
fn criterion_03_logistic_dominance() {
    let problem = sonar_scale_logistic();
    let x0 = DVector::zeros(60);
    let base = BaselineConfig::default();

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let arc =
        arc_run(&problem, &x0, &base, SubsolverMode::Krylov, &mut rng).expect("default config");
    let config = AhomConfig::default();
    let high = ahom_run(&problem, &x0, &config).expect("default config");

    let measures = critical_measures(&problem, &high.x, config.beta, high.final_kappa);
    let clean_third_order = high.f <= arc.f + 1e-8
        && measures.chi1 <= 1e-6
        && measures.chi2 <= 1e-6
        && measures.chi3 <= 1e-6;
    let budget_fallback = high.status == RunStatus::BudgetExhausted && high.f <= arc.f;
    assert!(
        clean_third_order || budget_fallback,
        "third-order run must match ARC's value and be third-order critical, or exhaust its \
         budget while still matching ARC: f = {} vs arc {}, chi = ({:.2e}, {:.2e}, {:.2e}), status {:?}",
        high.f,
        arc.f,
        measures.chi1,
        measures.chi2,
        measures.chi3,
        high.status
    );
    println!(
        "criterion 03 PASS — logistic dominance: third-order f = {:.9} ({} iterations) vs \
         arc f = {:.9} ({} iterations), final chi = ({:.2e}, {:.2e}, {:.2e})",
        high.f,
        high.trace.len(),
        arc.f,
        arc.trace.len(),
        measures.chi1,
        measures.chi2,
        measures.chi3
    );
}

#[test]
fn criterion_04_derivative_oracles() {
    let start = Instant::now();
    let logistic = sonar_scale_logistic();
    let reports = [
        ("monkey", check_derivatives(&make_monkey(), 0)),
        ("coercive", check_derivatives(&make_coercive(), 0)),
        ("quadratic", check_derivatives(&make_quadratic(6), 0)),
        ("logistic", check_derivatives(&logistic, 0)),
    ];
    for (name, report) in &reports {
        assert!(
            report.within_tolerance(),
            "{name} analytic derivatives disagree with central differences: \
             gradient {:.3e}, hessian {:.3e}, third {:.3e}",
            report.gradient,
            report.hessian,
            report.third
        );
    }
    let secs = start.elapsed().as_secs_f64();
    assert!(secs <= 60.0, "derivative suite must finish within 60 s, took {secs:.2} s");
    let worst = reports
        .iter()
        .map(|(_, r)| r.max_error())
        .fold(0.0_f64, f64::max);
    println!(
        "criterion 04 PASS — derivative oracles: all four problems within 1e-4 of central \
         differences, worst relative error {worst:.2e}, {secs:.2} s"
    );
}

#[test]
fn criterion_05_sarp_step_invariants() {
    let base = BaselineConfig::default();
    let s = &base.sarp;
    let monkey = make_monkey();
    let coercive = make_coercive();
    let quadratic = make_quadratic(6);
    let logistic = sonar_scale_logistic();
    let problems: [(&str, &dyn ObjectiveOracle, DVector<f64>); 4] = [
        ("monkey", &monkey, dvector![1.0, 0.0]),
        ("coercive", &coercive, dvector![3.0, 3.0]),
        ("quadratic", &quadratic, DVector::from_element(6, 1.0)),
        ("logistic", &logistic, DVector::zeros(60)),
    ];

    let mut total_successes = 0;
    for (name, oracle, x0) in problems {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut x = x0;
        let mut sigma = s.sigma0;
        let mut successes = 0;
        for _ in 0..base.max_iters {
            let g = oracle.gradient(&x);
            let h = oracle.hessian(&x);
            let lambda_min = h
                .clone()
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |m, &v| m.min(v));
            if g.norm() <= base.eps1 && (-lambda_min).max(0.0) <= base.eps2 {
                break;
            }

            let f_x = oracle.value(&x);
            let out = sarp_step(oracle, &x, sigma, s, SubsolverMode::Krylov, &mut rng);
            if out.successful {
                successes += 1;
                let step = &out.z - &x;
                let cube = out.step_norm.powi(3);
                let floor = s.eta1 * s.sigma_min / 3.0 * cube;
                assert!(
                    out.f_z <= f_x - floor + 1e-9,
                    "{name}: successful step decreased f by {:.3e}, below the guaranteed \
                     (eta1*sigma_min/3)*|s|^3 = {:.3e}",
                    f_x - out.f_z,
                    floor
                );
                // Independent recomputation of the model decrease from the
                // oracle, not the solver's own report.
                let model_decrease = -(g.dot(&step) + 0.5 * (&h * &step).dot(&step));
                assert!(
                    model_decrease >= sigma / 3.0 * cube - 1e-9,
                    "{name}: model decrease {:.3e} misses the (sigma/3)*|s|^3 = {:.3e} floor",
                    model_decrease,
                    sigma / 3.0 * cube
                );
            }
            if !out.f_z.is_finite() || out.f_z <= -1e100 || out.z.amax() >= 1e100 {
                break;
            }
            x = out.z;
            sigma = out.sigma_next;
        }
        assert!(successes > 0, "{name}: the run never took a successful step");
        total_successes += successes;
    }
    println!(
        "criterion 05 PASS — inner-step invariants: {total_successes} successful steps across \
         four problems all satisfy the decrease and model-decrease floors"
    );
}

#[test]
fn criterion_06_exact_subsolver_optimality() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);

    // Analytic one-dimensional case: minimize s + s^2 + |s|^3, whose
    // negative-side stationary point is -1/3.
    let g1 = dvector![1.0];
    let h1 = DMatrix::from_element(1, 1, 2.0);
    let sol1 = solve_cubic_model(&g1, &h1, 3.0, 1e-4, SubsolverMode::Exact, &mut rng);
    assert!(
        (sol1.step[0] + 1.0 / 3.0).abs() <= 1e-8,
        "1-D model (g=1, H=2, sigma=3) must return s = -1/3, got {}",
        sol1.step[0]
    );

    for trial in 0..200 {
        let n = rng.random_range(1..=6);
        let g = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
        let h = random_symmetric(n, &mut rng);
        let sigma = rng.random_range(0.05..5.0);
        let sol = solve_cubic_model(&g, &h, sigma, 1e-4, SubsolverMode::Exact, &mut rng);
        let best = model_value(&g, &h, sigma, &sol.step);
        assert!(
            sol.conditions_met,
            "trial {trial}: exact solve must satisfy its own inner conditions"
        );
        for probe_idx in 0..100 {
            let dir = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
            // Half the probes explore fresh directions at the step's scale,
            // half perturb the returned step to test local optimality.
            let probe = if probe_idx % 2 == 0 {
                &dir * (rng.random_range(0.0..3.0) * sol.step.norm().max(1.0) / dir.norm())
            } else {
                &sol.step + &dir * (rng.random_range(0.0..0.5) / dir.norm())
            };
            let probed = model_value(&g, &h, sigma, &probe);
            assert!(
                best <= probed + 1e-9,
                "trial {trial}: exact model value {best:.12} beaten by a probe at {probed:.12}"
            );
        }
    }
    println!(
        "criterion 06 PASS — exact subsolver: 200 random instances unbeaten by 100 probes each, \
         1-D analytic step within 1e-8 of -1/3"
    );
}

#[test]
fn criterion_07_subspace_and_direction_search() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    // Subspace search: maximality and threshold discipline on 500 random
    // instances, cross-checked against from-scratch tensor contractions.
    let mut nonempty = 0;
    for trial in 0..500 {
        let n = rng.random_range(2..=6);
        let hessian = random_symmetric(n, &mut rng);
        let tensor = random_tensor(n, &mut rng);
        let beta = rng.random_range(1.2..25.0);
        let kappa = 10f64.powf(rng.random_range(-6.0..0.0));
        let oracle = FrozenOracle::new(hessian.clone(), tensor.clone());
        let x = DVector::zeros(n);
        let (values, vectors) = eigh_sorted(&hessian);
        let sub = accs(&oracle, &x, &values, &vectors, beta, kappa);
        let scale = 12.0 * kappa * beta * beta;

        let mass = |i: usize| -> f64 {
            let basis = SubspaceBasis::new(vectors.columns(i, n - i).into_owned())
                .expect("eigenvector block stays orthonormal");
            tensor.contract_to_basis(&basis).frobenius_norm().powi(2)
        };

        let accepted = n - sub.basis.rank();
        for j in 0..accepted {
            assert!(
                mass(j) / scale < values[j] + 1e-9,
                "trial {trial}: a larger subspace (index {j}) also meets the threshold, \
                 so the returned one is not maximal"
            );
        }
        if sub.basis.rank() > 0 {
            nonempty += 1;
            assert!(
                mass(accepted) / scale >= values[accepted] - 1e-9,
                "trial {trial}: accepted subspace fails its own threshold"
            );
            assert!(
                sub.tau <= sub.chi3.powi(2) / scale + 1e-9,
                "trial {trial}: tau = {} exceeds chi3^2/(12 kappa beta^2) = {}",
                sub.tau,
                sub.chi3.powi(2) / scale
            );
            assert!(
                (sub.chi3.powi(2) - mass(accepted)).abs() <= 1e-8 * mass(accepted).max(1.0),
                "trial {trial}: reported chi3 disagrees with a direct contraction"
            );
        } else {
            assert!(
                values[n - 1] > 0.0,
                "trial {trial}: an empty subspace is only possible under strictly positive \
                 curvature, smallest eigenvalue is {}",
                values[n - 1]
            );
        }
    }
    assert!(nonempty > 0, "the sweep never produced a nonempty subspace");

    // Direction search: acceptance within the draw budget on 1000 random
    // rank-5 instances at beta = 20, plus the accepted-direction contract.
    let mut accepted_within = 0;
    let mut max_draws = 0;
    for trial in 0..1000 {
        let tensor = random_tensor(5, &mut rng);
        let sub = CompetitiveSubspace {
            basis: SubspaceBasis::full(5),
            chi3: tensor.frobenius_norm(),
            tau: 0.0,
            reduced: tensor.clone(),
        };
        let out = atn(&sub, 20.0, &mut rng).expect("the full space is nonempty");
        max_draws = max_draws.max(out.draws);
        if out.below_threshold {
            continue;
        }
        accepted_within += 1;
        assert!(
            (out.direction.norm() - 1.0).abs() <= 1e-10,
            "trial {trial}: accepted direction is not unit"
        );
        let back = sub.basis.lift(&sub.basis.coordinates(&out.direction));
        assert!(
            (&back - &out.direction).norm() <= 1e-10,
            "trial {trial}: accepted direction leaves its subspace"
        );
        assert!(
            out.cubic_value >= 0.0,
            "trial {trial}: accepted direction is oriented to the negative side"
        );
        assert!(
            out.cubic_value >= sub.chi3 / 20.0 - 1e-12,
            "trial {trial}: accepted cubic value {:.3e} is below chi3/beta = {:.3e}",
            out.cubic_value,
            sub.chi3 / 20.0
        );
        assert!(
            (tensor.cubic_form(&out.direction) - out.cubic_value).abs() <= 1e-9,
            "trial {trial}: reported cubic value disagrees with the tensor"
        );
    }
    assert!(
        accepted_within >= 990,
        "direction search must accept within its draw budget on at least 99% of instances, \
         got {accepted_within}/1000"
    );
    println!(
        "criterion 07 PASS — subspace/direction search: 500 instances maximal and \
         threshold-clean ({nonempty} nonempty), direction accepted on {accepted_within}/1000 \
         instances (max {max_draws} draws)"
    );
}

#[test]
fn criterion_08_kappa_discipline() {
    let problem = make_coercive();
    let config = AhomConfig::default();
    let bounds = theoretical_bounds(&config, problem.meta(), None);
    let kappa_cap = bounds.kappa_max.expect("the quartic well publishes L3 = 6");
    let fail_cap = bounds.u_third1_cap.expect("kappa cap implies a failure cap");
    assert!(
        (kappa_cap - config.zeta * 6.0 / (2.0 - config.xi1)).abs() <= 1e-12,
        "kappa cap must be max(kappa0, zeta*L3/(2-xi1)), got {kappa_cap}"
    );
    assert_eq!(
        fail_cap, 158,
        "ceil(ln(kappa_max/kappa0)/ln zeta) should allow at most 158 failed escapes"
    );

    let starts = [
        (0_u64, dvector![3.0, 3.0]),
        (1, dvector![0.0, 1.0]),
        (2, dvector![1.5, -3.0]),
        (3, dvector![0.5, -0.5]),
        (4, dvector![-2.0, 0.5]),
    ];
    let mut worst_kappa = 0.0_f64;
    let mut worst_fails = 0;
    for (seed, x0) in starts {
        let run = ahom_run(&problem, &x0, &AhomConfig { seed, ..config.clone() })
            .expect("default config");
        let mut fails = 0;
        for row in &run.trace {
            assert!(
                row.kappa <= kappa_cap + 1e-12,
                "seed {seed}: kappa {} exceeds the cap {kappa_cap}",
                row.kappa
            );
            if row.step_kind == StepKind::EscapeFail {
                fails += 1;
            }
        }
        assert!(
            run.final_kappa <= kappa_cap + 1e-12,
            "seed {seed}: final kappa {} exceeds the cap {kappa_cap}",
            run.final_kappa
        );
        assert!(
            fails <= fail_cap,
            "seed {seed}: {fails} failed escapes exceed the cap {fail_cap}"
        );
        worst_kappa = worst_kappa.max(run.final_kappa);
        worst_fails = worst_fails.max(fails);
    }
    println!(
        "criterion 08 PASS — kappa discipline: five quartic-well runs stay under \
         kappa <= {kappa_cap:.4} (worst {worst_kappa:.2e}) with at most {worst_fails} \
         failed escapes (cap {fail_cap})"
    );
}

#[test]
fn criterion_09_taylor_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let monkey = make_monkey();
    let coercive = make_coercive();
    let mut worst_monkey = 0.0_f64;
    let mut worst_margin = f64::INFINITY;
    for _ in 0..100 {
        let x = ball_point(2, 2.0, &mut rng);
        let s = ball_point(2, 2.0, &mut rng);

        let gap = taylor_gap(&monkey, &x, &s);
        assert!(
            gap <= 1e-9,
            "a cubic objective is its own third-order model, yet the gap is {gap:.3e}"
        );
        worst_monkey = worst_monkey.max(gap);

        let bound = 0.25 * s.norm().powi(4) + 1e-9;
        let quartic_gap = taylor_gap(&coercive, &x, &s);
        assert!(
            quartic_gap <= bound,
            "quartic-well Taylor gap {quartic_gap:.3e} exceeds (L3/24)|s|^4 bound {bound:.3e}"
        );
        worst_margin = worst_margin.min(bound - quartic_gap);
    }
    println!(
        "criterion 09 PASS — Taylor bound: 100 cubic gaps at most {worst_monkey:.1e}, \
         100 quartic gaps under the 0.25|s|^4 envelope (tightest margin {worst_margin:.1e})"
    );
}

#[test]
fn criterion_10_determinism() {
    let dir = tempfile::tempdir().expect("temp dir");
    let config: ExperimentConfig = serde_json::from_str(
        r#"{
            "problem": {"name": "coercive"},
            "algorithms": ["gd", "arc", "tr", "ahom"],
            "init": {"explicit": [3.0, 3.0]},
            "seed": 7
        }"#,
    )
    .expect("literal config parses");

    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    run_experiment(&config, &out_a).expect("first run");
    run_experiment(&config, &out_b).expect("second run");

    for name in [
        "gd_trace.csv",
        "arc_trace.csv",
        "tr_trace.csv",
        "ahom_trace.csv",
        "summary.csv",
    ] {
        let a = fs::read_to_string(out_a.join(name)).expect("first run file");
        let b = fs::read_to_string(out_b.join(name)).expect("second run file");
        assert_eq!(
            mask_wall_time(&a),
            mask_wall_time(&b),
            "{name} must be byte-identical between identically-seeded runs \
             (wall-time column excluded)"
        );
    }
    println!(
        "criterion 10 PASS — determinism: two seeded runs produce byte-identical traces and \
         summaries outside the wall-time column"
    );
}

/// Blanks the wall_time_s column (field index 1) of trace rows. Files whose
/// header is not the trace header (the summary) are compared verbatim.
fn mask_wall_time(text: &str) -> String {
    let mut lines = text.lines();
    let Some(header) = lines.next() else {
        return String::new();
    };
    if !header.starts_with("iter,wall_time_s") {
        return text.to_string();
    }
    let mut masked = vec![header.to_string()];
    for line in lines {
        let mut fields: Vec<&str> = line.split(',').collect();
        if fields.len() > 1 {
            fields[1] = "";
        }
        masked.push(fields.join(","));
    }
    masked.join("\n")
}
