//! Seeded verification suites behind `hdet verify`.
//!
//! Each check aggregates many random instances into one [`CheckRecord`] whose
//! `observed` is the worst deviation seen and `bound` the tolerance.

use clap::ValueEnum;
use hdet::convexroof::{convex_roof_estimate, separable_mixture, DensityMatrix, RoofConfig};
use hdet::hyperdet::hdet_permutation_sum;
use hdet::linalg::{max_abs_diff, pauli_y};
use hdet::locc::{
    apply_povm, lemma1_critical_value, lemma1_f, lemma1_stationary_point, monotonicity_trial,
    random_povm, TrialReport,
};
use hdet::qstate::{
    concurrence_qubits, ent_hat_matrix, marginal_weights, measure, random_haar_state_with,
    random_product_state_with, MarginalWeights,
};
use hdet::random::{
    complex_gaussian, complex_gaussian_matrix, haar_unitary, rng_from_seed, SeededRng,
};
use hdet::{
    hdet, hdet_even, hdet_naive, CMatrix, Complex64, HdetBudget, Hypermatrix, MeasureKind,
    PureState, Shape,
};
use rand::Rng;
use serde_json::json;

use crate::report::{CheckRecord, Worst};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Hypermatrix and hyperdeterminant identities, measures on pure states.
    Props,
    /// Monotonicity under local two-outcome measurements.
    Locc,
    /// The scalar inequality behind the monotonicity argument.
    Lemma1,
    /// Convex-roof estimates on mixed states.
    Roof,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Props => "props",
            Suite::Locc => "locc",
            Suite::Lemma1 => "lemma1",
            Suite::Roof => "roof",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Overrides every per-check instance count when set.
    pub trials: Option<usize>,
    pub budget: HdetBudget,
}

#[derive(Debug, Default)]
pub struct SuiteOutput {
    pub records: Vec<CheckRecord>,
    /// Failing monotonicity trials, for inspection.
    pub failures: Vec<TrialReport>,
}

/// Failing trials kept per configuration.
const MAX_REPORTED_FAILURES: usize = 20;

pub fn run(suite: Suite, opts: &SuiteOptions) -> Result<SuiteOutput, CliError> {
    match suite {
        Suite::Props => props(opts),
        Suite::Locc => locc(opts),
        Suite::Lemma1 => lemma1(opts),
        Suite::Roof => roof(opts),
    }
}

fn sub_seed(seed: u64, tag: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(tag.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn count(opts: &SuiteOptions, default: usize) -> usize {
    opts.trials.unwrap_or(default)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

fn random_cuboid(order: usize, d: usize, rng: &mut SeededRng) -> Hypermatrix {
    Hypermatrix::from_fn(Shape::cuboid(order, d).expect("valid cuboid"), |_| {
        complex_gaussian(rng)
    })
}

/// Laplace expansion along the first row.
fn laplace_det(m: &CMatrix) -> Complex64 {
    let n = m.nrows();
    if n == 1 {
        return m[(0, 0)];
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for col in 0..n {
        let minor = CMatrix::from_fn(n - 1, n - 1, |i, j| {
            m[(i + 1, if j < col { j } else { j + 1 })]
        });
        let sign = if col % 2 == 0 { 1.0 } else { -1.0 };
        acc += m[(0, col)] * laplace_det(&minor) * sign;
    }
    acc
}

fn kron_index(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (br, bc) = b.shape();
    CMatrix::from_fn(a.nrows() * br, a.ncols() * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

fn mat_vec(m: &CMatrix, v: &[Complex64]) -> Vec<Complex64> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)] * v[j]).sum())
        .collect()
}

fn e_value(psi: &PureState, which: MeasureKind, budget: HdetBudget) -> Result<f64, CliError> {
    Ok(measure(psi, which, budget)?.value)
}

fn props(opts: &SuiteOptions) -> Result<SuiteOutput, CliError> {
    let b = opts.budget;
    let mut out = SuiteOutput::default();
    let rec = &mut out.records;

    // determinant special case
    let trials = count(opts, 500);
    let mut rng = rng_from_seed(sub_seed(opts.seed, 1));
    let (mut lu, mut sum) = (Worst::default(), Worst::default());
    for k in 0..trials {
        let d = 1 + k % 6;
        let m = complex_gaussian_matrix(d, d, &mut rng);
        let a = Hypermatrix::from_matrix(&m)?;
        let want = laplace_det(&m);
        lu.push(rel(hdet_even(&a, b)?, want));
        sum.push(rel(hdet_permutation_sum(&a, b)?, want));
    }
    rec.push(CheckRecord::at_most(
        "det_reduction",
        json!({"trials": trials, "d": "1..=6"}),
        lu.0,
        1e-10,
    ));
    rec.push(CheckRecord::at_most(
        "det_permutation_sum",
        json!({"trials": trials, "d": "1..=6"}),
        sum.0,
        1e-10,
    ));

    // reduced sum against the full sum
    let trials = count(opts, 100);
    for (tag, (d, order)) in [(2usize, 4usize), (2, 6), (3, 4)].into_iter().enumerate() {
        let mut rng = rng_from_seed(sub_seed(opts.seed, 10 + tag as u64));
        let mut w = Worst::default();
        for _ in 0..trials {
            let a = random_cuboid(order, d, &mut rng);
            w.push(rel(hdet_even(&a, b)?, hdet_naive(&a, b)?));
        }
        rec.push(CheckRecord::at_most(
            "even_vs_naive",
            json!({"d": d, "order": order, "trials": trials}),
            w.0,
            1e-10,
        ));
    }

    // multilinear action and outer products
    for (tag, (d, order)) in [(2usize, 4usize), (3, 4)].into_iter().enumerate() {
        let mut rng = rng_from_seed(sub_seed(opts.seed, 20 + tag as u64));
        let (mut p1, mut p2) = (Worst::default(), Worst::default());
        let fact: f64 = (1..=d).map(|x| x as f64).product();
        for _ in 0..trials {
            let a = random_cuboid(order, d, &mut rng);
            let xs: Vec<CMatrix> = (0..order)
                .map(|_| complex_gaussian_matrix(d, d, &mut rng))
                .collect();
            let dets: Complex64 = xs.iter().map(laplace_det).product();
            p1.push(rel(
                hdet(&a.multilinear_multiply(&xs)?, b)?,
                dets * hdet(&a, b)?,
            ));
            let left = random_cuboid(2, d, &mut rng);
            let right = random_cuboid(order - 2, d, &mut rng);
            p2.push(rel(
                hdet(&left.outer_product(&right), b)?,
                hdet(&left, b)? * hdet(&right, b)? * fact,
            ));
        }
        let params = json!({"d": d, "order": order, "trials": trials});
        rec.push(CheckRecord::at_most(
            "multilinear_multiplicativity",
            params.clone(),
            p1.0,
            1e-9,
        ));
        rec.push(CheckRecord::at_most(
            "outer_product_multiplicativity",
            params,
            p2.0,
            1e-9,
        ));
    }

    // local operators on states versus explicit Kronecker products
    let mut rng = rng_from_seed(sub_seed(opts.seed, 30));
    let mut w = Worst::default();
    for k in 0..trials {
        let (n, d) = [(2, 2), (2, 3), (4, 2)][k % 3];
        let psi = random_haar_state_with(n, d, &mut rng)?;
        let ms: Vec<CMatrix> = (0..n)
            .map(|_| complex_gaussian_matrix(d, d, &mut rng))
            .collect();
        let big = ms[1..]
            .iter()
            .fold(ms[0].clone(), |acc, m| kron_index(&acc, m));
        let lhs = Hypermatrix::from_dims(&vec![d; n], mat_vec(&big, psi.amplitudes()))?;
        let rhs = psi.to_hypermatrix().multilinear_multiply(&ms)?;
        w.push(lhs.max_abs_diff(&rhs));
    }
    rec.push(CheckRecord::at_most(
        "local_operator_kronecker",
        json!({"trials": trials}),
        w.0,
        1e-12,
    ));

    // outer products factor through the multilinear action
    let mut rng = rng_from_seed(sub_seed(opts.seed, 31));
    let mut w = Worst::default();
    for k in 0..trials {
        let dims: Vec<usize> = (0..1 + k % 4).map(|_| rng.random_range(1..=3)).collect();
        let vs: Vec<Vec<Complex64>> = dims
            .iter()
            .map(|&n| (0..n).map(|_| complex_gaussian(&mut rng)).collect())
            .collect();
        let xs: Vec<CMatrix> = dims
            .iter()
            .map(|&n| complex_gaussian_matrix(3, n, &mut rng))
            .collect();
        let outer = |vecs: &[Vec<Complex64>]| -> Result<Hypermatrix, CliError> {
            let mut acc = Hypermatrix::vector(vecs[0].clone())?;
            for v in &vecs[1..] {
                acc = acc.outer_product(&Hypermatrix::vector(v.clone())?);
            }
            Ok(acc)
        };
        let lhs = outer(&vs)?.multilinear_multiply(&xs)?;
        let images: Vec<Vec<Complex64>> = vs.iter().zip(&xs).map(|(v, x)| mat_vec(x, v)).collect();
        let rhs = outer(&images)?;
        w.push(lhs.max_abs_diff(&rhs) / rhs.frobenius_norm().max(1.0));
    }
    rec.push(CheckRecord::at_most(
        "outer_product_factorisation",
        json!({"trials": trials}),
        w.0,
        1e-12,
    ));

    // product states
    let trials = count(opts, 200);
    let mut rng = rng_from_seed(sub_seed(opts.seed, 40));
    for (n, d) in [(2usize, 2usize), (2, 3), (4, 2)] {
        let mut w = Worst::default();
        for _ in 0..trials {
            let (psi, _) = random_product_state_with(n, d, &mut rng)?;
            w.push(e_value(&psi, MeasureKind::Hdet, b)?);
        }
        rec.push(CheckRecord::at_most(
            "product_states_vanish",
            json!({"qudits": n, "d": d, "trials": trials}),
            w.0,
            1e-12,
        ));
    }

    // local unitary invariance
    let mut rng = rng_from_seed(sub_seed(opts.seed, 50));
    let mut w = Worst::default();
    for k in 0..trials {
        let (n, d) = [(2, 2), (2, 3), (4, 2), (4, 3)][k % 4];
        let psi = random_haar_state_with(n, d, &mut rng)?;
        let us: Vec<CMatrix> = (0..n).map(|_| haar_unitary(d, &mut rng)).collect();
        let moved = psi.apply_local_unitaries(&us)?;
        w.push(
            (e_value(&moved, MeasureKind::Hdet, b)? - e_value(&psi, MeasureKind::Hdet, b)?).abs(),
        );
    }
    rec.push(CheckRecord::at_most(
        "local_unitary_invariance",
        json!({"trials": trials}),
        w.0,
        1e-10,
    ));

    // quadratic form matrix
    let mut w = Worst::default();
    for n in 1..=3 {
        let ys: Vec<CMatrix> = (0..2 * n).map(|_| pauli_y()).collect();
        let sign = if n % 2 == 0 { 0.5 } else { -0.5 };
        let want = ys[1..]
            .iter()
            .fold(ys[0].clone(), |acc, y| kron_index(&acc, y))
            * Complex64::new(sign, 0.0);
        w.push(max_abs_diff(&ent_hat_matrix(n)?, &want));
    }
    rec.push(CheckRecord::at_most(
        "quadratic_form_matrix",
        json!({"n": [1, 2, 3]}),
        w.0,
        1e-14,
    ));

    let form_trials = count(opts, 100);
    let mats: Vec<CMatrix> = (1..=3).map(ent_hat_matrix).collect::<Result<_, _>>()?;
    let mut rng = rng_from_seed(sub_seed(opts.seed, 60));
    let mut w = Worst::default();
    for k in 0..form_trials {
        let n = 1 + k % 3;
        let psi = random_haar_state_with(2 * n, 2, &mut rng)?;
        let v = psi.amplitudes();
        let form: Complex64 = mat_vec(&mats[n - 1], v)
            .iter()
            .zip(v)
            .map(|(a, x)| a * x)
            .sum();
        w.push((form - hdet_even(&psi.to_hypermatrix(), b)?).norm());
    }
    rec.push(CheckRecord::at_most(
        "quadratic_form_value",
        json!({"trials": form_trials}),
        w.0,
        1e-12,
    ));

    // qubit concurrence and n-tangle
    let mut rng = rng_from_seed(sub_seed(opts.seed, 70));
    let (mut wc, mut wt) = (Worst::default(), Worst::default());
    for k in 0..trials {
        let n = 2 * (1 + k % 3);
        let psi = random_haar_state_with(n, 2, &mut rng)?;
        let c = concurrence_qubits(&psi)?;
        let e1 = e_value(&psi, MeasureKind::Hdet, b)?;
        let e2 = e_value(&psi, MeasureKind::Tangle, b)?;
        wc.push((c - 2.0 * e1).abs());
        wt.push((4.0 * e2 - c * c).abs());
    }
    rec.push(CheckRecord::at_most(
        "concurrence",
        json!({"trials": trials}),
        wc.0,
        1e-10,
    ));
    rec.push(CheckRecord::at_most(
        "n_tangle",
        json!({"trials": trials}),
        wt.0,
        1e-10,
    ));

    let mut w = Worst::default();
    for n in 1..=3 {
        w.push((e_value(&PureState::ghz(2 * n, 2)?, MeasureKind::Hdet, b)? - 0.5).abs());
    }
    rec.push(CheckRecord::at_most(
        "ghz_value",
        json!({"n": [1, 2, 3]}),
        w.0,
        1e-12,
    ));
    Ok(out)
}

/// `(pairs, d, trials)` for the monotonicity runs.
pub const LOCC_CONFIGS: [(usize, usize, usize); 3] = [(1, 2, 1000), (2, 2, 1000), (1, 3, 500)];

fn locc(opts: &SuiteOptions) -> Result<SuiteOutput, CliError> {
    let b = opts.budget;
    let mut out = SuiteOutput::default();
    for (cfg, &(n, d, default_trials)) in LOCC_CONFIGS.iter().enumerate() {
        let trials = count(opts, default_trials);
        for (wtag, which) in [MeasureKind::Hdet, MeasureKind::Tangle]
            .into_iter()
            .enumerate()
        {
            let base = sub_seed(opts.seed, 100 + 10 * cfg as u64 + wtag as u64);
            let mut w = Worst(f64::NEG_INFINITY);
            let mut failed = 0;
            for k in 0..trials {
                let report = monotonicity_trial(base.wrapping_add(k as u64), n, d, which)?;
                w.push(-report.margin);
                if !report.pass {
                    failed += 1;
                    if failed <= MAX_REPORTED_FAILURES {
                        out.failures.push(report);
                    }
                }
            }
            out.records.push(CheckRecord::at_most(
                "monotonicity",
                json!({"n": n, "d": d, "which": which.label(), "trials": trials, "failed_trials": failed}),
                w.0,
                1e-9,
            ));
        }
    }

    // measurement plumbing
    let trials = count(opts, 100);
    let (mut comp, mut two_path, mut scaling) =
        (Worst::default(), Worst::default(), Worst::default());
    let mut rng = rng_from_seed(sub_seed(opts.seed, 200));
    for k in 0..trials {
        let d = 2 + k % 3;
        let povm = random_povm(d, sub_seed(opts.seed, 300 + k as u64))?;
        comp.push(povm.completeness_residual());
        let psi = random_haar_state_with(2, d, &mut rng)?;
        let rotated =
            PureState::with_tolerance(2, d, psi.apply_on_site_raw(0, &povm.v().adjoint())?, None)?;
        let pt = marginal_weights(&rotated);
        let [o1, o2] = apply_povm(&psi, &povm)?;
        let p1: f64 = povm
            .sigma()
            .iter()
            .zip(pt.as_slice())
            .map(|(s, p)| s * s * p)
            .sum();
        two_path.push((o1.probability - p1).abs());
        two_path.push((o2.probability - (1.0 - p1)).abs());
        let before = e_value(&psi, MeasureKind::Hdet, b)?;
        let dets = [
            povm.sigma().iter().product::<f64>(),
            povm.sigma()
                .iter()
                .map(|s| (1.0 - s * s).max(0.0).sqrt())
                .product::<f64>(),
        ];
        for (o, det) in [o1, o2].iter().zip(dets) {
            if let Some(state) = &o.state {
                let want = det / o.probability.powf(d as f64 / 2.0) * before;
                let got = e_value(state, MeasureKind::Hdet, b)?;
                scaling.push((got - want).abs() / want.max(1e-3));
            }
        }
    }
    let params = json!({"trials": trials, "d": "2..=4"});
    out.records.push(CheckRecord::at_most(
        "povm_completeness",
        params.clone(),
        comp.0,
        1e-10,
    ));
    out.records.push(CheckRecord::at_most(
        "outcome_probability_two_paths",
        params.clone(),
        two_path.0,
        1e-10,
    ));
    out.records.push(CheckRecord::at_most(
        "post_measurement_scaling",
        params,
        scaling.0,
        1e-9,
    ));
    Ok(out)
}

fn random_simplex(d: usize, rng: &mut SeededRng) -> Vec<f64> {
    let raw: Vec<f64> = (0..d).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

pub const LEMMA_ETAS: [f64; 3] = [0.5, 1.0, 2.0];

fn lemma1(opts: &SuiteOptions) -> Result<SuiteOutput, CliError> {
    let mut out = SuiteOutput::default();
    let samples = count(opts, 100_000);
    let mut rng = rng_from_seed(sub_seed(opts.seed, 400));
    let mut all = Worst::default();
    let mut valid = Worst::default();
    let mut worst_sample = json!(null);
    for _ in 0..samples {
        let d = rng.random_range(2..=6);
        let eta = LEMMA_ETAS[rng.random_range(0..LEMMA_ETAS.len())];
        let alphas: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
        let p = random_simplex(d, &mut rng);
        if p.iter().any(|&x| x >= 1.0) {
            continue;
        }
        let f = lemma1_f(&alphas, &MarginalWeights::new(p.clone())?, eta)?;
        if !(f <= all.0) {
            worst_sample = json!({"d": d, "eta": eta, "alphas": alphas, "p": p, "f": f});
        }
        all.push(f);
        if eta >= (d - 1) as f64 {
            valid.push(f);
        }
    }
    out.records.push(CheckRecord::at_most(
        "lemma1_bound",
        json!({"samples": samples, "d": "2..=6", "eta": LEMMA_ETAS, "worst": worst_sample}),
        all.0,
        1.0 + 1e-12,
    ));
    out.records.push(CheckRecord::at_most(
        "lemma1_bound_eta_at_least_d_minus_1",
        json!({"samples": samples, "note": "subset of the samples above with eta >= d - 1"}),
        valid.0,
        1.0 + 1e-12,
    ));

    // grid search against the closed-form critical value
    let alphas_count = count(opts, 50).min(1000);
    let grid = 10_000;
    let eta = 2.0;
    let (mut gap, mut stationary) = (Worst::default(), Worst::default());
    for _ in 0..alphas_count {
        let alphas = [rng.random::<f64>(), rng.random::<f64>()];
        let crit = lemma1_critical_value(&alphas, eta)?;
        let mut best: f64 = 0.0;
        for k in 1..grid {
            let p0 = k as f64 / grid as f64;
            best = best.max(lemma1_f(
                &alphas,
                &MarginalWeights::new(vec![p0, 1.0 - p0])?,
                eta,
            )?);
        }
        gap.push(best - crit);
        if let Some(p) = lemma1_stationary_point(&alphas)? {
            if p.as_slice().iter().all(|&x| x < 1.0) {
                stationary.push((lemma1_f(&alphas, &p, eta)? - crit).abs());
            }
        }
    }
    let params = json!({"alphas": alphas_count, "grid": grid, "d": 2, "eta": eta});
    out.records.push(CheckRecord::at_most(
        "lemma1_grid_dominance",
        params.clone(),
        gap.0,
        1e-9,
    ));
    out.records.push(CheckRecord::at_most(
        "lemma1_stationary_value",
        params,
        stationary.0,
        1e-10,
    ));
    Ok(out)
}

fn roof(opts: &SuiteOptions) -> Result<SuiteOutput, CliError> {
    let mut out = SuiteOutput::default();
    let cfg = RoofConfig {
        seed: sub_seed(opts.seed, 500),
        hdet_budget: opts.budget,
        ..RoofConfig::default()
    };
    let both = [MeasureKind::Hdet, MeasureKind::Tangle];
    let (mut residual, mut above_eigen) = (Worst::default(), Worst::default());

    let mut rng = rng_from_seed(sub_seed(opts.seed, 510));
    let mut w = Worst::default();
    for (n, d) in [(2, 2), (2, 3), (4, 2)] {
        let psi = random_haar_state_with(n, d, &mut rng)?;
        let rho = DensityMatrix::from_pure(&psi);
        for which in both {
            let est = convex_roof_estimate(&rho, which, &cfg)?;
            w.push((est.value - e_value(&psi, which, opts.budget)?).abs());
            residual.push(est.best.residual(&rho));
            above_eigen.push(est.value - est.eigen_value);
        }
    }
    out.records.push(CheckRecord::at_most(
        "roof_pure_recovery",
        json!({"states": 3}),
        w.0,
        1e-8,
    ));

    let mixtures = count(opts, 20);
    let mut rng = rng_from_seed(sub_seed(opts.seed, 520));
    let mut w = Worst::default();
    for k in 0..mixtures {
        let (n, d) = [(2, 2), (2, 3), (4, 2)][k % 3];
        let members = 2 + k % 5;
        let sets: Vec<Vec<Vec<Complex64>>> = (0..members)
            .map(|_| random_product_state_with(n, d, &mut rng).map(|p| p.1))
            .collect::<Result<_, _>>()?;
        let raw: Vec<f64> = (0..members).map(|_| 0.05 + rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let rho = separable_mixture(&sets, &weights)?;
        for which in both {
            let est = convex_roof_estimate(&rho, which, &cfg)?;
            w.push(est.value);
            residual.push(est.best.residual(&rho));
            above_eigen.push(est.value - est.eigen_value);
        }
    }
    out.records.push(CheckRecord::at_most(
        "roof_separable",
        json!({"mixtures": mixtures}),
        w.0,
        1e-6,
    ));

    let mixed = DensityMatrix::maximally_mixed(2, 2)?;
    let mut w = Worst::default();
    for which in both {
        w.push(convex_roof_estimate(&mixed, which, &cfg)?.value);
    }
    out.records.push(CheckRecord::at_most(
        "roof_maximally_mixed",
        json!({"qudits": 2, "d": 2}),
        w.0,
        1e-6,
    ));

    // convexity spot-check on two-qubit rank-two mixtures
    let samples = count(opts, 5);
    let mut rng = rng_from_seed(sub_seed(opts.seed, 530));
    let mut w = Worst::default();
    for _ in 0..samples {
        let rank_two = |rng: &mut SeededRng| -> Result<DensityMatrix, CliError> {
            let a = DensityMatrix::from_pure(&random_haar_state_with(2, 2, rng)?);
            let b = DensityMatrix::from_pure(&random_haar_state_with(2, 2, rng)?);
            let t = rng.random::<f64>();
            Ok(DensityMatrix::mixture(&[t, 1.0 - t], &[a, b])?)
        };
        let r1 = rank_two(&mut rng)?;
        let r2 = rank_two(&mut rng)?;
        let lambda = rng.random::<f64>();
        let mix = DensityMatrix::mixture(&[lambda, 1.0 - lambda], &[r1.clone(), r2.clone()])?;
        for which in both {
            let lhs = convex_roof_estimate(&mix, which, &cfg)?;
            let e1 = convex_roof_estimate(&r1, which, &cfg)?;
            let e2 = convex_roof_estimate(&r2, which, &cfg)?;
            w.push(lhs.value - (lambda * e1.value + (1.0 - lambda) * e2.value));
            residual.push(lhs.best.residual(&mix));
            above_eigen.push(lhs.value - lhs.eigen_value);
        }
    }
    out.records.push(CheckRecord::at_most(
        "roof_convexity",
        json!({"samples": samples, "qudits": 2, "d": 2}),
        w.0,
        2e-6,
    ));
    out.records.push(CheckRecord::at_most(
        "roof_reconstruction",
        json!({}),
        residual.0,
        1e-8,
    ));
    out.records.push(CheckRecord::at_most(
        "roof_below_eigen_average",
        json!({}),
        above_eigen.0,
        1e-12,
    ));
    Ok(out)
}
