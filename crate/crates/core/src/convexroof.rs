//! Mixed states and upper-bound estimates of the convex roofs of `|hdet|` and
//! `|hdet|²`.
//!
//! Every decomposition of a rank-`r` density matrix is reached from its
//! eigen-ensemble by an `m × r` isometry `W` (ensemble steering). The
//! estimator minimises the ensemble average over such isometries. Whatever it
//! reports is the average of an explicit decomposition, so it is an upper
//! bound on the true roof and nothing more.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperdet::{HdetBudget, HdetPlan};
use crate::linalg::{self, CMatrix};
use crate::qstate::{self, MeasureKind, PureState};
use crate::random::{self, SeededRng};

/// Hermiticity, trace and positivity tolerance for density matrices.
pub const DENSITY_TOLERANCE: f64 = 1e-10;
/// Eigenvalues at or below this are dropped from the eigen-ensemble.
pub const EIGEN_CUTOFF: f64 = 1e-10;
/// Entrywise tolerance for a decomposition to count as reconstructing `ρ`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-8;
/// Isometry tolerance on `W†W = I`.
pub const ISOMETRY_TOLERANCE: f64 = 1e-10;
/// Ensemble weights summing to one within this are accepted.
pub const WEIGHT_TOLERANCE: f64 = 1e-9;

/// Steered members lighter than this are dropped.
const NEGLIGIBLE_WEIGHT: f64 = 1e-30;
/// Objective values below this are treated as an exact zero.
const VALUE_FLOOR: f64 = 1e-15;

/// Density matrix on `subsystems` qudits of local dimension `d`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    subsystems: usize,
    d: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Checks the shape, Hermiticity, unit trace and positivity within
    /// [`DENSITY_TOLERANCE`].
    pub fn new(subsystems: usize, d: usize, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(subsystems, d, matrix, Some(DENSITY_TOLERANCE))
    }

    /// As [`DensityMatrix::new`] with a custom tolerance. `None` skips the
    /// Hermiticity, trace and positivity checks but still checks the shape.
    pub fn with_tolerance(
        subsystems: usize,
        d: usize,
        matrix: CMatrix,
        tolerance: Option<f64>,
    ) -> Result<Self> {
        if subsystems == 0 || d == 0 {
            return Err(Error::InvalidDensityMatrix(format!(
                "need at least one subsystem of positive dimension, got {subsystems} x d={d}"
            )));
        }
        let dim = checked_dim(subsystems, d)?;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if let Some(tol) = tolerance {
            let herm = linalg::hermiticity_residual(&matrix);
            if !(herm <= tol) {
                return Err(Error::InvalidDensityMatrix(format!(
                    "not Hermitian (residual {herm:e})"
                )));
            }
            let trace = matrix.trace();
            if !((trace.re - 1.0).abs() <= tol && trace.im.abs() <= tol) {
                return Err(Error::InvalidDensityMatrix(format!(
                    "trace {trace} is not 1"
                )));
            }
            let (values, _) = linalg::hermitian_eigen(&matrix);
            let min = values.last().copied().unwrap_or(0.0);
            if !(min >= -tol) {
                return Err(Error::InvalidDensityMatrix(format!(
                    "negative eigenvalue {min:e}"
                )));
            }
        }
        Ok(Self {
            subsystems,
            d,
            matrix,
        })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(psi: &PureState) -> Self {
        let v = nalgebra::DVector::from_column_slice(psi.amplitudes());
        Self {
            subsystems: psi.subsystems(),
            d: psi.local_dim(),
            matrix: &v * v.adjoint(),
        }
    }

    /// `I / d^N`.
    pub fn maximally_mixed(subsystems: usize, d: usize) -> Result<Self> {
        let dim = checked_dim(subsystems, d)?;
        Self::new(subsystems, d, linalg::identity(dim).scale(1.0 / dim as f64))
    }

    /// Convex combination `Σ w_k ρ_k` of density matrices of equal shape.
    pub fn mixture(weights: &[f64], parts: &[DensityMatrix]) -> Result<Self> {
        check_weights(weights, parts.len())?;
        let first = &parts[0];
        let mut m = CMatrix::zeros(first.dim(), first.dim());
        for (w, p) in weights.iter().zip(parts) {
            if p.subsystems != first.subsystems || p.d != first.d {
                return Err(Error::DimensionMismatch(
                    "mixture of differently shaped states".into(),
                ));
            }
            m += p.matrix.scale(*w);
        }
        Self::new(first.subsystems, first.d, m)
    }

    pub fn subsystems(&self) -> usize {
        self.subsystems
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

fn checked_dim(subsystems: usize, d: usize) -> Result<usize> {
    u32::try_from(subsystems)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .filter(|&len| len <= qstate::MAX_STATE_LEN)
        .ok_or_else(|| {
            Error::InvalidDensityMatrix(format!("d={d} on {subsystems} subsystems is too large"))
        })
}

fn check_weights(weights: &[f64], count: usize) -> Result<()> {
    if weights.is_empty() || weights.len() != count {
        return Err(Error::InvalidEnsemble(format!(
            "{} weights for {count} members",
            weights.len()
        )));
    }
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidEnsemble(format!(
            "weight {w} is not a probability"
        )));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > WEIGHT_TOLERANCE {
        return Err(Error::InvalidEnsemble(format!("weights sum to {total}")));
    }
    Ok(())
}

/// Pure-state ensemble `{p_i, ψ_i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    weights: Vec<f64>,
    states: Vec<PureState>,
}

impl Decomposition {
    pub fn new(weights: Vec<f64>, states: Vec<PureState>) -> Result<Self> {
        check_weights(&weights, states.len())?;
        let (n, d) = (states[0].subsystems(), states[0].local_dim());
        if states
            .iter()
            .any(|s| s.subsystems() != n || s.local_dim() != d)
        {
            return Err(Error::InvalidEnsemble(
                "members have different shapes".into(),
            ));
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[PureState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// `Σ p_i |ψ_i⟩⟨ψ_i|`.
    pub fn reconstruct(&self) -> CMatrix {
        let dim = self.states[0].amplitudes().len();
        let mut m = CMatrix::zeros(dim, dim);
        for (p, s) in self.weights.iter().zip(&self.states) {
            let v = nalgebra::DVector::from_column_slice(s.amplitudes());
            m += (&v * v.adjoint()).scale(*p);
        }
        m
    }

    /// Largest entrywise deviation of the reconstruction from `rho`.
    pub fn residual(&self, rho: &DensityMatrix) -> f64 {
        let m = self.reconstruct();
        if m.shape() != rho.matrix().shape() {
            return f64::INFINITY;
        }
        linalg::max_abs_diff(&m, rho.matrix())
    }

    /// Ensemble average `Σ p_i E(ψ_i)`.
    pub fn average_measure(&self, which: MeasureKind, budget: HdetBudget) -> Result<f64> {
        let mut total = 0.0;
        for (p, s) in self.weights.iter().zip(&self.states) {
            total += p * qstate::measure(s, which, budget)?.value;
        }
        Ok(total)
    }
}

/// Spectral decomposition of `ρ`, keeping eigenvalues above [`EIGEN_CUTOFF`].
/// The kept eigenvalues are renormalised to sum to one.
pub fn eigen_ensemble(rho: &DensityMatrix) -> Result<Decomposition> {
    let (values, vectors) = linalg::hermitian_eigen(rho.matrix());
    let kept: Vec<usize> = (0..values.len())
        .filter(|&k| values[k] > EIGEN_CUTOFF)
        .collect();
    if kept.is_empty() {
        return Err(Error::InvalidDensityMatrix(
            "no eigenvalue above the cutoff".into(),
        ));
    }
    let total: f64 = kept.iter().map(|&k| values[k]).sum();
    let mut weights = Vec::with_capacity(kept.len());
    let mut states = Vec::with_capacity(kept.len());
    for &k in &kept {
        weights.push(values[k] / total);
        let amps = vectors.column(k).iter().copied().collect();
        states.push(PureState::normalized(
            rho.subsystems(),
            rho.local_dim(),
            amps,
        )?);
    }
    Decomposition::new(weights, states)
}

/// Steered ensemble `ψ'_j ∝ Σ_i W_{ji} √p_i ψ_i` with weights `‖·‖²`.
/// Members of negligible weight are dropped.
pub fn steer_ensemble(base: &Decomposition, w: &CMatrix) -> Result<Decomposition> {
    let r = base.len();
    if w.ncols() != r || w.nrows() < r {
        return Err(Error::DimensionMismatch(format!(
            "steering needs an m x {r} isometry with m >= {r}, got {}x{}",
            w.nrows(),
            w.ncols()
        )));
    }
    let res = linalg::unitarity_residual(w);
    if !(res <= ISOMETRY_TOLERANCE) {
        return Err(Error::InvalidEnsemble(format!(
            "steering matrix is not an isometry ({res:e})"
        )));
    }
    let phi = scaled_members(base);
    let (n, d) = (base.states[0].subsystems(), base.states[0].local_dim());
    let mut weights = Vec::new();
    let mut states = Vec::new();
    for j in 0..w.nrows() {
        let row: Vec<Complex64> = (0..r).map(|i| w[(j, i)]).collect();
        let member = combine(&phi, &row);
        let p: f64 = member.iter().map(|z| z.norm_sqr()).sum();
        if p > NEGLIGIBLE_WEIGHT {
            weights.push(p);
            states.push(PureState::normalized(n, d, member)?);
        }
    }
    // drop the rounding drift so the weights validate exactly
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|p| *p /= total);
    Decomposition::new(weights, states)
}

/// `√p_i ψ_i` for every member.
fn scaled_members(base: &Decomposition) -> Vec<Vec<Complex64>> {
    base.weights
        .iter()
        .zip(&base.states)
        .map(|(p, s)| s.amplitudes().iter().map(|a| a * p.sqrt()).collect())
        .collect()
}

fn combine(phi: &[Vec<Complex64>], coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); phi[0].len()];
    for (c, v) in coeffs.iter().zip(phi) {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}

/// `Σ p_i |φ_i⟩⟨φ_i|` where each `φ_i` is the product of the factors in
/// `factor_sets[i]`.
pub fn separable_mixture(
    factor_sets: &[Vec<Vec<Complex64>>],
    weights: &[f64],
) -> Result<DensityMatrix> {
    check_weights(weights, factor_sets.len())?;
    let states = factor_sets
        .iter()
        .map(|f| qstate::product_state(f))
        .collect::<Result<Vec<_>>>()?;
    let dec = Decomposition::new(weights.to_vec(), states)?;
    let s = &dec.states[0];
    DensityMatrix::new(s.subsystems(), s.local_dim(), dec.reconstruct())
}

/// Search budget for [`convex_roof_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoofConfig {
    pub restarts: usize,
    /// Refinement iterations per restart.
    pub iterations: usize,
    /// Largest ensemble size tried. `None` means `r²`.
    pub m_max: Option<usize>,
    pub seed: u64,
    pub hdet_budget: HdetBudget,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            iterations: 500,
            m_max: None,
            seed: 0,
            hdet_budget: HdetBudget::default(),
        }
    }
}

/// Result of a roof search. `value` is an upper bound on the roof.
#[derive(Debug, Clone)]
pub struct RoofEstimate {
    pub value: f64,
    pub best: Decomposition,
    /// Average over the eigen-ensemble, the starting point of restart 0.
    pub eigen_value: f64,
    /// Objective after every accepted step, one trace per restart.
    pub traces: Vec<Vec<f64>>,
}

/// Summary row for reports.
#[derive(Debug, Clone, Serialize)]
pub struct RoofSummary {
    pub which: MeasureKind,
    pub upper_bound: f64,
    pub eigen_value: f64,
    pub members: usize,
    pub residual: f64,
}

impl RoofEstimate {
    pub fn summary(&self, rho: &DensityMatrix, which: MeasureKind) -> RoofSummary {
        RoofSummary {
            which,
            upper_bound: self.value,
            eigen_value: self.eigen_value,
            members: self.best.len(),
            residual: self.best.residual(rho),
        }
    }
}

/// Minimises the ensemble average of `E₁` or `E₂` over decompositions of
/// `ρ`. Restart 0 starts from the eigen-ensemble; later restarts start from
/// random isometries whose row count cycles through `r..=m_max`.
///
/// Each restart refines in three stages, all accepting only steps that do not
/// raise the objective: damped Gauss-Newton on the member hyperdeterminants,
/// Riemannian gradient descent with backtracking, then random isometry
/// perturbations.
pub fn convex_roof_estimate(
    rho: &DensityMatrix,
    which: MeasureKind,
    config: &RoofConfig,
) -> Result<RoofEstimate> {
    if config.restarts == 0 || config.iterations == 0 {
        return Err(Error::Domain(
            "convex roof search needs a non-zero budget".into(),
        ));
    }
    if rho.subsystems() % 2 == 1 {
        return Err(Error::OddOrder(rho.subsystems()));
    }
    let base = eigen_ensemble(rho)?;
    let r = base.len();
    let m_max = config.m_max.unwrap_or(r * r).max(r);
    let objective = Objective::new(&base, rho.local_dim(), which, config.hdet_budget)?;
    let eigen_value = base.average_measure(which, config.hdet_budget)?;

    let mut best: Option<(f64, Decomposition)> = None;
    let mut traces = Vec::with_capacity(config.restarts);
    for k in 0..config.restarts {
        let mut rng = random::rng_from_seed(restart_seed(config.seed, k));
        let w0 = if k == 0 {
            linalg::identity(r)
        } else {
            let m = r + (k - 1) % (m_max - r + 1);
            random::random_isometry(m, r, &mut rng)
        };
        let (w, trace) = objective.refine(w0, config.iterations, &mut rng);
        traces.push(trace);
        let dec = steer_ensemble(&base, &w)?;
        let value = dec.average_measure(which, config.hdet_budget)?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, dec));
        }
        if value <= VALUE_FLOOR {
            break;
        }
    }
    let (value, best) = best.expect("at least one restart ran");
    Ok(RoofEstimate {
        value,
        best,
        eigen_value,
        traces,
    })
}

fn restart_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Ensemble average as a function of the steering isometry.
///
/// With `φ_i = √p_i ψ_i` and `ψ̃_j = Σ_i W_{ji} φ_i`, member `j` has weight
/// `q_j = ‖ψ̃_j‖²` and unnormalised hyperdeterminant `z_j = hdet(ψ̃_j)`.
/// Homogeneity gives the member term `q_j^a |z_j|^b` with
/// `(a, b) = (1 − d/2, 1)` for `E₁` and `(1 − d, 2)` for `E₂`.
struct Objective {
    phi: Vec<Vec<Complex64>>,
    plan: HdetPlan,
    a: f64,
    b: f64,
}

struct Member {
    q: f64,
    z: Complex64,
}

impl Objective {
    fn new(base: &Decomposition, d: usize, which: MeasureKind, budget: HdetBudget) -> Result<Self> {
        let n = base.states[0].subsystems();
        let plan = HdetPlan::new(n, d, budget)?;
        let (a, b) = match which {
            MeasureKind::Hdet => (1.0 - d as f64 / 2.0, 1.0),
            MeasureKind::Tangle => (1.0 - d as f64, 2.0),
        };
        Ok(Self {
            phi: scaled_members(base),
            plan,
            a,
            b,
        })
    }

    fn member(&self, w: &CMatrix, j: usize) -> Member {
        let row: Vec<Complex64> = (0..w.ncols()).map(|i| w[(j, i)]).collect();
        let psi = combine(&self.phi, &row);
        let q = psi.iter().map(|z| z.norm_sqr()).sum();
        let z = self.plan.eval(&psi);
        Member { q, z }
    }

    fn term(&self, q: f64, z: Complex64) -> f64 {
        if q <= 0.0 {
            return 0.0;
        }
        q.powf(self.a) * z.norm().powf(self.b)
    }

    fn value(&self, w: &CMatrix) -> f64 {
        (0..w.nrows())
            .map(|j| {
                let m = self.member(w, j);
                self.term(m.q, m.z)
            })
            .sum()
    }

    /// Member residuals `z_j` and their row gradients `∂z_j/∂W_{jk}`.
    fn residuals(&self, w: &CMatrix) -> (Vec<Complex64>, CMatrix) {
        let (m, r) = w.shape();
        let mut z = Vec::with_capacity(m);
        let mut g = CMatrix::zeros(m, r);
        for j in 0..m {
            let row: Vec<Complex64> = (0..r).map(|i| w[(j, i)]).collect();
            let psi = combine(&self.phi, &row);
            let (zj, grad) = self.plan.eval_with_gradient(&psi);
            z.push(zj);
            for k in 0..r {
                g[(j, k)] = grad.iter().zip(&self.phi[k]).map(|(ge, pe)| ge * pe).sum();
            }
        }
        (z, g)
    }

    /// Value and Euclidean gradient `2 ∂F/∂W̄`.
    fn gradient(&self, w: &CMatrix) -> (f64, CMatrix) {
        let (m, r) = w.shape();
        let mut total = 0.0;
        let mut grad = CMatrix::zeros(m, r);
        for j in 0..m {
            let row: Vec<Complex64> = (0..r).map(|i| w[(j, i)]).collect();
            let psi = combine(&self.phi, &row);
            let q: f64 = psi.iter().map(|x| x.norm_sqr()).sum();
            if q <= 0.0 {
                continue;
            }
            let (z, dz) = self.plan.eval_with_gradient(&psi);
            let az = z.norm();
            total += self.term(q, z);
            // t = q^a |z|^b; ∂q/∂w̄_k = φ_k†ψ̃, ∂|z|^b/∂w̄_k = (b/2)|z|^{b-2} z conj(g_k)
            let dq = self.a * q.powf(self.a - 1.0) * az.powf(self.b);
            let dz_coef = if az > 0.0 {
                q.powf(self.a) * 0.5 * self.b * az.powf(self.b - 2.0)
            } else {
                0.0
            };
            for k in 0..r {
                let c: Complex64 = self.phi[k]
                    .iter()
                    .zip(&psi)
                    .map(|(f, p)| f.conj() * p)
                    .sum();
                let gk: Complex64 = dz.iter().zip(&self.phi[k]).map(|(ge, pe)| ge * pe).sum();
                grad[(j, k)] = (c * dq + z * gk.conj() * dz_coef) * 2.0;
            }
        }
        (total, grad)
    }

    fn refine(&self, w0: CMatrix, iterations: usize, rng: &mut SeededRng) -> (CMatrix, Vec<f64>) {
        let mut w = w0;
        let mut f = self.value(&w);
        let mut trace = vec![f];
        let gn_iters = (iterations / 5).max(1);
        let grad_iters = iterations * 2 / 5;
        let random_iters = iterations.saturating_sub(gn_iters + grad_iters);

        self.gauss_newton(&mut w, &mut f, gn_iters, &mut trace);
        self.descend(&mut w, &mut f, grad_iters, &mut trace);
        self.perturb(&mut w, &mut f, random_iters, rng, &mut trace);
        (w, trace)
    }

    /// Damped minimum-norm steps towards `z_j = 0` for every member, kept
    /// tangent to the isometry manifold and retracted by the polar factor.
    fn gauss_newton(&self, w: &mut CMatrix, f: &mut f64, iters: usize, trace: &mut Vec<f64>) {
        let mut mu = 1e-8;
        let mut rejections = 0;
        for _ in 0..iters {
            if *f <= VALUE_FLOOR || rejections >= 6 {
                break;
            }
            let (z, g) = self.residuals(w);
            let Some(step) = tangent_min_norm_step(w, &z, &g, mu) else {
                mu *= 100.0;
                rejections += 1;
                continue;
            };
            let cand = linalg::polar_isometry(&(&*w + step));
            let fc = self.value(&cand);
            if fc < *f {
                *w = cand;
                *f = fc;
                trace.push(fc);
                mu = (mu * 0.1).max(1e-14);
                rejections = 0;
            } else {
                mu *= 100.0;
                rejections += 1;
            }
        }
    }

    /// Projected gradient descent with Armijo backtracking.
    fn descend(&self, w: &mut CMatrix, f: &mut f64, iters: usize, trace: &mut Vec<f64>) {
        let mut t = 1.0;
        for _ in 0..iters {
            if *f <= VALUE_FLOOR {
                break;
            }
            let (_, egrad) = self.gradient(w);
            let wh = w.adjoint() * &egrad;
            let sym = (&wh + wh.adjoint()).scale(0.5);
            let xi = &egrad - &*w * sym;
            let norm2 = xi.norm_squared();
            if !(norm2 > 1e-30) {
                break;
            }
            t *= 2.0;
            let mut accepted = false;
            while t > 1e-14 {
                let cand = linalg::polar_isometry(&(&*w - xi.scale(t)));
                let fc = self.value(&cand);
                if fc <= *f - 1e-4 * t * norm2 && fc < *f {
                    *w = cand;
                    *f = fc;
                    trace.push(fc);
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
    }

    /// Greedy random isometry perturbations with an adaptive step size.
    fn perturb(
        &self,
        w: &mut CMatrix,
        f: &mut f64,
        iters: usize,
        rng: &mut SeededRng,
        trace: &mut Vec<f64>,
    ) {
        let (m, r) = w.shape();
        let mut s = 0.05;
        for _ in 0..iters {
            if *f <= VALUE_FLOOR {
                break;
            }
            let g = random::complex_gaussian_matrix(m, r, rng);
            let scale = s / g.norm().max(f64::MIN_POSITIVE);
            let cand = linalg::polar_isometry(&(&*w + g.scale(scale)));
            let fc = self.value(&cand);
            if fc < *f {
                *w = cand;
                *f = fc;
                trace.push(fc);
                s = (s * 1.5).min(1.0);
            } else {
                s = (s * 0.9).max(1e-9);
            }
            // occasional large kick keeps the step size from collapsing
            if rng.random::<f64>() < 0.02 {
                s = s.max(0.05);
            }
        }
    }
}

/// Minimum-norm `ΔW` solving `z_j + Σ_k g_{jk} ΔW_{jk} = 0` for every row and
/// `W†ΔW + ΔW†W = 0`, Levenberg-damped by `mu`. Works over the real and
/// imaginary parts of `ΔW`.
fn tangent_min_norm_step(w: &CMatrix, z: &[Complex64], g: &CMatrix, mu: f64) -> Option<CMatrix> {
    let (m, r) = w.shape();
    let cols = 2 * m * r;
    let rows = 2 * m + r * r;
    let idx = |j: usize, k: usize| 2 * (j * r + k);
    let mut c = DMatrix::<f64>::zeros(rows, cols);
    let mut rhs = nalgebra::DVector::<f64>::zeros(rows);
    for j in 0..m {
        for k in 0..r {
            let (gr, gi) = (g[(j, k)].re, g[(j, k)].im);
            let x = idx(j, k);
            c[(2 * j, x)] = gr;
            c[(2 * j, x + 1)] = -gi;
            c[(2 * j + 1, x)] = gi;
            c[(2 * j + 1, x + 1)] = gr;
        }
        rhs[2 * j] = -z[j].re;
        rhs[2 * j + 1] = -z[j].im;
    }
    // H = W†ΔW; S = H + H† must vanish. Row a, column b of H is Σ_j conj(W_ja) ΔW_jb.
    let mut row = 2 * m;
    for a in 0..r {
        for b in a..r {
            let mut re_row = vec![0.0; cols];
            let mut im_row = vec![0.0; cols];
            for j in 0..m {
                // H_ab contribution: conj(w_ja) ΔW_jb
                let wa = w[(j, a)].conj();
                accumulate(&mut re_row, &mut im_row, idx(j, b), wa);
                // conj(H_ba) = Σ_j w_jb conj(ΔW_ja)
                let wb = w[(j, b)];
                accumulate_conj(&mut re_row, &mut im_row, idx(j, a), wb);
            }
            c.row_mut(row).copy_from_slice(&re_row);
            row += 1;
            if a != b {
                c.row_mut(row).copy_from_slice(&im_row);
                row += 1;
            }
        }
    }
    debug_assert_eq!(row, rows);
    let mut gram = &c * c.transpose();
    let scale = gram.diagonal().max().max(1e-300);
    for i in 0..rows {
        gram[(i, i)] += mu * scale;
    }
    let y = gram.cholesky()?.solve(&rhs);
    let x = c.transpose() * y;
    if !x.iter().all(|v| v.is_finite()) {
        return None;
    }
    Some(CMatrix::from_fn(m, r, |j, k| {
        Complex64::new(x[idx(j, k)], x[idx(j, k) + 1])
    }))
}

/// Adds the real-linear map `x ↦ coef · x` (x complex, stored as re/im) to the
/// real and imaginary constraint rows.
fn accumulate(re_row: &mut [f64], im_row: &mut [f64], at: usize, coef: Complex64) {
    re_row[at] += coef.re;
    re_row[at + 1] -= coef.im;
    im_row[at] += coef.im;
    im_row[at + 1] += coef.re;
}

/// As [`accumulate`] for `x ↦ coef · conj(x)`.
fn accumulate_conj(re_row: &mut [f64], im_row: &mut [f64], at: usize, coef: Complex64) {
    re_row[at] += coef.re;
    re_row[at + 1] += coef.im;
    im_row[at] += coef.im;
    im_row[at + 1] -= coef.re;
}
