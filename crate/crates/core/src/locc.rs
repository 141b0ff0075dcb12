//! Two-outcome local POVMs and the monotonicity-on-average machinery.
//!
//! Any two-outcome POVM `{M₁, M₂}` on `C^d` shares right singular vectors:
//!
//! ```text
//! M₁ = U₁ · diag(σ) · V†      M₂ = U₂ · diag(√(1-σ²)) · V†
//! ```
//!
//! and [`TwoOutcomePovm`] stores exactly those factors. Measurements act on
//! the first subsystem; other sites are reached by permuting subsystems first.
//!
//! With `P̃` the marginal weights of `(V† ⊗ I)ψ` and `α = σ²`, the ratio of the
//! expected post-measurement measure to the prior one is the scalar function
//! [`lemma1_f`] with `η = 2` for `|hdet|` and `η = 1` for `|hdet|²`.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hyperdet::HdetBudget;
use crate::linalg::{self, CMatrix};
use crate::qstate::{self, MarginalWeights, MeasureKind, PureState};
use crate::random;

/// Outcome probabilities below this are treated as never occurring.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;

/// Allowed slack when certifying `expected_after ≤ measure_before`.
pub const MONOTONICITY_TOLERANCE: f64 = 1e-9;

const UNITARY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoOutcomePovm {
    u1: CMatrix,
    u2: CMatrix,
    v: CMatrix,
    sigma: Vec<f64>,
}

fn check_unitary(name: &str, u: &CMatrix, d: usize) -> Result<()> {
    if u.nrows() != d || u.ncols() != d {
        return Err(Error::InvalidPovm(format!(
            "{name} is {}x{}, expected {d}x{d}",
            u.nrows(),
            u.ncols()
        )));
    }
    let r = linalg::unitarity_residual(u);
    if !(r <= UNITARY_TOLERANCE) {
        return Err(Error::InvalidPovm(format!(
            "{name} is not unitary (residual {r:e})"
        )));
    }
    Ok(())
}

fn diag(values: impl Iterator<Item = f64>, d: usize) -> CMatrix {
    CMatrix::from_diagonal(&DVector::from_iterator(
        d,
        values.map(|x| Complex64::new(x, 0.0)),
    ))
}

impl TwoOutcomePovm {
    pub fn new(u1: CMatrix, u2: CMatrix, v: CMatrix, sigma: Vec<f64>) -> Result<Self> {
        let d = sigma.len();
        if d == 0 {
            return Err(Error::InvalidPovm("empty singular value list".into()));
        }
        if let Some(s) = sigma.iter().find(|s| !(0.0..=1.0).contains(*s)) {
            return Err(Error::InvalidPovm(format!(
                "singular value {s} outside [0, 1]"
            )));
        }
        check_unitary("U1", &u1, d)?;
        check_unitary("U2", &u2, d)?;
        check_unitary("V", &v, d)?;
        Ok(Self { u1, u2, v, sigma })
    }

    /// Same unitaries, different singular values.
    pub fn with_sigma(&self, sigma: Vec<f64>) -> Result<Self> {
        Self::new(self.u1.clone(), self.u2.clone(), self.v.clone(), sigma)
    }

    pub fn dim(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn u1(&self) -> &CMatrix {
        &self.u1
    }

    pub fn u2(&self) -> &CMatrix {
        &self.u2
    }

    pub fn v(&self) -> &CMatrix {
        &self.v
    }

    /// Singular values of `M₂`: `√(1-σ_k²)`.
    pub fn sigma2(&self) -> Vec<f64> {
        self.sigma
            .iter()
            .map(|s| (1.0 - s * s).max(0.0).sqrt())
            .collect()
    }

    pub fn m1(&self) -> CMatrix {
        &self.u1 * diag(self.sigma.iter().copied(), self.dim()) * self.v.adjoint()
    }

    pub fn m2(&self) -> CMatrix {
        &self.u2 * diag(self.sigma2().into_iter(), self.dim()) * self.v.adjoint()
    }

    /// Kraus operator of outcome `i ∈ {0, 1}`.
    pub fn kraus(&self, i: usize) -> CMatrix {
        if i == 0 {
            self.m1()
        } else {
            self.m2()
        }
    }

    /// `max |M₁†M₁ + M₂†M₂ - I|` entrywise.
    pub fn completeness_residual(&self) -> f64 {
        let (m1, m2) = (self.m1(), self.m2());
        let sum = m1.adjoint() * &m1 + m2.adjoint() * &m2;
        linalg::max_abs_diff(&sum, &linalg::identity(self.dim()))
    }
}

/// Haar `U₁, U₂, V` and i.i.d. uniform `σ_k ∈ [0, 1]`.
pub fn random_povm(d: usize, seed: u64) -> Result<TwoOutcomePovm> {
    random_povm_with(d, &mut random::rng_from_seed(seed))
}

pub fn random_povm_with<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<TwoOutcomePovm> {
    if d < 2 {
        return Err(Error::InvalidPovm(format!(
            "local dimension must be >= 2, got {d}"
        )));
    }
    let u1 = random::haar_unitary(d, rng);
    let u2 = random::haar_unitary(d, rng);
    let v = random::haar_unitary(d, rng);
    let sigma = (0..d).map(|_| rng.random::<f64>()).collect();
    TwoOutcomePovm::new(u1, u2, v, sigma)
}

/// One measurement outcome. `state` is `None` when the outcome is degenerate
/// (probability below [`DEGENERACY_THRESHOLD`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PovmOutcome {
    pub probability: f64,
    pub state: Option<PureState>,
}

impl PovmOutcome {
    pub fn is_degenerate(&self) -> bool {
        self.state.is_none()
    }
}

/// Measures the first subsystem: `p_i = ‖(M_i ⊗ I)ψ‖²` and
/// `state_i = (M_i ⊗ I)ψ / √p_i`.
pub fn apply_povm(psi: &PureState, povm: &TwoOutcomePovm) -> Result<[PovmOutcome; 2]> {
    if psi.local_dim() != povm.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM on C^{} applied to a state with d={}",
            povm.dim(),
            psi.local_dim()
        )));
    }
    let outcome = |i: usize| -> Result<PovmOutcome> {
        let phi = psi.apply_on_site_raw(0, &povm.kraus(i))?;
        let p: f64 = phi.iter().map(|z| z.norm_sqr()).sum();
        if p < DEGENERACY_THRESHOLD {
            return Ok(PovmOutcome {
                probability: p,
                state: None,
            });
        }
        let s = p.sqrt();
        let amps = phi.into_iter().map(|z| z / s).collect();
        let state = PureState::with_tolerance(psi.subsystems(), psi.local_dim(), amps, None)?;
        Ok(PovmOutcome {
            probability: p,
            state: Some(state),
        })
    };
    Ok([outcome(0)?, outcome(1)?])
}

/// `p₁·E(state₁) + p₂·E(state₂)`, skipping degenerate outcomes.
pub fn expected_measure(
    psi: &PureState,
    povm: &TwoOutcomePovm,
    which: MeasureKind,
    budget: HdetBudget,
) -> Result<f64> {
    if psi.subsystems() % 2 == 1 {
        return Err(Error::OddOrder(psi.subsystems()));
    }
    let mut total = 0.0;
    for out in apply_povm(psi, povm)? {
        if let Some(state) = &out.state {
            total += out.probability * qstate::measure(state, which, budget)?.value;
        }
    }
    Ok(total)
}

/// Result of one monotonicity trial, emitted as one JSON line by the harness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub seed: u64,
    /// Pair count: the state lives on `2n` qudits.
    pub n: usize,
    pub d: usize,
    pub which: MeasureKind,
    pub measure_before: f64,
    pub expected_after: f64,
    pub margin: f64,
    pub pass: bool,
}

/// Before/after comparison for a given state and POVM.
pub fn monotonicity_check(
    psi: &PureState,
    povm: &TwoOutcomePovm,
    which: MeasureKind,
    budget: HdetBudget,
) -> Result<(f64, f64)> {
    let before = qstate::measure(psi, which, budget)?.value;
    let after = expected_measure(psi, povm, which, budget)?;
    Ok((before, after))
}

/// Haar state on `2n` qudits and a random POVM, both drawn from `seed`.
pub fn monotonicity_trial(
    seed: u64,
    n: usize,
    d: usize,
    which: MeasureKind,
) -> Result<TrialReport> {
    let mut rng = random::rng_from_seed(seed);
    let psi = qstate::random_haar_state_with(2 * n, d, &mut rng)?;
    let povm = random_povm_with(d, &mut rng)?;
    let (before, after) = monotonicity_check(&psi, &povm, which, HdetBudget::default())?;
    let margin = before - after;
    Ok(TrialReport {
        seed,
        n,
        d,
        which,
        measure_before: before,
        expected_after: after,
        margin,
        pass: margin >= -MONOTONICITY_TOLERANCE,
    })
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.is_empty() {
        return Err(Error::Domain("empty alpha vector".into()));
    }
    if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
        return Err(Error::Domain(format!("alpha {a} outside [0, 1]")));
    }
    Ok(())
}

/// One quotient `num / base^exponent` with `0/0`-type corners resolved as 0.
fn lemma_term(num: f64, base: f64, exponent: f64) -> Result<f64> {
    if base > 0.0 {
        return Ok(num / base.powf(exponent));
    }
    if exponent > 0.0 {
        if num == 0.0 {
            Ok(0.0)
        } else {
            Err(Error::Domain(format!(
                "zero denominator with numerator {num}"
            )))
        }
    } else if exponent == 0.0 {
        Ok(num)
    } else {
        Ok(0.0)
    }
}

/// ```text
/// f_η(P) = (Πα_k)^{1/η} / (Σα_k P_k)^{d/η-1}
///        + (Π(1-α_k))^{1/η} / (Σ(1-α_k) P_k)^{d/η-1}
/// ```
///
/// `P` must have every `P_k < 1` (so at least two are nonzero).
pub fn lemma1_f(alphas: &[f64], weights: &MarginalWeights, eta: f64) -> Result<f64> {
    check_alphas(alphas)?;
    let p = weights.as_slice();
    if p.len() != alphas.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} alphas vs {} weights",
            alphas.len(),
            p.len()
        )));
    }
    if !(eta > 0.0) || !eta.is_finite() {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    if p.iter().any(|&pk| pk >= 1.0) || p.iter().filter(|&&pk| pk > 0.0).count() < 2 {
        return Err(Error::Domain(format!("weights {p:?} need every P_k < 1")));
    }
    let d = alphas.len() as f64;
    let exponent = d / eta - 1.0;
    let prod_a: f64 = alphas.iter().product();
    let prod_b: f64 = alphas.iter().map(|a| 1.0 - a).product();
    let x: f64 = alphas.iter().zip(p).map(|(a, pk)| a * pk).sum();
    let y: f64 = alphas.iter().zip(p).map(|(a, pk)| (1.0 - a) * pk).sum();
    Ok(lemma_term(prod_a.powf(1.0 / eta), x, exponent)?
        + lemma_term(prod_b.powf(1.0 / eta), y, exponent)?)
}

/// `((Πα_k)^{1/d} + (Π(1-α_k))^{1/d})^{d/η}`: the value of [`lemma1_f`] at
/// its interior stationary point.
pub fn lemma1_critical_value(alphas: &[f64], eta: f64) -> Result<f64> {
    check_alphas(alphas)?;
    if !(eta > 0.0) {
        return Err(Error::Domain(format!("eta must be positive, got {eta}")));
    }
    let d = alphas.len() as f64;
    let (ga, gb) = geometric_means(alphas);
    Ok((ga + gb).powf(d / eta))
}

fn geometric_means(alphas: &[f64]) -> (f64, f64) {
    let d = alphas.len() as f64;
    let prod_a: f64 = alphas.iter().product();
    let prod_b: f64 = alphas.iter().map(|a| 1.0 - a).product();
    (prod_a.powf(1.0 / d), prod_b.powf(1.0 / d))
}

/// The stationary value of `x = Σ α_k P_k`:
/// `(Πα)^{1/d} / ((Πα)^{1/d} + (Π(1-α))^{1/d})`. `None` if both products vanish.
pub fn lemma1_stationary_x(alphas: &[f64]) -> Result<Option<f64>> {
    check_alphas(alphas)?;
    let (ga, gb) = geometric_means(alphas);
    Ok((ga + gb > 0.0).then(|| ga / (ga + gb)))
}

/// A probability vector realizing the stationary `x`, when one exists with
/// every `P_k < 1`. `f_η` depends on `P` only through `x`, so a two-point
/// mixture of the smallest and largest `α` suffices.
pub fn lemma1_stationary_point(alphas: &[f64]) -> Result<Option<MarginalWeights>> {
    let Some(x) = lemma1_stationary_x(alphas)? else {
        return Ok(None);
    };
    let d = alphas.len();
    if d < 2 {
        return Ok(None);
    }
    let (imin, amin) = alphas
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    let (imax, amax) = alphas
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nonempty");
    let mut p = vec![0.0; d];
    if amax - amin < 1e-15 {
        if (x - amin).abs() > 1e-12 {
            return Ok(None);
        }
        p.iter_mut().for_each(|pk| *pk = 1.0 / d as f64);
    } else {
        let t = (x - amin) / (amax - amin);
        if !(t > 0.0 && t < 1.0) {
            return Ok(None);
        }
        p[imin] = 1.0 - t;
        p[imax] = t;
    }
    MarginalWeights::new(p).map(Some)
}
