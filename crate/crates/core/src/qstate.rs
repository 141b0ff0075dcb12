//! Pure qudit states and the hyperdeterminant entanglement measures.
//!
//! An `n`-qudit `Σ ψ_{i₁…i_n} |i₁…i_n⟩` is stored as its amplitude vector in
//! row-major order, which is exactly the entry layout of the cuboid
//! hypermatrix `ψ̂` of order `n` and side `d`. The correspondence is therefore
//! a relabelling of the same buffer, and a local operator
//! `M₁ ⊗ … ⊗ M_n` acts on `ψ̂` as the multilinear product `(M₁,…,M_n) * ψ̂`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperdet::{self, HdetBudget};
use crate::hypermatrix::{Hypermatrix, Shape};
use crate::linalg::CMatrix;
use crate::random;

/// Normalization tolerance on `Σ|ψ|²`.
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Largest amplitude count `d^n` a random state may have.
pub const MAX_STATE_LEN: usize = 1 << 24;

/// Largest pair count accepted by [`ent_hat_matrix`] by default.
pub const DEFAULT_ENT_HAT_GUARD: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    subsystems: usize,
    d: usize,
    amplitudes: Vec<Complex64>,
}

fn state_len(subsystems: usize, d: usize) -> Result<usize> {
    if d < 2 {
        return Err(Error::Domain(format!(
            "local dimension must be >= 2, got {d}"
        )));
    }
    if subsystems == 0 {
        return Err(Error::Domain("a state needs at least one subsystem".into()));
    }
    u32::try_from(subsystems)
        .ok()
        .and_then(|n| d.checked_pow(n))
        .ok_or_else(|| Error::Domain(format!("{d}^{subsystems} amplitudes overflow")))
}

fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

impl PureState {
    /// Validated constructor: `amplitudes.len() == d^subsystems` and unit norm
    /// within [`NORM_TOLERANCE`].
    pub fn new(subsystems: usize, d: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_tolerance(subsystems, d, amplitudes, Some(NORM_TOLERANCE))
    }

    /// Like [`PureState::new`]; `tolerance = None` skips the norm check.
    pub fn with_tolerance(
        subsystems: usize,
        d: usize,
        amplitudes: Vec<Complex64>,
        tolerance: Option<f64>,
    ) -> Result<Self> {
        let len = state_len(subsystems, d)?;
        if amplitudes.len() != len {
            return Err(Error::EntryCount {
                expected: len,
                got: amplitudes.len(),
            });
        }
        let n2 = norm_sqr(&amplitudes);
        if let Some(tol) = tolerance {
            if !((n2 - 1.0).abs() <= tol) {
                return Err(Error::NotNormalized(n2));
            }
        }
        Ok(Self {
            subsystems,
            d,
            amplitudes,
        })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(subsystems: usize, d: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        let n = norm_sqr(&amplitudes).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalized(n * n));
        }
        let amplitudes = amplitudes.into_iter().map(|z| z / n).collect();
        Self::with_tolerance(subsystems, d, amplitudes, None)
    }

    /// Computational basis state `|i₁…i_n⟩`.
    pub fn basis(d: usize, digits: &[usize]) -> Result<Self> {
        let len = state_len(digits.len(), d)?;
        if digits.iter().any(|&i| i >= d) {
            return Err(Error::Domain(format!(
                "basis digits {digits:?} out of range for d={d}"
            )));
        }
        let offset = digits.iter().fold(0, |acc, &i| acc * d + i);
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        amps[offset] = Complex64::new(1.0, 0.0);
        Ok(Self {
            subsystems: digits.len(),
            d,
            amplitudes: amps,
        })
    }

    /// Generalized GHZ state `Σ_k |k…k⟩ / √d`.
    pub fn ghz(subsystems: usize, d: usize) -> Result<Self> {
        let len = state_len(subsystems, d)?;
        let step = (len - 1) / (d - 1);
        let a = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        let mut amps = vec![Complex64::new(0.0, 0.0); len];
        for k in 0..d {
            amps[k * step] = a;
        }
        Ok(Self {
            subsystems,
            d,
            amplitudes: amps,
        })
    }

    pub fn subsystems(&self) -> usize {
        self.subsystems
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// The hypermatrix `ψ̂`: cuboid, order `n`, side `d`.
    pub fn to_hypermatrix(&self) -> Hypermatrix {
        let shape = Shape::cuboid(self.subsystems, self.d).expect("validated at construction");
        Hypermatrix::new(shape, self.amplitudes.clone()).expect("length validated")
    }

    /// Inverse of [`PureState::to_hypermatrix`]; the input must be cuboid with
    /// unit Frobenius norm.
    pub fn from_hypermatrix(a: &Hypermatrix) -> Result<Self> {
        let d = a
            .shape()
            .side_length()
            .ok_or_else(|| Error::NotCuboid(a.dims().to_vec()))?;
        Self::new(a.order(), d, a.entries().to_vec())
    }

    /// `(M₁ ⊗ … ⊗ M_n)|ψ⟩` computed as `(M₁,…,M_n) * ψ̂`. The result is not
    /// renormalized; use [`PureState::normalized`] if needed.
    pub fn apply_local_raw(&self, ops: &[CMatrix]) -> Result<Vec<Complex64>> {
        for m in ops {
            if m.nrows() != self.d || m.ncols() != self.d {
                return Err(Error::DimensionMismatch(format!(
                    "local operator {}x{} on d={}",
                    m.nrows(),
                    m.ncols(),
                    self.d
                )));
            }
        }
        Ok(self
            .to_hypermatrix()
            .multilinear_multiply(ops)?
            .into_entries())
    }

    /// `(U₁ ⊗ … ⊗ U_n)|ψ⟩` for unitaries `U_k`; the norm is re-checked.
    pub fn apply_local_unitaries(&self, us: &[CMatrix]) -> Result<Self> {
        let amps = self.apply_local_raw(us)?;
        Self::new(self.subsystems, self.d, amps)
    }

    /// `M` applied to a single subsystem (0-based `site`).
    pub fn apply_on_site_raw(&self, site: usize, m: &CMatrix) -> Result<Vec<Complex64>> {
        if site >= self.subsystems {
            return Err(Error::DimensionMismatch(format!(
                "site {site} of a {}-qudit state",
                self.subsystems
            )));
        }
        if m.nrows() != self.d || m.ncols() != self.d {
            return Err(Error::DimensionMismatch(format!(
                "local operator {}x{} on d={}",
                m.nrows(),
                m.ncols(),
                self.d
            )));
        }
        Ok(self.to_hypermatrix().mode_product(site, m).into_entries())
    }

    /// Relabels subsystems with the π-transpose of `ψ̂` (0-based `perm`).
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        let t = self.to_hypermatrix().pi_transpose(perm)?;
        Ok(Self {
            subsystems: self.subsystems,
            d: self.d,
            amplitudes: t.into_entries(),
        })
    }
}

/// `ψ¹ ⊗ … ⊗ ψ^k` from unit local vectors of a common dimension.
pub fn product_state(factors: &[Vec<Complex64>]) -> Result<PureState> {
    let d = factors
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::Domain("product state needs at least one factor".into()))?;
    for (k, f) in factors.iter().enumerate() {
        if f.len() != d {
            return Err(Error::DimensionMismatch(format!(
                "factor {} has dimension {}, expected {d}",
                k + 1,
                f.len()
            )));
        }
        let n2 = norm_sqr(f);
        if (n2 - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::NotNormalized(n2));
        }
    }
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for f in factors {
        amps = amps
            .iter()
            .flat_map(|a| f.iter().map(move |b| a * b))
            .collect();
    }
    PureState::with_tolerance(factors.len(), d, amps, None)
}

/// Which pure-state measure: `E₁ = |hdet(ψ̂)|` or `E₂ = |hdet(ψ̂)|²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasureKind {
    #[serde(rename = "e1")]
    Hdet,
    #[serde(rename = "e2")]
    Tangle,
}

impl MeasureKind {
    pub fn label(self) -> &'static str {
        match self {
            MeasureKind::Hdet => "e1",
            MeasureKind::Tangle => "e2",
        }
    }

    /// Applies the measure to an hdet modulus.
    pub fn from_modulus(self, modulus: f64) -> f64 {
        match self {
            MeasureKind::Hdet => modulus,
            MeasureKind::Tangle => modulus * modulus,
        }
    }
}

impl std::str::FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "e1" | "hdet" | "abs" => Ok(MeasureKind::Hdet),
            "e2" | "tangle" | "abs2" => Ok(MeasureKind::Tangle),
            other => Err(Error::Domain(format!(
                "unknown measure '{other}' (expected e1 or e2)"
            ))),
        }
    }
}

/// A measure value; `odd_order` marks states with an odd number of
/// subsystems, for which the hyperdeterminant vanishes identically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureValue {
    pub value: f64,
    pub odd_order: bool,
}

/// `hdet(ψ̂)`, exactly zero for an odd number of subsystems.
pub fn state_hdet(psi: &PureState, budget: HdetBudget) -> Result<Complex64> {
    hyperdet::hdet(&psi.to_hypermatrix(), budget)
}

pub fn measure(psi: &PureState, kind: MeasureKind, budget: HdetBudget) -> Result<MeasureValue> {
    if psi.subsystems() % 2 == 1 {
        return Ok(MeasureValue {
            value: 0.0,
            odd_order: true,
        });
    }
    let h = hyperdet::hdet_even(&psi.to_hypermatrix(), budget)?;
    Ok(MeasureValue {
        value: kind.from_modulus(h.norm()),
        odd_order: false,
    })
}

/// `E₁ = |hdet(ψ̂)|` with the default budget.
pub fn measure_hdet(psi: &PureState) -> Result<MeasureValue> {
    measure(psi, MeasureKind::Hdet, HdetBudget::default())
}

/// `E₂ = |hdet(ψ̂)|²` with the default budget.
pub fn measure_tangle(psi: &PureState) -> Result<MeasureValue> {
    measure(psi, MeasureKind::Tangle, HdetBudget::default())
}

fn require_qubits(psi: &PureState) -> Result<()> {
    if psi.local_dim() != 2 {
        return Err(Error::Domain(format!(
            "qubit-only quantity on d={}",
            psi.local_dim()
        )));
    }
    Ok(())
}

/// Qubit-normalized `2|hdet(ψ̂)|`, which equals the concurrence on `2n` qubits.
pub fn hdet_concurrence(psi: &PureState) -> Result<f64> {
    require_qubits(psi)?;
    Ok(2.0 * measure_hdet(psi)?.value)
}

/// Qubit-normalized `4|hdet(ψ̂)|²`, which equals the n-tangle on `2n` qubits.
pub fn hdet_ntangle(psi: &PureState) -> Result<f64> {
    require_qubits(psi)?;
    Ok(4.0 * measure_tangle(psi)?.value)
}

/// Concurrence `|⟨ψ̃|ψ⟩|` with `ψ̃ = σ_y^{⊗N} ψ*`, computed as `|ψᵀ σ_y^{⊗N} ψ|`.
///
/// `σ_y^{⊗N}` maps `|x⟩` to a phase times `|x̄⟩` (all bits flipped), so the
/// form is evaluated in `O(2^N)` without building the matrix.
pub fn concurrence_qubits(psi: &PureState) -> Result<f64> {
    require_qubits(psi)?;
    let n = psi.subsystems();
    let amps = psi.amplitudes();
    let mask = amps.len() - 1;
    let i = Complex64::i();
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, a) in amps.iter().enumerate() {
        // (σ_y)_{0,1} = -i, (σ_y)_{1,0} = i
        let ones = x.count_ones() as usize;
        let phase = i.powu(ones as u32) * (-i).powu((n - ones) as u32);
        acc += a * phase * amps[x ^ mask];
    }
    Ok(acc.norm())
}

/// The symmetric matrix `M` of the quadratic form `ψᵀ M ψ = hdet(ψ̂)` on
/// `2n` qubits, expanded term by term from the reduced permutation sum.
pub fn ent_hat_matrix(n: usize) -> Result<CMatrix> {
    ent_hat_matrix_guarded(n, DEFAULT_ENT_HAT_GUARD)
}

pub fn ent_hat_matrix_guarded(n: usize, guard: usize) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::Domain("ent_hat_matrix needs n >= 1".into()));
    }
    if n > guard {
        return Err(Error::Domain(format!(
            "ent_hat_matrix size guard: n = {n} > {guard}"
        )));
    }
    let shape = Shape::cuboid(2 * n, 2)?;
    let dim = shape.len();
    let perms: Vec<_> = hyperdet::enumerate_signed_permutations(2)?.collect();
    let mut raw = vec![0.0f64; dim * dim];
    hyperdet::for_each_term(&shape, 1, &perms, |offs, sign| {
        raw[offs[0] * dim + offs[1]] += sign;
    });
    Ok(CMatrix::from_fn(dim, dim, |r, c| {
        Complex64::new(0.5 * (raw[r * dim + c] + raw[c * dim + r]), 0.0)
    }))
}

/// Squared norms `P_k` of the first-subsystem blocks `ψ_{k i₂…i_N}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginalWeights {
    weights: Vec<f64>,
}

impl MarginalWeights {
    /// Validates nonnegativity and `Σ P_k = 1` within [`NORM_TOLERANCE`].
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Domain("empty weight vector".into()));
        }
        if weights.iter().any(|&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::Domain(format!(
                "negative or non-finite weight in {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Domain(format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { weights })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// `P_k = Σ_{i₂…i_N} |ψ_{k i₂…i_N}|²` for `k = 0..d`.
pub fn marginal_weights(psi: &PureState) -> MarginalWeights {
    let block = psi.amplitudes().len() / psi.local_dim();
    let weights = psi.amplitudes().chunks(block).map(norm_sqr).collect();
    MarginalWeights { weights }
}

/// Haar-random pure state from a seed.
pub fn random_haar_state(subsystems: usize, d: usize, seed: u64) -> Result<PureState> {
    random_haar_state_with(subsystems, d, &mut random::rng_from_seed(seed))
}

pub fn random_haar_state_with<R: Rng + ?Sized>(
    subsystems: usize,
    d: usize,
    rng: &mut R,
) -> Result<PureState> {
    let len = state_len(subsystems, d)?;
    if len > MAX_STATE_LEN {
        return Err(Error::BudgetExceeded {
            terms: len as f64,
            budget: MAX_STATE_LEN as f64,
        });
    }
    PureState::normalized(subsystems, d, random::random_unit_vector(len, rng))
}

/// Haar-random product state on `subsystems` qudits; returns the factors too.
pub fn random_product_state_with<R: Rng + ?Sized>(
    subsystems: usize,
    d: usize,
    rng: &mut R,
) -> Result<(PureState, Vec<Vec<Complex64>>)> {
    let factors: Vec<_> = (0..subsystems)
        .map(|_| random::random_unit_vector(d, rng))
        .collect();
    Ok((product_state(&factors)?, factors))
}
