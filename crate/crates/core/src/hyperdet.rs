//! Cayley's first (combinatorial) hyperdeterminant.
//!
//! For a cuboid hypermatrix `A` of order `N` and side length `d`,
//!
//! ```text
//! hdet(A) = 1/d! · Σ_{σ₁,…,σ_N ∈ S_d} sgn(σ₁)⋯sgn(σ_N) · Π_j A[σ₁(j),…,σ_N(j)]
//! ```
//!
//! which vanishes identically for odd `N`. For even `N` the first permutation
//! can be fixed to the identity, which removes the `1/d!` prefactor:
//!
//! ```text
//! hdet(A) = Σ_{σ₂,…,σ_N ∈ S_d} sgn(σ₂)⋯sgn(σ_N) · Π_j A[j,σ₂(j),…,σ_N(j)]
//! ```
//!
//! [`hdet_even`] evaluates the reduced sum (with an LU shortcut for
//! matrices) and is the default path; [`hdet_naive`] keeps the full sum as a
//! cross-check.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hypermatrix::{Hypermatrix, Shape};
use crate::linalg;

/// Largest side length for which permutations are enumerated by default.
pub const DEFAULT_FACTORIAL_GUARD: usize = 8;

/// Default cap on the number of signed products a single evaluation may sum.
pub const DEFAULT_MAX_TERMS: f64 = 1e8;

/// A permutation of `{0,…,d-1}` with its sign `(-1)^{l(σ)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    pub mapping: Vec<usize>,
    pub parity: i8,
}

impl SignedPermutation {
    pub fn sign(&self) -> f64 {
        f64::from(self.parity)
    }
}

/// Heap's algorithm. Consecutive permutations differ by one transposition, so
/// the parity flips on every step.
#[derive(Debug, Clone)]
pub struct SignedPermutations {
    current: Vec<usize>,
    counters: Vec<usize>,
    i: usize,
    parity: i8,
    started: bool,
}

impl Iterator for SignedPermutations {
    type Item = SignedPermutation;

    fn next(&mut self) -> Option<Self::Item> {
        if !self.started {
            self.started = true;
            return Some(SignedPermutation {
                mapping: self.current.clone(),
                parity: self.parity,
            });
        }
        let n = self.current.len();
        while self.i < n {
            if self.counters[self.i] < self.i {
                if self.i.is_multiple_of(2) {
                    self.current.swap(0, self.i);
                } else {
                    self.current.swap(self.counters[self.i], self.i);
                }
                self.parity = -self.parity;
                self.counters[self.i] += 1;
                self.i = 1;
                return Some(SignedPermutation {
                    mapping: self.current.clone(),
                    parity: self.parity,
                });
            }
            self.counters[self.i] = 0;
            self.i += 1;
        }
        None
    }
}

/// All `d!` permutations of `{0,…,d-1}` with their parities, refusing
/// `d > DEFAULT_FACTORIAL_GUARD`.
pub fn enumerate_signed_permutations(d: usize) -> Result<SignedPermutations> {
    enumerate_signed_permutations_guarded(d, DEFAULT_FACTORIAL_GUARD)
}

pub fn enumerate_signed_permutations_guarded(d: usize, guard: usize) -> Result<SignedPermutations> {
    if d == 0 {
        return Err(Error::Domain(
            "permutations of an empty set requested".into(),
        ));
    }
    if d > guard {
        return Err(Error::FactorialGuard { d, guard });
    }
    Ok(SignedPermutations {
        current: (0..d).collect(),
        counters: vec![0; d],
        i: 1,
        parity: 1,
        started: false,
    })
}

/// Cap on the number of signed products summed by one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HdetBudget {
    pub max_terms: f64,
}

impl Default for HdetBudget {
    fn default() -> Self {
        Self {
            max_terms: DEFAULT_MAX_TERMS,
        }
    }
}

impl HdetBudget {
    pub fn new(max_terms: f64) -> Self {
        Self { max_terms }
    }

    fn check(&self, terms: f64) -> Result<()> {
        if terms > self.max_terms {
            Err(Error::BudgetExceeded {
                terms,
                budget: self.max_terms,
            })
        } else {
            Ok(())
        }
    }
}

fn factorial(d: usize) -> f64 {
    (1..=d).map(|k| k as f64).product()
}

/// Number of products in the reduced even-order sum, `(d!)^{N-1}`.
pub fn even_term_count(order: usize, side: usize) -> f64 {
    factorial(side).powi(order as i32 - 1)
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct CompensatedSum {
    re: f64,
    re_c: f64,
    im: f64,
    im_c: f64,
}

impl CompensatedSum {
    fn add(&mut self, z: Complex64) {
        fn step(sum: &mut f64, comp: &mut f64, x: f64) {
            let t = *sum + x;
            if sum.abs() >= x.abs() {
                *comp += (*sum - t) + x;
            } else {
                *comp += (x - t) + *sum;
            }
            *sum = t;
        }
        step(&mut self.re, &mut self.re_c, z.re);
        step(&mut self.im, &mut self.im_c, z.im);
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.re + self.re_c, self.im + self.im_c)
    }
}

fn cuboid_side(a: &Hypermatrix) -> Result<usize> {
    a.shape()
        .side_length()
        .ok_or_else(|| Error::NotCuboid(a.dims().to_vec()))
}

/// Walks every tuple of permutations over the axes `first_axis..N`, calling
/// `leaf` with the `d` entry offsets of each product and the tuple's sign.
/// Axes before `first_axis` contribute `j · stride` (identity permutation).
pub(crate) fn for_each_term(
    shape: &Shape,
    first_axis: usize,
    perms: &[SignedPermutation],
    mut leaf: impl FnMut(&[usize], f64),
) {
    let d = shape.dims()[0];
    let strides = shape.strides();
    let base: Vec<usize> = (0..d)
        .map(|j| strides[..first_axis].iter().map(|s| j * s).sum())
        .collect();
    let levels = shape.order() - first_axis;
    // offsets[level] holds the partial offsets after fixing `level` permutations
    let mut offsets = vec![base; levels + 1];
    let mut signs = vec![1.0; levels + 1];
    let mut choice = vec![0usize; levels];
    let mut level = 0;
    loop {
        if level == levels {
            leaf(&offsets[levels], signs[levels]);
            // backtrack
            loop {
                if level == 0 {
                    return;
                }
                level -= 1;
                choice[level] += 1;
                if choice[level] < perms.len() {
                    break;
                }
                choice[level] = 0;
            }
        }
        let p = &perms[choice[level]];
        let stride = strides[first_axis + level];
        let (head, tail) = offsets.split_at_mut(level + 1);
        for (dst, (src, &m)) in tail[0].iter_mut().zip(head[level].iter().zip(&p.mapping)) {
            *dst = src + m * stride;
        }
        signs[level + 1] = signs[level] * p.sign();
        level += 1;
    }
}

fn product_at(entries: &[Complex64], offsets: &[usize]) -> Complex64 {
    offsets
        .iter()
        .fold(Complex64::new(1.0, 0.0), |acc, &o| acc * entries[o])
}

/// Full defining sum over all `N`-tuples of permutations, divided by `d!`.
/// Works for any order; odd orders with side length at least 2 come out as
/// (numerically) zero.
pub fn hdet_naive(a: &Hypermatrix, budget: HdetBudget) -> Result<Complex64> {
    let d = cuboid_side(a)?;
    budget.check(factorial(d).powi(a.order() as i32))?;
    let perms: Vec<_> = enumerate_signed_permutations(d)?.collect();
    let entries = a.entries();
    let mut acc = CompensatedSum::default();
    for_each_term(a.shape(), 0, &perms, |offs, sign| {
        acc.add(product_at(entries, offs) * sign)
    });
    Ok(acc.value() / factorial(d))
}

/// Precomputed permutation table for repeated reduced-sum evaluations on a
/// fixed even-order cuboid shape.
#[derive(Debug, Clone)]
pub struct HdetPlan {
    shape: Shape,
    perms: Vec<SignedPermutation>,
}

impl HdetPlan {
    pub fn new(order: usize, side: usize, budget: HdetBudget) -> Result<Self> {
        if order % 2 == 1 {
            return Err(Error::OddOrder(order));
        }
        let shape = Shape::cuboid(order, side)?;
        budget.check(even_term_count(order, side))?;
        let perms = enumerate_signed_permutations(side)?.collect();
        Ok(Self { shape, perms })
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    /// Reduced permutation sum over row-major `entries`.
    pub fn eval(&self, entries: &[Complex64]) -> Complex64 {
        assert_eq!(
            entries.len(),
            self.shape.len(),
            "entry count does not match plan"
        );
        let mut acc = CompensatedSum::default();
        for_each_term(&self.shape, 1, &self.perms, |offs, sign| {
            acc.add(product_at(entries, offs) * sign)
        });
        acc.value()
    }

    /// Value and holomorphic gradient `∂hdet/∂A[e]` for every entry.
    pub fn eval_with_gradient(&self, entries: &[Complex64]) -> (Complex64, Vec<Complex64>) {
        assert_eq!(
            entries.len(),
            self.shape.len(),
            "entry count does not match plan"
        );
        let d = self.shape.dims()[0];
        let zero = Complex64::new(0.0, 0.0);
        let mut grad = vec![zero; entries.len()];
        let mut acc = CompensatedSum::default();
        let mut prefix = vec![zero; d + 1];
        for_each_term(&self.shape, 1, &self.perms, |offs, sign| {
            prefix[0] = Complex64::new(sign, 0.0);
            for (j, &o) in offs.iter().enumerate() {
                prefix[j + 1] = prefix[j] * entries[o];
            }
            acc.add(prefix[d]);
            // suffix products give each factor's cofactor without division
            let mut suffix = Complex64::new(1.0, 0.0);
            for j in (0..d).rev() {
                grad[offs[j]] += prefix[j] * suffix;
                suffix *= entries[offs[j]];
            }
        });
        (acc.value(), grad)
    }
}

/// Reduced even-order sum with the first permutation fixed, without any
/// shortcut. Exposed so the LU shortcut in [`hdet_even`] can be cross-checked.
pub fn hdet_permutation_sum(a: &Hypermatrix, budget: HdetBudget) -> Result<Complex64> {
    let d = cuboid_side(a)?;
    Ok(HdetPlan::new(a.order(), d, budget)?.eval(a.entries()))
}

/// Hyperdeterminant of an even-order cuboid hypermatrix. Order-2 inputs go
/// through an LU determinant.
pub fn hdet_even(a: &Hypermatrix, budget: HdetBudget) -> Result<Complex64> {
    cuboid_side(a)?;
    match a.order() {
        2 => linalg::det(&a.to_matrix()?),
        n if n % 2 == 1 => Err(Error::OddOrder(n)),
        _ => hdet_permutation_sum(a, budget),
    }
}

/// Hyperdeterminant of any cuboid hypermatrix: exactly zero for odd order,
/// [`hdet_even`] otherwise. Side length 1 has a single term, the lone entry,
/// whatever the order.
pub fn hdet(a: &Hypermatrix, budget: HdetBudget) -> Result<Complex64> {
    let d = cuboid_side(a)?;
    if d == 1 {
        return Ok(a.entries()[0]);
    }
    if a.order() % 2 == 1 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    hdet_even(a, budget)
}

/// Even-order hyperdeterminant together with its holomorphic gradient
/// `∂hdet/∂A[e]` for every entry `e` (row-major).
pub fn hdet_even_with_gradient(
    a: &Hypermatrix,
    budget: HdetBudget,
) -> Result<(Complex64, Vec<Complex64>)> {
    let d = cuboid_side(a)?;
    Ok(HdetPlan::new(a.order(), d, budget)?.eval_with_gradient(a.entries()))
}
