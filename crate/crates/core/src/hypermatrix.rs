//! Dense complex hypermatrices.
//!
//! A [`Hypermatrix`] of order `N` stores `n₁·…·n_N` complex entries in
//! row-major order: the last index varies fastest, so the entry at
//! `(i₁,…,i_N)` lives at offset `Σ_k i_k · stride_k` with
//! `stride_N = 1` and `stride_k = n_{k+1} · stride_{k+1}`.
//!
//! Values are immutable after construction; every operation returns a new
//! hypermatrix.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

/// Dimensions `(n₁,…,n_N)` of a hypermatrix. Every dimension is at least one
/// and the order `N` is at least one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("order must be at least 1".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidShape(format!("zero dimension in {dims:?}")));
        }
        if dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .is_none()
        {
            return Err(Error::InvalidShape(format!(
                "entry count overflows for {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    /// Cuboid shape of order `order` with side length `side`.
    pub fn cuboid(order: usize, side: usize) -> Result<Self> {
        Self::new(vec![side; order])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Total number of entries.
    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    /// Always false: shapes have at least one entry.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_cuboid(&self) -> bool {
        self.dims.windows(2).all(|w| w[0] == w[1])
    }

    /// Side length if the shape is cuboid.
    pub fn side_length(&self) -> Option<usize> {
        self.is_cuboid().then(|| self.dims[0])
    }

    /// Row-major strides (last index fastest).
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.dims.len()];
        for k in (0..self.dims.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.dims[k + 1];
        }
        strides
    }

    /// Offset of a multi-index, or `None` if it is out of range.
    pub fn offset(&self, index: &[usize]) -> Option<usize> {
        if index.len() != self.dims.len() {
            return None;
        }
        let mut off = 0;
        for (&i, &n) in index.iter().zip(&self.dims) {
            if i >= n {
                return None;
            }
            off = off * n + i;
        }
        Some(off)
    }

    /// Inverse of [`Shape::offset`].
    pub fn multi_index(&self, mut offset: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            idx[k] = offset % self.dims[k];
            offset /= self.dims[k];
        }
        idx
    }
}

/// Dense complex hypermatrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypermatrix {
    shape: Shape,
    entries: Vec<Complex64>,
}

impl Hypermatrix {
    pub fn new(shape: Shape, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != shape.len() {
            return Err(Error::EntryCount {
                expected: shape.len(),
                got: entries.len(),
            });
        }
        Ok(Self { shape, entries })
    }

    pub fn from_dims(dims: &[usize], entries: Vec<Complex64>) -> Result<Self> {
        Self::new(Shape::new(dims.to_vec())?, entries)
    }

    pub fn zeros(shape: Shape) -> Self {
        let len = shape.len();
        Self {
            shape,
            entries: vec![Complex64::new(0.0, 0.0); len],
        }
    }

    /// Builds a hypermatrix by evaluating `f` at every multi-index.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> Complex64) -> Self {
        let entries = (0..shape.len())
            .map(|off| f(&shape.multi_index(off)))
            .collect();
        Self { shape, entries }
    }

    /// A length-`n` vector viewed as an order-1 hypermatrix.
    pub fn vector(entries: Vec<Complex64>) -> Result<Self> {
        Self::new(Shape::new(vec![entries.len()])?, entries)
    }

    /// Order-2 hypermatrix from a matrix.
    pub fn from_matrix(m: &CMatrix) -> Result<Self> {
        let shape = Shape::new(vec![m.nrows(), m.ncols()])?;
        Ok(Self::from_fn(shape, |ix| m[(ix[0], ix[1])]))
    }

    /// Order-2 hypermatrix as a matrix.
    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.order() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "to_matrix needs order 2, got {}",
                self.order()
            )));
        }
        let d = self.shape.dims();
        Ok(CMatrix::from_row_slice(d[0], d[1], &self.entries))
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    /// Entry at a 0-based multi-index.
    pub fn get(&self, index: &[usize]) -> Option<Complex64> {
        self.shape.offset(index).map(|o| self.entries[o])
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            shape: self.shape.clone(),
            entries: self.entries.iter().map(|z| z * c).collect(),
        }
    }

    /// `αA + βB` for equally shaped hypermatrices.
    pub fn linear_combination(
        alpha: Complex64,
        a: &Self,
        beta: Complex64,
        b: &Self,
    ) -> Result<Self> {
        if a.shape != b.shape {
            return Err(Error::DimensionMismatch(format!(
                "{:?} vs {:?}",
                a.dims(),
                b.dims()
            )));
        }
        let entries = a
            .entries
            .iter()
            .zip(&b.entries)
            .map(|(x, y)| alpha * x + beta * y)
            .collect();
        Ok(Self {
            shape: a.shape.clone(),
            entries,
        })
    }

    /// Largest entrywise modulus of `self - other`; `inf` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    /// The π-transpose `A^π`: axis `k` of the result is axis `perm[k]` of
    /// `self`, so the result has dims `(n_{π(1)},…,n_{π(N)})` and
    /// `A^π[i_{π(1)},…,i_{π(N)}] = A[i₁,…,i_N]`. `perm` is 0-based.
    pub fn pi_transpose(&self, perm: &[usize]) -> Result<Self> {
        let n = self.order();
        if perm.len() != n {
            return Err(Error::InvalidPermutation(format!(
                "length {} for order {}",
                perm.len(),
                n
            )));
        }
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidPermutation(format!(
                    "{perm:?} is not a permutation"
                )));
            }
            seen[p] = true;
        }
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims()[p]).collect();
        let shape = Shape::new(dims)?;
        let src_strides = self.shape.strides();
        let gathered: Vec<usize> = perm.iter().map(|&p| src_strides[p]).collect();
        let entries = (0..shape.len())
            .map(|off| {
                let idx = shape.multi_index(off);
                let src: usize = idx.iter().zip(&gathered).map(|(i, s)| i * s).sum();
                self.entries[src]
            })
            .collect();
        Ok(Self { shape, entries })
    }

    /// Outer product `A ∘ B` of order `order(A) + order(B)`.
    pub fn outer_product(&self, other: &Self) -> Self {
        let mut dims = self.dims().to_vec();
        dims.extend_from_slice(other.dims());
        let shape = Shape { dims };
        let mut entries = Vec::with_capacity(shape.len());
        for a in &self.entries {
            entries.extend(other.entries.iter().map(|b| a * b));
        }
        Self { shape, entries }
    }

    /// Multilinear matrix multiplication `(X₁,…,X_N) * A`:
    ///
    /// `A'[i₁…i_N] = Σ_{j} (X₁)[i₁,j₁] ⋯ (X_N)[i_N,j_N] · A[j₁…j_N]`.
    ///
    /// `X_k` must have `n_k` columns; the result has the row counts as dims.
    pub fn multilinear_multiply(&self, xs: &[CMatrix]) -> Result<Self> {
        if xs.len() != self.order() {
            return Err(Error::DimensionMismatch(format!(
                "{} matrices for order {}",
                xs.len(),
                self.order()
            )));
        }
        for (k, (x, &n)) in xs.iter().zip(self.dims()).enumerate() {
            if x.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "axis {}: matrix has {} columns, hypermatrix dimension is {}",
                    k + 1,
                    x.ncols(),
                    n
                )));
            }
        }
        let mut current = self.clone();
        for (axis, x) in xs.iter().enumerate() {
            current = current.mode_product(axis, x);
        }
        Ok(current)
    }

    /// Contracts a single axis with a matrix (columns must match that axis).
    pub fn mode_product(&self, axis: usize, x: &CMatrix) -> Self {
        let dims = self.dims();
        assert!(
            axis < dims.len() && x.ncols() == dims[axis],
            "mode_product dimension mismatch"
        );
        let outer: usize = dims[..axis].iter().product();
        let inner: usize = dims[axis + 1..].iter().product();
        let (rows, cols) = (x.nrows(), x.ncols());
        let mut new_dims = dims.to_vec();
        new_dims[axis] = rows;
        let zero = Complex64::new(0.0, 0.0);
        let mut entries = vec![zero; outer * rows * inner];
        for o in 0..outer {
            let src = &self.entries[o * cols * inner..(o + 1) * cols * inner];
            let dst = &mut entries[o * rows * inner..(o + 1) * rows * inner];
            for r in 0..rows {
                let out = &mut dst[r * inner..(r + 1) * inner];
                for c in 0..cols {
                    let coef = x[(r, c)];
                    if coef == zero {
                        continue;
                    }
                    for (y, a) in out.iter_mut().zip(&src[c * inner..(c + 1) * inner]) {
                        *y += coef * a;
                    }
                }
            }
        }
        Self {
            shape: Shape { dims: new_dims },
            entries,
        }
    }

    /// Axis-`axis` slices `A[.., k, ..]` for `k = 0..n_axis`, each returned
    /// with that axis kept at extent one.
    pub fn slice_along(&self, axis: usize, k: usize) -> Result<Self> {
        let dims = self.dims();
        if axis >= dims.len() || k >= dims[axis] {
            return Err(Error::DimensionMismatch(format!(
                "slice {k} of axis {axis}"
            )));
        }
        let mut sel = CMatrix::zeros(1, dims[axis]);
        sel[(0, k)] = Complex64::new(1.0, 0.0);
        Ok(self.mode_product(axis, &sel))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn shape_validation() {
        assert!(Shape::new(vec![]).is_err());
        assert!(Shape::new(vec![2, 0]).is_err());
        let s = Shape::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.len(), 24);
        assert!(!s.is_cuboid());
        assert_eq!(s.strides(), vec![12, 4, 1]);
        assert!(Shape::cuboid(3, 2).unwrap().is_cuboid());
        assert_eq!(Shape::cuboid(3, 2).unwrap().side_length(), Some(2));
    }

    #[test]
    fn offsets_are_row_major() {
        let s = Shape::new(vec![2, 3, 4]).unwrap();
        assert_eq!(s.offset(&[1, 2, 3]), Some(23));
        assert_eq!(s.offset(&[0, 1, 0]), Some(4));
        assert_eq!(s.offset(&[2, 0, 0]), None);
        for off in 0..24 {
            assert_eq!(s.offset(&s.multi_index(off)), Some(off));
        }
    }

    #[test]
    fn entry_count_checked() {
        let err = Hypermatrix::from_dims(&[2, 2], vec![c(1.0, 0.0); 3]).unwrap_err();
        assert_eq!(
            err,
            Error::EntryCount {
                expected: 4,
                got: 3
            }
        );
    }

    #[test]
    fn frobenius_examples() {
        let z = Hypermatrix::zeros(Shape::cuboid(3, 2).unwrap());
        assert_eq!(z.frobenius_norm(), 0.0);
        let id = Hypermatrix::from_dims(
            &[2, 2],
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        )
        .unwrap();
        assert!((id.frobenius_norm() - 2f64.sqrt()).abs() < 1e-15);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = Hypermatrix::vector(vec![c(h, 0.0), c(0.0, h)]).unwrap();
        assert!((v.frobenius_norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pi_transpose_of_matrix_is_transpose() {
        let entries: Vec<_> = (0..6).map(|k| c(k as f64, -(k as f64))).collect();
        let a = Hypermatrix::from_dims(&[2, 3], entries).unwrap();
        let t = a.pi_transpose(&[1, 0]).unwrap();
        assert_eq!(t.dims(), &[3, 2]);
        let m = a.to_matrix().unwrap().transpose();
        assert_eq!(t.to_matrix().unwrap(), m);
        assert_eq!(a.pi_transpose(&[0, 1]).unwrap(), a);
    }

    #[test]
    fn pi_transpose_rejects_bad_permutations() {
        let a = Hypermatrix::zeros(Shape::cuboid(3, 2).unwrap());
        assert!(matches!(
            a.pi_transpose(&[0, 1]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            a.pi_transpose(&[0, 1, 1]),
            Err(Error::InvalidPermutation(_))
        ));
        assert!(matches!(
            a.pi_transpose(&[0, 1, 3]),
            Err(Error::InvalidPermutation(_))
        ));
    }

    #[test]
    fn pi_transpose_entry_rule() {
        let a = Hypermatrix::from_fn(Shape::new(vec![2, 3, 4]).unwrap(), |ix| {
            c((100 * ix[0] + 10 * ix[1] + ix[2]) as f64, 0.0)
        });
        let perm = [2, 0, 1];
        let t = a.pi_transpose(&perm).unwrap();
        assert_eq!(t.dims(), &[4, 2, 3]);
        for off in 0..a.shape().len() {
            let i = a.shape().multi_index(off);
            let j: Vec<usize> = perm.iter().map(|&p| i[p]).collect();
            assert_eq!(t.get(&j), a.get(&i));
        }
    }

    #[test]
    fn outer_product_basis_and_rank_one() {
        let e0 = Hypermatrix::vector(vec![c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let m = e0.outer_product(&e0);
        assert_eq!(m.dims(), &[2, 2]);
        assert_eq!(
            m.entries(),
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
        );

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = Hypermatrix::vector(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        let minus = Hypermatrix::vector(vec![c(h, 0.0), c(-h, 0.0)]).unwrap();
        let m = plus.outer_product(&minus);
        let want = [c(0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0), c(-0.5, 0.0)];
        for (x, y) in m.entries().iter().zip(want) {
            assert!((x - y).norm() < 1e-15);
        }
    }

    #[test]
    fn multilinear_identity_and_mismatch() {
        let a = Hypermatrix::from_fn(Shape::new(vec![2, 3]).unwrap(), |ix| {
            c(ix[0] as f64, ix[1] as f64)
        });
        let same = a
            .multilinear_multiply(&[CMatrix::identity(2, 2), CMatrix::identity(3, 3)])
            .unwrap();
        assert_eq!(same, a);
        assert!(a
            .multilinear_multiply(&[CMatrix::identity(2, 2), CMatrix::identity(2, 2)])
            .is_err());
        assert!(a.multilinear_multiply(&[CMatrix::identity(2, 2)]).is_err());
    }

    #[test]
    fn multilinear_changes_dims_to_row_counts() {
        let a = Hypermatrix::zeros(Shape::new(vec![2, 3]).unwrap());
        let out = a
            .multilinear_multiply(&[CMatrix::zeros(4, 2), CMatrix::zeros(1, 3)])
            .unwrap();
        assert_eq!(out.dims(), &[4, 1]);
    }

    #[test]
    fn slices_sum_back() {
        let a = Hypermatrix::from_fn(Shape::cuboid(3, 2).unwrap(), |ix| {
            c(ix[0] as f64 + 1.0, (ix[1] * ix[2]) as f64)
        });
        let s0 = a.slice_along(0, 0).unwrap();
        let s1 = a.slice_along(0, 1).unwrap();
        assert_eq!(s0.dims(), &[1, 2, 2]);
        assert_eq!(s0.entries(), &a.entries()[..4]);
        assert_eq!(s1.entries(), &a.entries()[4..]);
    }
}
