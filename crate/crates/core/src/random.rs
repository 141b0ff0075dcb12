//! Seeded sampling of Gaussian vectors, Haar states and Haar unitaries.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::linalg::CMatrix;

/// Deterministic generator used for every seeded routine in the crate.
pub type SeededRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex normal: real and imaginary parts i.i.d. `N(0, 1/2)`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * s, im * s)
}

pub fn complex_gaussian_vec<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    (0..len).map(|_| complex_gaussian(rng)).collect()
}

pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Uniformly random unit vector in `C^len`.
pub fn random_unit_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<Complex64> {
    loop {
        let v = complex_gaussian_vec(len, rng);
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-150 {
            return v.into_iter().map(|z| z / norm).collect();
        }
    }
}

/// Haar-random `d × d` unitary: QR of a complex Gaussian matrix, with the
/// columns of `Q` rephased so that `R` has a positive real diagonal.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = complex_gaussian_matrix(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let diag = r[(k, k)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let mut col = q.column_mut(k);
        col *= phase;
    }
    q
}

/// Random `m × r` isometry (orthonormal columns), `m ≥ r`.
pub fn random_isometry<R: Rng + ?Sized>(m: usize, r: usize, rng: &mut R) -> CMatrix {
    assert!(m >= r, "isometry needs m >= r");
    let u = haar_unitary(m, rng);
    u.columns(0, r).into_owned()
}
