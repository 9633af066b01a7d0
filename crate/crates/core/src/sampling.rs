//! Seeded random generators for states, bases, and whole measurement models.
//!
//! Everything here draws from a caller-supplied RNG, so any test or fuzz
//! harness gets reproducible objects from a `(seed, stream)` pair.

use num_complex::Complex64;
use rand::Rng;

use crate::eigen;
use crate::matrix::ComplexMatrix;
use crate::measurement::{Interaction, MeasurementModel};
use crate::state::{DensityMatrix, PureState};

/// Standard normal deviate via Box-Muller.
pub(crate) fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>(); // (0, 1]
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(standard_normal(rng), standard_normal(rng))
}

/// A normalized complex amplitude vector of length `d` (Haar-uniform direction).
pub fn random_amplitudes(rng: &mut impl Rng, d: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..d).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in v.iter_mut() {
        *z /= norm;
    }
    v
}

/// A probability vector of length `n`, uniform on the simplex.
pub fn random_spectrum(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let sum: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= sum;
    }
    v
}

/// A random `n × n` unitary: the eigenvector matrix of a random Hermitian
/// matrix with Gaussian entries (Haar-distributed up to column phases).
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let mut h = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let z = if i == j {
                Complex64::new(standard_normal(rng), 0.0)
            } else {
                complex_normal(rng)
            };
            h.set(i, j, z);
            h.set(j, i, z.conj());
        }
    }
    eigen::hermitian_eig(&h)
        .expect("random Hermitian matrix diagonalizes")
        .vectors
}

/// A full-rank random density matrix on `dims` (Hilbert-Schmidt ensemble:
/// `G G† / Tr G G†` with Gaussian `G`).
pub fn random_density(rng: &mut impl Rng, dims: Vec<usize>) -> DensityMatrix {
    let n: usize = dims.iter().product();
    let g = ComplexMatrix::from_fn(n, |_, _| complex_normal(rng));
    let product = g.matmul(&g.adjoint());
    let trace = product.trace().re;
    let matrix = product.scale(Complex64::new(1.0 / trace, 0.0)).hermitized();
    DensityMatrix::new(matrix, dims).expect("Wishart normalization yields a valid state")
}

/// A Haar-uniform random pure state on `dims`.
pub fn random_pure(rng: &mut impl Rng, dims: Vec<usize>) -> PureState {
    let n: usize = dims.iter().product();
    PureState::new(random_amplitudes(rng, n), dims).expect("normalized by construction")
}

/// A random measurement model with `2 ≤ d_S ≤ N ≤ max_dim` and a random
/// apparatus eigenbasis.
pub fn random_model(rng: &mut impl Rng, max_dim: usize) -> MeasurementModel {
    random_model_impl(rng, max_dim, false)
}

/// Like [`random_model`] but with the apparatus diagonal in the computational
/// basis (no basis rotation).
pub fn random_model_diagonal(rng: &mut impl Rng, max_dim: usize) -> MeasurementModel {
    random_model_impl(rng, max_dim, true)
}

fn random_model_impl(rng: &mut impl Rng, max_dim: usize, diagonal: bool) -> MeasurementModel {
    assert!(max_dim >= 2, "random_model: max_dim must be at least 2");
    let n = rng.gen_range(2..=max_dim);
    let d_s = rng.gen_range(2..=n);
    MeasurementModel {
        system_amplitudes: random_amplitudes(rng, d_s),
        apparatus_spectrum: random_spectrum(rng, n),
        apparatus_basis: if diagonal {
            None
        } else {
            Some(random_unitary(rng, n))
        },
        interaction: Interaction::Shift,
    }
}
