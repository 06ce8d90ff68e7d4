//! Seeded generators for randomized checks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::matops::{c64, ComplexMatrix, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex<R: Rng>(rng: &mut R) -> C64 {
    c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Entries uniform in the unit square of the complex plane.
pub fn matrix<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |_, _| complex(rng))
}

pub fn hermitian<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let a = matrix(rng, n);
    (&a + a.dagger()) * 0.5
}

/// `A + n·I` with `A` random; diagonally dominant, hence invertible.
pub fn invertible<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    matrix(rng, n) + ComplexMatrix::identity(n) * (n as f64 + 1.0)
}

/// Unitary factor of the QR decomposition of a random matrix.
pub fn unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let q = matrix(rng, n).into_dmatrix().qr().q();
    ComplexMatrix::from_dmatrix(q).expect("QR of a finite matrix is finite")
}

/// `S·diag(d)·S†` for a random unitary `S`: Hermitian with prescribed signs.
pub fn metric_with_spectrum<R: Rng>(rng: &mut R, spectrum: &[f64]) -> ComplexMatrix {
    let u = unitary(rng, spectrum.len());
    let m = &u * ComplexMatrix::real_diag(spectrum) * u.dagger();
    (&m + m.dagger()) * 0.5
}

/// Positive-definite Hermitian with eigenvalues in `[0.5, 2.5]`.
pub fn positive_definite<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let spectrum: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..2.5)).collect();
    metric_with_spectrum(rng, &spectrum)
}

/// Invertible Hermitian with at least one eigenvalue of each sign.
pub fn indefinite<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let spectrum: Vec<f64> = (0..n)
        .map(|k| {
            let mag = rng.random_range(0.5..2.5);
            if k % 2 == 0 { mag } else { -mag }
        })
        .collect();
    metric_with_spectrum(rng, &spectrum)
}

pub fn real_matrix<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.random_range(-1.0..1.0))
}
