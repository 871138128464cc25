//! Shared helpers for the integration suites: seeded random systems and
//! Fourier-sampling oracles kept independent of the library's closed-form
//! paths.

#![allow(dead_code)]

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ruelle_realize::linalg::{cx, spectral_radius, ComplexMatrix};
use ruelle_realize::realization::{eval, Realization};
use ruelle_realize::wavelet::{BlaschkeFactor, RationalInner};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        cx(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    })
}

/// Random realization with the state matrix rescaled to `ρ(A) ≈ target_rho`.
pub fn random_contractive(
    rng: &mut ChaCha8Rng,
    d: usize,
    p: usize,
    q: usize,
    target_rho: f64,
) -> Realization {
    let mut a = random_matrix(rng, d, d, 1.0);
    if d > 0 {
        let rho = spectral_radius(&a, 1e-12).unwrap().value;
        if rho > 1e-12 {
            a = a.scale(cx(target_rho / rho, 0.0));
        }
    }
    Realization::new(
        a,
        random_matrix(rng, d, q, 1.0),
        random_matrix(rng, p, d, 1.0),
        random_matrix(rng, p, q, 1.0),
    )
    .unwrap()
}

pub fn random_scalar_contractive(rng: &mut ChaCha8Rng, d: usize, target_rho: f64) -> Realization {
    random_contractive(rng, d, 1, 1, target_rho)
}

/// Fourier-sampling oracle for the autocorrelation coefficients: samples
/// `|m(z)|²` on `samples` circle points and extracts the coefficient of
/// `z^{−n}`. Independent of the Gramian route.
pub fn dft_autocorrelation_oracle(r: &Realization, samples: usize, n: i64) -> Complex64 {
    let mut acc = Complex64::default();
    for t in 0..samples {
        let theta = 2.0 * std::f64::consts::PI * t as f64 / samples as f64;
        let z = Complex64::from_polar(1.0, theta);
        let v = eval(r, z).unwrap().as_scalar().unwrap();
        acc += cx(v.norm_sqr(), 0.0) * Complex64::from_polar(1.0, theta * n as f64);
    }
    acc / samples as f64
}

/// Random unitary matrix by orthonormalizing a random square matrix.
pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    loop {
        let m = random_matrix(rng, n, n, 1.0);
        let q = ruelle_realize::linalg::column_space_basis(&m, 1e-8);
        if q.cols() == n {
            return q;
        }
    }
}

/// Rank-one orthogonal projection from a random unit vector.
pub fn random_rank1_projection(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    loop {
        let v = random_matrix(rng, n, 1, 1.0);
        let norm = v.norm_fro();
        if norm > 1e-3 {
            let u = v.scale(cx(1.0 / norm, 0.0));
            return u.mul(&u.adjoint()).unwrap();
        }
    }
}

/// Random inner function: `factors` rank-one Blaschke–Potapov factors with
/// poles of modulus at most 0.9, times a random unitary left constant.
pub fn random_inner(rng: &mut ChaCha8Rng, n: usize, factors: usize) -> RationalInner {
    let fs = (0..factors)
        .map(|_| {
            let radius = rng.gen_range(0.0..0.9);
            let angle = rng.gen_range(0.0..2.0 * std::f64::consts::PI);
            BlaschkeFactor {
                a: Complex64::from_polar(radius, angle),
                projection: random_rank1_projection(rng, n),
            }
        })
        .collect();
    RationalInner::new(fs, random_unitary(rng, n)).unwrap()
}

/// Random evaluation point on the circle of the given radius.
pub fn random_circle_point(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    Complex64::from_polar(radius, rng.gen_range(0.0..2.0 * std::f64::consts::PI))
}
