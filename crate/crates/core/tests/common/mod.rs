#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use pellet::{CMatrix, MatrixPolynomial, PelletInstance, Polynomial};
use rand::Rng;

/// z^8 + z^7 + 3z^6 + z^4/2 + 15z^3 - 2z^2 + (1+i)z - 4
pub fn q() -> Polynomial {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    Polynomial::new(vec![
        c(-4.0, 0.0),
        c(1.0, 1.0),
        c(-2.0, 0.0),
        c(15.0, 0.0),
        c(0.5, 0.0),
        c(0.0, 0.0),
        c(3.0, 0.0),
        c(1.0, 0.0),
        c(1.0, 0.0),
    ])
    .unwrap()
}

pub fn log_uniform(rng: &mut impl Rng, decades: f64) -> f64 {
    10f64.powf(rng.gen_range(-decades..decades))
}

/// Coefficients with log-uniform moduli over `10^{+-decades}` and uniform phases.
pub fn random_polynomial(rng: &mut impl Rng, degree: usize, decades: f64) -> Polynomial {
    let coeffs = (0..=degree)
        .map(|_| Complex64::from_polar(log_uniform(rng, decades), rng.gen_range(0.0..TAU)))
        .collect();
    Polynomial::new(coeffs).unwrap()
}

/// Nonnegative coefficients with some interior zeros; `eta_k` set to `eta_k`.
pub fn random_sigma_shape(rng: &mut impl Rng, n: usize, k: usize, eta_k: f64) -> PelletInstance {
    let eta = (0..=n)
        .map(|j| {
            if j == k {
                eta_k
            } else if j == 0 || j == n || rng.gen_bool(0.7) {
                log_uniform(rng, 2.0)
            } else {
                0.0
            }
        })
        .collect();
    PelletInstance::new(eta, k).unwrap()
}

pub fn random_complex(rng: &mut impl Rng, max_modulus: f64) -> Complex64 {
    Complex64::from_polar(rng.gen_range(0.0..max_modulus), rng.gen_range(0.0..TAU))
}

pub fn random_matrix(rng: &mut impl Rng, m: usize, max_modulus: f64) -> CMatrix {
    CMatrix::from_rows(
        (0..m)
            .map(|_| (0..m).map(|_| random_complex(rng, max_modulus)).collect())
            .collect(),
    )
    .unwrap()
}

/// Well-conditioned `s * (D + E)` with unit-modulus-ish diagonal `D` and small `E`.
pub fn dominant_matrix(rng: &mut impl Rng, m: usize, s: f64) -> CMatrix {
    let mut a = random_matrix(rng, m, 0.1);
    for i in 0..m {
        a[(i, i)] = Complex64::from_polar(rng.gen_range(1.0..1.2), rng.gen_range(0.0..TAU));
    }
    a.scale(Complex64::new(s, 0.0))
}

/// `2 x 2` matrix polynomial of degree `n` whose `A_k` dominates every other term.
pub fn dominant_matrix_polynomial(rng: &mut impl Rng, n: usize, k: usize) -> MatrixPolynomial {
    let scale = 100.0 * n as f64;
    let matrices = (0..=n)
        .map(|j| {
            if j == k {
                dominant_matrix(rng, 2, scale)
            } else {
                let mut a = random_matrix(rng, 2, 1.0);
                a[(0, 0)] += Complex64::new(0.5, 0.0);
                a
            }
        })
        .collect();
    MatrixPolynomial::new(matrices).unwrap()
}

pub fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs())
}

/// `sum_j j eta_j x^{j-1}`, the rounding scale of `phi'(x)`.
pub fn derivative_magnitude(inst: &PelletInstance, x: f64) -> f64 {
    inst.eta()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(j, e)| j as f64 * e * x.powi(j as i32 - 1))
        .sum()
}
