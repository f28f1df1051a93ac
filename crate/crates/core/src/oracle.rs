//! Certification machinery, independent of the Pellet pipeline: all complex
//! roots by Aberth-Ehrlich iteration, and reference radii by bisection on `phi`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::detection::{positive_root_upper_bound, ChiPolynomial};
use crate::error::{PelletError, Result};
use crate::matrix::MatrixPolynomial;
use crate::poly::{PelletInstance, Polynomial};

pub const DEFAULT_MAX_SWEEPS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    /// `max |p(z)| / sum |a_j| |z|^j` over the roots.
    pub residual: f64,
    pub sweeps: usize,
}

fn backward_error(p: &Polynomial, z: Complex64) -> f64 {
    let scale = p.magnitude_at(z.norm());
    if scale == 0.0 {
        0.0
    } else {
        p.eval(z).norm() / scale
    }
}

/// Every root of `p` with multiplicity.
///
/// Starts from points on the circle of radius `1 + max |a_j / a_n|` at
/// offset angles and runs Gauss-Seidel Aberth sweeps until every correction is
/// below `tol` relative (or the root is exact to working precision).
pub fn all_roots(p: &Polynomial, tol: f64) -> Result<RootSet> {
    all_roots_with(p, tol, DEFAULT_MAX_SWEEPS)
}

pub fn all_roots_with(p: &Polynomial, tol: f64, max_sweeps: usize) -> Result<RootSet> {
    let n = p.degree();
    if n == 0 {
        return Err(PelletError::DegreeTooLow { degree: 0, min: 1 });
    }
    let lead = p.coeff(n);
    if n == 1 {
        let root = -p.coeff(0) / lead;
        return Ok(RootSet {
            residual: backward_error(p, root),
            roots: vec![root],
            sweeps: 0,
        });
    }
    let cauchy = 1.0
        + p.coeffs()[..n]
            .iter()
            .map(|c| (c / lead).norm())
            .fold(0.0, f64::max);
    let mut roots: Vec<Complex64> = (0..n)
        .map(|i| Complex64::from_polar(cauchy, TAU * i as f64 / n as f64 + 0.4))
        .collect();
    let mut done = vec![false; n];

    for sweep in 1..=max_sweeps {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let z = roots[i];
            let (value, deriv) = p.eval_with_derivative(z);
            if backward_error(p, z) <= 4.0 * f64::EPSILON {
                done[i] = true;
                continue;
            }
            let ratio = value / deriv;
            let repulsion: Complex64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &w)| (z - w).inv())
                .sum();
            let mut step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.is_finite() {
                step = ratio;
            }
            roots[i] = z - step;
            if step.norm() <= tol * roots[i].norm() {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            let residual = roots
                .iter()
                .map(|&z| backward_error(p, z))
                .fold(0.0, f64::max);
            return Ok(RootSet {
                roots,
                residual,
                sweeps: sweep,
            });
        }
    }
    let residual = roots
        .iter()
        .map(|&z| backward_error(p, z))
        .fold(0.0, f64::max);
    Err(PelletError::OracleNotConverged {
        sweeps: max_sweeps,
        residual,
    })
}

/// Number of roots with `|z| <= radius (1 + slack)`.
pub fn count_in_disk(roots: &RootSet, radius: f64, slack: f64) -> usize {
    let limit = radius * (1.0 + slack);
    roots.roots.iter().filter(|z| z.norm() <= limit).count()
}

/// Number of roots with `|z| >= radius (1 - slack)`.
pub fn count_outside_disk(roots: &RootSet, radius: f64, slack: f64) -> usize {
    let limit = radius * (1.0 - slack);
    roots.roots.iter().filter(|z| z.norm() >= limit).count()
}

/// Roots strictly between the circles, with the boundaries widened by `slack`.
pub fn count_in_open_annulus(roots: &RootSet, r: f64, big_r: f64, slack: f64) -> usize {
    let (lo, hi) = (r * (1.0 + slack), big_r * (1.0 - slack));
    roots
        .roots
        .iter()
        .filter(|z| {
            let a = z.norm();
            a > lo && a < hi
        })
        .count()
}

fn bisect(inst: &PelletInstance, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let lo_positive = inst.phi(lo).0 > 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= tol * hi {
            break;
        }
        if (inst.phi(mid).0 > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Upper bound on the roots of `phi` from its one-sign-change minorant
/// `sum_{j>k} eta_j x^j - eta_k x^k`.
pub fn phi_root_upper_bound(inst: &PelletInstance) -> f64 {
    let k = inst.k();
    let mut coeffs = vec![-inst.eta()[k]];
    coeffs.extend_from_slice(&inst.eta()[k + 1..]);
    let envelope = ChiPolynomial::from_coeffs(coeffs).expect("eta_k > 0 and eta_n = 1");
    positive_root_upper_bound(&envelope)
}

/// `(r, R)` by plain bisection on `[0, x_seed]` and `[x_seed, B]`.
pub fn reference_radii(inst: &PelletInstance, x_seed: f64, tol: f64) -> Result<(f64, f64)> {
    if !(inst.phi(x_seed).0 < 0.0) {
        return Err(PelletError::NoSignChange {
            lo: x_seed,
            hi: x_seed,
        });
    }
    let mut upper = phi_root_upper_bound(inst).max(x_seed);
    let mut guard = 0;
    while inst.phi(upper).0 < 0.0 {
        upper *= 2.0;
        guard += 1;
        if guard > 64 {
            return Err(PelletError::NoSignChange {
                lo: x_seed,
                hi: upper,
            });
        }
    }
    Ok((
        bisect(inst, 0.0, x_seed, tol),
        bisect(inst, x_seed, upper, tol),
    ))
}

/// `det P(z)` of a `2 x 2` matrix polynomial as a scalar polynomial of degree
/// up to `2n`. Exactly vanishing top coefficients are trimmed.
pub fn det_polynomial_2x2(poly: &MatrixPolynomial) -> Result<Polynomial> {
    if poly.dim() != 2 {
        return Err(PelletError::Shape(format!(
            "expected 2x2, got {}x{}",
            poly.dim(),
            poly.dim()
        )));
    }
    let n = poly.degree();
    let entry = |i: usize, j: usize| -> Vec<Complex64> {
        poly.matrices().iter().map(|a| a[(i, j)]).collect()
    };
    let (p00, p01, p10, p11) = (entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1));
    let mut det = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for a in 0..=n {
        for b in 0..=n {
            det[a + b] += p00[a] * p11[b] - p01[a] * p10[b];
        }
    }
    while det.len() > 1 && *det.last().expect("nonempty") == Complex64::new(0.0, 0.0) {
        det.pop();
    }
    Polynomial::new(det)
}
