//! Existence test for the two positive roots of `phi`.
//!
//! `x^{-k} phi(x)` is strictly convex on `(0, inf)`; its minimizer `x*` is the
//! unique positive root of
//!
//! ```text
//! chi(x) = sum_j (j - k) eta_j x^j
//! ```
//!
//! and `phi` has two positive roots exactly when `phi(x*) < 0`. Equivalently
//! `eta_k > sigma(x*) / (x*)^k`, where `sigma` is `phi` without its `k`-th
//! term. `x*` does not depend on `eta_k` and lies in `[r, R]` when the roots
//! exist, so it doubles as the starting point for the root solver.

use serde::{Deserialize, Serialize};

use crate::error::{PelletError, Result};
use crate::poly::PelletInstance;

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_CHI_MAX_ITER: usize = 200;

/// Polynomial with one sign change: negative coefficients at low degrees,
/// positive at high degrees, zeros allowed anywhere in between.
#[derive(Debug, Clone, PartialEq)]
pub struct ChiPolynomial {
    coeffs: Vec<f64>,
}

impl ChiPolynomial {
    /// Wraps a signed coefficient vector (ascending degree). Fails unless the
    /// constant term is negative, the leading term positive, and the signs
    /// change exactly once.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Result<Self> {
        let bad = |index: usize, value: f64| PelletError::InvalidEta { index, value };
        let n = coeffs
            .len()
            .checked_sub(1)
            .ok_or(PelletError::EmptyPolynomial)?;
        if !(coeffs[0] < 0.0) {
            return Err(bad(0, coeffs[0]));
        }
        if !(coeffs[n] > 0.0) {
            return Err(bad(n, coeffs[n]));
        }
        let mut seen_positive = false;
        for (j, &c) in coeffs.iter().enumerate() {
            if !c.is_finite() || (seen_positive && c < 0.0) {
                return Err(bad(j, c));
            }
            seen_positive |= c > 0.0;
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> (f64, f64) {
        crate::poly::horner_with_derivative(&self.coeffs, x)
    }
}

/// Three-valued answer to "does `phi` have two positive roots?".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Existence {
    Yes,
    No,
    /// `|phi(x*)|` is inside the rounding band; a double root cannot be ruled out.
    Indeterminate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection {
    pub exists: Existence,
    pub x_star: f64,
    pub phi_at_xstar: f64,
    /// `sigma(x*) / (x*)^k`; separation needs `eta_k` strictly above it.
    pub threshold: f64,
    /// `eta_k - threshold`.
    pub margin: f64,
    pub chi_newton_steps: usize,
}

pub fn build_chi(inst: &PelletInstance) -> ChiPolynomial {
    let k = inst.k() as f64;
    let coeffs = inst
        .eta()
        .iter()
        .enumerate()
        .map(|(j, &e)| (j as f64 - k) * e)
        .collect();
    // eta_0 > 0 and eta_n = 1 make the shape valid by construction.
    ChiPolynomial { coeffs }
}

/// Upper bound on the positive root of a one-sign-change polynomial.
///
/// With `P` the sum of the positive coefficients (lowest such degree `m`) and
/// `N` the sum of the moduli of the negative ones (highest such degree `l`):
/// if the value at 1 is negative the bound is `(N/P)^{1/(m-l)}`, if positive
/// it is `(N/P)^{1/n}`, and a root at exactly 1 is returned as 1.
pub fn positive_root_upper_bound(chi: &ChiPolynomial) -> f64 {
    let c = chi.coeffs();
    let n = chi.degree();
    let m = c
        .iter()
        .position(|&v| v > 0.0)
        .expect("leading coefficient positive");
    let l = c
        .iter()
        .rposition(|&v| v < 0.0)
        .expect("constant coefficient negative");
    let pos: f64 = c.iter().filter(|&&v| v > 0.0).sum();
    let neg: f64 = c.iter().filter(|&&v| v < 0.0).map(|v| -v).sum();
    let at_one = pos - neg;
    let ratio = neg / pos;
    if at_one == 0.0 {
        1.0
    } else if at_one < 0.0 {
        ratio.powf(1.0 / (m - l) as f64)
    } else {
        ratio.powf(1.0 / n as f64)
    }
}

/// Positive root of `chi` by Newton's method from the upper bound, safeguarded
/// by the bracket `[last point with chi < 0, last point with chi >= 0]`.
///
/// Far right of the root `chi` behaves like its leading term and plain Newton
/// only shrinks `x` by a factor `1 - 1/n` per step. Each step therefore first
/// tries the Newton correction multiplied by a factor that starts at the
/// degree and is halved on every overshoot; at factor 1 the iteration is
/// plain safeguarded Newton.
/// Returns the root and the number of steps taken.
pub fn solve_chi_root(chi: &ChiPolynomial, tol: f64, max_iter: usize) -> Result<(f64, usize)> {
    if chi.eval(1.0).0 == 0.0 {
        return Ok((1.0, 0));
    }
    let mut lo = 0.0;
    let mut hi = positive_root_upper_bound(chi);
    let (mut value, mut deriv) = chi.eval(hi);
    // The closed-form bound can land a hair left of the root through rounding.
    while value < 0.0 {
        lo = hi;
        hi *= 2.0;
        (value, deriv) = chi.eval(hi);
    }
    let mut x = hi;
    let mut factor = chi.degree() as f64;
    'steps: for step in 1..=max_iter {
        if value == 0.0 {
            return Ok((x, step - 1));
        }
        let usable = deriv > 0.0;
        while usable && factor > 1.0 {
            let far = x - factor * value / deriv;
            if far > lo && far < x {
                let (v, d) = chi.eval(far);
                if v >= 0.0 {
                    let moved = x - far;
                    (x, value, deriv, hi) = (far, v, d, far);
                    if moved <= tol * x || hi - lo <= tol * hi {
                        return Ok((x, step));
                    }
                    continue 'steps;
                }
                lo = far;
            }
            factor *= 0.5;
        }
        let newton = x - value / deriv;
        let next = if usable && newton >= lo && newton <= hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let moved = (next - x).abs();
        x = next;
        (value, deriv) = chi.eval(x);
        if value > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        if moved <= tol * x || hi - lo <= tol * hi {
            return Ok((x, step));
        }
    }
    Err(PelletError::IterationLimit {
        stage: "chi root",
        iterations: max_iter,
        lo,
        hi,
    })
}

/// `sigma(x*) / (x*)^k`, the smallest `eta_k` that is not enough for separation.
pub fn separation_threshold(inst: &PelletInstance, x_star: f64) -> f64 {
    inst.sigma_over_xk(x_star)
}

/// Runs the existence test with the default iteration cap.
pub fn detect(inst: &PelletInstance, tol: f64) -> Result<Detection> {
    detect_with(inst, tol, DEFAULT_CHI_MAX_ITER)
}

pub fn detect_with(inst: &PelletInstance, tol: f64, max_iter: usize) -> Result<Detection> {
    let chi = build_chi(inst);
    let (x_star, steps) = solve_chi_root(&chi, tol, max_iter)?;
    let (phi_at_xstar, _) = inst.phi(x_star);
    let threshold = separation_threshold(inst, x_star);
    let eta_k = inst.eta()[inst.k()];
    let band = tol * threshold.max(1.0) * x_star.powi(inst.k() as i32);
    let exists = if phi_at_xstar < -band {
        Existence::Yes
    } else if phi_at_xstar > band {
        Existence::No
    } else {
        Existence::Indeterminate
    };
    Ok(Detection {
        exists,
        x_star,
        phi_at_xstar,
        threshold,
        margin: eta_k - threshold,
        chi_newton_steps: steps,
    })
}
