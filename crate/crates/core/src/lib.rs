//! Annulus bounds for the zeros of polynomials and matrix polynomials from
//! Pellet's theorem.
//!
//! For a polynomial `p(z) = a_n z^n + ... + a_0` and an index `k`, the real
//! polynomial `phi` built from the moduli `|a_j|` with a negated `k`-th term
//! either has two positive roots `r < R` or none. When it has them, `p` has
//! exactly `k` zeros in `|z| <= r` and none in `r < |z| < R`.
//!
//! The pipeline is:
//!
//! 1. [`polygon::candidate_ks`] narrows `k` down to Newton polygon vertices;
//! 2. [`detection::detect`] decides existence in `O(n)` and yields a point
//!    `x*` inside `[r, R]`;
//! 3. [`solver::pellet_annulus`] computes `r` and `R` with iterates that are
//!    valid bounds at every step.
//!
//! [`matrix`] reuses the same machinery with induced matrix norms, and
//! [`oracle`] provides independent checks (all roots, bisection radii).

pub mod detection;
pub mod error;
pub mod matrix;
pub mod oracle;
pub mod poly;
pub mod polygon;
pub mod solver;

pub use detection::{detect, Detection, Existence, DEFAULT_TOL};
pub use error::{PelletError, Result};
pub use matrix::{matrix_annulus, matrix_pellet_instance, CMatrix, MatrixPolynomial, NormKind};
pub use poly::{PelletInstance, Polynomial};
pub use polygon::{analyze_all, candidate_ks, KAnalysis, PolygonCandidates};
pub use solver::{pellet_annulus, AnnulusResult, SolverOptions};

#[cfg(test)]
pub(crate) mod test_support {
    use num_complex::Complex64;

    use crate::poly::Polynomial;

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

    /// Bisection to full precision on a bracket with a sign change.
    pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
        let lo_sign = f(lo) > 0.0;
        assert_ne!(lo_sign, f(hi) > 0.0, "no sign change on [{lo}, {hi}]");
        loop {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                return mid;
            }
            if (f(mid) > 0.0) == lo_sign {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}
