//! Complex polynomials and the real auxiliary polynomial
//!
//! ```text
//! phi(x) = x^n + eta_{n-1} x^{n-1} + ... + eta_{k+1} x^{k+1}
//!              - eta_k x^k + eta_{k-1} x^{k-1} + ... + eta_0
//! ```
//!
//! built from coefficient moduli. Two positive roots `r < R` of `phi` split
//! the zeros of the polynomial into `k` inside `|z| <= r` and `n - k` outside
//! `|z| >= R`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{PelletError, Result};

/// Polynomial with complex coefficients stored in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PolynomialFile {
    coefficients: Vec<[f64; 2]>,
}

impl Polynomial {
    /// Validates and wraps `coeffs` (`coeffs[j]` multiplies `z^j`).
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        let lead = *coeffs.last().ok_or(PelletError::EmptyPolynomial)?;
        if let Some(index) = coeffs
            .iter()
            .position(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(PelletError::NonFiniteCoefficient { index });
        }
        if lead == Complex64::new(0.0, 0.0) {
            return Err(PelletError::ZeroLeadingCoefficient);
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// Parses `{"coefficients": [[re, im], ...]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: PolynomialFile =
            serde_json::from_str(text).map_err(|e| PelletError::Parse(e.to_string()))?;
        Self::new(
            file.coefficients
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let file = PolynomialFile {
            coefficients: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
        };
        serde_json::to_string(&file).expect("plain data serializes")
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Complex64 {
        self.coeffs[j]
    }

    /// Coefficient moduli `|a_j|`.
    pub fn moduli(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.norm()).collect()
    }

    /// Horner evaluation of `p(z)` and `p'(z)`.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut iter = self.coeffs.iter().rev();
        let mut value = *iter.next().expect("nonempty");
        let mut deriv = Complex64::new(0.0, 0.0);
        for &c in iter {
            deriv = deriv * z + value;
            value = value * z + c;
        }
        (value, deriv)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `sum |a_j| |z|^j`, the natural scale for the rounding error of `eval`.
    pub fn magnitude_at(&self, modulus: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * modulus + c.norm())
    }
}

/// Values of the split `phi = phi1 + phi2` and their derivatives, where
/// `phi1` collects the terms of degree above `k` and `phi2` the rest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiSplit {
    pub phi1: f64,
    pub dphi1: f64,
    pub phi2: f64,
    pub dphi2: f64,
}

/// Nonnegative coefficients `eta_0..eta_n` (with `eta_n = 1`) and the index
/// `k` whose term enters `phi` with a negative sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PelletInstance {
    eta: Vec<f64>,
    k: usize,
}

impl PelletInstance {
    /// Builds an instance from nonnegative coefficients, normalizing by the
    /// leading one. Degree 2 is accepted here (matrix polynomials allow it).
    pub fn new(mut eta: Vec<f64>, k: usize) -> Result<Self> {
        if eta.len() < 3 {
            return Err(PelletError::DegreeTooLow {
                degree: eta.len().saturating_sub(1),
                min: 2,
            });
        }
        let n = eta.len() - 1;
        if k == 0 || k >= n {
            return Err(PelletError::IndexOutOfRange { k, max: n - 1 });
        }
        for (index, &value) in eta.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(PelletError::InvalidEta { index, value });
            }
        }
        for index in [0, k, n] {
            if eta[index] == 0.0 {
                return Err(PelletError::InvalidEta { index, value: 0.0 });
            }
        }
        let lead = eta[n];
        if lead != 1.0 {
            eta.iter_mut().for_each(|e| *e /= lead);
        }
        Ok(Self { eta, k })
    }

    /// The auxiliary instance of a scalar polynomial: `eta_j = |a_j| / |a_n|`.
    pub fn from_polynomial(p: &Polynomial, k: usize) -> Result<Self> {
        let n = p.degree();
        if n < 3 {
            return Err(PelletError::DegreeTooLow { degree: n, min: 3 });
        }
        if k == 0 || k >= n {
            return Err(PelletError::IndexOutOfRange { k, max: n - 1 });
        }
        for index in [0, k] {
            if p.coeff(index) == Complex64::new(0.0, 0.0) {
                return Err(PelletError::ZeroCoefficient { index });
            }
        }
        Self::new(p.moduli(), k)
    }

    pub fn degree(&self) -> usize {
        self.eta.len() - 1
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Same instance with `eta_k` replaced.
    pub fn with_eta_k(&self, eta_k: f64) -> Result<Self> {
        let mut eta = self.eta.clone();
        eta[self.k] = eta_k;
        Self::new(eta, self.k)
    }

    fn signed(&self, j: usize) -> f64 {
        if j == self.k {
            -self.eta[j]
        } else {
            self.eta[j]
        }
    }

    /// `phi(x)` and `phi'(x)` in one Horner pass.
    pub fn phi(&self, x: f64) -> (f64, f64) {
        let n = self.degree();
        let mut value = self.signed(n);
        let mut deriv = 0.0;
        for j in (0..n).rev() {
            deriv = deriv * x + value;
            value = value * x + self.signed(j);
        }
        (value, deriv)
    }

    pub fn phi_split(&self, x: f64) -> PhiSplit {
        let (phi1, dphi1) = horner_with_derivative(&self.eta[self.k + 1..], x);
        // phi1 = x^{k+1} * u(x)
        let lift = x.powi(self.k as i32);
        let (phi1, dphi1) = (
            phi1 * lift * x,
            (self.k as f64 + 1.0) * lift * phi1 + lift * x * dphi1,
        );
        let mut value = -self.eta[self.k];
        let mut deriv = 0.0;
        for j in (0..self.k).rev() {
            deriv = deriv * x + value;
            value = value * x + self.eta[j];
        }
        PhiSplit {
            phi1,
            dphi1,
            phi2: value,
            dphi2: deriv,
        }
    }

    /// `sigma(x) / x^k`: every term of `phi` except the `k`-th, divided by `x^k`.
    pub fn sigma_over_xk(&self, x: f64) -> f64 {
        let (upper, _) = horner_with_derivative(&self.eta[self.k + 1..], x);
        let inv = x.recip();
        let lower = self.eta[..self.k]
            .iter()
            .fold(0.0, |acc, &e| (acc + e) * inv);
        upper * x + lower
    }

    /// `sum_j eta_j x^j` with all signs positive; the rounding scale of `phi(x)`.
    pub fn magnitude(&self, x: f64) -> f64 {
        self.eta.iter().rev().fold(0.0, |acc, &e| acc * x + e)
    }
}

pub(crate) fn horner_with_derivative(coeffs: &[f64], x: f64) -> (f64, f64) {
    let mut iter = coeffs.iter().rev();
    let Some(&lead) = iter.next() else {
        return (0.0, 0.0);
    };
    let mut value = lead;
    let mut deriv = 0.0;
    for &c in iter {
        deriv = deriv * x + value;
        value = value * x + c;
    }
    (value, deriv)
}
