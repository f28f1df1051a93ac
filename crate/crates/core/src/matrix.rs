//! Matrix polynomials `P(z) = A_n z^n + ... + A_0`.
//!
//! The auxiliary polynomial uses induced norms, `eta_j = ||A_j||` and
//! `eta_k = 1 / ||A_k^{-1}||`, after which detection and the root solver run
//! unchanged. Separation at `k` puts `k m` eigenvalues in the closed disk of
//! radius `r`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::detection::{detect, Detection, Existence};
use crate::error::{PelletError, Result};
use crate::poly::PelletInstance;
use crate::solver::{pellet_annulus_with, AnnulusResult, SolverOptions};

/// Relative tolerance of the power iteration behind the 2-norm. Verdicts
/// closer than this to the threshold are reported indeterminate.
pub const TWO_NORM_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 20_000;
const POWER_SEED: u64 = 0x5eed_2a0b;

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    m: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(PelletError::Shape("empty matrix".into()));
        }
        if let Some(row) = rows.iter().position(|r| r.len() != m) {
            return Err(PelletError::Shape(format!(
                "row {row} is not of length {m}"
            )));
        }
        Ok(Self {
            m,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Complex64::new(v, 0.0)).collect())
                .collect(),
        )
    }

    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            data: vec![Complex64::new(0.0, 0.0); m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::scaled_identity(m, Complex64::new(1.0, 0.0))
    }

    pub fn scaled_identity(m: usize, c: Complex64) -> Self {
        let mut a = Self::zeros(m);
        for i in 0..m {
            a[(i, i)] = c;
        }
        a
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            m: self.m,
            data: self.data.iter().map(|&v| v * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            m: self.m,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let m = self.m;
        let mut out = Self::zeros(m);
        for i in 0..m {
            for l in 0..m {
                let a = self[(i, l)];
                for j in 0..m {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|i| (0..self.m).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `A^H v`
    pub fn adjoint_mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.m)
            .map(|j| (0..self.m).map(|i| self[(i, j)].conj() * v[i]).sum())
            .collect()
    }

    #[cfg(test)]
    fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.m + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.m + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    One,
    #[serde(rename = "inf")]
    Infinity,
    Two,
}

impl std::str::FromStr for NormKind {
    type Err = PelletError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one" | "1" => Ok(NormKind::One),
            "inf" | "infinity" => Ok(NormKind::Infinity),
            "two" | "2" => Ok(NormKind::Two),
            other => Err(PelletError::Parse(format!("unknown norm '{other}'"))),
        }
    }
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |acc: f64, c| acc.hypot(c.norm()))
}

/// Largest singular value by power iteration on `A^H A`, stopped when the
/// eigen-residual is below `TWO_NORM_TOL` relative. Restarts once from a
/// fresh random vector if the first run stagnates.
fn spectral_norm(a: &CMatrix) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_SEED);
    let mut best = 0.0f64;
    for _attempt in 0..2 {
        let mut v: Vec<Complex64> = (0..a.dim())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let nv = vec_norm(&v);
        v.iter_mut().for_each(|c| *c /= nv);
        for _ in 0..POWER_MAX_ITER {
            let av = a.mul_vec(&v);
            let sigma = vec_norm(&av);
            best = best.max(sigma);
            let w = a.adjoint_mul_vec(&av);
            let nw = vec_norm(&w);
            if nw == 0.0 {
                break;
            }
            // residual of the Rayleigh pair (sigma^2, v) for A^H A
            let lambda = sigma * sigma;
            let residual = vec_norm(
                &w.iter()
                    .zip(&v)
                    .map(|(wi, vi)| wi - vi * lambda)
                    .collect::<Vec<_>>(),
            );
            if residual <= TWO_NORM_TOL * lambda {
                return best;
            }
            v = w.into_iter().map(|c| c / nw).collect();
        }
    }
    best
}

/// Induced matrix norm: max column sum, max row sum, or largest singular value.
pub fn induced_norm(a: &CMatrix, kind: NormKind) -> f64 {
    let m = a.dim();
    match kind {
        NormKind::One => (0..m)
            .map(|j| (0..m).map(|i| a[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Infinity => (0..m)
            .map(|i| (0..m).map(|j| a[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max),
        NormKind::Two => spectral_norm(a),
    }
}

/// LU factorization with partial pivoting, `P A = L U`, stored packed.
#[derive(Debug, Clone)]
pub struct Lu {
    packed: CMatrix,
    /// `perm[i]` is the row of `A` that ends up in row `i`.
    perm: Vec<usize>,
}

/// Factors `a`; a pivot at or below `m * ulp * ||A||` counts as singular.
pub fn lu_factor(a: &CMatrix) -> Result<Lu> {
    let m = a.dim();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..m).collect();
    let cutoff = m as f64 * f64::EPSILON * induced_norm(a, NormKind::Infinity);
    for col in 0..m {
        let pivot_row = (col..m)
            .max_by(|&x, &y| lu[(x, col)].norm().total_cmp(&lu[(y, col)].norm()))
            .expect("nonempty range");
        if lu[(pivot_row, col)].norm() <= cutoff {
            return Err(PelletError::SingularMatrix { index: col });
        }
        if pivot_row != col {
            for j in 0..m {
                let tmp = lu[(col, j)];
                lu[(col, j)] = lu[(pivot_row, j)];
                lu[(pivot_row, j)] = tmp;
            }
            perm.swap(col, pivot_row);
        }
        let pivot = lu[(col, col)];
        for i in col + 1..m {
            let factor = lu[(i, col)] / pivot;
            lu[(i, col)] = factor;
            for j in col + 1..m {
                let u = lu[(col, j)];
                lu[(i, j)] -= factor * u;
            }
        }
    }
    Ok(Lu { packed: lu, perm })
}

impl Lu {
    pub fn lower(&self) -> CMatrix {
        let m = self.packed.dim();
        let mut l = CMatrix::identity(m);
        for i in 0..m {
            for j in 0..i {
                l[(i, j)] = self.packed[(i, j)];
            }
        }
        l
    }

    pub fn upper(&self) -> CMatrix {
        let m = self.packed.dim();
        let mut u = CMatrix::zeros(m);
        for i in 0..m {
            for j in i..m {
                u[(i, j)] = self.packed[(i, j)];
            }
        }
        u
    }

    /// `P A`, the row permutation applied to `a`.
    pub fn permute(&self, a: &CMatrix) -> CMatrix {
        let m = a.dim();
        let mut out = CMatrix::zeros(m);
        for (i, &src) in self.perm.iter().enumerate() {
            for j in 0..m {
                out[(i, j)] = a[(src, j)];
            }
        }
        out
    }

    pub fn solve(&self, b: &[Complex64]) -> Vec<Complex64> {
        let m = self.packed.dim();
        let mut x: Vec<Complex64> = self.perm.iter().map(|&i| b[i]).collect();
        for i in 0..m {
            for j in 0..i {
                let l = self.packed[(i, j)];
                let xj = x[j];
                x[i] -= l * xj;
            }
        }
        for i in (0..m).rev() {
            for j in i + 1..m {
                let u = self.packed[(i, j)];
                let xj = x[j];
                x[i] -= u * xj;
            }
            x[i] /= self.packed[(i, i)];
        }
        x
    }

    pub fn inverse(&self) -> CMatrix {
        let m = self.packed.dim();
        let mut inv = CMatrix::zeros(m);
        for j in 0..m {
            let mut e = vec![Complex64::new(0.0, 0.0); m];
            e[j] = Complex64::new(1.0, 0.0);
            for (i, v) in self.solve(&e).into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }
}

/// `1 / ||A^{-1}||` through an explicit LU-based inverse.
pub fn inverse_norm_reciprocal(a: &CMatrix, kind: NormKind) -> Result<f64> {
    let inv = lu_factor(a)?.inverse();
    Ok(induced_norm(&inv, kind).recip())
}

/// `A_0..A_n`, all `m x m`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixPolynomial {
    matrices: Vec<CMatrix>,
}

#[derive(Serialize, Deserialize)]
struct MatrixPolynomialFile {
    m: usize,
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}

impl MatrixPolynomial {
    pub fn new(matrices: Vec<CMatrix>) -> Result<Self> {
        if matrices.len() < 3 {
            return Err(PelletError::DegreeTooLow {
                degree: matrices.len().saturating_sub(1),
                min: 2,
            });
        }
        let m = matrices[0].dim();
        if let Some(j) = matrices.iter().position(|a| a.dim() != m) {
            return Err(PelletError::Shape(format!("A_{j} is not {m}x{m}")));
        }
        if matrices[0].is_zero() {
            return Err(PelletError::ZeroCoefficient { index: 0 });
        }
        if matrices.last().expect("nonempty").is_zero() {
            return Err(PelletError::ZeroLeadingCoefficient);
        }
        Ok(Self { matrices })
    }

    /// Parses `{"m": int, "matrices": [[[[re, im], ...] per row] per j]}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixPolynomialFile =
            serde_json::from_str(text).map_err(|e| PelletError::Parse(e.to_string()))?;
        let matrices = file
            .matrices
            .into_iter()
            .enumerate()
            .map(|(j, rows)| {
                if rows.len() != file.m {
                    return Err(PelletError::Shape(format!(
                        "A_{j} has {} rows, m = {}",
                        rows.len(),
                        file.m
                    )));
                }
                CMatrix::from_rows(
                    rows.into_iter()
                        .map(|r| {
                            r.into_iter()
                                .map(|[re, im]| Complex64::new(re, im))
                                .collect()
                        })
                        .collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(matrices)
    }

    pub fn to_json(&self) -> String {
        let m = self.dim();
        let file = MatrixPolynomialFile {
            m,
            matrices: self
                .matrices
                .iter()
                .map(|a| {
                    (0..m)
                        .map(|i| (0..m).map(|j| [a[(i, j)].re, a[(i, j)].im]).collect())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("plain data serializes")
    }

    pub fn degree(&self) -> usize {
        self.matrices.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn coeff(&self, j: usize) -> &CMatrix {
        &self.matrices[j]
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.matrices
    }

    /// `||A_j||` for every `j`.
    pub fn norms(&self, kind: NormKind) -> Vec<f64> {
        self.matrices
            .iter()
            .map(|a| induced_norm(a, kind))
            .collect()
    }
}

/// Auxiliary instance `eta_j = ||A_j|| / ||A_n||`, `eta_k = ||A_k^{-1}||^{-1} / ||A_n||`.
pub fn matrix_pellet_instance(
    poly: &MatrixPolynomial,
    k: usize,
    kind: NormKind,
) -> Result<PelletInstance> {
    let n = poly.degree();
    if k == 0 || k >= n {
        return Err(PelletError::IndexOutOfRange { k, max: n - 1 });
    }
    let mut eta = poly.norms(kind);
    eta[k] = inverse_norm_reciprocal(poly.coeff(k), kind)
        .map_err(|_| PelletError::SingularMatrix { index: k })?;
    PelletInstance::new(eta, k)
}

/// Detection tolerance for a norm kind: the 2-norm is only known to
/// `TWO_NORM_TOL`, so its verdict band is widened to match.
pub fn detection_tol(kind: NormKind, tol: f64) -> f64 {
    match kind {
        NormKind::Two => tol.max(TWO_NORM_TOL),
        _ => tol,
    }
}

/// Detection verdict and, when separated, the radii for one index.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixAnalysis {
    pub k: usize,
    pub detection: Result<Detection>,
    pub annulus: Option<Result<AnnulusResult>>,
}

pub fn analyze_matrix_k(
    poly: &MatrixPolynomial,
    k: usize,
    kind: NormKind,
    opts: &SolverOptions,
) -> MatrixAnalysis {
    let inst = match matrix_pellet_instance(poly, k, kind) {
        Ok(inst) => inst,
        Err(e) => {
            return MatrixAnalysis {
                k,
                detection: Err(e),
                annulus: None,
            }
        }
    };
    let detection = detect(&inst, detection_tol(kind, opts.tol));
    let m = poly.dim();
    let annulus = match &detection {
        Ok(d) if d.exists == Existence::Yes => {
            Some(pellet_annulus_with(&inst, d.x_star, opts).map(|mut res| {
                res.zero_count = k * m;
                res
            }))
        }
        _ => None,
    };
    MatrixAnalysis {
        k,
        detection,
        annulus,
    }
}

/// Radii for index `k`; fails with `NoSeparation` unless detection says yes.
pub fn matrix_annulus(
    poly: &MatrixPolynomial,
    k: usize,
    kind: NormKind,
    tol: f64,
) -> Result<AnnulusResult> {
    let analysis = analyze_matrix_k(poly, k, kind, &SolverOptions::with_tol(tol));
    let detection = analysis.detection?;
    match analysis.annulus {
        Some(res) => res,
        None => Err(PelletError::NoSeparation {
            k,
            verdict: detection.exists,
        }),
    }
}

/// Indices worth analyzing: Newton polygon vertices of `(j, log ||A_j||)`.
/// Since `1/||A_k^{-1}|| <= ||A_k||`, this never drops a separable `k`.
pub fn matrix_candidate_ks(poly: &MatrixPolynomial, kind: NormKind) -> Result<Vec<usize>> {
    Ok(crate::polygon::candidate_ks_from_moduli(&poly.norms(kind))?.candidates)
}
