//! Inside-out computation of the positive roots `r < R` of `phi`.
//!
//! At a point `xb` with `phi(xb) <= 0` the trinomial `f(x) = a x^n - b x^k + c`
//! touches `phi` to first order and dominates it on `x >= 0`, so its roots
//! lie in `[r, R]`. The roots of `f` are in turn found from the surrogate
//!
//! ```text
//! h(x) = a d / (e - x^k) - b x^k + c
//! ```
//!
//! which dominates `f` below its pole and whose zeros solve a quadratic in
//! `x^k`. Both loops move monotonically outwards from the starting point, so
//! every iterate is a valid bound: an upper bound on `r` or a lower bound on `R`.

use serde::{Deserialize, Serialize};

use crate::error::{PelletError, Result};
use crate::poly::PelletInstance;

pub const DEFAULT_MAX_OUTER: usize = 100;
/// The surrogate's pole sits at `((n+k)/n)^{1/k}` times the fit point, which
/// caps the growth of one inner step; a far upper root with `k` close to `n`
/// needs hundreds of steps before the quadratic phase starts.
pub const DEFAULT_MAX_INNER: usize = 2000;

/// Relative slack for sign preconditions evaluated at points that are roots
/// up to rounding.
const SIGN_SLACK: f64 = 64.0 * f64::EPSILON;

/// `alpha x^n - beta x^k + gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trinomial {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub n: usize,
    pub k: usize,
    /// Point of tangency with `phi`, when fitted.
    pub fit_point: Option<f64>,
}

impl Trinomial {
    pub fn new(alpha: f64, beta: f64, gamma: f64, n: usize, k: usize) -> Self {
        Self {
            alpha,
            beta,
            gamma,
            n,
            k,
            fit_point: None,
        }
    }

    /// `f(x)` and `f'(x)`.
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let xk1 = x.powi(self.k as i32 - 1);
        let xn1 = x.powi(self.n as i32 - 1);
        let value = self.alpha * xn1 * x - self.beta * xk1 * x + self.gamma;
        let deriv = self.n as f64 * self.alpha * xn1 - self.k as f64 * self.beta * xk1;
        (value, deriv)
    }

    pub fn magnitude(&self, x: f64) -> f64 {
        self.alpha * x.powi(self.n as i32) + self.beta * x.powi(self.k as i32) + self.gamma
    }
}

/// `alpha delta / (epsilon - x^k) - beta x^k + gamma`, tangent to its parent
/// trinomial at `fit_point`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Surrogate {
    pub delta: f64,
    pub epsilon: f64,
    pub fit_point: f64,
    pub parent: Trinomial,
}

impl Surrogate {
    /// `h(x)`, or `None` at or beyond the pole `x^k = epsilon`.
    pub fn eval(&self, x: f64) -> Option<f64> {
        let t = &self.parent;
        let xk = x.powi(t.k as i32);
        let gap = self.epsilon - xk;
        (gap > 0.0).then(|| t.alpha * self.delta / gap - t.beta * xk + t.gamma)
    }

    /// The pole of `h` on the positive axis.
    pub fn pole(&self) -> f64 {
        self.epsilon.powf(1.0 / self.parent.k as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self {
            tol,
            ..Self::default()
        }
    }
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: crate::detection::DEFAULT_TOL,
            max_outer: DEFAULT_MAX_OUTER,
            max_inner: DEFAULT_MAX_INNER,
        }
    }
}

/// Radii `r < R` with the iterate history of both loops.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusResult {
    pub k: usize,
    #[serde(rename = "r")]
    pub inner_radius: f64,
    #[serde(rename = "R")]
    pub outer_radius: f64,
    /// Zeros in the closed inner disk: `k` for scalars, `k m` for `m x m` matrices.
    pub zero_count: usize,
    pub converged: bool,
    /// Starting point followed by each outer iterate, nonincreasing.
    #[serde(rename = "iterates_r")]
    pub inner_iterates: Vec<f64>,
    /// Starting point followed by each outer iterate, nondecreasing.
    #[serde(rename = "iterates_R")]
    pub outer_iterates: Vec<f64>,
    /// Surrogate iterations spent on each trinomial root, per outer step.
    #[serde(rename = "inner_counts_r")]
    pub inner_solves: Vec<usize>,
    #[serde(rename = "inner_counts_R")]
    pub outer_solves: Vec<usize>,
}

fn converged(step: f64, x: f64, tol: f64) -> bool {
    step <= tol * x.max(1.0)
}

/// First-order tangent trinomial to `phi` at `x_bar` that dominates `phi` on
/// `x >= 0`. Requires `phi(x_bar) <= 0`.
pub fn fit_trinomial(inst: &PelletInstance, x_bar: f64) -> Result<Trinomial> {
    let n = inst.degree();
    let k = inst.k();
    let eta = inst.eta();
    let (phi, _) = inst.phi(x_bar);
    if !(x_bar > 0.0 && x_bar.is_finite()) || phi > SIGN_SLACK * inst.magnitude(x_bar) {
        return Err(PelletError::InvalidStartingPoint {
            x: x_bar,
            value: phi,
        });
    }
    let (nf, kf) = (n as f64, k as f64);
    let inv = x_bar.recip();

    // alpha = x^{1-n} phi1'(x) / n = sum_{j>k} (j/n) eta_j x^{j-n}
    let alpha = (k + 1..=n).fold(0.0, |acc, j| acc * inv + j as f64 / nf * eta[j]);
    // beta = -x^{1-k} phi2'(x) / k = eta_k - sum_{j<k} (j/k) eta_j x^{j-k}
    let lower = (1..k).fold(0.0, |acc, j| (acc + j as f64 / kf * eta[j]) * inv);
    let beta = eta[k] - lower;
    // gamma = phi(x) - x (phi1'(x)/n + phi2'(x)/k), written as the two
    // nonnegative sums it reduces to.
    let upper_part = (k + 1..=n)
        .rev()
        .fold(0.0, |acc, j| acc * x_bar + (n - j) as f64 / nf * eta[j])
        * x_bar.powi(k as i32 + 1);
    let lower_part = (0..k)
        .rev()
        .fold(0.0, |acc, j| acc * x_bar + (k - j) as f64 / kf * eta[j]);
    let gamma = upper_part + lower_part;

    if !(beta > 0.0) {
        return Err(PelletError::InvalidStartingPoint {
            x: x_bar,
            value: phi,
        });
    }
    Ok(Trinomial {
        alpha,
        beta,
        gamma,
        n,
        k,
        fit_point: Some(x_bar),
    })
}

/// Surrogate tangent to `tri` at `x_bar`: `delta = (k/n) x^{k+n}` and
/// `epsilon = ((n+k)/n) x^k`. Requires `f(x_bar) <= 0`.
pub fn fit_surrogate(tri: &Trinomial, x_bar: f64) -> Result<Surrogate> {
    let (value, _) = tri.eval(x_bar);
    if !(x_bar > 0.0 && x_bar.is_finite()) || value > SIGN_SLACK * tri.magnitude(x_bar) {
        return Err(PelletError::InvalidStartingPoint { x: x_bar, value });
    }
    let (n, k) = (tri.n as f64, tri.k as f64);
    let xk = x_bar.powi(tri.k as i32);
    Ok(Surrogate {
        delta: k / n * xk * x_bar.powi(tri.n as i32),
        epsilon: (n + k) / n * xk,
        fit_point: x_bar,
        parent: *tri,
    })
}

/// Both zeros `s1 <= s2` of the surrogate on the branch below its pole.
///
/// `h = 0` is `beta y^2 - (epsilon beta + gamma) y + (alpha delta + epsilon gamma) = 0`
/// in `y = x^k`. It is solved in `t = y / xb^k`, which keeps every coefficient
/// on the scale of `phi(xb)`. The larger zero sits just below the pole `t = e`
/// when `alpha xb^n` is small, so it is taken from the distance `u = e - t`,
/// which solves `u^2 - (e - G/B) u + (k/n) A/B = 0`; the smaller zero then
/// follows from the product of the roots in `t`.
pub fn surrogate_roots(sur: &Surrogate) -> Result<(f64, f64)> {
    let tri = &sur.parent;
    let xb = sur.fit_point;
    let (n, k) = (tri.n as f64, tri.k as f64);
    let e = (n + k) / n;
    // A / B and G / B with A = alpha xb^n, B = beta xb^k, G = gamma.
    let a_b = tri.alpha / tri.beta * xb.powi((tri.n - tri.k) as i32);
    let g_b = tri.gamma / tri.beta / xb.powi(tri.k as i32);

    // Divided through by B. e - G/B > 0 follows from A - B + G <= 0 and e > 1.
    let lin = e - g_b;
    let pole_term = k / n * a_b;
    let mut disc = lin * lin - 4.0 * pole_term;
    if disc < 0.0 {
        if disc < -4.0 * SIGN_SLACK * lin * lin {
            return Err(PelletError::NegativeDiscriminant { discriminant: disc });
        }
        disc = 0.0;
    }
    let u_large = 0.5 * (lin + disc.sqrt());
    let u_small = pole_term / u_large;
    // `t_large` may round onto the pole when `A` is negligible against `B`.
    let t_large = e - u_small;
    if !(lin > 0.0 && u_small >= 0.0) {
        return Err(PelletError::InvalidStartingPoint {
            x: xb,
            value: t_large,
        });
    }
    let t_small = (pole_term + e * g_b) / t_large;
    let inv_k = 1.0 / k;
    let root = |t: f64| {
        if tri.k == 1 {
            xb * t
        } else {
            xb * t.powf(inv_k)
        }
    };
    Ok((root(t_small), root(t_large)))
}

/// One root of `tri` by iterating `x <- s_side(surrogate fitted at x)` from
/// `x_start`. Returns the root and the number of surrogate iterations.
pub fn solve_trinomial_root(
    tri: &Trinomial,
    x_start: f64,
    side: Side,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, usize)> {
    let mut x = x_start;
    for it in 1..=max_iter {
        let (s1, s2) = surrogate_roots(&fit_surrogate(tri, x)?)?;
        let next = match side {
            Side::Lower => s1,
            Side::Upper => s2,
        };
        let forward = match side {
            Side::Lower => x - next,
            Side::Upper => next - x,
        };
        if forward < 0.0 {
            // Rounding noise at the root; a genuine reversal is a bug.
            if converged(-forward, x, tol) {
                return Ok((x, it));
            }
            return Err(PelletError::NonMonotone {
                stage: "trinomial root",
                from: x,
                to: next,
            });
        }
        x = next;
        if converged(forward, x, tol) {
            return Ok((x, it));
        }
    }
    let (lo, hi) = match side {
        Side::Lower => (0.0, x),
        Side::Upper => (x, f64::INFINITY),
    };
    Err(PelletError::IterationLimit {
        stage: "trinomial root",
        iterations: max_iter,
        lo,
        hi,
    })
}

/// Outer loop for one side: `x <- root_side(trinomial fitted at x)`.
fn outer_loop(
    inst: &PelletInstance,
    x_start: f64,
    side: Side,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, Vec<usize>)> {
    let mut iterates = vec![x_start];
    let mut counts = Vec::new();
    let mut x = x_start;
    for _ in 0..opts.max_outer {
        let tri = fit_trinomial(inst, x)?;
        let (root, count) = solve_trinomial_root(&tri, x, side, opts.tol, opts.max_inner)?;
        counts.push(count);
        let forward = match side {
            Side::Lower => x - root,
            Side::Upper => root - x,
        };
        if forward < 0.0 {
            if converged(-forward, x, opts.tol) {
                iterates.push(x);
                return Ok((iterates, counts));
            }
            return Err(PelletError::NonMonotone {
                stage: "annulus",
                from: x,
                to: root,
            });
        }
        x = root;
        iterates.push(x);
        if converged(forward, x, opts.tol) {
            return Ok((iterates, counts));
        }
    }
    let (lo, hi) = match side {
        Side::Lower => (0.0, x),
        Side::Upper => (x, f64::INFINITY),
    };
    Err(PelletError::IterationLimit {
        stage: "annulus",
        iterations: opts.max_outer,
        lo,
        hi,
    })
}

/// Computes `r` and `R` from a starting point with `phi(x_start) <= 0`,
/// normally the `x*` returned by detection.
pub fn pellet_annulus(inst: &PelletInstance, x_start: f64, tol: f64) -> Result<AnnulusResult> {
    pellet_annulus_with(inst, x_start, &SolverOptions::with_tol(tol))
}

pub fn pellet_annulus_with(
    inst: &PelletInstance,
    x_start: f64,
    opts: &SolverOptions,
) -> Result<AnnulusResult> {
    let (phi, _) = inst.phi(x_start);
    if !(x_start > 0.0) || phi > SIGN_SLACK * inst.magnitude(x_start) {
        return Err(PelletError::InvalidStartingPoint {
            x: x_start,
            value: phi,
        });
    }
    if inst.degree() == 2 {
        return Ok(quadratic_annulus(inst, x_start));
    }
    let (inner_iterates, inner_solves) = outer_loop(inst, x_start, Side::Lower, opts)?;
    let (outer_iterates, outer_solves) = outer_loop(inst, x_start, Side::Upper, opts)?;
    Ok(AnnulusResult {
        k: inst.k(),
        inner_radius: *inner_iterates.last().expect("nonempty"),
        outer_radius: *outer_iterates.last().expect("nonempty"),
        zero_count: inst.k(),
        converged: true,
        inner_iterates,
        outer_iterates,
        inner_solves,
        outer_solves,
    })
}

/// Degree 2 (only reachable from matrix polynomials): `x^2 - eta_1 x + eta_0`.
fn quadratic_annulus(inst: &PelletInstance, x_start: f64) -> AnnulusResult {
    let eta = inst.eta();
    let disc = (eta[1] * eta[1] - 4.0 * eta[0]).max(0.0);
    let big = 0.5 * (eta[1] + disc.sqrt());
    let (r, big_r) = (eta[0] / big, big);
    AnnulusResult {
        k: 1,
        inner_radius: r,
        outer_radius: big_r,
        zero_count: 1,
        converged: true,
        inner_iterates: vec![x_start, r],
        outer_iterates: vec![x_start, big_r],
        inner_solves: vec![],
        outer_solves: vec![],
    }
}
