use std::fmt::Write as _;

use pellet::detection::Existence;
use pellet::{AnnulusResult, Detection, NormKind, PelletError};
use serde::{Deserialize, Serialize};

/// Everything one `analyze` or `matrix` invocation produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub input: InputInfo,
    pub problem: Problem,
    pub tolerance: f64,
    /// Newton polygon candidates; absent when a single `k` was requested.
    pub candidates: Option<Vec<usize>>,
    pub results: Vec<KReport>,
    pub timing_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Problem {
    Polynomial {
        degree: usize,
    },
    Matrix {
        degree: usize,
        dim: usize,
        norm: NormKind,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KReport {
    pub k: usize,
    pub detection: Option<Detection>,
    pub annulus: Option<AnnulusReport>,
    pub error: Option<ErrorReport>,
    pub verification: Option<Verification>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnulusReport {
    pub zero_count: usize,
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub inner_counts_r: Vec<usize>,
    #[serde(rename = "inner_counts_R")]
    pub inner_counts_big_r: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterates_r: Option<Vec<f64>>,
    #[serde(
        default,
        rename = "iterates_R",
        skip_serializing_if = "Option::is_none"
    )]
    pub iterates_big_r: Option<Vec<f64>>,
}

impl AnnulusReport {
    pub fn new(res: &AnnulusResult, trace: bool) -> Self {
        Self {
            zero_count: res.zero_count,
            r: res.inner_radius,
            big_r: res.outer_radius,
            inner_counts_r: res.inner_solves.clone(),
            inner_counts_big_r: res.outer_solves.clone(),
            iterates_r: trace.then(|| res.inner_iterates.clone()),
            iterates_big_r: trace.then(|| res.outer_iterates.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    pub numerical: bool,
}

impl From<&PelletError> for ErrorReport {
    fn from(e: &PelletError) -> Self {
        let kind = match e {
            PelletError::IterationLimit { .. } => "iteration_limit",
            PelletError::NonMonotone { .. } => "non_monotone",
            PelletError::NegativeDiscriminant { .. } => "negative_discriminant",
            PelletError::NoSignChange { .. } => "no_sign_change",
            PelletError::SingularMatrix { .. } => "singular_matrix",
            PelletError::OracleNotConverged { .. } => "oracle_not_converged",
            PelletError::InvalidStartingPoint { .. } => "invalid_starting_point",
            PelletError::NoSeparation { .. } => "no_separation",
            _ => "invalid_input",
        };
        Self {
            kind: kind.to_string(),
            message: e.to_string(),
            numerical: e.is_numerical(),
        }
    }
}

/// Oracle cross-check of one annulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub expected_inside: usize,
    pub roots_inside: usize,
    pub roots_outside: usize,
    pub roots_between: usize,
    pub consistent: bool,
    pub root_residual: f64,
    pub sweeps: usize,
    pub reference_r: f64,
    #[serde(rename = "reference_R")]
    pub reference_big_r: f64,
}

fn fmt_existence(e: Existence) -> &'static str {
    match e {
        Existence::Yes => "yes",
        Existence::No => "no",
        Existence::Indeterminate => "indeterminate",
    }
}

pub fn norm_name(kind: NormKind) -> &'static str {
    match kind {
        NormKind::One => "one",
        NormKind::Infinity => "inf",
        NormKind::Two => "two",
    }
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

impl Report {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let problem = match &self.problem {
            Problem::Polynomial { degree } => format!("polynomial of degree {degree}"),
            Problem::Matrix { degree, dim, norm } => {
                format!(
                    "{dim}x{dim} matrix polynomial of degree {degree}, {} norm",
                    norm_name(*norm)
                )
            }
        };
        let _ = writeln!(out, "input: {} ({problem})", self.input.path);
        let _ = writeln!(out, "sha256: {}", self.input.sha256);
        let _ = writeln!(out, "tolerance: {:e}", self.tolerance);
        if let Some(c) = &self.candidates {
            let listed = if c.is_empty() {
                "none".to_string()
            } else {
                join(c)
            };
            let _ = writeln!(out, "candidates: {listed}");
        }
        for r in &self.results {
            let _ = write!(out, "k = {}:", r.k);
            if let Some(d) = &r.detection {
                let _ = writeln!(
                    out,
                    " {}  x* = {:.12}  threshold = {:.12}  margin = {:.6e}  ({} Newton steps)",
                    fmt_existence(d.exists),
                    d.x_star,
                    d.threshold,
                    d.margin,
                    d.chi_newton_steps
                );
            } else {
                let _ = writeln!(out);
            }
            if let Some(a) = &r.annulus {
                let _ = writeln!(
                    out,
                    "  r = {:.15}  R = {:.15}  ({} zeros in |z| <= r)",
                    a.r, a.big_r, a.zero_count
                );
                let _ = writeln!(
                    out,
                    "  outer steps: r {} [{}], R {} [{}]",
                    a.inner_counts_r.len(),
                    join(&a.inner_counts_r),
                    a.inner_counts_big_r.len(),
                    join(&a.inner_counts_big_r)
                );
                if let Some(it) = &a.iterates_r {
                    let _ = writeln!(out, "  iterates r: {}", join(it));
                }
                if let Some(it) = &a.iterates_big_r {
                    let _ = writeln!(out, "  iterates R: {}", join(it));
                }
            }
            if let Some(v) = &r.verification {
                let _ = writeln!(
                    out,
                    "  verify: {} roots in |z| <= r, {} in |z| >= R, {} between (expected {}): {}",
                    v.roots_inside,
                    v.roots_outside,
                    v.roots_between,
                    v.expected_inside,
                    if v.consistent { "ok" } else { "MISMATCH" }
                );
                let _ = writeln!(
                    out,
                    "  bisection: r = {:.15}  R = {:.15}",
                    v.reference_r, v.reference_big_r
                );
            }
            if let Some(e) = &r.error {
                let _ = writeln!(out, "  error ({}): {}", e.kind, e.message);
            }
        }
        let _ = writeln!(out, "time: {:.3} ms", self.timing_ms);
        out
    }
}
