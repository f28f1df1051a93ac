use std::path::Path;
use std::time::Instant;

use pellet::detection::Existence;
use pellet::matrix::{
    analyze_matrix_k, matrix_candidate_ks, matrix_pellet_instance, MatrixAnalysis,
};
use pellet::oracle::{
    all_roots, count_in_disk, count_in_open_annulus, count_outside_disk, det_polynomial_2x2,
    reference_radii, RootSet,
};
use pellet::polygon::{analyze_k, candidate_ks, KAnalysis};
use pellet::{
    AnnulusResult, MatrixPolynomial, NormKind, PelletError, PelletInstance, Polynomial,
    SolverOptions,
};
use sha2::{Digest, Sha256};

use crate::report::{
    AnnulusReport, ErrorReport, InputInfo, KReport, Problem, Report, Verification,
};

/// Roots within this relative distance of a circle count as on it. Multiple
/// roots (eigenvalues of diagonal problems) only come out of the oracle to
/// about the square root of the unit roundoff.
const COUNT_SLACK: f64 = 1e-6;
const TOOL: &str = "pellet";
const ORACLE_TOL: f64 = 1e-14;
const REFERENCE_TOL: f64 = 1e-15;

/// Failure that ends the run before a report exists.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Numerical(String),
}

impl From<PelletError> for Failure {
    fn from(e: PelletError) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

pub struct Input {
    pub text: String,
    pub info: InputInfo,
}

pub fn read_input(path: &Path) -> Result<Input, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))?;
    let sha256 = hex::encode(Sha256::digest(&bytes));
    let text = String::from_utf8(bytes)
        .map_err(|_| Failure::Input(format!("{} is not UTF-8", path.display())))?;
    Ok(Input {
        text,
        info: InputInfo {
            path: path.display().to_string(),
            sha256,
        },
    })
}

#[derive(Debug, Clone, Copy)]
pub enum Selection {
    Single(usize),
    All,
}

#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub selection: Selection,
    pub solver: SolverOptions,
    pub verify: bool,
    pub trace: bool,
}

fn verification(
    roots: &RootSet,
    inst: &PelletInstance,
    x_star: f64,
    res: &AnnulusResult,
) -> Result<Verification, PelletError> {
    let (reference_r, reference_big_r) = reference_radii(inst, x_star, REFERENCE_TOL)?;
    let inside = count_in_disk(roots, res.inner_radius, COUNT_SLACK);
    let outside = count_outside_disk(roots, res.outer_radius, COUNT_SLACK);
    let between = count_in_open_annulus(roots, res.inner_radius, res.outer_radius, COUNT_SLACK);
    Ok(Verification {
        expected_inside: res.zero_count,
        roots_inside: inside,
        roots_outside: outside,
        roots_between: between,
        consistent: inside == res.zero_count
            && between == 0
            && inside + outside == roots.roots.len(),
        root_residual: roots.residual,
        sweeps: roots.sweeps,
        reference_r,
        reference_big_r,
    })
}

/// Turns one per-k analysis into its report entry.
fn k_report(
    k: usize,
    detection: &pellet::Result<pellet::Detection>,
    annulus: &Option<pellet::Result<AnnulusResult>>,
    instance: Option<&PelletInstance>,
    roots: Option<&pellet::Result<RootSet>>,
    opts: &RunOptions,
) -> KReport {
    let mut error = match (detection, annulus) {
        (Err(e), _) | (_, Some(Err(e))) => Some(ErrorReport::from(e)),
        _ => None,
    };
    let annulus_ok = annulus.as_ref().and_then(|a| a.as_ref().ok());
    let mut verify = None;
    if let (Some(res), Some(inst), Some(roots), Ok(d)) = (annulus_ok, instance, roots, detection) {
        match roots
            .as_ref()
            .map_err(Clone::clone)
            .and_then(|rs| verification(rs, inst, d.x_star, res))
        {
            Ok(v) => verify = Some(v),
            Err(e) => error = Some(ErrorReport::from(&e)),
        }
    }
    KReport {
        k,
        detection: detection.as_ref().ok().cloned(),
        annulus: annulus_ok.map(|a| AnnulusReport::new(a, opts.trace)),
        error,
        verification: verify,
    }
}

pub fn analyze_polynomial(input: &Input, opts: &RunOptions) -> Result<Report, Failure> {
    let start = Instant::now();
    let p = Polynomial::from_json(&input.text)?;
    let (ks, candidates) = match opts.selection {
        Selection::Single(k) => {
            // Reject an unusable index up front rather than reporting it per k.
            PelletInstance::from_polynomial(&p, k)?;
            (vec![k], None)
        }
        Selection::All => {
            let c = candidate_ks(&p)?.candidates;
            (c.clone(), Some(c))
        }
    };
    let analyses: Vec<KAnalysis> = ks.iter().map(|&k| analyze_k(&p, k, &opts.solver)).collect();
    let roots = (opts.verify && analyses.iter().any(|a| a.separated().is_some()))
        .then(|| all_roots(&p, ORACLE_TOL));
    let results = analyses
        .iter()
        .map(|a| {
            let inst = PelletInstance::from_polynomial(&p, a.k).ok();
            k_report(
                a.k,
                &a.detection,
                &a.annulus,
                inst.as_ref(),
                roots.as_ref(),
                opts,
            )
        })
        .collect();
    Ok(Report {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        input: input.info.clone(),
        problem: Problem::Polynomial { degree: p.degree() },
        tolerance: opts.solver.tol,
        candidates,
        results,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn analyze_matrix(input: &Input, kind: NormKind, opts: &RunOptions) -> Result<Report, Failure> {
    let start = Instant::now();
    let poly = MatrixPolynomial::from_json(&input.text)?;
    let n = poly.degree();
    let (ks, candidates) = match opts.selection {
        Selection::Single(k) => {
            if k == 0 || k >= n {
                return Err(PelletError::IndexOutOfRange { k, max: n - 1 }.into());
            }
            (vec![k], None)
        }
        Selection::All => {
            let c = matrix_candidate_ks(&poly, kind)?;
            (c.clone(), Some(c))
        }
    };
    let analyses: Vec<MatrixAnalysis> = ks
        .iter()
        .map(|&k| analyze_matrix_k(&poly, k, kind, &opts.solver))
        .collect();
    let separated = analyses.iter().any(|a| matches!(&a.annulus, Some(Ok(_))));
    let roots = if opts.verify && separated {
        if poly.dim() == 2 {
            Some(det_polynomial_2x2(&poly).and_then(|d| all_roots(&d, ORACLE_TOL)))
        } else {
            eprintln!(
                "note: --verify needs 2x2 matrices; skipped for m = {}",
                poly.dim()
            );
            None
        }
    } else {
        None
    };
    let results = analyses
        .iter()
        .map(|a| {
            let inst = matrix_pellet_instance(&poly, a.k, kind).ok();
            k_report(
                a.k,
                &a.detection,
                &a.annulus,
                inst.as_ref(),
                roots.as_ref(),
                opts,
            )
        })
        .collect();
    Ok(Report {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        input: input.info.clone(),
        problem: Problem::Matrix {
            degree: n,
            dim: poly.dim(),
            norm: kind,
        },
        tolerance: opts.solver.tol,
        candidates,
        results,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Exit status for a finished report: 3 if any requested analysis failed
/// numerically or failed verification, 0 otherwise. A singular `A_k` found
/// while scanning all candidates only disqualifies that `k`.
pub fn exit_status(report: &Report, selection: Selection) -> i32 {
    let failed = report.results.iter().any(|r| {
        let bad_error = r.error.as_ref().is_some_and(|e| {
            e.numerical && !(matches!(selection, Selection::All) && e.kind == "singular_matrix")
        });
        let bad_check = r.verification.as_ref().is_some_and(|v| !v.consistent);
        bad_error || bad_check
    });
    if failed {
        3
    } else {
        0
    }
}

/// Verdicts that are neither yes nor no are worth a note on stderr.
pub fn diagnostics(report: &Report) -> Vec<String> {
    let mut notes = Vec::new();
    for r in &report.results {
        if let Some(d) = &r.detection {
            if d.exists == Existence::Indeterminate {
                notes.push(format!(
                    "k = {}: margin {:e} is within the tolerance band; verdict indeterminate",
                    r.k, d.margin
                ));
            }
        }
        if let Some(e) = &r.error {
            notes.push(format!("k = {}: {}", r.k, e.message));
        }
        if let Some(v) = &r.verification {
            if !v.consistent {
                notes.push(format!("k = {}: oracle counts contradict the annulus", r.k));
            }
        }
    }
    notes
}
