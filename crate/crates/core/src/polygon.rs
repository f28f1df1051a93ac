//! Newton polygon screening of the index `k`.
//!
//! Separation at `k` is only possible when `(k, log|a_k|)` is a vertex of the
//! upper convex hull of the points `(j, log|a_j|)`, so only those abscissae
//! need the full analysis.

use serde::{Deserialize, Serialize};

use crate::detection::{detect, Detection, Existence};
use crate::error::{PelletError, Result};
use crate::poly::{PelletInstance, Polynomial};
use crate::solver::{pellet_annulus_with, AnnulusResult, SolverOptions};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolygonCandidates {
    /// `(j, log|a_j|)` for every nonzero coefficient.
    pub support: Vec<(usize, f64)>,
    /// Abscissae of the strict upper hull, ascending.
    pub vertices: Vec<usize>,
    /// Interior vertices, `1 <= k <= n - 1`.
    pub candidates: Vec<usize>,
}

/// Upper hull of points sorted by abscissa; collinear points are dropped.
fn upper_hull(points: &[(usize, f64)]) -> Vec<usize> {
    let mut hull: Vec<(usize, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.0 - o.0) as f64 * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0) as f64;
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull.into_iter().map(|(j, _)| j).collect()
}

/// Candidate indices from nonnegative coefficient moduli `|a_0|..|a_n|`.
pub fn candidate_ks_from_moduli(moduli: &[f64]) -> Result<PolygonCandidates> {
    let n = moduli
        .len()
        .checked_sub(1)
        .ok_or(PelletError::EmptyPolynomial)?;
    if moduli[0] == 0.0 {
        return Err(PelletError::ZeroCoefficient { index: 0 });
    }
    if moduli[n] == 0.0 {
        return Err(PelletError::ZeroLeadingCoefficient);
    }
    let support: Vec<(usize, f64)> = moduli
        .iter()
        .enumerate()
        .filter(|&(_, &m)| m != 0.0)
        .map(|(j, &m)| (j, m.max(f64::MIN_POSITIVE).ln()))
        .collect();
    let vertices = upper_hull(&support);
    let candidates = vertices
        .iter()
        .copied()
        .filter(|&j| j >= 1 && j < n)
        .collect();
    Ok(PolygonCandidates {
        support,
        vertices,
        candidates,
    })
}

pub fn candidate_ks(p: &Polynomial) -> Result<PolygonCandidates> {
    candidate_ks_from_moduli(&p.moduli())
}

/// Outcome of the pipeline at one index.
#[derive(Debug, Clone, PartialEq)]
pub struct KAnalysis {
    pub k: usize,
    pub detection: Result<Detection>,
    /// Present when detection said yes.
    pub annulus: Option<Result<AnnulusResult>>,
}

impl KAnalysis {
    pub fn separated(&self) -> Option<&AnnulusResult> {
        self.annulus.as_ref().and_then(|a| a.as_ref().ok())
    }

    pub fn error(&self) -> Option<&PelletError> {
        match (&self.detection, &self.annulus) {
            (Err(e), _) | (_, Some(Err(e))) => Some(e),
            _ => None,
        }
    }
}

/// Detection followed by the radii computation for one index.
pub fn analyze_k(p: &Polynomial, k: usize, opts: &SolverOptions) -> KAnalysis {
    let inst = match PelletInstance::from_polynomial(p, k) {
        Ok(inst) => inst,
        Err(e) => {
            return KAnalysis {
                k,
                detection: Err(e),
                annulus: None,
            }
        }
    };
    analyze_instance(&inst, opts)
}

pub fn analyze_instance(inst: &PelletInstance, opts: &SolverOptions) -> KAnalysis {
    let detection = detect(inst, opts.tol);
    let annulus = match &detection {
        Ok(d) if d.exists == Existence::Yes => Some(pellet_annulus_with(inst, d.x_star, opts)),
        _ => None,
    };
    KAnalysis {
        k: inst.k(),
        detection,
        annulus,
    }
}

/// Runs the pipeline at every Newton polygon candidate, in increasing `k`.
pub fn analyze_all(p: &Polynomial, tol: f64) -> Result<Vec<KAnalysis>> {
    analyze_all_with(p, &SolverOptions::with_tol(tol))
}

pub fn analyze_all_with(p: &Polynomial, opts: &SolverOptions) -> Result<Vec<KAnalysis>> {
    let cands = candidate_ks(p)?;
    Ok(cands
        .candidates
        .iter()
        .map(|&k| analyze_k(p, k, opts))
        .collect())
}
