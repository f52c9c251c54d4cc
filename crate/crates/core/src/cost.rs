//! Squeezing cost of the two-squeezer factorization and its minimization
//! over the free diagonal entry gamma.
//!
//! The collaborators' map factors through diag(e^r1, e^r2, 1, ..), and the
//! total cost R = |r1| + |r2| depends on (alpha, beta, gamma) through the
//! eigenvalues of V' V'^T with V' = [[alpha, beta], [0, gamma]]. Everything
//! here works on those three scalars.

use crate::error::{Error, Result};
use crate::matlib::{svd_2x2, Tolerance};
use serde::Serialize;

/// Which shape the optimum takes, read off the signs of ln lambda at the
/// optimum: both on the same side of 1 (or one exactly 1) is the product
/// case, straddling 1 is the ratio case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CaseTag {
    #[serde(rename = "product_case_i")]
    ProductCaseI,
    #[serde(rename = "ratio_case_ii")]
    RatioCaseII,
}

/// Result of a cost minimization over gamma.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SqueezeCostResult {
    pub gamma0: f64,
    pub r_min: f64,
    pub case_tag: CaseTag,
    pub lambda1: f64,
    pub lambda2: f64,
}

fn check_params(alpha: f64, beta: f64, gamma: f64) -> Result<()> {
    if !(alpha.is_finite() && beta.is_finite() && gamma.is_finite()) {
        return Err(Error::NonFinite { context: "cost parameters".to_string() });
    }
    if alpha == 0.0 {
        return Err(Error::InvalidParam { context: "alpha = 0 admits no factorization".to_string() });
    }
    if gamma <= 0.0 {
        return Err(Error::InvalidParam { context: format!("gamma = {gamma} must be positive") });
    }
    Ok(())
}

/// Eigenvalues of V' V'^T, descending. Closed quadratic with trace
/// alpha^2 + beta^2 + gamma^2 and determinant (alpha gamma)^2; the smaller
/// root comes from the determinant to avoid cancellation.
pub fn eigenvalues(alpha: f64, beta: f64, gamma: f64) -> (f64, f64) {
    let t = alpha * alpha + beta * beta + gamma * gamma;
    let det = (alpha * gamma) * (alpha * gamma);
    let disc = (t * t - 4.0 * det).max(0.0).sqrt();
    let l1 = 0.5 * (t + disc);
    (l1, det / l1)
}

/// Total squeezing R = (|ln lambda1| + |ln lambda2|) / 2.
pub fn total_squeezing(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    check_params(alpha, beta, gamma)?;
    let (l1, l2) = eigenvalues(alpha, beta, gamma);
    Ok(0.5 * (l1.ln().abs() + l2.ln().abs()))
}

/// Same cost through the SVD route: |ln s1| + |ln s2| for the singular
/// values of V'. Dual-checks `total_squeezing`.
pub fn total_squeezing_svd(alpha: f64, beta: f64, gamma: f64) -> Result<f64> {
    check_params(alpha, beta, gamma)?;
    let svd = svd_2x2(&[[alpha, beta], [0.0, gamma]], Tolerance::default())?;
    Ok(svd.s1.ln().abs() + svd.s2.ln().abs())
}

/// The boundary value kappa = (1 - alpha^2 - beta^2) / (1 - alpha^2).
/// At gamma^2 = kappa one eigenvalue of V' V'^T equals 1 exactly.
pub fn kappa(alpha: f64, beta: f64) -> Result<f64> {
    let denom = 1.0 - alpha * alpha;
    if denom.abs() <= 1e-12 {
        return Err(Error::KappaUndefined);
    }
    Ok((1.0 - alpha * alpha - beta * beta) / denom)
}

fn case_tag_at(alpha: f64, beta: f64, gamma: f64) -> (CaseTag, f64, f64) {
    let (l1, l2) = eigenvalues(alpha, beta, gamma);
    let (g1, g2) = (l1.ln(), l2.ln());
    let tag = if g1.abs() <= 1e-9 || g2.abs() <= 1e-9 || g1 * g2 > 0.0 {
        CaseTag::ProductCaseI
    } else {
        CaseTag::RatioCaseII
    };
    (tag, l1, l2)
}

const GRID_POINTS: usize = 600;
const GRID_LO: f64 = 1e-3;
const GRID_HI: f64 = 1e3;
const GOLDEN_TOL: f64 = 1e-10;

fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > GOLDEN_TOL {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Grid scan over gamma in [1e-3, 1e3] (600 log-spaced points) followed by
/// golden-section refinement of the bracketing interval. Needs no case
/// analysis, so it serves as the reference for the analytic route. R(gamma)
/// diverges at both ends of the grid, which guarantees an interior bracket.
pub fn minimize_gamma_oracle(alpha: f64, beta: f64) -> Result<SqueezeCostResult> {
    check_params(alpha, beta, 1.0)?;
    let r = |g: f64| {
        let (l1, l2) = eigenvalues(alpha, beta, g);
        0.5 * (l1.ln().abs() + l2.ln().abs())
    };
    let gamma_at = |i: usize| {
        let e = -3.0 + 6.0 * (i as f64) / ((GRID_POINTS - 1) as f64);
        10.0f64.powf(e)
    };
    let mut best_i = 0;
    let mut best_r = f64::INFINITY;
    for i in 0..GRID_POINTS {
        let ri = r(gamma_at(i));
        if ri < best_r {
            best_r = ri;
            best_i = i;
        }
    }
    let lo = gamma_at(best_i.saturating_sub(1)).max(GRID_LO);
    let hi = gamma_at((best_i + 1).min(GRID_POINTS - 1)).min(GRID_HI);
    let gamma0 = golden_section_min(r, lo, hi);
    let (case_tag, lambda1, lambda2) = case_tag_at(alpha, beta, gamma0);
    Ok(SqueezeCostResult { gamma0, r_min: r(gamma0), case_tag, lambda1, lambda2 })
}

/// Closed-form minimization: evaluates the two candidate optima, the
/// stationary point gamma^2 = alpha^2 + beta^2 of the eigenvalue ratio and
/// the boundary point gamma^2 = kappa where an eigenvalue crosses 1, and
/// keeps the cheaper one. With alpha^2 = 1 kappa is undefined and only the
/// stationary candidate applies.
pub fn minimize_gamma_analytic(alpha: f64, beta: f64) -> Result<SqueezeCostResult> {
    check_params(alpha, beta, 1.0)?;
    let mut candidates = vec![(alpha * alpha + beta * beta).sqrt()];
    match kappa(alpha, beta) {
        Ok(k) if k > 0.0 => candidates.push(k.sqrt()),
        _ => {}
    }
    let mut best: Option<(f64, f64)> = None;
    for g in candidates {
        let r = total_squeezing(alpha, beta, g)?;
        if best.is_none_or(|(_, br)| r < br) {
            best = Some((g, r));
        }
    }
    let (gamma0, r_min) = best.expect("at least one candidate");
    let (case_tag, lambda1, lambda2) = case_tag_at(alpha, beta, gamma0);
    Ok(SqueezeCostResult { gamma0, r_min, case_tag, lambda1, lambda2 })
}

/// The two printed closed forms for the boundary-case minimum, evaluated at
/// gamma0 = sqrt(kappa): |ln(kappa |alpha|)| and |ln(|alpha| sqrt(kappa))|.
/// They disagree; `verify` records which one the oracle confirms.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundaryReadings {
    pub product_reading: f64,
    pub sqrt_reading: f64,
}

pub fn boundary_case_readings(alpha: f64, beta: f64) -> Result<BoundaryReadings> {
    let k = kappa(alpha, beta)?;
    if k <= 0.0 {
        return Err(Error::InvalidParam {
            context: format!("kappa = {k} <= 0 has no boundary point"),
        });
    }
    Ok(BoundaryReadings {
        product_reading: (k * alpha.abs()).ln().abs(),
        sqrt_reading: (alpha.abs() * k.sqrt()).ln().abs(),
    })
}

/// True when (alpha, beta) lies strictly inside a region whose optimum is
/// the boundary candidate gamma^2 = kappa.
pub fn in_boundary_case_region(alpha: f64, beta: f64) -> bool {
    let s = alpha * alpha + beta * beta;
    let Ok(k) = kappa(alpha, beta) else { return false };
    let upper = 1.0 + (beta * beta) / (alpha * alpha);
    (s < 1.0 && s < k) || (s > upper && s > k)
}

/// True when (alpha, beta) lies in a region whose optimum is the
/// stationary candidate gamma^2 = alpha^2 + beta^2.
pub fn in_ratio_case_region(alpha: f64, beta: f64) -> bool {
    let s = alpha * alpha + beta * beta;
    let upper = 1.0 + (beta * beta) / (alpha * alpha);
    let within = |lo: f64, hi: f64| s >= lo && s <= hi;
    match kappa(alpha, beta) {
        Ok(k) => within(1.0, upper) || within(k, 1.0) || within(upper, k),
        Err(_) => within(1.0, upper),
    }
}
