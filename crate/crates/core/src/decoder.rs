//! Collaborator-side reconstruction: build the joint transform T that
//! concentrates the secret onto one output mode while decoupling it from
//! every non-collaborating mode, then factor T into passive stage, two
//! single-mode squeezers, passive stage.
//!
//! Coordinates: the first canonical column is the secret input, columns
//! 2..k the first ancilla class, columns k+1..2k-1 the second. A share row
//! g_i splits into its first-k part (kappa or zeta) and its trailing part
//! (lambda or gamma). Everything here is 0-based; user-facing 1-based
//! labels are the CLI's concern.

use crate::cost;
use crate::error::{Error, Result};
use crate::gaussian::{apply, point_transform_symplectic, reduce, GaussianState};
use crate::matlib::{dot, norm, null_space_1d, orthonormal_complete, svd_2x2, Matrix, Tolerance};
use crate::scheme::{EncodingMatrix, SchemeView};
use serde::{Deserialize, Serialize};

/// Absolute bound on the realized-system invariants (unit secret
/// coefficient, vanishing first-class noise row, span condition).
pub const XI_EPS: f64 = 1e-9;

/// Bound on the factorization reconstruction residual.
pub const RECONSTRUCTION_EPS: f64 = 1e-10;

/// Coordinate restriction of the encoding rows for one collaborating
/// subset. Collaborator rows are relabeled to slots 1..k in ascending
/// index order; all remaining canonical modes form the complement,
/// whether held by adversaries or discarded.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceSplit {
    k: usize,
    collaborators: Vec<usize>,
    complement: Vec<usize>,
    kappa: Matrix,
    lambda: Matrix,
    zeta_adv: Matrix,
    gamma_adv: Matrix,
}

impl SubspaceSplit {
    pub fn k(&self) -> usize {
        self.k
    }

    /// Sorted 0-based collaborator indices.
    pub fn collaborators(&self) -> &[usize] {
        &self.collaborators
    }

    /// Ascending complement of the collaborators among canonical modes.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    /// First-k columns of the collaborator rows, k x k.
    pub fn kappa(&self) -> &Matrix {
        &self.kappa
    }

    /// Trailing columns of the collaborator rows, k x (k-1).
    pub fn lambda(&self) -> &Matrix {
        &self.lambda
    }

    /// First-k columns of the complement rows, (k-1) x k.
    pub fn zeta_adv(&self) -> &Matrix {
        &self.zeta_adv
    }

    /// Trailing columns of the complement rows, (k-1) x (k-1).
    pub fn gamma_adv(&self) -> &Matrix {
        &self.gamma_adv
    }
}

fn check_subset(collaborators: &[usize], k: usize, n: usize) -> Result<Vec<usize>> {
    if collaborators.len() != k {
        return Err(Error::BadSubset {
            context: format!("need {k} collaborators, got {}", collaborators.len()),
        });
    }
    let mut sorted = collaborators.to_vec();
    sorted.sort_unstable();
    for pair in sorted.windows(2) {
        if pair[0] == pair[1] {
            return Err(Error::BadSubset { context: format!("duplicate index {}", pair[0]) });
        }
    }
    if let Some(&bad) = sorted.iter().find(|&&c| c >= n) {
        return Err(Error::BadIndex { index: bad, bound: n });
    }
    Ok(sorted)
}

fn split_rows(g: &Matrix, k: usize, collaborators: &[usize]) -> Result<SubspaceSplit> {
    let n = g.rows();
    let sorted = check_subset(collaborators, k, n)?;
    let complement: Vec<usize> = (0..n).filter(|i| !sorted.contains(i)).collect();
    let kappa = Matrix::from_fn(k, k, |i, j| g[(sorted[i], j)]);
    let lambda = Matrix::from_fn(k, k - 1, |i, j| g[(sorted[i], k + j)]);
    let zeta_adv = Matrix::from_fn(k - 1, k, |i, j| g[(complement[i], j)]);
    let gamma_adv = Matrix::from_fn(k - 1, k - 1, |i, j| g[(complement[i], k + j)]);
    Ok(SubspaceSplit { k, collaborators: sorted, complement, kappa, lambda, zeta_adv, gamma_adv })
}

/// Splits the encoding rows for one collaborating subset. Order of the
/// given indices does not matter; the split is canonicalized.
pub fn split(enc: &EncodingMatrix, collaborators: &[usize]) -> Result<SubspaceSplit> {
    split_rows(enc.matrix(), enc.k(), collaborators)
}

/// The orthogonal frame underlying T, together with the expansion of the
/// recovery row in it.
#[derive(Debug, Clone)]
pub struct DecodeFrame {
    /// Unit vector spanning the orthogonal complement of the complement
    /// rows' first-k parts.
    pub v: Vec<f64>,
    /// Row vector a with sum_j a_j kappa_j = e1; applied to the
    /// collaborator shares it recovers the secret quadrature exactly.
    pub recovery: Vec<f64>,
    /// k x k orthogonal matrix; row 1 is kappa v normalized, row 2 spans
    /// the rest of the recovery row, remaining rows complete the basis.
    pub w: Matrix,
    /// recovery . w1
    pub alpha: f64,
    /// recovery . w2, zero in the degenerate aligned case
    pub beta: f64,
}

/// Computes the frame: v from the null space of the complement block, the
/// recovery row from the collaborator block, then W1 along kappa v and W2
/// along the leftover of the recovery row. When the recovery row is
/// already parallel to W1 the leftover vanishes; W2 is then the first
/// deterministic completion vector and beta is exactly zero.
pub fn frame(sp: &SubspaceSplit, tol: Tolerance) -> Result<DecodeFrame> {
    let k = sp.k;
    let v = null_space_1d(&sp.zeta_adv, tol)?;
    let mut e1 = vec![0.0; k];
    e1[0] = 1.0;
    let recovery = sp.kappa.transpose().solve(&e1, tol)?;
    let kv = sp.kappa.mul_vec(&v)?;
    let kv_norm = norm(&kv);
    if kv_norm <= tol.rank_eps {
        return Err(Error::RankDeficient {
            context: "kappa annihilates the complement null vector".to_string(),
        });
    }
    let w1: Vec<f64> = kv.iter().map(|x| x / kv_norm).collect();
    let alpha = dot(&recovery, &w1);
    let resid: Vec<f64> =
        recovery.iter().zip(&w1).map(|(a_j, w_j)| a_j - alpha * w_j).collect();
    let resid_norm = norm(&resid);
    let degenerate = resid_norm <= tol.rank_eps * norm(&recovery).max(1.0);
    let (w, beta) = if degenerate {
        let w = orthonormal_complete(&Matrix::from_rows(std::slice::from_ref(&w1))?, tol)?;
        (w, 0.0)
    } else {
        let w2: Vec<f64> = resid.iter().map(|x| x / resid_norm).collect();
        let w = orthonormal_complete(&Matrix::from_rows(&[w1.clone(), w2])?, tol)?;
        (w, resid_norm)
    };
    Ok(DecodeFrame { v, recovery, w, alpha, beta })
}

fn expander(k: usize, alpha: f64, beta: f64, gamma_free: f64) -> Matrix {
    Matrix::from_fn(k, k, |i, j| match (i, j) {
        (0, 0) => alpha,
        (0, 1) => beta,
        (1, 1) => gamma_free,
        _ if i == j => 1.0,
        _ => 0.0,
    })
}

fn check_gamma_free(gamma_free: f64) -> Result<()> {
    if !gamma_free.is_finite() || gamma_free == 0.0 {
        return Err(Error::InvalidParam {
            context: format!("gamma_free = {gamma_free} must be finite and nonzero"),
        });
    }
    Ok(())
}

/// Builds the joint collaborator transform T for a chosen free parameter.
/// Row 1 of T is the recovery row; rows 2..k are orthogonal to kappa v,
/// which decouples the output from every complement mode.
pub fn build_t(sp: &SubspaceSplit, gamma_free: f64, tol: Tolerance) -> Result<(Matrix, f64, f64)> {
    check_gamma_free(gamma_free)?;
    let fr = frame(sp, tol)?;
    let t = expander(sp.k, fr.alpha, fr.beta, gamma_free).mul(&fr.w)?;
    Ok((t, fr.alpha, fr.beta))
}

/// The factored transform: T = x_hat . diag(e^r1, e^r2, 1, ..) . z with
/// z and x_hat orthogonal. At most two diagonal entries of the middle
/// factor differ from 1, whatever k is.
#[derive(Debug, Clone, PartialEq)]
pub struct DisentanglingPlan {
    t: Matrix,
    z: Matrix,
    x2: [[f64; 2]; 2],
    r1: f64,
    r2: f64,
    gamma_free: f64,
    alpha: f64,
    beta: f64,
}

#[derive(Serialize, Deserialize)]
struct PlanDoc {
    gamma_free: f64,
    alpha: f64,
    beta: f64,
    r1: f64,
    r2: f64,
    #[serde(rename = "T")]
    t: Vec<Vec<f64>>,
    #[serde(rename = "Z")]
    z: Vec<Vec<f64>>,
    #[serde(rename = "X2")]
    x2: [[f64; 2]; 2],
}

impl DisentanglingPlan {
    pub fn k(&self) -> usize {
        self.t.rows()
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    /// First passive stage, k x k orthogonal.
    pub fn z(&self) -> &Matrix {
        &self.z
    }

    /// Second passive stage restricted to modes 1 and 2.
    pub fn x2(&self) -> &[[f64; 2]; 2] {
        &self.x2
    }

    pub fn r1(&self) -> f64 {
        self.r1
    }

    pub fn r2(&self) -> f64 {
        self.r2
    }

    pub fn gamma_free(&self) -> f64 {
        self.gamma_free
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// |r1| + |r2|, the squeezing spent by this plan.
    pub fn total_squeezing(&self) -> f64 {
        self.r1.abs() + self.r2.abs()
    }

    /// The second passive stage embedded in k modes.
    pub fn x_hat(&self) -> Matrix {
        let k = self.k();
        Matrix::from_fn(k, k, |i, j| {
            if i < 2 && j < 2 {
                self.x2[i][j]
            } else if i == j {
                1.0
            } else {
                0.0
            }
        })
    }

    /// Middle factor diag(e^r1, e^r2, 1, ..).
    pub fn middle(&self) -> Matrix {
        let k = self.k();
        Matrix::from_fn(k, k, |i, j| match (i, j) {
            (0, 0) => self.r1.exp(),
            (1, 1) => self.r2.exp(),
            _ if i == j => 1.0,
            _ => 0.0,
        })
    }

    /// Number of middle-factor diagonal entries away from 1.
    pub fn squeezer_count(&self, eps: f64) -> usize {
        self.middle()
            .to_rows()
            .iter()
            .enumerate()
            .filter(|(i, row)| (row[*i] - 1.0).abs() > eps)
            .count()
    }

    pub fn reconstruct(&self) -> Result<Matrix> {
        self.x_hat().mul(&self.middle())?.mul(&self.z)
    }

    pub fn reconstruction_residual(&self) -> Result<f64> {
        Ok(self.reconstruct()?.max_abs_diff(&self.t))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidParam { context: format!("plan serialize: {e}") })
    }

    pub fn from_json(s: &str) -> Result<DisentanglingPlan> {
        let doc: PlanDoc = serde_json::from_str(s)
            .map_err(|e| Error::InvalidParam { context: format!("plan parse: {e}") })?;
        Self::from_doc(doc, Tolerance::default())
    }

    fn from_doc(doc: PlanDoc, tol: Tolerance) -> Result<DisentanglingPlan> {
        let t = Matrix::from_rows(&doc.t)?;
        let z = Matrix::from_rows(&doc.z)?;
        let k = t.rows();
        if k < 2 || t.cols() != k || z.rows() != k || z.cols() != k {
            return Err(Error::DimensionMismatch {
                context: format!("plan matrices must be square k x k with k >= 2, got T {}x{}", t.rows(), t.cols()),
            });
        }
        for val in [doc.gamma_free, doc.alpha, doc.beta, doc.r1, doc.r2]
            .into_iter()
            .chain(doc.x2.iter().flatten().copied())
        {
            if !val.is_finite() {
                return Err(Error::NonFinite { context: "plan scalars".to_string() });
            }
        }
        let plan = DisentanglingPlan {
            t,
            z,
            x2: doc.x2,
            r1: doc.r1,
            r2: doc.r2,
            gamma_free: doc.gamma_free,
            alpha: doc.alpha,
            beta: doc.beta,
        };
        plan.validate(tol)?;
        Ok(plan)
    }

    fn validate(&self, tol: Tolerance) -> Result<()> {
        check_orthogonal(&self.z, tol.ortho_eps)?;
        check_orthogonal(&self.x_hat(), tol.ortho_eps)?;
        let resid = self.reconstruction_residual()?;
        if resid > RECONSTRUCTION_EPS {
            return Err(Error::InvalidParam {
                context: format!("plan reconstruction residual {resid:e}"),
            });
        }
        Ok(())
    }
}

impl Serialize for DisentanglingPlan {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        PlanDoc {
            gamma_free: self.gamma_free,
            alpha: self.alpha,
            beta: self.beta,
            r1: self.r1,
            r2: self.r2,
            t: self.t.to_rows(),
            z: self.z.to_rows(),
            x2: self.x2,
        }
        .serialize(ser)
    }
}

fn check_orthogonal(m: &Matrix, eps: f64) -> Result<()> {
    let gram = m.mul(&m.transpose()).expect("square");
    let dev = gram.max_abs_diff(&Matrix::identity(m.rows()));
    if dev > eps {
        return Err(Error::NotOrthonormal { deviation: dev });
    }
    Ok(())
}

/// Factors T through two single-mode squeezers: an SVD of the top-left
/// 2 x 2 expander gives T = x2 diag(s1, s2) y2 on the first two rows of W,
/// identity elsewhere; the orthogonal leftovers fold into the passive
/// stages.
pub fn factor(
    t: &Matrix,
    alpha: f64,
    beta: f64,
    gamma_free: f64,
    w: &Matrix,
    tol: Tolerance,
) -> Result<DisentanglingPlan> {
    check_gamma_free(gamma_free)?;
    let k = w.rows();
    let svd = svd_2x2(&[[alpha, beta], [0.0, gamma_free]], tol)?;
    let y_hat = Matrix::from_fn(k, k, |i, j| {
        if i < 2 && j < 2 {
            svd.y[i][j]
        } else if i == j {
            1.0
        } else {
            0.0
        }
    });
    let z = y_hat.mul(w)?;
    let plan = DisentanglingPlan {
        t: t.clone(),
        z,
        x2: svd.x,
        r1: svd.s1.ln(),
        r2: svd.s2.ln(),
        gamma_free,
        alpha,
        beta,
    };
    plan.validate(tol)?;
    Ok(plan)
}

/// One-shot plan construction for a collaborating subset of a view.
/// gamma None picks the squeezing-optimal free parameter.
pub fn plan_for(
    view: &SchemeView,
    collaborators: &[usize],
    gamma: Option<f64>,
    tol: Tolerance,
) -> Result<(DisentanglingPlan, DecodeFrame)> {
    check_available(view, collaborators)?;
    let sp = split(view.encoding(), collaborators)?;
    let fr = frame(&sp, tol)?;
    let gamma_free = match gamma {
        Some(g) => {
            check_gamma_free(g)?;
            g
        }
        None => cost::minimize_gamma_analytic(fr.alpha, fr.beta)?.gamma0,
    };
    let t = expander(sp.k, fr.alpha, fr.beta, gamma_free).mul(&fr.w)?;
    let plan = factor(&t, fr.alpha, fr.beta, gamma_free, &fr.w, tol)?;
    Ok((plan, fr))
}

fn check_available(view: &SchemeView, collaborators: &[usize]) -> Result<()> {
    if let Some(&c) = collaborators.iter().find(|c| view.dropped().contains(c)) {
        return Err(Error::BadSubset { context: format!("share {c} was discarded") });
    }
    Ok(())
}

/// The realized linear system after the collaborators apply T: rows 1..k
/// are T times the collaborator rows, later rows are the untouched
/// complement rows.
#[derive(Debug, Clone, PartialEq)]
pub struct XiSystem {
    k: usize,
    xi: Matrix,
}

impl XiSystem {
    pub fn build(
        g: &Matrix,
        collaborators: &[usize],
        complement: &[usize],
        t: &Matrix,
    ) -> Result<XiSystem> {
        let k = collaborators.len();
        let n = g.rows();
        let mut rows = Vec::with_capacity(n);
        for i in 0..k {
            let mut row = vec![0.0; n];
            for (j, &c) in collaborators.iter().enumerate() {
                let g_row = g.row(c);
                let w = t[(i, j)];
                for (acc, &x) in row.iter_mut().zip(g_row) {
                    *acc += w * x;
                }
            }
            rows.push(row);
        }
        for &adv in complement {
            rows.push(g.row(adv).to_vec());
        }
        Ok(XiSystem { k, xi: Matrix::from_rows(&rows)? })
    }

    /// Wraps an explicit realized system. Rows and columns follow the
    /// canonical layout: 2k-1 of each.
    pub fn from_matrix(k: usize, xi: Matrix) -> Result<XiSystem> {
        if k < 2 || xi.rows() != 2 * k - 1 || xi.cols() != 2 * k - 1 {
            return Err(Error::DimensionMismatch {
                context: format!("realized system must be (2k-1) square, got {}x{} for k = {k}", xi.rows(), xi.cols()),
            });
        }
        xi.check_finite("realized system")?;
        Ok(XiSystem { k, xi })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.xi.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.xi
    }

    /// Secret coefficient of row i.
    pub fn alpha(&self, i: usize) -> f64 {
        self.xi[(i, 0)]
    }

    /// First-class ancilla coefficients of row i, length k-1.
    pub fn beta(&self, i: usize) -> &[f64] {
        &self.xi.row(i)[1..self.k]
    }

    /// Second-class ancilla coefficients of row i, length k-1.
    pub fn gamma(&self, i: usize) -> &[f64] {
        &self.xi.row(i)[self.k..]
    }

    /// First-k part of row i.
    pub fn zeta(&self, i: usize) -> &[f64] {
        &self.xi.row(i)[..self.k]
    }

    /// Checks the realized-system invariants: unit secret coefficient and
    /// no first-class noise on row 1, and rows 2..k orthogonal to v.
    pub fn validate_against(&self, v: &[f64]) -> Result<()> {
        let a1 = (self.alpha(0) - 1.0).abs();
        if a1 > XI_EPS {
            return Err(Error::InvalidParam {
                context: format!("secret coefficient off by {a1:e}"),
            });
        }
        let b1 = self.beta(0).iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if b1 > XI_EPS {
            return Err(Error::InvalidParam {
                context: format!("first-class noise row residual {b1:e}"),
            });
        }
        for i in 1..self.k {
            let s = dot(self.zeta(i), v).abs();
            if s > XI_EPS {
                return Err(Error::InvalidParam {
                    context: format!("span condition violated on row {i}: {s:e}"),
                });
            }
        }
        Ok(())
    }
}

/// Everything the collaborators produce: the single-mode replica state,
/// the factored plan that realizes it, and the linear system it induces.
#[derive(Debug, Clone)]
pub struct Replication {
    pub replica: GaussianState,
    pub plan: DisentanglingPlan,
    pub xi: XiSystem,
    pub collaborators: Vec<usize>,
}

/// Runs the whole collaborator pipeline on an encoded state: plan, full
///-space map (T on collaborator slots, identity elsewhere), reduction to
/// the lowest collaborator mode.
pub fn replicate(
    view: &SchemeView,
    collaborators: &[usize],
    secret_mean: (f64, f64),
    a: f64,
    gamma: Option<f64>,
    tol: Tolerance,
) -> Result<Replication> {
    let (plan, fr) = plan_for(view, collaborators, gamma, tol)?;
    let sp = split(view.encoding(), collaborators)?;
    let xi = XiSystem::build(view.encoding().matrix(), sp.collaborators(), sp.complement(), plan.t())?;
    xi.validate_against(&fr.v)?;
    let n = view.encoding().n();
    let mut full = Matrix::identity(n);
    for (i, &ci) in sp.collaborators().iter().enumerate() {
        for (j, &cj) in sp.collaborators().iter().enumerate() {
            full[(ci, cj)] = plan.t()[(i, j)];
        }
    }
    let map = point_transform_symplectic(&full, tol)?;
    let encoded = view.encode(secret_mean, a)?;
    let out = apply(&map, &encoded)?;
    let replica = reduce(&out, &[sp.collaborators()[0]])?;
    Ok(Replication { replica, plan, xi, collaborators: sp.collaborators().to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::overlap_with_coherent;
    use crate::scheme::{random_encoding, ThresholdParams};
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn canonical_view(k: usize, seed: u64) -> SchemeView {
        random_encoding(ThresholdParams::canonical(k).unwrap(), seed).unwrap()
    }

    #[test]
    fn split_restricts_coordinates_exactly() {
        let view = canonical_view(3, 1);
        let g = view.encoding().matrix();
        let sp = split(view.encoding(), &[4, 0, 2]).unwrap();
        assert_eq!(sp.collaborators(), &[0, 2, 4]);
        assert_eq!(sp.complement(), &[1, 3]);
        for (i, &c) in sp.collaborators().iter().enumerate() {
            let mut rebuilt = sp.kappa().row(i).to_vec();
            rebuilt.extend_from_slice(sp.lambda().row(i));
            assert_eq!(rebuilt.as_slice(), g.row(c));
        }
        for (i, &adv) in sp.complement().iter().enumerate() {
            let mut rebuilt = sp.zeta_adv().row(i).to_vec();
            rebuilt.extend_from_slice(sp.gamma_adv().row(i));
            assert_eq!(rebuilt.as_slice(), g.row(adv));
        }
    }

    #[test]
    fn split_is_permutation_invariant() {
        let view = canonical_view(3, 5);
        let a = split(view.encoding(), &[0, 2, 4]).unwrap();
        let b = split(view.encoding(), &[4, 2, 0]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn split_rejects_bad_subsets() {
        let view = canonical_view(2, 0);
        assert!(matches!(
            split(view.encoding(), &[0]),
            Err(Error::BadSubset { .. })
        ));
        assert!(matches!(
            split(view.encoding(), &[1, 1]),
            Err(Error::BadSubset { .. })
        ));
        assert!(matches!(
            split(view.encoding(), &[0, 3]),
            Err(Error::BadIndex { index: 3, bound: 3 })
        ));
    }

    #[test]
    fn aligned_recovery_row_needs_one_squeezer() {
        // complement restriction (0,1) forces v = (1,0); with kappa = I the
        // recovery row lands on w1 exactly, so beta degenerates to zero
        let g = Matrix::from_rows(&[
            vec![1.0, 0.0, 0.5],
            vec![0.0, 1.0, 0.3],
            vec![0.0, 1.0, 0.7],
        ])
        .unwrap();
        let sp = split_rows(&g, 2, &[0, 1]).unwrap();
        let fr = frame(&sp, tol()).unwrap();
        assert_eq!(fr.v, vec![1.0, 0.0]);
        assert!((fr.alpha - 1.0).abs() < 1e-12);
        assert_eq!(fr.beta, 0.0);
        let (t, alpha, beta) = build_t(&sp, 2.0, tol()).unwrap();
        assert_eq!(t.row(0), &[1.0, 0.0]);
        assert_eq!(t.row(1), &[0.0, 2.0]);
        let plan = factor(&t, alpha, beta, 2.0, &fr.w, tol()).unwrap();
        assert_eq!(plan.squeezer_count(1e-12), 1);
        assert!((plan.total_squeezing() - 2.0f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn factor_ratio_fixture() {
        // expander (0.6, 0.8, 1) against the identity frame costs ln 3
        let w = Matrix::identity(2);
        let t = expander(2, 0.6, 0.8, 1.0);
        let plan = factor(&t, 0.6, 0.8, 1.0, &w, tol()).unwrap();
        assert!((plan.r1() - 0.5 * 1.8f64.ln()).abs() < 1e-12);
        assert!((plan.r2() - 0.5 * 0.2f64.ln()).abs() < 1e-12);
        assert!((plan.total_squeezing() - 3.0f64.ln()).abs() < 1e-12);
        assert!(plan.reconstruction_residual().unwrap() <= 1e-12);
    }

    #[test]
    fn gamma_free_must_be_nonzero() {
        let view = canonical_view(2, 3);
        let sp = split(view.encoding(), &[0, 1]).unwrap();
        assert!(matches!(build_t(&sp, 0.0, tol()), Err(Error::InvalidParam { .. })));
        assert!(matches!(
            plan_for(&view, &[0, 1], Some(f64::NAN), tol()),
            Err(Error::InvalidParam { .. })
        ));
    }

    #[test]
    fn plan_json_roundtrip_is_stable() {
        let view = canonical_view(2, 42);
        let (plan, _) = plan_for(&view, &[0, 1], None, tol()).unwrap();
        let json = plan.to_json().unwrap();
        let back = DisentanglingPlan::from_json(&json).unwrap();
        assert_eq!(back.to_json().unwrap(), json);
        let corrupted = json.replacen("\"Z\": [", "\"Z\": [[2.0, 0.0], [0.0, 1.0]] , [", 0);
        assert_eq!(corrupted, json);
        let mut doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        doc["Z"][0][0] = serde_json::json!(2.0);
        let bad = serde_json::to_string(&doc).unwrap();
        assert!(matches!(
            DisentanglingPlan::from_json(&bad),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn plans_verify_across_k_and_subsets() {
        for k in 2..=4usize {
            let view = canonical_view(k, 7);
            let n = view.encoding().n();
            let subsets = crate::scheme::k_subsets(n, k);
            for subset in [&subsets[0], &subsets[subsets.len() - 1]] {
                let sp = split(view.encoding(), subset).unwrap();
                let fr = frame(&sp, tol()).unwrap();
                // alpha equals the first null component over the scale of kappa v
                let kv = sp.kappa().mul_vec(&fr.v).unwrap();
                assert!((fr.alpha - fr.v[0] / norm(&kv)).abs() < 1e-12);
                let (plan, _) = plan_for(&view, subset, None, tol()).unwrap();
                assert!(plan.squeezer_count(1e-12) <= 2);
                assert!(plan.reconstruction_residual().unwrap() <= RECONSTRUCTION_EPS);
                let xi = XiSystem::build(
                    view.encoding().matrix(),
                    sp.collaborators(),
                    sp.complement(),
                    plan.t(),
                )
                .unwrap();
                xi.validate_against(&fr.v).unwrap();
            }
        }
    }

    #[test]
    fn replica_approaches_secret_for_strong_squeezing() {
        let view = canonical_view(2, 42);
        let secret = (0.3, -0.7);
        let rep = replicate(&view, &[0, 1], secret, 6.0f64.exp(), None, tol()).unwrap();
        let f = overlap_with_coherent(&rep.replica, secret).unwrap();
        assert!(f >= 1.0 - 1e-4, "fidelity {f}");
    }

    #[test]
    fn replicate_is_invariant_under_subset_ordering() {
        let view = canonical_view(2, 9);
        let a = replicate(&view, &[0, 2], (1.0, 0.5), 2.0, None, tol()).unwrap();
        let b = replicate(&view, &[2, 0], (1.0, 0.5), 2.0, None, tol()).unwrap();
        let mean_diff: f64 = a
            .replica
            .mean()
            .iter()
            .zip(b.replica.mean())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(mean_diff <= 1e-9);
        assert!(a.replica.cov().max_abs_diff(b.replica.cov()) <= 1e-9);
        assert_eq!(a.collaborators, vec![0, 2]);
    }

    #[test]
    fn replicate_works_after_trailing_drop() {
        let view = canonical_view(3, 11).discard_shares(&[4]).unwrap();
        let rep = replicate(&view, &[0, 1, 2], (0.2, 0.4), 3.0f64.exp(), None, tol()).unwrap();
        let f = overlap_with_coherent(&rep.replica, (0.2, 0.4)).unwrap();
        assert!(f > 0.99, "fidelity {f}");
        assert!(matches!(
            replicate(&view, &[0, 1, 4], (0.0, 0.0), 1.0, None, tol()),
            Err(Error::BadSubset { .. })
        ));
    }

    #[test]
    fn adversary_marginal_stays_far_from_secret() {
        let view = canonical_view(2, 42);
        let secret = (2.0, 1.0);
        let st = view.encode(secret, 3.0f64.exp()).unwrap();
        let adv = reduce(&st, &[2]).unwrap();
        let f = overlap_with_coherent(&adv, secret).unwrap();
        assert!(f < 0.5, "adversary overlap {f}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(60))]
        #[test]
        fn prop_plans_reconstruct_and_validate(
            k in 2usize..=4,
            seed in 0u64..200,
            gamma in 0.2f64..5.0,
            negate in proptest::bool::ANY,
        ) {
            let gamma = if negate { -gamma } else { gamma };
            let view = canonical_view(k, seed);
            let n = view.encoding().n();
            let subset: Vec<usize> = (0..k).map(|i| (seed as usize + i * 2) % n).collect();
            let mut subset = subset;
            subset.sort_unstable();
            subset.dedup();
            prop_assume!(subset.len() == k);
            let (plan, fr) = plan_for(&view, &subset, Some(gamma), tol()).unwrap();
            prop_assert!(plan.reconstruction_residual().unwrap() <= RECONSTRUCTION_EPS);
            prop_assert!(plan.squeezer_count(1e-12) <= 2);
            let sp = split(view.encoding(), &subset).unwrap();
            let xi = XiSystem::build(
                view.encoding().matrix(), sp.collaborators(), sp.complement(), plan.t(),
            ).unwrap();
            xi.validate_against(&fr.v).unwrap();
            let rep = replicate(&view, &subset, (0.1, -0.2), 1.5, Some(gamma), tol()).unwrap();
            rep.replica.validate_physical().unwrap();
        }
    }
}
