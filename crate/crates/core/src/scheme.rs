//! Dealer-side scheme: threshold parameters, encoding matrices, validation
//! and the encoding map itself.
//!
//! An encoding is an invertible m x m matrix g, m = 2k - 1. Row i holds the
//! coefficients of share i in the dealer's product-state coordinates:
//! coordinate 1 is the secret mode, coordinates 2..k the x-squeezed
//! ancillas, coordinates k+1..m the p-squeezed ancillas. Schemes with
//! k <= n < 2k - 1 are views of a canonical (k, 2k-1) scheme with trailing
//! shares discarded.

use crate::error::{Error, Result};
use crate::gaussian::{apply, point_transform_symplectic, product_state, GaussianState};
use crate::matlib::{row_rank, Matrix, Tolerance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

/// (k, n) threshold parameters. The constructor enforces the no-cloning
/// bound k <= n <= 2k - 1 unconditionally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdParams {
    k: usize,
    n: usize,
}

impl ThresholdParams {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidParam { context: format!("threshold k = {k} < 2") });
        }
        if n < k {
            return Err(Error::InvalidParam {
                context: format!("n = {n} shares cannot support threshold k = {k}"),
            });
        }
        if n >= 2 * k {
            return Err(Error::NoCloning { k, n, two_k: 2 * k });
        }
        Ok(ThresholdParams { k, n })
    }

    /// The canonical shape with n = 2k - 1.
    pub fn canonical(k: usize) -> Result<Self> {
        ThresholdParams::new(k, 2 * k.max(1) - 1)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of shares in the underlying canonical scheme.
    pub fn canonical_shares(&self) -> usize {
        2 * self.k - 1
    }
}

/// Which of the two rank conditions a subset violates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationKind {
    /// The k chosen rows, projected to the first k coordinates, do not
    /// span k dimensions, so those collaborators cannot reconstruct.
    CollaboratorRank,
    /// The complementary k-1 rows, projected to the first k coordinates,
    /// do not span k-1 dimensions, so no disentangling map exists.
    ComplementRank,
}

/// A subset (0-based share indices) that fails validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubsetViolation {
    pub subset: Vec<usize>,
    pub kind: ViolationKind,
}

/// Outcome of checking every k-subset of a candidate encoding.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub violations: Vec<SubsetViolation>,
}

/// All k-element subsets of 0..n in lexicographic order.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        // advance the rightmost index that can still move
        let mut i = k;
        while i > 0 {
            i -= 1;
            if idx[i] != i + n - k {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
            if i == 0 {
                return out;
            }
        }
    }
}

fn project_rows(g: &Matrix, rows: &[usize], cols: usize) -> Matrix {
    Matrix::from_fn(rows.len(), cols, |i, j| g[(rows[i], j)])
}

/// Checks both rank conditions for every k-subset of the m = 2k - 1 rows:
/// each subset's rows restricted to the first k coordinates must span k
/// dimensions, and the complementary rows so restricted must span k - 1.
pub fn validate(g: &Matrix, k: usize, tol: Tolerance) -> Result<ValidationReport> {
    let m = 2 * k - 1;
    if k < 2 || g.rows() != m || g.cols() != m {
        return Err(Error::DimensionMismatch {
            context: format!("validate expects {m}x{m} for k = {k}, got {}x{}", g.rows(), g.cols()),
        });
    }
    let mut violations = Vec::new();
    for subset in k_subsets(m, k) {
        let proj = project_rows(g, &subset, k);
        if row_rank(&proj, tol) < k {
            violations.push(SubsetViolation {
                subset: subset.clone(),
                kind: ViolationKind::CollaboratorRank,
            });
        }
        let complement: Vec<usize> = (0..m).filter(|i| !subset.contains(i)).collect();
        let proj_c = project_rows(g, &complement, k);
        if row_rank(&proj_c, tol) < k - 1 {
            violations.push(SubsetViolation { subset, kind: ViolationKind::ComplementRank });
        }
    }
    Ok(ValidationReport { passed: violations.is_empty(), violations })
}

/// A validated canonical (k, 2k-1) encoding.
#[derive(Debug, Clone)]
pub struct EncodingMatrix {
    k: usize,
    seed: Option<u64>,
    g: Matrix,
}

impl EncodingMatrix {
    /// Accepts g only if it is invertible and passes `validate`.
    pub fn new(k: usize, g: Matrix, seed: Option<u64>) -> Result<Self> {
        let tol = Tolerance::default();
        g.inverse(tol)?;
        let report = validate(&g, k, tol)?;
        if let Some(v) = report.violations.first() {
            return Err(Error::RankDeficient {
                context: format!(
                    "encoding fails {:?} for share subset {:?}",
                    v.kind,
                    v.subset.iter().map(|i| i + 1).collect::<Vec<_>>()
                ),
            });
        }
        Ok(EncodingMatrix { k, seed, g })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of shares of the canonical scheme.
    pub fn n(&self) -> usize {
        2 * self.k - 1
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn matrix(&self) -> &Matrix {
        &self.g
    }

    pub fn into_view(self) -> SchemeView {
        SchemeView { enc: self, dropped: Vec::new() }
    }
}

/// Bounded retry count for `random_encoding`.
const MAX_GENERATION_ATTEMPTS: usize = 64;

/// Draws i.i.d. standard-normal encoding matrices from a seeded stream
/// until one validates. Deterministic in the seed. A scheme view with
/// n < 2k - 1 has its trailing shares discarded.
pub fn random_encoding(params: ThresholdParams, seed: u64) -> Result<SchemeView> {
    let m = params.canonical_shares();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_GENERATION_ATTEMPTS {
        let g = Matrix::from_fn(m, m, |_, _| StandardNormal.sample(&mut rng));
        let Ok(enc) = EncodingMatrix::new(params.k(), g, Some(seed)) else {
            continue;
        };
        let dropped: Vec<usize> = (params.n()..m).collect();
        return Ok(SchemeView { enc, dropped });
    }
    Err(Error::GenerationFailed { attempts: MAX_GENERATION_ATTEMPTS })
}

/// Applies the encoding to the dealer's product state.
pub fn encode(enc: &EncodingMatrix, secret_mean: (f64, f64), a: f64) -> Result<GaussianState> {
    let st = product_state(secret_mean, enc.k(), a)?;
    let map = point_transform_symplectic(enc.matrix(), Tolerance::default())?;
    apply(&map, &st)
}

/// A canonical encoding together with the set of discarded shares.
/// Downstream operations treat discarded shares exactly like any other
/// non-collaborating mode: they are simply traced out.
#[derive(Debug, Clone)]
pub struct SchemeView {
    enc: EncodingMatrix,
    dropped: Vec<usize>,
}

impl SchemeView {
    pub fn encoding(&self) -> &EncodingMatrix {
        &self.enc
    }

    pub fn k(&self) -> usize {
        self.enc.k()
    }

    /// Number of shares still held by players.
    pub fn n_available(&self) -> usize {
        self.enc.n() - self.dropped.len()
    }

    pub fn dropped(&self) -> &[usize] {
        &self.dropped
    }

    /// Available share indices (0-based), ascending.
    pub fn available(&self) -> Vec<usize> {
        (0..self.enc.n()).filter(|i| !self.dropped.contains(i)).collect()
    }

    pub fn params(&self) -> ThresholdParams {
        ThresholdParams::new(self.k(), self.n_available()).expect("view keeps k <= n <= 2k-1")
    }

    /// Discards further shares. At least k must remain.
    pub fn discard_shares(&self, drop: &[usize]) -> Result<SchemeView> {
        let n = self.enc.n();
        let mut dropped = self.dropped.clone();
        for &d in drop {
            if d >= n {
                return Err(Error::BadIndex { index: d, bound: n });
            }
            if dropped.contains(&d) {
                return Err(Error::BadSubset { context: format!("share {d} already dropped") });
            }
            dropped.push(d);
        }
        dropped.sort_unstable();
        if n - dropped.len() < self.k() {
            return Err(Error::TooManyDropped { k: self.k(), n, dropped: dropped.len() });
        }
        Ok(SchemeView { enc: self.enc.clone(), dropped })
    }

    pub fn encode(&self, secret_mean: (f64, f64), a: f64) -> Result<GaussianState> {
        encode(&self.enc, secret_mean, a)
    }

    pub fn to_doc(&self) -> Result<SchemeDoc> {
        // the document format records only a trailing-drop count
        let n_avail = self.n_available();
        let trailing: Vec<usize> = (n_avail..self.enc.n()).collect();
        if self.dropped != trailing {
            return Err(Error::BadSubset {
                context: format!(
                    "document format only records trailing drops, got {:?}",
                    self.dropped
                ),
            });
        }
        Ok(SchemeDoc {
            k: self.k(),
            n: n_avail,
            seed: self.enc.seed(),
            rows: self.enc.matrix().to_rows(),
        })
    }

    pub fn from_doc(doc: &SchemeDoc) -> Result<SchemeView> {
        let params = ThresholdParams::new(doc.k, doc.n)?;
        let g = Matrix::from_rows(&doc.rows)?;
        let enc = EncodingMatrix::new(doc.k, g, doc.seed)?;
        let dropped: Vec<usize> = (params.n()..params.canonical_shares()).collect();
        Ok(SchemeView { enc, dropped })
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = self.to_doc()?;
        serde_json::to_string_pretty(&doc)
            .map_err(|e| Error::InvalidParam { context: format!("serializing scheme: {e}") })
    }

    pub fn from_json(s: &str) -> Result<SchemeView> {
        let doc: SchemeDoc = serde_json::from_str(s)
            .map_err(|e| Error::InvalidParam { context: format!("not a scheme document: {e}") })?;
        SchemeView::from_doc(&doc)
    }
}

/// On-disk form of a scheme. `rows` is always the full canonical matrix;
/// `n` < 2k - 1 means the trailing shares are discarded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeDoc {
    pub k: usize,
    pub n: usize,
    pub seed: Option<u64>,
    pub rows: Vec<Vec<f64>>,
}
