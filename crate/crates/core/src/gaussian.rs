//! Gaussian states over n modes and the symplectic maps that move them.
//!
//! Quadrature ordering is (x_1..x_n, p_1..p_n) with hbar = 1, so the vacuum
//! covariance is I/2. This module is the crate's independent numerical
//! reference: encoding, decoding and fidelity claims elsewhere are checked
//! against plain moment arithmetic done here.

use crate::error::{Error, Result};
use crate::matlib::{dot, Matrix, Tolerance};

/// Max allowed deviation of s * Omega * s^T from Omega.
const SYMPLECTIC_EPS: f64 = 1e-10;
/// Slack on the Heisenberg bound nu >= 1/2 for validity checks.
const HEISENBERG_SLACK: f64 = 1e-9;

/// The symplectic form [[0, I], [-I, 0]] on n modes.
pub fn omega(n: usize) -> Matrix {
    Matrix::from_fn(2 * n, 2 * n, |i, j| {
        if j == i + n {
            1.0
        } else if i == j + n {
            -1.0
        } else {
            0.0
        }
    })
}

/// Gaussian state given by its mean vector and covariance matrix.
#[derive(Debug, Clone)]
pub struct GaussianState {
    modes: usize,
    mean: Vec<f64>,
    cov: Matrix,
}

impl GaussianState {
    /// Covariance must be symmetric within 1e-12 relative to its largest
    /// entry; the stored matrix is the symmetrized input.
    pub fn new(mean: Vec<f64>, cov: Matrix) -> Result<Self> {
        let n2 = mean.len();
        if n2 == 0 || !n2.is_multiple_of(2) || cov.rows() != n2 || cov.cols() != n2 {
            return Err(Error::DimensionMismatch {
                context: format!("mean of length {n2} with {}x{} covariance", cov.rows(), cov.cols()),
            });
        }
        if !mean.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { context: "state mean".to_string() });
        }
        cov.check_finite("state covariance")?;
        let scale = (0..n2)
            .flat_map(|i| (0..n2).map(move |j| (i, j)))
            .fold(1.0f64, |m, ij| m.max(cov[ij].abs()));
        let asym = cov.max_abs_diff(&cov.transpose());
        if asym > 1e-12 * scale {
            return Err(Error::InvalidParam {
                context: format!("covariance asymmetry {asym:.3e} exceeds 1e-12 x {scale:.3e}"),
            });
        }
        let sym = Matrix::from_fn(n2, n2, |i, j| 0.5 * (cov[(i, j)] + cov[(j, i)]));
        Ok(GaussianState { modes: n2 / 2, mean, cov: sym })
    }

    /// Single-mode coherent state centred at (x0, p0).
    pub fn coherent(x0: f64, p0: f64) -> Result<Self> {
        let mut cov = Matrix::identity(2);
        cov[(0, 0)] = 0.5;
        cov[(1, 1)] = 0.5;
        GaussianState::new(vec![x0, p0], cov)
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix {
        &self.cov
    }

    pub fn mean_of_mode(&self, i: usize) -> (f64, f64) {
        (self.mean[i], self.mean[self.modes + i])
    }

    pub fn var_x(&self, i: usize) -> f64 {
        self.cov[(i, i)]
    }

    pub fn var_p(&self, i: usize) -> f64 {
        let n = self.modes;
        self.cov[(n + i, n + i)]
    }

    /// Tr rho^2 of the state.
    pub fn purity(&self) -> Result<f64> {
        overlap(self, self)
    }

    /// Checks that every symplectic eigenvalue respects the Heisenberg
    /// bound nu >= 1/2 up to a small slack.
    pub fn validate_physical(&self) -> Result<()> {
        let nus = symplectic_eigenvalues(self)?;
        match nus.iter().cloned().fold(f64::INFINITY, f64::min) {
            m if m >= 0.5 - HEISENBERG_SLACK => Ok(()),
            m => Err(Error::InvalidParam {
                context: format!("symplectic eigenvalue {m} below 1/2"),
            }),
        }
    }
}

/// Dealer-side product state: the secret mode followed by k-1 ancillas
/// squeezed in x (variance a^2/2) and k-1 ancillas squeezed in p
/// (x-variance 1/(2 a^2)), for n = 2k-1 modes in total.
pub fn product_state(secret_mean: (f64, f64), k: usize, a: f64) -> Result<GaussianState> {
    if k < 2 {
        return Err(Error::InvalidParam { context: format!("k = {k} < 2") });
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::InvalidParam { context: format!("squeezing width a = {a}") });
    }
    if !(secret_mean.0.is_finite() && secret_mean.1.is_finite()) {
        return Err(Error::NonFinite { context: "secret mean".to_string() });
    }
    let n = 2 * k - 1;
    let mut mean = vec![0.0; 2 * n];
    mean[0] = secret_mean.0;
    mean[n] = secret_mean.1;
    let mut cov = Matrix::zeros(2 * n, 2 * n);
    let a2 = a * a;
    for m in 0..n {
        let (vx, vp) = if m == 0 {
            (0.5, 0.5)
        } else if m < k {
            (0.5 * a2, 0.5 / a2)
        } else {
            (0.5 / a2, 0.5 * a2)
        };
        cov[(m, m)] = vx;
        cov[(n + m, n + m)] = vp;
    }
    GaussianState::new(mean, cov)
}

/// Linear map on phase space preserving the symplectic form.
#[derive(Debug, Clone)]
pub struct SymplecticMap {
    s: Matrix,
}

impl SymplecticMap {
    /// Accepts any even-dimensional square matrix with
    /// s Omega s^T = Omega within 1e-10.
    pub fn new(s: Matrix) -> Result<Self> {
        if s.rows() != s.cols() || !s.rows().is_multiple_of(2) || s.rows() == 0 {
            return Err(Error::DimensionMismatch {
                context: format!("symplectic map must be even square, got {}x{}", s.rows(), s.cols()),
            });
        }
        s.check_finite("symplectic map")?;
        let n = s.rows() / 2;
        let om = omega(n);
        let lhs = s.mul(&om)?.mul(&s.transpose())?;
        let dev = lhs.max_abs_diff(&om);
        if dev > SYMPLECTIC_EPS {
            return Err(Error::InvalidParam {
                context: format!("symplectic condition violated by {dev:.3e}"),
            });
        }
        Ok(SymplecticMap { s })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.s
    }

    pub fn modes(&self) -> usize {
        self.s.rows() / 2
    }

    /// The map applying `self` after `first`.
    pub fn compose(&self, first: &SymplecticMap) -> Result<SymplecticMap> {
        SymplecticMap::new(self.s.mul(&first.s)?)
    }
}

/// Symplectic action of the coordinate change x -> g x: block-diagonal
/// (g, (g^-1)^T) in the (x.., p..) ordering.
pub fn point_transform_symplectic(g: &Matrix, tol: Tolerance) -> Result<SymplecticMap> {
    if g.rows() != g.cols() {
        return Err(Error::DimensionMismatch {
            context: format!("point transform needs square g, got {}x{}", g.rows(), g.cols()),
        });
    }
    let ginv_t = g.inverse(tol)?.transpose();
    let s = Matrix::block_diag(&[g, &ginv_t]);
    // an extremely ill-conditioned g can break the symplectic identity
    // numerically; surface that as a singularity of g
    SymplecticMap::new(s).map_err(|e| match e {
        Error::InvalidParam { context } => Error::Singular { context },
        other => other,
    })
}

/// Pushes a state through a symplectic map: mean -> s mean,
/// cov -> s cov s^T.
pub fn apply(map: &SymplecticMap, st: &GaussianState) -> Result<GaussianState> {
    if map.modes() != st.modes() {
        return Err(Error::DimensionMismatch {
            context: format!("map on {} modes applied to {} modes", map.modes(), st.modes()),
        });
    }
    let mean = map.s.mul_vec(&st.mean)?;
    let cov = map.s.mul(&st.cov)?.mul(&map.s.transpose())?;
    GaussianState::new(mean, cov)
}

/// Partial trace keeping the listed modes, in the order given.
pub fn reduce(st: &GaussianState, keep: &[usize]) -> Result<GaussianState> {
    if keep.is_empty() {
        return Err(Error::BadSubset { context: "no modes kept".to_string() });
    }
    let n = st.modes();
    let mut seen = vec![false; n];
    for &m in keep {
        if m >= n {
            return Err(Error::BadIndex { index: m, bound: n });
        }
        if seen[m] {
            return Err(Error::BadSubset { context: format!("mode {m} repeated") });
        }
        seen[m] = true;
    }
    let idx: Vec<usize> = keep
        .iter()
        .copied()
        .chain(keep.iter().map(|&m| n + m))
        .collect();
    let mean = idx.iter().map(|&i| st.mean[i]).collect();
    let cov = Matrix::from_fn(idx.len(), idx.len(), |i, j| st.cov[(idx[i], idx[j])]);
    GaussianState::new(mean, cov)
}

/// Tr[rho_1 rho_2] for two Gaussian states on the same number of modes:
/// exp(-delta^T (V1+V2)^-1 delta / 2) / sqrt(det(V1+V2)).
pub fn overlap(a: &GaussianState, b: &GaussianState) -> Result<f64> {
    if a.modes() != b.modes() {
        return Err(Error::DimensionMismatch {
            context: format!("overlap of {} and {} modes", a.modes(), b.modes()),
        });
    }
    let d = 2 * a.modes();
    let m = Matrix::from_fn(d, d, |i, j| a.cov[(i, j)] + b.cov[(i, j)]);
    let delta: Vec<f64> = (0..d).map(|i| b.mean[i] - a.mean[i]).collect();
    let x = m.solve(&delta, Tolerance::default())?;
    let quad = dot(&delta, &x);
    let det = det_lu(&m);
    if det <= 0.0 {
        return Err(Error::InvalidParam {
            context: format!("covariance sum has non-positive determinant {det:.3e}"),
        });
    }
    Ok((-0.5 * quad).exp() / det.sqrt())
}

/// Overlap of a single-mode state with the coherent state at `mean`.
/// For pure coherent targets this equals <psi| rho |psi>.
pub fn overlap_with_coherent(st: &GaussianState, mean: (f64, f64)) -> Result<f64> {
    if st.modes() != 1 {
        return Err(Error::DimensionMismatch {
            context: format!("coherent overlap needs a single mode, got {}", st.modes()),
        });
    }
    overlap(st, &GaussianState::coherent(mean.0, mean.1)?)
}

fn det_lu(m: &Matrix) -> f64 {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let (piv, piv_abs) = (col..n)
            .map(|r| (r, a[(r, col)].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv_abs == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                let t = a[(col, j)];
                a[(col, j)] = a[(piv, j)];
                a[(piv, j)] = t;
            }
            det = -det;
        }
        det *= a[(col, col)];
        for r in col + 1..n {
            let f = a[(r, col)] / a[(col, col)];
            if f == 0.0 {
                continue;
            }
            for j in col..n {
                a[(r, j)] -= f * a[(col, j)];
            }
        }
    }
    det
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
/// Returns (eigenvalues, V) with m = V diag(eigenvalues) V^T.
fn jacobi_eig(m: &Matrix) -> (Vec<f64>, Matrix) {
    let n = m.rows();
    let mut a = m.clone();
    let mut v = Matrix::identity(n);
    let scale = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .fold(0.0f64, |s, ij| s.max(a[ij].abs()))
        .max(1.0);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[(i, j)].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if theta >= 0.0 {
                    1.0 / (theta + (theta * theta + 1.0).sqrt())
                } else {
                    -1.0 / (-theta + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let tau = s / (1.0 + c);
                let app = a[(p, p)];
                let aqq = a[(q, q)];
                a[(p, p)] = app - t * apq;
                a[(q, q)] = aqq + t * apq;
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for r in 0..n {
                    if r != p && r != q {
                        let arp = a[(r, p)];
                        let arq = a[(r, q)];
                        a[(r, p)] = arp - s * (arq + tau * arp);
                        a[(r, q)] = arq + s * (arp - tau * arq);
                        a[(p, r)] = a[(r, p)];
                        a[(q, r)] = a[(r, q)];
                    }
                    let vrp = v[(r, p)];
                    let vrq = v[(r, q)];
                    v[(r, p)] = vrp - s * (vrq + tau * vrp);
                    v[(r, q)] = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }
    let eig = (0..n).map(|i| a[(i, i)]).collect();
    (eig, v)
}

/// Symmetric square root of a positive semidefinite matrix.
fn sqrt_psd(m: &Matrix) -> Result<Matrix> {
    let (eig, v) = jacobi_eig(m);
    let scale = eig.iter().fold(0.0f64, |s, e| s.max(e.abs())).max(1.0);
    let mut d = Matrix::zeros(m.rows(), m.rows());
    for (i, &e) in eig.iter().enumerate() {
        if e < -1e-9 * scale {
            return Err(Error::InvalidParam {
                context: format!("matrix not positive semidefinite (eigenvalue {e:.3e})"),
            });
        }
        d[(i, i)] = e.max(0.0).sqrt();
    }
    v.mul(&d)?.mul(&v.transpose())
}

/// Symplectic eigenvalues of the covariance matrix, descending, one per
/// mode. These are the moduli of the eigenvalues of i Omega V; a physical
/// state has all of them >= 1/2.
pub fn symplectic_eigenvalues(st: &GaussianState) -> Result<Vec<f64>> {
    let n = st.modes();
    let vh = sqrt_psd(&st.cov)?;
    let om = omega(n);
    // -Omega V Omega is symmetric positive definite, and the spectrum of
    // (-Omega V Omega) V is the squared symplectic spectrum, doubled.
    // Conjugating by V^(1/2) makes that product symmetric.
    let p = om.transpose().mul(&st.cov)?.mul(&om)?;
    let a = vh.mul(&p)?.mul(&vh)?;
    let a = Matrix::from_fn(2 * n, 2 * n, |i, j| 0.5 * (a[(i, j)] + a[(j, i)]));
    let (mut eig, _) = jacobi_eig(&a);
    eig.sort_by(|x, y| y.total_cmp(x));
    let mut nus = Vec::with_capacity(n);
    for j in 0..n {
        let pair = 0.5 * (eig[2 * j] + eig[2 * j + 1]);
        nus.push(pair.max(0.0).sqrt());
    }
    Ok(nus)
}
