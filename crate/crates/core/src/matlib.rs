//! Small dense real-matrix kernels with an explicit tolerance policy.
//!
//! Everything here targets the tiny systems this crate works with
//! (dimension at most a few tens), so plain Gram-Schmidt and Gauss
//! elimination with partial pivoting are accurate and fast enough.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Thresholds for rank decisions and orthonormality checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Residual-norm threshold below which a vector counts as dependent.
    pub rank_eps: f64,
    /// Max allowed deviation of Q^T Q from the identity, entrywise.
    pub ortho_eps: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rank_eps: 1e-10, ortho_eps: 1e-10 }
    }
}

impl Tolerance {
    /// Requires 0 < rank_eps <= 1e-6 and 0 < ortho_eps <= 1e-8.
    pub fn new(rank_eps: f64, ortho_eps: f64) -> Result<Self> {
        if !(rank_eps > 0.0 && rank_eps <= 1e-6) {
            return Err(Error::InvalidParam {
                context: format!("rank_eps = {rank_eps} not in (0, 1e-6]"),
            });
        }
        if !(ortho_eps > 0.0 && ortho_eps <= 1e-8) {
            return Err(Error::InvalidParam {
                context: format!("ortho_eps = {ortho_eps} not in (0, 1e-8]"),
            });
        }
        Ok(Tolerance { rank_eps, ortho_eps })
    }
}

/// Dense row-major real matrix. Entries are always finite; constructors
/// reject NaN and infinities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch {
                    context: format!("ragged rows: {} vs {}", row.len(), c),
                });
            }
            data.extend_from_slice(row);
        }
        let m = Matrix { rows: r, cols: c, data };
        m.check_finite("from_rows")?;
        Ok(m)
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Matrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Block-diagonal assembly of square blocks.
    pub fn block_diag(blocks: &[&Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.rows).sum();
        let mut m = Matrix::zeros(n, n);
        let mut off = 0;
        for b in blocks {
            debug_assert_eq!(b.rows, b.cols);
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m[(off + i, off + j)] = b[(i, j)];
                }
            }
            off += b.rows;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn check_finite(&self, context: &str) -> Result<()> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite { context: context.to_string() })
        }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                context: format!(
                    "product of {}x{} by {}x{}",
                    self.rows, self.cols, other.rows, other.cols
                ),
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if self.cols != v.len() {
            return Err(Error::DimensionMismatch {
                context: format!("{}x{} times vector of length {}", self.rows, self.cols, v.len()),
            });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), v)).collect())
    }

    /// Solves the square system `self * x = rhs` by Gauss elimination with
    /// partial pivoting.
    pub fn solve(&self, rhs: &[f64], tol: Tolerance) -> Result<Vec<f64>> {
        if self.rows != self.cols || rhs.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: format!("solve with {}x{} and rhs {}", self.rows, self.cols, rhs.len()),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut b = rhs.to_vec();
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if piv_abs <= tol.rank_eps * scale {
                return Err(Error::Singular {
                    context: format!("pivot {piv_abs:.3e} at column {col}"),
                });
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                }
                b.swap(col, piv);
            }
            let d = a[col * n + col];
            for r in col + 1..n {
                let f = a[r * n + col] / d;
                if f == 0.0 {
                    continue;
                }
                for j in col..n {
                    a[r * n + j] -= f * a[col * n + j];
                }
                b[r] -= f * b[col];
            }
        }
        for col in (0..n).rev() {
            let mut s = b[col];
            for j in col + 1..n {
                s -= a[col * n + j] * b[j];
            }
            b[col] = s / a[col * n + col];
        }
        Ok(b)
    }

    /// Inverse of a square matrix via Gauss-Jordan with partial pivoting.
    pub fn inverse(&self, tol: Tolerance) -> Result<Matrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch {
                context: format!("inverse of {}x{}", self.rows, self.cols),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = Matrix::identity(n);
        let scale = self.data.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
        for col in 0..n {
            let (piv, piv_abs) = (col..n)
                .map(|r| (r, a[r * n + col].abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if piv_abs <= tol.rank_eps * scale {
                return Err(Error::Singular {
                    context: format!("pivot {piv_abs:.3e} at column {col}"),
                });
            }
            if piv != col {
                for j in 0..n {
                    a.swap(col * n + j, piv * n + j);
                    inv.data.swap(col * n + j, piv * n + j);
                }
            }
            let d = a[col * n + col];
            for j in 0..n {
                a[col * n + j] /= d;
                inv.data[col * n + j] /= d;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[r * n + j] -= f * a[col * n + j];
                    inv.data[r * n + j] -= f * inv.data[col * n + j];
                }
            }
        }
        Ok(inv)
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        debug_assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Subtracts from `v` its components along each (orthonormal) basis row.
/// Runs two passes, which keeps the result orthogonal to working precision
/// even when `v` starts nearly inside the span.
fn orthogonalize_against(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(v, q);
            for (x, y) in v.iter_mut().zip(q) {
                *x -= c * y;
            }
        }
    }
}

fn normalize(v: &mut [f64]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x /= n;
    }
}

/// Least squares min ||m x - rhs|| by Gram-Schmidt QR over the columns.
/// Dependent columns get coefficient zero, so the solution is unique and
/// deterministic even for rank-deficient systems. Returns the solution and
/// the directly recomputed residual norm.
pub fn lstsq(m: &Matrix, rhs: &[f64], tol: Tolerance) -> Result<(Vec<f64>, f64)> {
    if rhs.len() != m.rows() {
        return Err(Error::DimensionMismatch {
            context: format!("lstsq {}x{} against rhs of {}", m.rows(), m.cols(), rhs.len()),
        });
    }
    let cols: Vec<Vec<f64>> = (0..m.cols())
        .map(|j| (0..m.rows()).map(|i| m[(i, j)]).collect())
        .collect();
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let mut r_rows: Vec<Vec<f64>> = Vec::new();
    for (j, col) in cols.iter().enumerate() {
        let mut w = col.clone();
        let scale = norm(&w).max(1.0);
        orthogonalize_against(&mut w, &basis);
        if norm(&w) > tol.rank_eps * scale {
            normalize(&mut w);
            r_rows.push(basis.iter().chain([&w]).map(|q| dot(q, col)).collect());
            basis.push(w);
            pivots.push(j);
        }
    }
    let rank = basis.len();
    let mut x = vec![0.0; m.cols()];
    let y: Vec<f64> = basis.iter().map(|q| dot(q, rhs)).collect();
    for i in (0..rank).rev() {
        let mut s = y[i];
        for j in i + 1..rank {
            s -= r_rows[j][i] * x[pivots[j]];
        }
        x[pivots[i]] = s / r_rows[i][i];
    }
    let fit = m.mul_vec(&x)?;
    let residual = norm(&rhs.iter().zip(&fit).map(|(b, f)| b - f).collect::<Vec<_>>());
    Ok((x, residual))
}

/// Number of linearly independent rows, decided by Gram-Schmidt residuals
/// against `tol.rank_eps`.
pub fn row_rank(m: &Matrix, tol: Tolerance) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..m.rows() {
        let mut v = m.row(i).to_vec();
        let scale = norm(&v).max(1.0);
        orthogonalize_against(&mut v, &basis);
        if norm(&v) > tol.rank_eps * scale {
            normalize(&mut v);
            basis.push(v);
        }
    }
    basis.len()
}

/// Unit vector spanning the null space of a (k-1) x k row system.
///
/// Fails with `RankDeficient` unless the rows span k-1 dimensions, which is
/// exactly the condition for the null space to be one-dimensional. The sign
/// is fixed so the first component larger than `rank_eps` in magnitude is
/// positive.
pub fn null_space_1d(m: &Matrix, tol: Tolerance) -> Result<Vec<f64>> {
    let (r, n) = (m.rows(), m.cols());
    if r + 1 != n {
        return Err(Error::DimensionMismatch {
            context: format!("null_space_1d expects (k-1) x k, got {r}x{n}"),
        });
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for i in 0..r {
        let mut v = m.row(i).to_vec();
        let scale = norm(&v).max(1.0);
        orthogonalize_against(&mut v, &basis);
        if norm(&v) <= tol.rank_eps * scale {
            return Err(Error::RankDeficient {
                context: format!("row {i} is dependent on earlier rows"),
            });
        }
        normalize(&mut v);
        basis.push(v);
    }
    // The orthogonal complement of the row span is the null space. Seed it
    // with the standard basis vector that leaves the largest residual.
    let mut best: Option<Vec<f64>> = None;
    let mut best_norm = -1.0;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        orthogonalize_against(&mut e, &basis);
        let en = norm(&e);
        if en > best_norm {
            best_norm = en;
            best = Some(e);
        }
    }
    let mut v = best.unwrap();
    normalize(&mut v);
    if let Some(first) = v.iter().find(|x| x.abs() > tol.rank_eps) {
        if *first < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok(v)
}

// Acceptance threshold for standard-basis candidates during completion.
// With threshold t, a full pass over n candidates can only stall if the
// missing subspace has dimension < n * t^2, so t = 0.1 is safe for n < 100.
const COMPLETION_MIN_RESIDUAL: f64 = 0.1;

/// Completes m orthonormal rows (m <= n) to a full orthogonal n x n matrix.
///
/// The given rows are copied into the first m rows of the output. The
/// remaining rows come from Gram-Schmidt over the standard basis vectors in
/// index order, so the completion is deterministic.
pub fn orthonormal_complete(given: &Matrix, tol: Tolerance) -> Result<Matrix> {
    let (m, n) = (given.rows(), given.cols());
    if m > n {
        return Err(Error::DimensionMismatch {
            context: format!("{m} rows cannot be orthonormal in dimension {n}"),
        });
    }
    let mut deviation = 0.0f64;
    for i in 0..m {
        for j in i..m {
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((dot(given.row(i), given.row(j)) - target).abs());
        }
    }
    if deviation > tol.ortho_eps {
        return Err(Error::NotOrthonormal { deviation });
    }
    let mut rows: Vec<Vec<f64>> = (0..m).map(|i| given.row(i).to_vec()).collect();
    for j in 0..n {
        if rows.len() == n {
            break;
        }
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        orthogonalize_against(&mut e, &rows);
        if norm(&e) > COMPLETION_MIN_RESIDUAL {
            normalize(&mut e);
            rows.push(e);
        }
    }
    if rows.len() != n {
        return Err(Error::RankDeficient {
            context: format!("completion stalled at {} of {n} rows", rows.len()),
        });
    }
    Matrix::from_rows(&rows)
}

/// Result of a 2x2 singular value decomposition `m = x * diag(s1, s2) * y`.
/// Both `x` and `y` are orthogonal and `s1 >= s2 > 0`.
#[derive(Debug, Clone, Copy)]
pub struct Svd2 {
    pub x: [[f64; 2]; 2],
    pub s1: f64,
    pub s2: f64,
    pub y: [[f64; 2]; 2],
}

/// Closed-form 2x2 SVD via the rotation parametrization.
///
/// Writes m = R(phi) diag(sx, sy) R(theta) and reads both angles off the
/// symmetric and antisymmetric parts of m; a possible sign of sy moves into
/// a reflection on the y factor.
pub fn svd_2x2(m: &[[f64; 2]; 2], tol: Tolerance) -> Result<Svd2> {
    let (a, b, c, d) = (m[0][0], m[0][1], m[1][0], m[1][1]);
    if ![a, b, c, d].iter().all(|x| x.is_finite()) {
        return Err(Error::NonFinite { context: "svd_2x2 input".to_string() });
    }
    let e = (a + d) / 2.0;
    let f = (a - d) / 2.0;
    let g = (c + b) / 2.0;
    let h = (c - b) / 2.0;
    let q = e.hypot(h);
    let r = f.hypot(g);
    let sx = q + r;
    let sy = q - r;
    let a1 = g.atan2(f);
    let a2 = h.atan2(e);
    let phi = (a2 + a1) / 2.0;
    let theta = (a2 - a1) / 2.0;
    let s1 = sx;
    let s2 = sy.abs();
    if s2 <= tol.rank_eps {
        return Err(Error::Singular {
            context: format!("smaller singular value {s2:.3e}"),
        });
    }
    let x = [[phi.cos(), -phi.sin()], [phi.sin(), phi.cos()]];
    let sgn = if sy < 0.0 { -1.0 } else { 1.0 };
    let y = [
        [theta.cos(), -theta.sin()],
        [sgn * theta.sin(), sgn * theta.cos()],
    ];
    Ok(Svd2 { x, s1, s2, y })
}

/// Eigenvalues of a symmetric 2x2 matrix, descending. The symmetric part
/// of `m` is used; callers must keep any asymmetry below 1e-12.
pub fn sym_eig_2x2(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let b = (m[0][1] + m[1][0]) / 2.0;
    let mean = (m[0][0] + m[1][1]) / 2.0;
    let h = ((m[0][0] - m[1][1]) / 2.0).hypot(b);
    (mean + h, mean - h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn mul2(a: &[[f64; 2]; 2], b: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        c
    }

    fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
        vec![
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    }

    #[test]
    fn tolerance_bounds() {
        assert!(Tolerance::new(1e-10, 1e-10).is_ok());
        assert!(Tolerance::new(0.0, 1e-10).is_err());
        assert!(Tolerance::new(1e-5, 1e-10).is_err());
        assert!(Tolerance::new(1e-10, 1e-7).is_err());
        let d = Tolerance::default();
        assert_eq!(d.rank_eps, 1e-10);
        assert_eq!(d.ortho_eps, 1e-10);
    }

    #[test]
    fn solve_and_inverse_roundtrip() {
        let m = Matrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![-1.0, 3.0, 2.0],
            vec![0.5, 0.0, 1.0],
        ])
        .unwrap();
        let x = m.solve(&[1.0, 2.0, 3.0], tol()).unwrap();
        let back = m.mul_vec(&x).unwrap();
        for (b, e) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((b - e).abs() < 1e-12);
        }
        let inv = m.inverse(tol()).unwrap();
        let prod = m.mul(&inv).unwrap();
        assert!(prod.max_abs_diff(&Matrix::identity(3)) < 1e-12);
    }

    #[test]
    fn singular_solve_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        assert!(matches!(m.solve(&[1.0, 0.0], tol()), Err(Error::Singular { .. })));
        assert!(matches!(m.inverse(tol()), Err(Error::Singular { .. })));
    }

    #[test]
    fn nonfinite_rejected() {
        assert!(matches!(
            Matrix::from_rows(&[vec![1.0, f64::NAN]]),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn null_space_single_row() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0]]).unwrap();
        let v = null_space_1d(&m, tol()).unwrap();
        assert!((v[0] - 0.0).abs() < 1e-14);
        assert!((v[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn null_space_matches_cross_product() {
        // Independent oracle for the 3-dimensional case.
        let r1 = vec![1.0, 1.0, 0.0];
        let r2 = vec![0.0, 1.0, 1.0];
        let m = Matrix::from_rows(&[r1.clone(), r2.clone()]).unwrap();
        let v = null_space_1d(&m, tol()).unwrap();
        let mut c = cross3(&r1, &r2);
        normalize(&mut c);
        // expected (1, -1, 1) / sqrt(3), sign fixed on the first component
        let s = 1.0 / 3.0f64.sqrt();
        for (x, e) in v.iter().zip([s, -s, s]) {
            assert!((x - e).abs() < 1e-14, "{v:?}");
        }
        for (x, e) in v.iter().zip(&c) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn null_space_rank_deficient() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let t = Tolerance::new(1e-10, 1e-10).unwrap();
        // needs a 1x2 input to be well-posed; the 2x2 shape is a dimension error
        assert!(matches!(
            null_space_1d(&m, t),
            Err(Error::DimensionMismatch { .. })
        ));
        let m = Matrix::from_rows(&[vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]]).unwrap();
        assert!(matches!(null_space_1d(&m, t), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn completion_keeps_given_rows_and_is_orthogonal() {
        let s = 1.0 / 2.0f64.sqrt();
        let given = Matrix::from_rows(&[vec![s, s]]).unwrap();
        let q = orthonormal_complete(&given, tol()).unwrap();
        assert_eq!(q.row(0), given.row(0));
        let qtq = q.transpose().mul(&q).unwrap();
        assert!(qtq.max_abs_diff(&Matrix::identity(2)) < 1e-12);
        // second row is +-(1, -1)/sqrt(2)
        assert!((q[(1, 0)].abs() - s).abs() < 1e-12);
        assert!((q[(1, 0)] + q[(1, 1)]).abs() < 1e-12);
    }

    #[test]
    fn completion_of_empty_is_identity() {
        let given = Matrix::zeros(0, 3);
        let q = orthonormal_complete(&given, tol()).unwrap();
        assert!(q.max_abs_diff(&Matrix::identity(3)) == 0.0);
    }

    #[test]
    fn completion_rejects_non_orthonormal() {
        let given = Matrix::from_rows(&[vec![1.0, 1.0]]).unwrap();
        assert!(matches!(
            orthonormal_complete(&given, tol()),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn svd_diagonal_and_identity() {
        let s = svd_2x2(&[[1.0, 0.0], [0.0, 1.0]], tol()).unwrap();
        assert!((s.s1 - 1.0).abs() < 1e-15 && (s.s2 - 1.0).abs() < 1e-15);
        let s = svd_2x2(&[[2.0, 0.0], [0.0, 0.5]], tol()).unwrap();
        assert!((s.s1 - 2.0).abs() < 1e-15 && (s.s2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn svd_matches_symmetric_eigenvalues() {
        // Independent route: singular values are square roots of the
        // eigenvalues of m m^T.
        let m = [[0.5, 0.5], [0.0, std::f64::consts::FRAC_1_SQRT_2]];
        let mmt = mul2(&m, &[[m[0][0], m[1][0]], [m[0][1], m[1][1]]]);
        let (l1, l2) = sym_eig_2x2(&mmt);
        let s = svd_2x2(&m, tol()).unwrap();
        assert!((s.s1 - l1.sqrt()).abs() < 1e-14);
        assert!((s.s2 - l2.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn svd_rejects_singular() {
        assert!(matches!(
            svd_2x2(&[[1.0, 0.0], [2.0, 0.0]], tol()),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn sym_eig_examples() {
        let (l1, l2) = sym_eig_2x2(&[[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!((l1, l2), (1.0, 1.0));
        let (l1, l2) = sym_eig_2x2(&[[1.0, 0.8], [0.8, 1.0]]);
        assert!((l1 - 1.8).abs() < 1e-15);
        assert!((l2 - 0.2).abs() < 1e-15);
        // trace and determinant identities
        let m = [[0.5, 0.5], [0.5, 1.0]];
        let (l1, l2) = sym_eig_2x2(&m);
        assert!((l1 + l2 - 1.5).abs() < 1e-12);
        assert!((l1 * l2 - 0.25).abs() < 1e-12);
    }

    #[test]
    fn lstsq_square_matches_solve() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let rhs = [1.0, 2.0];
        let direct = m.solve(&rhs, Tolerance::default()).unwrap();
        let (ls, resid) = lstsq(&m, &rhs, Tolerance::default()).unwrap();
        assert!(resid < 1e-12);
        for (a, b) in direct.iter().zip(&ls) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn lstsq_overdetermined_consistent_is_exact() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let (x, resid) = lstsq(&m, &[2.0, -1.0, 1.0], Tolerance::default()).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((x[1] + 1.0).abs() < 1e-12);
        assert!(resid < 1e-12);
    }

    #[test]
    fn lstsq_reports_inconsistency_residual() {
        let m = Matrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let (x, resid) = lstsq(&m, &[3.0, 4.0], Tolerance::default()).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12);
        assert!((resid - 4.0).abs() < 1e-12);
    }

    #[test]
    fn lstsq_zeroes_dependent_columns() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]).unwrap();
        let (x, resid) = lstsq(&m, &[2.0, 2.0], Tolerance::default()).unwrap();
        assert_eq!(x[1], 0.0);
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!(resid < 1e-12);
        assert!(matches!(
            lstsq(&m, &[1.0, 2.0, 3.0], Tolerance::default()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    proptest! {
        #[test]
        fn prop_svd_reconstructs(
            a in -10.0f64..10.0, b in -10.0f64..10.0,
            c in -10.0f64..10.0, d in -10.0f64..10.0,
        ) {
            let m = [[a, b], [c, d]];
            prop_assume!((a * d - b * c).abs() > 1e-3);
            let s = svd_2x2(&m, tol()).unwrap();
            prop_assert!(s.s1 >= s.s2 && s.s2 > 0.0);
            let rec = mul2(&mul2(&s.x, &[[s.s1, 0.0], [0.0, s.s2]]), &s.y);
            for i in 0..2 {
                for j in 0..2 {
                    prop_assert!((rec[i][j] - m[i][j]).abs() <= 1e-12,
                        "reconstruction off: {rec:?} vs {m:?}");
                }
            }
            // orthogonality of both factors
            for f in [&s.x, &s.y] {
                let ftf = mul2(&[[f[0][0], f[1][0]], [f[0][1], f[1][1]]], f);
                for (i, row) in ftf.iter().enumerate() {
                    for (j, entry) in row.iter().enumerate() {
                        let id = if i == j { 1.0 } else { 0.0 };
                        prop_assert!((entry - id).abs() <= 1e-12);
                    }
                }
            }
            // determinant identity |det m| = s1 * s2
            prop_assert!(((a * d - b * c).abs() - s.s1 * s.s2).abs() <= 1e-10);
        }

        #[test]
        fn prop_null_space_annihilates(
            rows in proptest::collection::vec(
                proptest::collection::vec(-5.0f64..5.0, 4), 3)
        ) {
            let m = Matrix::from_rows(&rows).unwrap();
            if let Ok(v) = null_space_1d(&m, tol()) {
                prop_assert!((norm(&v) - 1.0).abs() < 1e-12);
                for i in 0..3 {
                    prop_assert!(dot(m.row(i), &v).abs() <= 1e-10);
                }
            }
        }

        #[test]
        fn prop_completion_orthogonal(
            seed_row in proptest::collection::vec(-5.0f64..5.0, 5)
        ) {
            prop_assume!(norm(&seed_row) > 0.5);
            let mut r = seed_row;
            normalize(&mut r);
            let given = Matrix::from_rows(&[r]).unwrap();
            let q = orthonormal_complete(&given, tol()).unwrap();
            let qtq = q.transpose().mul(&q).unwrap();
            prop_assert!(qtq.max_abs_diff(&Matrix::identity(5)) <= 1e-10);
        }

        #[test]
        fn prop_sym_eig_trace_det(
            a in -10.0f64..10.0, b in -10.0f64..10.0, d in -10.0f64..10.0,
        ) {
            let m = [[a, b], [b, d]];
            let (l1, l2) = sym_eig_2x2(&m);
            prop_assert!(l1 >= l2);
            prop_assert!((l1 + l2 - (a + d)).abs() <= 1e-12 * (1.0 + a.abs() + d.abs()));
            prop_assert!((l1 * l2 - (a * d - b * b)).abs() <= 1e-10);
        }
    }
}
