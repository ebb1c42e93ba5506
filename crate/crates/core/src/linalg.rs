//! Dense row-major matrix and a weighted least-squares solve through
//! Householder QR with column pivoting.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::sqrt;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(
                "matrix data length must equal rows * cols",
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Dimension("ragged matrix rows"));
            }
            data.extend_from_slice(r);
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// Solves `min Σ (s_i (y_i - a_iᵀβ))²` where `s_i = row_scale[i]`.
///
/// Errors with [`Error::RankDeficient`] when the scaled design has
/// numerically dependent columns.
pub(crate) fn weighted_least_squares(a: &Matrix, y: &[f64], row_scale: &[f64]) -> Result<Vec<f64>> {
    let (n, p) = (a.rows(), a.cols());
    if y.len() != n || row_scale.len() != n {
        return Err(Error::Dimension(
            "response and weights must match design rows",
        ));
    }
    if p == 0 {
        return Ok(Vec::new());
    }
    if n < p {
        return Err(Error::RankDeficient {
            rank: n,
            columns: p,
        });
    }

    // Column-major working copy of diag(s) A.
    let mut q = vec![0.0; n * p];
    for i in 0..n {
        let s = row_scale[i];
        for j in 0..p {
            q[j * n + i] = s * a.get(i, j);
        }
    }
    let mut z: Vec<f64> = y.iter().zip(row_scale).map(|(v, s)| v * s).collect();
    if q.iter().chain(z.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("weighted design"));
    }
    let mut perm: Vec<usize> = (0..p).collect();
    let mut diag = vec![0.0; p];

    for k in 0..p {
        // Pivot on the largest remaining column norm.
        let mut best = k;
        let mut best_norm = -1.0;
        for j in k..p {
            let col = &q[j * n + k..(j + 1) * n];
            let nrm: f64 = col.iter().map(|v| v * v).sum();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        if best != k {
            for i in 0..n {
                q.swap(k * n + i, best * n + i);
            }
            perm.swap(k, best);
        }
        let norm = sqrt(best_norm.max(0.0));
        if norm == 0.0 {
            diag[k] = 0.0;
            continue;
        }
        let x0 = q[k * n + k];
        let alpha = if x0 >= 0.0 { -norm } else { norm };
        // v = x - alpha e_1, stored in place.
        q[k * n + k] = x0 - alpha;
        let vtv: f64 = q[k * n + k..(k + 1) * n].iter().map(|v| v * v).sum();
        diag[k] = alpha;
        if vtv == 0.0 {
            continue;
        }
        for j in k + 1..p {
            let dot: f64 = (k..n).map(|i| q[k * n + i] * q[j * n + i]).sum();
            let f = 2.0 * dot / vtv;
            for i in k..n {
                q[j * n + i] -= f * q[k * n + i];
            }
        }
        let dot: f64 = (k..n).map(|i| q[k * n + i] * z[i]).sum();
        let f = 2.0 * dot / vtv;
        for i in k..n {
            z[i] -= f * q[k * n + i];
        }
    }

    let lead = diag[0].abs();
    let tol = (n.max(p) as f64) * f64::EPSILON * 16.0 * lead;
    let rank = diag.iter().take_while(|d| d.abs() > tol).count();
    if rank < p {
        return Err(Error::RankDeficient { rank, columns: p });
    }

    let mut beta_perm = vec![0.0; p];
    for k in (0..p).rev() {
        let mut acc = z[k];
        for j in k + 1..p {
            acc -= q[j * n + k] * beta_perm[j];
        }
        beta_perm[k] = acc / diag[k];
    }
    let mut beta = vec![0.0; p];
    for (k, &j) in perm.iter().enumerate() {
        beta[j] = beta_perm[k];
    }
    Ok(beta)
}
