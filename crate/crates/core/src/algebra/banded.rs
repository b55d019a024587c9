use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Symmetric band matrix stored by diagonals: `diags[d][j] = M[j + d][j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymBanded {
    n: usize,
    diags: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bw = bandwidth.min(n.saturating_sub(1));
        Self {
            n,
            diags: (0..=bw).map(|d| vec![0.0; n - d]).collect(),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            n: values.len(),
            diags: vec![values.to_vec()],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.diags.len() - 1
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.diags.get(i - j).map_or(0.0, |d| d[j])
    }

    /// Sets `M[i][j]` and `M[j][i]`.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.diags[i - j][j] = value;
    }

    pub fn add_at(&mut self, i: usize, j: usize, value: f64) {
        let (i, j) = if i >= j { (i, j) } else { (j, i) };
        self.diags[i - j][j] += value;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y: Vec<f64> = self.diags[0].iter().zip(x).map(|(a, b)| a * b).collect();
        for (d, diag) in self.diags.iter().enumerate().skip(1) {
            for (j, &a) in diag.iter().enumerate() {
                y[j + d] += a * x[j];
                y[j] += a * x[j + d];
            }
        }
        y
    }

    /// `x^T M y`.
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(self.matvec(y)).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            n: self.n,
            diags: self.diags.iter().map(|d| d.iter().map(|v| v * s).collect()).collect(),
        }
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &SymBanded, b: f64) -> Self {
        assert_eq!(self.n, other.n, "band matrices of different order");
        let bw = self.bandwidth().max(other.bandwidth());
        let mut out = Self::zeros(self.n, bw);
        for (d, diag) in out.diags.iter_mut().enumerate() {
            for (j, v) in diag.iter_mut().enumerate() {
                let x = self.diags.get(d).map_or(0.0, |s| s[j]);
                let y = other.diags.get(d).map_or(0.0, |s| s[j]);
                *v = a * x + b * y;
            }
        }
        out
    }

    /// Product `self * other` of two symmetric band matrices. The caller
    /// guarantees the product is symmetric (e.g. a matrix square).
    pub fn product_symmetric(&self, other: &SymBanded) -> Self {
        assert_eq!(self.n, other.n, "band matrices of different order");
        let (b1, b2) = (self.bandwidth(), other.bandwidth());
        let mut out = Self::zeros(self.n, b1 + b2);
        let bw = out.bandwidth();
        for j in 0..self.n {
            for i in j..(j + bw + 1).min(self.n) {
                let lo = i.saturating_sub(b1).max(j.saturating_sub(b2));
                let hi = (i + b1).min(j + b2).min(self.n - 1);
                let mut acc = 0.0;
                for k in lo..=hi {
                    acc += self.get(i, k) * other.get(k, j);
                }
                out.diags[i - j][j] = acc;
            }
        }
        out
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Largest entry of `|M - M^T|`; zero for anything stored here, kept as
    /// a check for dense exports.
    pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
        (m - m.transpose()).abs().max()
    }

    /// Gershgorin upper bound on the spectrum.
    pub fn gershgorin_max(&self) -> f64 {
        let mut row = vec![0.0_f64; self.n];
        for (d, diag) in self.diags.iter().enumerate() {
            for (j, &a) in diag.iter().enumerate() {
                if d == 0 {
                    row[j] += a;
                } else {
                    row[j] += a.abs();
                    row[j + d] += a.abs();
                }
            }
        }
        row.into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Band Cholesky factor `M = L L^T` with the bandwidth of `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    // row-major lower band: l[i][k] = L[i][i - bw + k]
    rows: Vec<Vec<f64>>,
}

impl BandCholesky {
    pub fn factor(m: &SymBanded, label: &str) -> Result<Self> {
        let n = m.dim();
        let bw = m.bandwidth();
        let mut rows = vec![vec![0.0; bw + 1]; n];
        for i in 0..n {
            let j0 = i.saturating_sub(bw);
            for j in j0..=i {
                let mut s = m.get(i, j);
                let k0 = j0.max(j.saturating_sub(bw));
                for k in k0..j {
                    s -= rows[i][k + bw - i] * rows[j][k + bw - j];
                }
                if j == i {
                    if !(s > 0.0) || !s.is_finite() {
                        return Err(Error::NotPositiveDefinite {
                            label: label.to_string(),
                            row: i,
                            pivot: s,
                        });
                    }
                    rows[i][bw] = s.sqrt();
                } else {
                    rows[i][j + bw - i] = s / rows[j][bw];
                }
            }
        }
        Ok(Self { n, bw, rows })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let (n, bw) = (self.n, self.bw);
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in i.saturating_sub(bw)..i {
                s -= self.rows[i][k + bw - i] * y[k];
            }
            y[i] = s / self.rows[i][bw];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..(i + bw + 1).min(n) {
                s -= self.rows[k][i + bw - k] * y[k];
            }
            y[i] = s / self.rows[i][bw];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tridiag(n: usize) -> SymBanded {
        let mut m = SymBanded::zeros(n, 1);
        for i in 0..n {
            m.set(i, i, 2.0);
            if i + 1 < n {
                m.set(i + 1, i, -1.0);
            }
        }
        m
    }

    #[test]
    fn matvec_matches_dense() {
        let m = tridiag(6).combine(1.0, &SymBanded::identity(6), 0.5);
        let x: Vec<f64> = (0..6).map(|i| (i as f64).sin()).collect();
        let dense = m.to_dense() * nalgebra::DVector::from_vec(x.clone());
        for (a, b) in m.matvec(&x).iter().zip(dense.iter()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn square_matches_dense_product() {
        let m = tridiag(7);
        let sq = m.product_symmetric(&m);
        assert_eq!(sq.bandwidth(), 2);
        let dense = m.to_dense() * m.to_dense();
        assert_eq!(sq.to_dense(), dense);
    }

    #[test]
    fn cholesky_solves() {
        let m = tridiag(9).product_symmetric(&tridiag(9)).combine(1.0, &tridiag(9), 0.3);
        let ch = BandCholesky::factor(&m, "t").unwrap();
        let x: Vec<f64> = (0..9).map(|i| 1.0 + i as f64 * 0.25).collect();
        let b = m.matvec(&x);
        for (a, e) in ch.solve(&b).iter().zip(&x) {
            assert!((a - e).abs() < 1e-10);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = tridiag(4).scaled(-1.0);
        assert!(matches!(
            BandCholesky::factor(&m, "neg"),
            Err(Error::NotPositiveDefinite { row: 0, .. })
        ));
    }
}
