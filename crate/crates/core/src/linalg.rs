//! Small dense row-major matrices and a Cholesky solver.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.n);
        for r in 0..self.n {
            for c in 0..self.n {
                t[(c, r)] = self[(r, c)];
            }
        }
        t
    }

    /// Max-norm of `self - selfᵀ`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for c in r + 1..self.n {
                worst = worst.max((self[(r, c)] - self[(c, r)]).abs());
            }
        }
        worst
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.data
            .chunks_exact(self.n)
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn scaled_add(&mut self, alpha: f64, other: &DenseMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl std::ops::Index<(usize, usize)> for DenseMatrix {
    type Output = f64;
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.n + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.n + c]
    }
}

/// Lower-triangular Cholesky factor `A = G Gᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    /// Factors a symmetric matrix stored row-major; only the upper triangle is read.
    pub fn factor(n: usize, a: &[f64]) -> Result<Self> {
        let mut g = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= g[j * n + k] * g[j * n + k];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: j, value: d });
            }
            let d = d.sqrt();
            g[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a[j * n + i];
                for k in 0..j {
                    s -= g[i * n + k] * g[j * n + k];
                }
                g[i * n + j] = s / d;
            }
        }
        Ok(Self { n, lower: g })
    }

    pub fn of(m: &DenseMatrix) -> Result<Self> {
        Self::factor(m.dim(), m.as_slice())
    }

    /// Solves in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        let g = &self.lower;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= g[i * n + k] * b[k];
            }
            b[i] = s / g[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for k in i + 1..n {
                s -= g[k * n + i] * b[k];
            }
            b[i] = s / g[i * n + i];
        }
    }

    /// `A⁻¹ B` column by column.
    pub fn solve_matrix(&self, b: &DenseMatrix) -> DenseMatrix {
        let n = self.n;
        let mut out = DenseMatrix::zeros(n);
        let mut col = vec![0.0; n];
        for c in 0..n {
            for r in 0..n {
                col[r] = b[(r, c)];
            }
            self.solve_in_place(&mut col);
            for r in 0..n {
                out[(r, c)] = col[r];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = DenseMatrix::from_row_major(3, vec![4.0, 2.0, 0.4, 2.0, 5.0, 1.0, 0.4, 1.0, 3.0]);
        let ch = Cholesky::of(&a).unwrap();
        let x = [1.0, -2.0, 0.5];
        let mut b = a.matvec(&x);
        ch.solve_in_place(&mut b);
        for (u, v) in b.iter().zip(x) {
            assert!((u - v).abs() < 1e-14);
        }
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = DenseMatrix::from_row_major(2, vec![1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            Cholesky::of(&a),
            Err(Error::NotPositiveDefinite { pivot: 1, .. })
        ));
    }
}
