//! Exact row reduction over the rationals.

use num_rational::BigRational;
use num_traits::{One, Zero};

/// A dense matrix of signed rationals, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    rows: Vec<Vec<BigRational>>,
    cols: usize,
}

impl Matrix {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Matrix { rows, cols }
    }

    pub fn from_integers(rows: &[&[i64]]) -> Self {
        Matrix::new(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
                .collect(),
        )
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.rows[i][j]
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::new(
            (0..self.cols)
                .map(|j| self.rows.iter().map(|r| r[j].clone()).collect())
                .collect(),
        )
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.rows.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == m.len() {
                break;
            }
            let Some(p) = (row..m.len()).find(|&i| !m[i][col].is_zero()) else {
                continue;
            };
            m.swap(row, p);
            let inv = BigRational::one() / &m[row][col];
            for v in m[row].iter_mut() {
                *v = &*v * &inv;
            }
            for i in 0..m.len() {
                if i != row && !m[i][col].is_zero() {
                    let factor = m[i][col].clone();
                    for j in 0..self.cols {
                        let sub = &factor * &m[row][j];
                        m[i][j] -= sub;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        (Matrix { rows: m, cols: self.cols }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// A basis of `{ v : A v = 0 }`, one vector per free column, each with
    /// a 1 in its free coordinate.
    pub fn kernel(&self) -> Vec<Vec<BigRational>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![BigRational::zero(); self.cols];
                v[f] = BigRational::one();
                for (i, &p) in pivots.iter().enumerate() {
                    v[p] = -r.rows[i][f].clone();
                }
                v
            })
            .collect()
    }

    /// A basis of `{ y : yᵀ A = 0 }`. Its members describe the image of
    /// `A`: `b` is in the image iff `y · b = 0` for each of them.
    pub fn left_kernel(&self) -> Vec<Vec<BigRational>> {
        self.transpose().kernel()
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        self.rows
            .iter()
            .map(|r| r.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}
