//! Dense exact linear algebra over the rationals.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::par::{self, Parallelism};
use crate::rational::{bit_size, Rational};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Self {
        let n = rows.len();
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self { rows: n, cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(x)
                    .filter(|(a, _)| !a.is_zero())
                    .fold(Rational::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// Rank by fraction-growth-aware Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for col in 0..m.cols {
            let Some(p) = m.pivot_row(rank, col) else { continue };
            m.swap_rows(rank, p);
            m.eliminate_below(rank, col);
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// LU factorization with partial pivoting. Among the admissible pivots
    /// the one with the smallest numerator and denominator is taken.
    pub fn lu(&self) -> Result<Lu> {
        assert_eq!(self.rows, self.cols, "LU needs a square matrix");
        let n = self.rows;
        let mut m = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = m.pivot_row(k, k).ok_or(Error::Singular)?;
            m.swap_rows(k, p);
            perm.swap(k, p);
            let pivot = m[(k, k)].clone();
            for i in k + 1..n {
                if m[(i, k)].is_zero() {
                    continue;
                }
                let factor = &m[(i, k)] / &pivot;
                for j in k + 1..n {
                    if !m[(k, j)].is_zero() {
                        let delta = &factor * &m[(k, j)];
                        m[(i, j)] -= delta;
                    }
                }
                m[(i, k)] = factor;
            }
        }
        Ok(Lu { n, lu: m, perm })
    }

    fn pivot_row(&self, from: usize, col: usize) -> Option<usize> {
        (from..self.rows).filter(|&i| !self[(i, col)].is_zero()).min_by_key(|&i| bit_size(&self[(i, col)]))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn eliminate_below(&mut self, row: usize, col: usize) {
        let pivot = self[(row, col)].clone();
        for i in row + 1..self.rows {
            if self[(i, col)].is_zero() {
                continue;
            }
            let factor = &self[(i, col)] / &pivot;
            for j in col..self.cols {
                if !self[(row, j)].is_zero() {
                    let delta = &factor * &self[(row, j)];
                    self[(i, j)] -= delta;
                }
            }
        }
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

/// Packed `PA = LU` factors (unit lower triangle below the diagonal).
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn solve(&self, b: &[Rational]) -> Vec<Rational> {
        assert_eq!(b.len(), self.n);
        let mut y: Vec<Rational> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..self.n {
            for j in 0..i {
                if !self.lu[(i, j)].is_zero() && !y[j].is_zero() {
                    let delta = &self.lu[(i, j)] * &y[j];
                    y[i] -= delta;
                }
            }
        }
        for i in (0..self.n).rev() {
            for j in i + 1..self.n {
                if !self.lu[(i, j)].is_zero() && !y[j].is_zero() {
                    let delta = &self.lu[(i, j)] * &y[j];
                    y[i] -= delta;
                }
            }
            y[i] = &y[i] / &self.lu[(i, i)];
        }
        y
    }

    /// Solves for every right-hand side; columns are independent and are
    /// distributed over threads in parallel mode.
    pub fn solve_many(&self, rhs: &[Vec<Rational>], mode: Parallelism) -> Vec<Vec<Rational>> {
        par::map_slice(mode, rhs, |b| self.solve(b))
    }
}
