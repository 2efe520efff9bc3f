//! Dense matrices over a coefficient ring, with exact elimination.

use crate::error::{Error, Result};
use crate::scalar::{fmt_q, Coeff, Q};

#[derive(Clone, Debug, PartialEq)]
pub struct Mat<C: Coeff = Q> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Coeff> Mat<C> {
    pub fn zeros(rows: usize, cols: usize, ctx: &C::Ctx) -> Self {
        Self { rows, cols, data: vec![C::zero(ctx); rows * cols] }
    }

    pub fn identity(n: usize, ctx: &C::Ctx) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m.set(i, i, C::one(ctx));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &C {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<C> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<C> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Mat<D> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        Self::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = self.get(i, 0).mul(o.get(0, j));
            for k in 1..self.cols {
                acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[C]) -> Vec<C> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = self.get(i, 0).mul(&v[0]);
                for k in 1..self.cols {
                    acc = acc.add(&self.get(i, k).mul(&v[k]));
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).sub(o.get(i, j)))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!("inverting a {}x{} matrix", self.rows, self.cols)));
        }
        let n = self.rows;
        let ctx = match self.data.first() {
            Some(c) => c.ctx(),
            None => return Ok(self.clone()),
        };
        let mut a = self.clone();
        let mut b = Self::identity(n, &ctx);
        for col in 0..n {
            let (p, pinv) = (col..n)
                .find_map(|r| a.get(r, col).inv().map(|v| (r, v)))
                .ok_or_else(|| Error::Singular(format!("no pivot in column {}", col + 1)))?;
            a.swap_rows(p, col);
            b.swap_rows(p, col);
            a.scale_row(col, &pinv);
            b.scale_row(col, &pinv);
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                a.axpy_row(r, col, &f);
                b.axpy_row(r, col, &f);
            }
        }
        Ok(b)
    }

    /// Solves `self * x = rhs` for an overdetermined consistent system with a
    /// unique solution. Fails on rank deficiency or inconsistency.
    pub fn solve(&self, rhs: &[C]) -> Result<Vec<C>> {
        assert_eq!(rhs.len(), self.rows);
        if rhs.is_empty() {
            return Ok(vec![]);
        }
        let k = self.cols;
        let mut a = Self::from_fn(self.rows, k + 1, |i, j| if j < k { self.get(i, j).clone() } else { rhs[i].clone() });
        for col in 0..k {
            let (p, pinv) = (col..self.rows)
                .find_map(|r| a.get(r, col).inv().map(|v| (r, v)))
                .ok_or_else(|| Error::Singular(format!("rank deficient at unknown {}", col + 1)))?;
            a.swap_rows(p, col);
            a.scale_row(col, &pinv);
            for r in 0..self.rows {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                a.axpy_row(r, col, &f);
            }
        }
        for r in k..self.rows {
            if !a.get(r, k).is_zero() {
                return Err(Error::Internal(format!("inconsistent linear system at equation {}", r + 1)));
            }
        }
        Ok((0..k).map(|i| a.get(i, k).clone()).collect())
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    fn scale_row(&mut self, i: usize, f: &C) {
        for c in 0..self.cols {
            let v = self.get(i, c).mul(f);
            self.set(i, c, v);
        }
    }

    /// row_r -= f * row_p
    fn axpy_row(&mut self, r: usize, p: usize, f: &C) {
        for c in 0..self.cols {
            let v = self.get(r, c).sub(&f.mul(self.get(p, c)));
            self.set(r, c, v);
        }
    }
}

impl Mat<Q> {
    pub fn from_q_rows(rows: &[Vec<Q>]) -> Self {
        Self::from_rows(rows.to_vec())
    }

    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let Some(p) = (rank..self.rows).find(|&r| !num_traits::Zero::is_zero(a.get(r, col))) else {
                continue;
            };
            a.swap_rows(p, rank);
            let pinv = a.get(rank, col).recip();
            a.scale_row(rank, &pinv);
            for r in 0..self.rows {
                if r != rank && !num_traits::Zero::is_zero(a.get(r, col)) {
                    let f = a.get(r, col).clone();
                    a.axpy_row(r, rank, &f);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows).map(|i| self.row(i).iter().map(fmt_q).collect()).collect()
    }
}
