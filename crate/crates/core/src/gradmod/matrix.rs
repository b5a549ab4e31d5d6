use std::fmt;

use rand::Rng;

use crate::arith::{Ctx, Zq};
use crate::error::{Error, Result};

/// Dense row-major matrix over Z_q/p^N.
#[derive(Clone, PartialEq, Eq)]
pub struct Mat {
    ctx: Ctx,
    rows: usize,
    cols: usize,
    data: Vec<Zq>,
}

impl Mat {
    pub fn zeros(ctx: &Ctx, rows: usize, cols: usize) -> Self {
        Mat { ctx: ctx.clone(), rows, cols, data: vec![Zq::zero(ctx); rows * cols] }
    }

    pub fn identity(ctx: &Ctx, n: usize) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, Zq::one(ctx));
        }
        m
    }

    pub fn scalar(ctx: &Ctx, n: usize, c: &Zq) -> Self {
        let mut m = Self::zeros(ctx, n, n);
        for i in 0..n {
            m.set(i, i, c.clone());
        }
        m
    }

    pub fn from_fn(ctx: &Ctx, rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Zq) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Mat { ctx: ctx.clone(), rows, cols, data }
    }

    /// Rows of integers; every row must have `cols` entries.
    pub fn from_i64(ctx: &Ctx, rows: &[Vec<i64>], cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("row {bad} has {} entries, expected {cols}", rows[bad].len())));
        }
        Ok(Self::from_fn(ctx, rows.len(), cols, |r, c| Zq::from_i64(ctx, rows[r][c])))
    }

    pub fn from_rows(ctx: &Ctx, rows: Vec<Vec<Zq>>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().position(|r| r.len() != cols) {
            return Err(Error::Dimension(format!("row {bad} has {} entries, expected {cols}", rows[bad].len())));
        }
        let n = rows.len();
        Ok(Mat { ctx: ctx.clone(), rows: n, cols, data: rows.into_iter().flatten().collect() })
    }

    pub fn diagonal(ctx: &Ctx, entries: &[Zq]) -> Self {
        let mut m = Self::zeros(ctx, entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m.set(i, i, e.clone());
        }
        m
    }

    pub fn random<R: Rng + ?Sized>(ctx: &Ctx, rows: usize, cols: usize, rng: &mut R) -> Self {
        Self::from_fn(ctx, rows, cols, |_, _| Zq::random(ctx, rng))
    }

    pub fn ctx(&self) -> &Ctx {
        &self.ctx
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &Zq {
        &self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Zq) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[Zq] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<Zq> {
        (0..self.rows).map(|r| self.get(r, c).clone()).collect()
    }

    pub fn entries(&self) -> &[Zq] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zq::is_zero)
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.cols, other.rows, "matrix product {}x{} * {}x{}", self.rows, self.cols, other.rows, other.cols);
        let mut out = Mat::zeros(&self.ctx, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * other.cols + c;
                    out.data[idx] = &out.data[idx] + &(a * b);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Zq]) -> Vec<Zq> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).fold(Zq::zero(&self.ctx), |acc, (a, b)| &acc + &(a * b)))
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Mat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect() }
    }

    pub fn neg(&self) -> Mat {
        self.map(|a| -a)
    }

    pub fn scale(&self, c: &Zq) -> Mat {
        self.map(|a| a * c)
    }

    pub fn map(&self, f: impl Fn(&Zq) -> Zq) -> Mat {
        Mat { ctx: self.ctx.clone(), rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Entrywise sigma.
    pub fn frobenius(&self) -> Mat {
        if self.ctx.degree() == 1 {
            return self.clone();
        }
        self.map(Zq::frobenius)
    }

    pub fn transpose(&self) -> Mat {
        Mat::from_fn(&self.ctx, self.cols, self.rows, |r, c| self.get(c, r).clone())
    }

    /// Entries of row r reduced modulo p^{exps[r]}.
    pub fn reduce_rows(&self, exps: &[u32]) -> Mat {
        assert_eq!(exps.len(), self.rows);
        Mat::from_fn(&self.ctx, self.rows, self.cols, |r, c| self.get(r, c).reduce(exps[r]))
    }

    pub fn select_rows(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(&self.ctx, idx.len(), self.cols, |r, c| self.get(idx[r], c).clone())
    }

    pub fn select_cols(&self, idx: &[usize]) -> Mat {
        Mat::from_fn(&self.ctx, self.rows, idx.len(), |r, c| self.get(r, idx[c]).clone())
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat {
        Mat::from_fn(&self.ctx, rows, cols, |r, c| self.get(r0 + r, c0 + c).clone())
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &Mat) {
        for r in 0..b.rows {
            for c in 0..b.cols {
                self.set(r0 + r, c0 + c, b.get(r, c).clone());
            }
        }
    }

    pub fn hstack(ctx: &Ctx, rows: usize, parts: &[&Mat]) -> Mat {
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(ctx, rows, cols);
        let mut c0 = 0;
        for m in parts {
            assert_eq!(m.rows, rows, "hstack row mismatch");
            out.set_block(0, c0, m);
            c0 += m.cols;
        }
        out
    }

    pub fn vstack(ctx: &Ctx, cols: usize, parts: &[&Mat]) -> Mat {
        let rows = parts.iter().map(|m| m.rows).sum();
        let mut out = Mat::zeros(ctx, rows, cols);
        let mut r0 = 0;
        for m in parts {
            assert_eq!(m.cols, cols, "vstack column mismatch");
            out.set_block(r0, 0, m);
            r0 += m.rows;
        }
        out
    }

    pub fn block_diag(ctx: &Ctx, parts: &[&Mat]) -> Mat {
        let rows = parts.iter().map(|m| m.rows).sum();
        let cols = parts.iter().map(|m| m.cols).sum();
        let mut out = Mat::zeros(ctx, rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for m in parts {
            out.set_block(r0, c0, m);
            r0 += m.rows;
            c0 += m.cols;
        }
        out
    }

    pub(crate) fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    pub(crate) fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            self.data.swap(r * self.cols + a, r * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    pub(crate) fn row_axpy(&mut self, dst: usize, src: usize, q: &Zq) {
        for c in 0..self.cols {
            let s = self.get(src, c);
            if s.is_zero() {
                continue;
            }
            let v = self.get(dst, c) + &(q * s);
            self.set(dst, c, v);
        }
    }

    /// col[dst] += q * col[src]
    pub(crate) fn col_axpy(&mut self, dst: usize, src: usize, q: &Zq) {
        for r in 0..self.rows {
            let s = self.get(r, src);
            if s.is_zero() {
                continue;
            }
            let v = self.get(r, dst) + &(s * q);
            self.set(r, dst, v);
        }
    }

    pub(crate) fn scale_row(&mut self, r: usize, q: &Zq) {
        for c in 0..self.cols {
            let v = self.get(r, c) * q;
            self.set(r, c, v);
        }
    }

    pub(crate) fn scale_col(&mut self, c: usize, q: &Zq) {
        for r in 0..self.rows {
            let v = self.get(r, c) * q;
            self.set(r, c, v);
        }
    }

    /// Inverse of a square matrix whose determinant is a unit.
    pub fn inverse(&self) -> Result<Mat> {
        if self.rows != self.cols {
            return Err(Error::Dimension(format!("inverse of a {}x{} matrix", self.rows, self.cols)));
        }
        let s = super::smith_normal_form(self);
        if let Some(&e) = s.exps.iter().find(|&&e| e > 0) {
            return Err(Error::NonUnit(e));
        }
        // U M V = 1
        Ok(s.v.mul(&s.u))
    }

    /// Entries as signed coefficient lists, row by row.
    pub fn to_signed(&self) -> Vec<Vec<Vec<i64>>> {
        (0..self.rows).map(|r| self.row(r).iter().map(Zq::signed_coeffs).collect()).collect()
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            let parts: Vec<String> = self.row(r).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", parts.join(", "))?;
        }
        write!(f, "]")
    }
}
