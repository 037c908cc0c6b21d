//! Scalar abstraction shared by plain numbers and Taylor fields, plus small
//! dense matrices and index tensors over it.

use std::fmt::Debug;
use std::ops::{Add, Div, Index, IndexMut, Mul, Neg, Sub};

use crate::taylor::Taylor;

pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    /// Value at the evaluation point.
    fn value(&self) -> f64;
    /// A constant living in the same context as `self`.
    fn lift(&self, v: f64) -> Self;
    fn sqrt(self) -> Self;
    fn powf(self, p: f64) -> Self;
    fn recip(self) -> Self;
    /// Distance used by residual checks.
    fn max_abs_diff(&self, other: &Self) -> f64;
    fn max_abs(&self) -> f64;

    fn zero_like(&self) -> Self {
        self.lift(0.0)
    }
}

impl Scalar for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn lift(&self, v: f64) -> f64 {
        v
    }
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    fn powf(self, p: f64) -> f64 {
        f64::powf(self, p)
    }
    fn recip(self) -> f64 {
        1.0 / self
    }
    fn max_abs_diff(&self, other: &f64) -> f64 {
        (self - other).abs()
    }
    fn max_abs(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for Taylor {
    fn value(&self) -> f64 {
        Taylor::value(self)
    }
    fn lift(&self, v: f64) -> Taylor {
        Taylor::constant(self.dim(), v)
    }
    fn sqrt(self) -> Taylor {
        Taylor::sqrt(&self)
    }
    fn powf(self, p: f64) -> Taylor {
        Taylor::powf(&self, p)
    }
    fn recip(self) -> Taylor {
        Taylor::recip(&self)
    }
    fn max_abs_diff(&self, other: &Taylor) -> f64 {
        Taylor::max_abs_diff(self, other)
    }
    fn max_abs(&self) -> f64 {
        Taylor::max_abs(self)
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug)]
pub struct Mat<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Mat<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Mat<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn filled(rows: usize, cols: usize, v: T) -> Mat<T> {
        Mat {
            rows,
            cols,
            data: vec![v; rows * cols],
        }
    }

    pub fn zeros_like(rows: usize, cols: usize, proto: T) -> Mat<T> {
        Self::filled(rows, cols, proto.zero_like())
    }

    pub fn identity_like(n: usize, proto: T) -> Mat<T> {
        let z = proto.zero_like();
        let o = proto.lift(1.0);
        Self::from_fn(n, n, |i, j| if i == j { o } else { z })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn proto(&self) -> T {
        self.data[0]
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn transpose(&self) -> Mat<T> {
        Mat::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: f64) -> Mat<T> {
        self.map(|v| *v * s)
    }

    pub fn scale_by(&self, s: T) -> Mat<T> {
        self.map(|v| *v * s)
    }

    pub fn trace(&self) -> T {
        let mut t = self.proto().zero_like();
        for i in 0..self.rows.min(self.cols) {
            t = t + self[(i, i)];
        }
        t
    }

    pub fn values(&self) -> Mat<f64> {
        self.map(|v| v.value())
    }

    pub fn max_abs_diff(&self, other: &Mat<T>) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
    }

    /// Square sub-block.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Mat<T> {
        Mat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Inverse by Gauss–Jordan elimination with partial pivoting on values.
    pub fn inverse(&self) -> Option<Mat<T>> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity_like(n, self.proto());
        let scale = self.values().data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].value().abs().total_cmp(&a[(j, col)].value().abs()))
                .unwrap();
            let pv = a[(pivot, col)].value();
            if pv.is_nan() || pv.abs() <= 1e-14 * scale.max(1e-300) {
                return None;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let r = a[(col, col)].recip();
            for j in 0..n {
                a[(col, j)] = a[(col, j)] * r;
                inv[(col, j)] = inv[(col, j)] * r;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                for j in 0..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                    inv[(i, j)] = inv[(i, j)] - f * inv[(col, j)];
                }
            }
        }
        Some(inv)
    }

    /// Determinant by elimination.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.proto().lift(1.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[(i, col)].value().abs().total_cmp(&a[(j, col)].value().abs()))
                .unwrap();
            if a[(pivot, col)].value() == 0.0 {
                return self.proto().zero_like();
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)];
            det = det * p;
            let r = p.recip();
            for i in col + 1..n {
                let f = a[(i, col)] * r;
                for j in col..n {
                    a[(i, j)] = a[(i, j)] - f * a[(col, j)];
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Matrix exponential by scaling and squaring of the power series.
    pub fn exp(&self) -> Mat<T> {
        let norm = self.values().data.iter().fold(0.0f64, |m, v| m.max(v.abs())) * self.rows as f64;
        let mut s = 0;
        while norm / f64::powi(2.0, s) > 0.25 {
            s += 1;
        }
        let a = self.scale(1.0 / f64::powi(2.0, s));
        let mut term = Mat::identity_like(self.rows, self.proto());
        let mut sum = term.clone();
        for k in 1..=18 {
            term = &term * &a;
            term = term.scale(1.0 / k as f64);
            sum = &sum + &term;
        }
        for _ in 0..s {
            sum = &sum * &sum;
        }
        sum
    }

    pub fn commutator(&self, other: &Mat<T>) -> Mat<T> {
        &(self * other) - &(other * self)
    }
}

impl Mat<f64> {
    pub fn zeros(rows: usize, cols: usize) -> Mat<f64> {
        Mat::filled(rows, cols, 0.0)
    }

    pub fn identity(n: usize) -> Mat<f64> {
        Mat::identity_like(n, 0.0)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Mat<f64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    pub fn constant_field(&self, n: usize) -> Mat<Taylor> {
        self.map(|v| Taylor::constant(n, *v))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(d: &[f64]) -> Mat<f64> {
        Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
    }
}

impl Mat<Taylor> {
    /// Entrywise partial derivative.
    pub fn deriv(&self, v: usize) -> Mat<Taylor> {
        self.map(|t| t.deriv(v))
    }

    pub fn truncate(&self, order: usize) -> Mat<Taylor> {
        self.map(|t| t.truncate(order))
    }
}

impl<T> Index<(usize, usize)> for Mat<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Mat<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Scalar> Mul for &Mat<T> {
    type Output = Mat<T>;
    fn mul(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!(self.cols, rhs.rows, "matrix shape mismatch");
        let z = self.proto().zero_like();
        let mut out = Mat::filled(self.rows, rhs.cols, z);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Scalar> Add for &Mat<T> {
    type Output = Mat<T>;
    fn add(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] + rhs[(i, j)])
    }
}

impl<T: Scalar> Sub for &Mat<T> {
    type Output = Mat<T>;
    fn sub(self, rhs: &Mat<T>) -> Mat<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Mat::from_fn(self.rows, self.cols, |i, j| self[(i, j)] - rhs[(i, j)])
    }
}

impl<T: Scalar> Neg for &Mat<T> {
    type Output = Mat<T>;
    fn neg(self) -> Mat<T> {
        self.map(|v| -*v)
    }
}

/// Matrix–vector product.
pub fn mat_vec<T: Scalar>(m: &Mat<T>, v: &[T]) -> Vec<T> {
    (0..m.rows())
        .map(|i| {
            let mut s = m[(i, 0)] * v[0];
            for j in 1..m.cols() {
                s = s + m[(i, j)] * v[j];
            }
            s
        })
        .collect()
}

/// Largest entrywise difference of two vectors.
pub fn vec_max_diff<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

/// Rank-3 array `t[i][j][k]` with all dimensions `n`.
#[derive(Clone, Debug)]
pub struct Tensor3<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Tensor3<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Tensor3<T> {
        let mut data = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    data.push(f(i, j, k));
                }
            }
        }
        Tensor3 { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Tensor3<U> {
        Tensor3 {
            n: self.n,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &Tensor3<T>) -> f64 {
        vec_max_diff(&self.data, &other.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
    }
}

impl<T> Index<(usize, usize, usize)> for Tensor3<T> {
    type Output = T;
    fn index(&self, (i, j, k): (usize, usize, usize)) -> &T {
        &self.data[(i * self.n + j) * self.n + k]
    }
}

impl<T> IndexMut<(usize, usize, usize)> for Tensor3<T> {
    fn index_mut(&mut self, (i, j, k): (usize, usize, usize)) -> &mut T {
        &mut self.data[(i * self.n + j) * self.n + k]
    }
}

/// Rank-4 array `t[i][j][k][l]` with all dimensions `n`.
#[derive(Clone, Debug)]
pub struct Tensor4<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Tensor4<T> {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize, usize) -> T) -> Tensor4<T> {
        let mut data = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        data.push(f(i, j, k, l));
                    }
                }
            }
        }
        Tensor4 { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn max_abs_diff(&self, other: &Tensor4<T>) -> f64 {
        vec_max_diff(&self.data, &other.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
    }
}

impl<T> Index<(usize, usize, usize, usize)> for Tensor4<T> {
    type Output = T;
    fn index(&self, (i, j, k, l): (usize, usize, usize, usize)) -> &T {
        &self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }
}

impl<T> IndexMut<(usize, usize, usize, usize)> for Tensor4<T> {
    fn index_mut(&mut self, (i, j, k, l): (usize, usize, usize, usize)) -> &mut T {
        &mut self.data[((i * self.n + j) * self.n + k) * self.n + l]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_taylor_matrix() {
        let n = 2;
        let x = Taylor::variable(n, 0, 0.3);
        let y = Taylor::variable(n, 1, -0.2);
        let one = Taylor::constant(n, 1.0);
        let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => one + x * y,
            (0, 1) => x.sin(),
            (1, 0) => y * 2.0,
            _ => one + x * x,
        });
        let inv = m.inverse().unwrap();
        let id = &m * &inv;
        assert!(id.max_abs_diff(&Mat::identity_like(2, one)) < 1e-13);
    }

    #[test]
    fn exp_of_nilpotent() {
        let m = Mat::from_rows(&[vec![0.0, 1.0], vec![0.0, 0.0]]);
        let e = m.exp();
        assert!(e.max_abs_diff(&Mat::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]])) < 1e-14);
    }

    #[test]
    fn determinant_matches_product() {
        let a = Mat::from_rows(&[vec![2.0, 1.0, 0.0], vec![1.0, 3.0, 1.0], vec![0.0, 1.0, 4.0]]);
        assert!((a.det() - 18.0).abs() < 1e-12);
    }
}
