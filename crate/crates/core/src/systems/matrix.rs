use std::ops::{Index, IndexMut};

use crate::fieldfn::Scalar;

/// Dense square matrix, row major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![T::cst(0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::cst(1.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, data: rows.into_iter().flatten().collect() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.data.chunks(self.n.max(1)).take(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + a * o[(k, j)];
                }
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::cst(0.0), |s, i| s + self[(i, i)])
    }

    pub fn add_diag(&mut self, c: T) {
        for i in 0..self.n {
            self[(i, i)] = self[(i, i)] + c;
        }
    }

    /// Row vector times matrix.
    pub fn left_mul(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|j| (0..self.n).fold(T::cst(0.0), |s, i| s + v[i] * self[(i, j)]))
            .collect()
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).fold(T::cst(0.0), |s, j| s + self[(i, j)] * v[j]))
            .collect()
    }

    pub fn map<S: Scalar>(&self, f: impl Fn(&T) -> S) -> Matrix<S> {
        Matrix { n: self.n, data: self.data.iter().map(f).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.re().abs()).fold(0.0, f64::max)
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.n + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.n + j]
    }
}

/// Coefficients `(f₁..fₙ)` of `det(λI − A) = λⁿ + f₁λⁿ⁻¹ + … + fₙ` by Faddeev–LeVerrier.
pub fn faddeev_leverrier<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    let n = a.n();
    let mut f = Vec::with_capacity(n);
    let mut m = Matrix::zeros(n);
    let mut c = T::cst(1.0);
    for k in 1..=n {
        m.add_diag(c);
        let am = a.mul(&m);
        c = -am.trace().scale(1.0 / k as f64);
        f.push(c);
        m = am;
    }
    f
}
