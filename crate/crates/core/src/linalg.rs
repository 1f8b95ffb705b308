//! Dense linear algebra over any [`Real`]: just what the Gram machinery
//! needs (Cholesky, triangular solves, LU determinant, Jacobi SVD).

use std::ops::{Index, IndexMut};

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_columns(cols: &[Vec<T>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn diagonal(&self) -> Vec<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc.add_mul(&self[(i, k)], &other[(k, j)]);
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "dimension mismatch");
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].clone() - other[(i, j)].clone())
    }

    /// Submatrix on the index set `idx` (rows and columns).
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    /// Leading `k × k` block.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)].clone())
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> T {
        self.data.iter().map(|x| x.abs()).fold(T::zero(), T::max_of)
    }
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc.add_mul(x, y);
    }
    acc
}

pub fn max_abs<T: Real>(v: &[T]) -> T {
    v.iter().map(|x| x.abs()).fold(T::zero(), T::max_of)
}

/// Lower-triangular `L` with `A = L Lᵀ`. On failure returns the index of the
/// first nonpositive pivot.
pub fn cholesky<T: Real>(a: &Matrix<T>) -> Result<Matrix<T>, usize> {
    assert!(a.is_square());
    let n = a.rows();
    let mut l: Matrix<T> = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].clone();
        for k in 0..j {
            d = d - l[(j, k)].clone() * l[(j, k)].clone();
        }
        if !d.is_strictly_positive() {
            return Err(j);
        }
        let djj = d.sqrt();
        for i in (j + 1)..n {
            let mut s = a[(i, j)].clone();
            for k in 0..j {
                s = s - l[(i, k)].clone() * l[(j, k)].clone();
            }
            l[(i, j)] = s / djj.clone();
        }
        l[(j, j)] = djj;
    }
    Ok(l)
}

/// Solves `L y = b` for lower-triangular `L`.
pub fn solve_lower<T: Real>(l: &Matrix<T>, b: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut y: Vec<T> = Vec::with_capacity(n);
    for i in 0..n {
        let s = dot(&l.row(i)[..i], &y);
        y.push((b[i].clone() - s) / l[(i, i)].clone());
    }
    y
}

/// Solves `Lᵀ x = y` for lower-triangular `L`.
pub fn solve_lower_transpose<T: Real>(l: &Matrix<T>, y: &[T]) -> Vec<T> {
    let n = l.rows();
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = y[i].clone();
        for k in (i + 1)..n {
            s = s - l[(k, i)].clone() * x[k].clone();
        }
        x[i] = s / l[(i, i)].clone();
    }
    x
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant<T: Real>(a: &Matrix<T>) -> T {
    assert!(a.is_square());
    let n = a.rows();
    let mut m = a.clone();
    let mut det = T::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[(i, col)]
                    .abs()
                    .partial_cmp(&m[(j, col)].abs())
                    .expect("finite entries")
            })
            .expect("nonempty range");
        if m[(pivot, col)].is_zero() {
            return T::zero();
        }
        if pivot != col {
            for k in 0..n {
                let tmp = m[(col, k)].clone();
                m[(col, k)] = m[(pivot, k)].clone();
                m[(pivot, k)] = tmp;
            }
            det = -det;
        }
        let p = m[(col, col)].clone();
        det = det * p.clone();
        for i in (col + 1)..n {
            let factor = m[(i, col)].clone() / p.clone();
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let v = m[(i, k)].clone() - factor.clone() * m[(col, k)].clone();
                m[(i, k)] = v;
            }
        }
    }
    det
}

/// Singular values (descending) by one-sided Jacobi rotations.
pub fn singular_values<T: Real>(a: &Matrix<T>) -> Vec<T> {
    let (rows, cols) = (a.rows(), a.cols());
    let bits = a
        .data
        .iter()
        .map(Real::precision)
        .max()
        .unwrap_or(T::max_precision())
        .min(T::max_precision());
    let tol = T::exp2i(-(bits as i32) + 4, bits);
    let mut cols_v: Vec<Vec<T>> = (0..cols).map(|j| a.column(j)).collect();

    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let alpha = dot(&cols_v[p], &cols_v[p]);
                let beta = dot(&cols_v[q], &cols_v[q]);
                let gamma = dot(&cols_v[p], &cols_v[q]);
                if alpha.is_zero() || beta.is_zero() {
                    continue;
                }
                if gamma.abs() <= tol.clone() * (alpha.clone() * beta.clone()).sqrt() {
                    continue;
                }
                rotated = true;
                let two = T::from_int(2, bits);
                let zeta = (beta - alpha) / (two * gamma);
                let root = (T::one() + zeta.clone() * zeta.clone()).sqrt();
                let t = if zeta.is_strictly_negative() {
                    -T::one() / (zeta.abs() + root)
                } else {
                    T::one() / (zeta.abs() + root)
                };
                let c = T::one() / (T::one() + t.clone() * t.clone()).sqrt();
                let s = c.clone() * t;
                for i in 0..rows {
                    let up = cols_v[p][i].clone();
                    let uq = cols_v[q][i].clone();
                    cols_v[p][i] = c.clone() * up.clone() - s.clone() * uq.clone();
                    cols_v[q][i] = s.clone() * up + c.clone() * uq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<T> = cols_v.iter().map(|c| dot(c, c).sqrt()).collect();
    sv.sort_by(|x, y| y.partial_cmp(x).expect("finite singular values"));
    sv
}
