use std::fmt;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{SpanBasis, SparseVec};
use crate::scalar::{to_fraction_string, Scalar};

/// Small dense matrix over the rationals, stored row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Scalar::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Scalar::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Option<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return None;
        }
        Some(Self {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(rows: usize, cols: &[Vec<Scalar>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows);
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matrix shapes do not compose");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(&Scalar::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(&-Scalar::one(), other)
    }

    /// `self + c * other`
    pub fn axpy(&self, c: &Scalar, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (x, y) in out.data.iter_mut().zip(&other.data) {
            if !y.is_zero() {
                *x += c * y;
            }
        }
        out
    }

    pub fn scaled(&self, c: &Scalar) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    fn row_span(&self) -> SpanBasis<usize> {
        let mut s = SpanBasis::new();
        for i in 0..self.rows {
            let v: SparseVec<usize> = self
                .row(i)
                .iter()
                .enumerate()
                .map(|(j, x)| (j, x.clone()))
                .collect();
            s.insert(&v);
        }
        s
    }

    pub fn rank(&self) -> usize {
        self.row_span().rank()
    }

    /// Basis of `{x : self * x = 0}`.
    pub fn kernel(&self) -> Vec<Vec<Scalar>> {
        let span = self.row_span();
        (0..self.cols)
            .filter(|j| !span.is_pivot(j))
            .map(|free| {
                let mut x = vec![Scalar::zero(); self.cols];
                x[free] = Scalar::one();
                for row in span.rows() {
                    let (pivot, _) = row.leading().expect("rows are nonzero");
                    x[*pivot] = -row.coeff(&free);
                }
                x
            })
            .collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(to_fraction_string).collect())
            .collect()
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = Scalar;

    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.to_strings()).finish()
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| int(x)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn products_and_rank() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), m(&[&[2, 1], &[4, 3]]));
        assert_eq!(a.mul(&Matrix::identity(2)), a);
        assert_eq!(a.rank(), 2);
        assert_eq!(m(&[&[1, 2], &[2, 4]]).rank(), 1);
        assert_eq!(a.transpose(), m(&[&[1, 3], &[2, 4]]));
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let ker = a.kernel();
        assert_eq!(ker.len(), 2);
        for x in ker {
            let col = Matrix::from_columns(3, &[x]);
            assert!(a.mul(&col).is_zero());
        }
        assert!(Matrix::identity(3).kernel().is_empty());
    }
}
