use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::scalars::Field;

/// Dense row-major matrix over an exact field.
#[derive(Clone, PartialEq)]
pub struct Matrix<F> {
    rows: usize,
    cols: usize,
    data: Vec<F>,
}

/// Nonzero entry `(row, col, value)` for CSV export.
pub type Triplet = (usize, usize, String);

impl<F: Field> Matrix<F> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![F::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = F::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<F>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Matrix whose columns are the given vectors, each of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<F>]) -> Self {
        let mut m = Matrix::zeros(rows, cols.len());
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.len(), rows, "column length");
            for (i, x) in v.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[F] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<F> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<F>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(F::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix<F>) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out: Matrix<F> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[F]) -> Vec<F> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, b)| !a.is_zero() && !b.is_zero())
                    .fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Matrix<F>) -> Self {
        self.zip_with(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Matrix<F>) -> Self {
        self.zip_with(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, s: &F) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }

    fn zip_with(&self, other: &Matrix<F>, f: impl Fn(&F, &F) -> F) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn pow(&self, k: usize) -> Self {
        assert_eq!(self.rows, self.cols, "square");
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = self.mul(&acc);
        }
        acc
    }

    /// Commutator `AB − BA`.
    pub fn commutator(&self, other: &Matrix<F>) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix<F>) -> Self {
        assert_eq!(self.cols, other.cols, "column count");
        let mut data = self.data.clone();
        data.extend(other.data.iter().cloned());
        Matrix { rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Places `self` left of `other`.
    pub fn hstack(&self, other: &Matrix<F>) -> Self {
        self.transpose().vstack(&other.transpose()).transpose()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut out = Matrix::zeros(idx.len(), self.cols);
        for (r, &i) in idx.iter().enumerate() {
            for j in 0..self.cols {
                out[(r, j)] = self[(i, j)].clone();
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Matrix::zeros(rows.len(), cols.len());
        for (r, &i) in rows.iter().enumerate() {
            for (c, &j) in cols.iter().enumerate() {
                out[(r, c)] = self[(i, j)].clone();
            }
        }
        out
    }

    /// Row echelon form by fraction-free (Bareiss) elimination. Rows are
    /// first cleared of denominators; the pivot in each column is the first
    /// nonzero entry at or below the current row. Returns the reduced matrix
    /// and the pivot columns.
    pub fn echelon(&self) -> (Matrix<F>, Vec<usize>) {
        let mut a = self.clone();
        for i in 0..a.rows {
            let lcm = a.row(i).iter().fold(num_bigint::BigInt::from(1), |acc, x| {
                num_integer::Integer::lcm(&acc, &x.denominator_lcm())
            });
            if lcm != num_bigint::BigInt::from(1) {
                let s = F::from_rational(&crate::scalars::Rational::from_integer(lcm));
                for j in 0..a.cols {
                    a[(i, j)] = a[(i, j)].clone() * s.clone();
                }
            }
        }
        let mut pivots = Vec::new();
        let mut prev = F::one();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else {
                continue;
            };
            if p != r {
                a.swap_rows(p, r);
            }
            let piv = a[(r, c)].clone();
            for i in r + 1..a.rows {
                let lead = a[(i, c)].clone();
                for j in c..a.cols {
                    let v = (piv.clone() * a[(i, j)].clone() - lead.clone() * a[(r, j)].clone()) / prev.clone();
                    a[(i, j)] = v;
                }
            }
            prev = piv;
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        for c in 0..self.cols {
            self.data.swap(i * self.cols + c, j * self.cols + c);
        }
    }

    pub fn rank(&self) -> usize {
        self.echelon().1.len()
    }

    /// Basis of the right kernel, one vector per free column (the free
    /// coordinate set to 1, the other free coordinates to 0).
    pub fn kernel(&self) -> Vec<Vec<F>> {
        let (a, pivots) = self.echelon();
        let n = self.cols;
        let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut x = vec![F::zero(); n];
                x[fc] = F::one();
                for (r, &pc) in pivots.iter().enumerate().rev() {
                    let mut s = F::zero();
                    for j in pc + 1..n {
                        if !a[(r, j)].is_zero() && !x[j].is_zero() {
                            s = s + a[(r, j)].clone() * x[j].clone();
                        }
                    }
                    x[pc] = -s / a[(r, pc)].clone();
                }
                x
            })
            .collect()
    }

    /// Solutions of `self · x = b`: a particular solution plus a kernel
    /// basis, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &[F]) -> Option<(Vec<F>, Vec<Vec<F>>)> {
        assert_eq!(b.len(), self.rows, "right-hand side length");
        let aug = self.hstack(&Matrix::from_cols(self.rows, &[b.to_vec()]));
        let (e, pivots) = aug.echelon();
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let n = self.cols;
        let mut x = vec![F::zero(); n];
        for (r, &pc) in pivots.iter().enumerate().rev() {
            let mut s = e[(r, n)].clone();
            for j in pc + 1..n {
                if !e[(r, j)].is_zero() && !x[j].is_zero() {
                    s = s - e[(r, j)].clone() * x[j].clone();
                }
            }
            x[pc] = s / e[(r, pc)].clone();
        }
        Some((x, self.kernel()))
    }

    /// Nonzero entries with values in canonical text form.
    pub fn triplets(&self) -> Vec<Triplet> {
        let mut out = Vec::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = &self[(i, j)];
                if !v.is_zero() {
                    out.push((i, j, v.key()));
                }
            }
        }
        out
    }
}

/// Column space helpers on lists of vectors.
impl<F: Field> Matrix<F> {
    /// `true` when the columns of `a` and `b` span the same subspace.
    pub fn same_span(dim: usize, a: &[Vec<F>], b: &[Vec<F>]) -> bool {
        let ma = Matrix::from_cols(dim, a);
        let mb = Matrix::from_cols(dim, b);
        let ra = ma.rank();
        ra == mb.rank() && ma.hstack(&mb).rank() == ra
    }

    /// `true` when every vector in `vs` lies in the span of `basis`.
    pub fn span_contains(dim: usize, basis: &[Vec<F>], vs: &[Vec<F>]) -> bool {
        let mb = Matrix::from_cols(dim, basis);
        let r = mb.rank();
        mb.hstack(&Matrix::from_cols(dim, vs)).rank() == r
    }

    /// Rank of a list of vectors.
    pub fn span_rank(dim: usize, vs: &[Vec<F>]) -> usize {
        Matrix::from_cols(dim, vs).rank()
    }

    /// Kernel of `self` restricted to the span of `basis`, returned as
    /// vectors in the ambient space.
    pub fn kernel_on(&self, basis: &[Vec<F>]) -> Vec<Vec<F>> {
        if basis.is_empty() {
            return Vec::new();
        }
        let b = Matrix::from_cols(self.cols, basis);
        self.mul(&b).kernel().into_iter().map(|c| b.apply(&c)).collect()
    }
}

impl<F> Index<(usize, usize)> for Matrix<F> {
    type Output = F;
    fn index(&self, (i, j): (usize, usize)) -> &F {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<F> IndexMut<(usize, usize)> for Matrix<F> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut F {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<F: fmt::Display> fmt::Debug for Matrix<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> =
                self.data[i * self.cols..(i + 1) * self.cols].iter().map(|x| alloc::format!("{x}")).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}
