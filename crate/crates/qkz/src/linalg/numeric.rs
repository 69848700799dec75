use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalars::{Cx, Field, Real};

use super::Matrix;

/// Dense row-major complex matrix at working precision.
#[derive(Clone, Debug)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Cx>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix { rows, cols, data: vec![Cx::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Cx::one();
        }
        m
    }

    pub fn from_exact<F: Field>(m: &Matrix<F>) -> Self {
        let mut out = CMatrix::zeros(m.rows(), m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if !m[(i, j)].is_zero() {
                    out[(i, j)] = m[(i, j)].to_cx();
                }
            }
        }
        out
    }

    pub fn from_cols(rows: usize, cols: &[Vec<Cx>]) -> Self {
        let mut m = CMatrix::zeros(rows, cols.len());
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

    pub fn col(&self, j: usize) -> Vec<Cx> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<Cx>> {
        (0..self.cols).map(|j| self.col(j)).collect()
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = &out[(i, j)] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Cx]) -> Vec<Cx> {
        assert_eq!(self.cols, v.len(), "vector length");
        (0..self.rows)
            .map(|i| {
                let mut acc = Cx::zero();
                for (j, x) in v.iter().enumerate() {
                    let a = &self[(i, j)];
                    if !a.is_zero() && !x.is_zero() {
                        acc = &acc + &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape");
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: &Cx) -> CMatrix {
        CMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn pow(&self, k: usize) -> CMatrix {
        let mut acc = CMatrix::identity(self.rows);
        for _ in 0..k {
            acc = self.mul(&acc);
        }
        acc
    }

    /// Largest entry modulus, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Cx::abs_f64).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        vec_norm(&self.data)
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Cx;
    fn index(&self, (i, j): (usize, usize)) -> &Cx {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cx {
        &mut self.data[i * self.cols + j]
    }
}

/// Euclidean norm of a complex vector, as `f64`.
pub fn vec_norm(v: &[Cx]) -> f64 {
    let m = v.iter().map(Cx::abs_f64).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    let s: f64 = v.iter().map(|x| (x.abs_f64() / m).powi(2)).sum();
    m * libm::sqrt(s)
}

fn dot(a: &[Cx], b: &[Cx]) -> Cx {
    // a^H b
    a.iter().zip(b).fold(Cx::zero(), |acc, (x, y)| &acc + &(&x.conj() * y))
}

/// Singular value decomposition `A V = U Σ` by one-sided Jacobi rotations.
/// `sigma[j]` is the norm of the `j`-th rotated column; `v` holds the right
/// singular vectors as columns.
pub struct Svd {
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

pub fn singular_values(a: &CMatrix) -> Svd {
    let n = a.cols;
    let mut cols = a.columns();
    let mut v = CMatrix::identity(n).columns();
    let eps = crate::scalars::ten_pow_neg(crate::scalars::working_bits() * 301 / 1000);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&cols[p], &cols[p]).re;
                let beta = dot(&cols[q], &cols[q]).re;
                let gamma = dot(&cols[p], &cols[q]);
                let g = gamma.abs();
                if g.is_zero() {
                    continue;
                }
                let scale = (&alpha * &beta).sqrt();
                if g.to_f64() <= eps * scale.to_f64() {
                    continue;
                }
                rotated = true;
                let phase = Cx::new(&gamma.re / &g, &gamma.im / &g);
                let two = Real::from_i64(2);
                let zeta = (&beta - &alpha) / (&two * &g);
                let root = (Real::one() + &zeta * &zeta).sqrt();
                let t = if zeta.is_negative() { -(Real::one() / (zeta.abs() + root)) } else { Real::one() / (zeta.abs() + root) };
                let c = Real::one() / (Real::one() + &t * &t).sqrt();
                let s = &c * &t;
                let (cc, sc) = (Cx::from_real(c), Cx::from_real(s));
                let sp = &sc * &phase.conj();
                let sq = &sc * &phase;
                for vecs in [&mut cols, &mut v] {
                    let (xp, xq) = (vecs[p].clone(), vecs[q].clone());
                    vecs[p] = xp.iter().zip(&xq).map(|(a, b)| &(&cc * a) - &(&sp * b)).collect();
                    vecs[q] = xp.iter().zip(&xq).map(|(a, b)| &(&sq * a) + &(&cc * b)).collect();
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sigma = cols.iter().map(|c| vec_norm(c)).collect();
    Svd { sigma, v: CMatrix::from_cols(n, &v) }
}

/// Numerical right kernel of `a`: right singular vectors whose singular
/// value is below `threshold · σ_max`. Fails when some ratio lies within two
/// orders of magnitude of the threshold.
pub fn numeric_kernel(a: &CMatrix, threshold: f64) -> Result<Vec<Vec<Cx>>> {
    let n = a.cols;
    if n == 0 {
        return Ok(Vec::new());
    }
    if a.rows == 0 {
        return Ok(CMatrix::identity(n).columns());
    }
    let svd = singular_values(a);
    let smax = svd.sigma.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(CMatrix::identity(n).columns());
    }
    let mut out = Vec::new();
    for (j, s) in svd.sigma.iter().enumerate() {
        let ratio = s / smax;
        if ratio > threshold / 100.0 && ratio < threshold * 100.0 {
            return Err(Error::RankAmbiguity { ratio, threshold });
        }
        if ratio <= threshold {
            out.push(svd.v.col(j));
        }
    }
    Ok(out)
}

/// Relative distance of `v` from the span of `basis`
/// (`‖v − proj(v)‖ / ‖v‖`, or 0 for `v = 0`).
pub fn span_residual(basis: &[Vec<Cx>], v: &[Cx]) -> f64 {
    let nv = vec_norm(v);
    if nv == 0.0 {
        return 0.0;
    }
    let mut ortho: Vec<Vec<Cx>> = Vec::new();
    for b in basis {
        let mut w = b.clone();
        for _ in 0..2 {
            for q in &ortho {
                let c = dot(q, &w);
                w = w.iter().zip(q).map(|(x, y)| x - &(&c * y)).collect();
            }
        }
        let nw = dot(&w, &w).re.sqrt();
        if nw.to_f64() > 1e-300 && nw.to_f64() > 1e-20 * vec_norm(b) {
            let inv = Real::one() / nw;
            ortho.push(w.iter().map(|x| x.scale(&inv)).collect());
        }
    }
    let mut r = v.to_vec();
    for _ in 0..2 {
        for q in &ortho {
            let c = dot(q, &r);
            r = r.iter().zip(q).map(|(x, y)| x - &(&c * y)).collect();
        }
    }
    vec_norm(&r) / nv
}
