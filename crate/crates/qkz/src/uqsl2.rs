//! `U_q(sl2)` acting on tensor products of q-deformed Verma and irreducible
//! modules, on the same multi-index bases as the classical modules.
//!
//! Coproduct convention: `Δf_q = f_q ⊗ q^h + q^{−h} ⊗ f_q` and
//! `Δe_q = e_q ⊗ q^h + q^{−h} ⊗ e_q`, iterated so that the generator on
//! factor `i` carries `q^{−h}` on the factors before it and `q^h` after it.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{numeric_kernel, vec_norm, CMatrix};
use crate::scalars::{int, q_number, tau_rank, tau_res, Cx, QValue, Rational};
use crate::sl2rep::{MultiIndex, TensorSpace};

pub type CxVector = Vec<Cx>;

#[derive(Debug, Clone)]
pub struct QTensorSpace {
    pub space: TensorSpace,
    pub q: QValue,
}

impl QTensorSpace {
    pub fn new(space: TensorSpace, p: &Rational) -> Result<Self> {
        Ok(QTensorSpace { space, q: QValue::new(p)? })
    }

    fn operator(&self, level: usize, target: Option<usize>, rule: impl Fn(&[usize]) -> Vec<(MultiIndex, Cx)>) -> CMatrix {
        let src = self.space.basis(level);
        let Some(target) = target else {
            return CMatrix::zeros(0, src.len());
        };
        let dst = self.space.basis(target);
        let mut m = CMatrix::zeros(dst.len(), src.len());
        for (c, idx) in src.indices.iter().enumerate() {
            for (img, coef) in rule(idx) {
                if let Some(r) = dst.position(&img) {
                    m[(r, c)] = &m[(r, c)] + &coef;
                }
            }
        }
        m
    }

    /// Weight `λ_i − l_i` of factor `i`.
    fn weight(&self, i: usize, idx: &[usize]) -> Rational {
        &self.space.lambdas[i] - int(idx[i] as i64)
    }

    /// `q^{−h}` on factors before `j` times `q^{h}` on factors after `j`.
    fn flank(&self, j: usize, idx: &[usize]) -> Cx {
        let mut e = int(0);
        for i in 0..idx.len() {
            if i < j {
                e -= self.weight(i, idx);
            } else if i > j {
                e += self.weight(i, idx);
            }
        }
        self.q.pow(&e)
    }

    /// `q^h`: diagonal with entries `q^{Σ(λ_i − l_i)}`.
    pub fn act_qh(&self, level: usize) -> CMatrix {
        self.operator(level, Some(level), |idx| {
            let w: Rational = (0..idx.len()).map(|i| self.weight(i, idx)).sum();
            alloc::vec![(idx.to_vec(), self.q.pow(&w))]
        })
    }

    /// `f_q` from `level` to `level + 1`.
    pub fn act_fq(&self, level: usize) -> CMatrix {
        self.operator(level, Some(level + 1), |idx| {
            (0..idx.len())
                .map(|j| {
                    let mut img = idx.to_vec();
                    img[j] += 1;
                    (img, self.flank(j, idx))
                })
                .collect()
        })
    }

    /// `e_q` from `level` to `level − 1`, with
    /// `e_q f_q^m v = [m]_q [2λ − m + 1]_q f_q^{m−1} v` on each factor.
    pub fn act_eq(&self, level: usize) -> CMatrix {
        self.operator(level, level.checked_sub(1), |idx| {
            (0..idx.len())
                .filter(|&j| idx[j] > 0)
                .map(|j| {
                    let m = int(idx[j] as i64);
                    let lam2 = &self.space.lambdas[j] * int(2);
                    let c = &q_number(&m, &self.q) * &q_number(&(lam2 - &m + int(1)), &self.q);
                    let mut img = idx.to_vec();
                    img[j] -= 1;
                    (img, &c * &self.flank(j, idx))
                })
                .collect()
        })
    }

    /// `(f_q)^k` from `level` to `level + k`.
    pub fn fq_power(&self, level: usize, k: usize) -> CMatrix {
        let mut acc = CMatrix::identity(self.space.dim(level));
        for s in 0..k {
            acc = self.act_fq(level + s).mul(&acc);
        }
        acc
    }

    /// Numerical kernel of `e_q` on the level block, checked against the
    /// classical singular dimension.
    pub fn q_singular_basis(&self, level: usize) -> Result<Vec<CxVector>> {
        let basis = numeric_kernel(&self.act_eq(level), tau_rank())?;
        let classical = self.space.act_e::<Rational>(level, None).kernel().len();
        if basis.len() != classical {
            return Err(Error::DimensionMismatch { expected: classical, found: basis.len() });
        }
        Ok(basis)
    }

    /// `(f_q)^k (sing_{l−k})` inside the level-`l` block.
    pub fn fq_power_image(&self, level: usize, k: usize) -> Result<QImage> {
        if k > level {
            return Ok(QImage { vectors: Vec::new(), rank: 0, max_residual: 0.0 });
        }
        let src = self.q_singular_basis(level - k)?;
        let fk = self.fq_power(level - k, k);
        let eq = self.act_eq(level);
        let scale = eq.frobenius().max(1.0);
        let vectors: Vec<CxVector> = src.iter().map(|v| fk.apply(v)).collect();
        let mut max_residual: f64 = 0.0;
        for w in &vectors {
            let nw = vec_norm(w);
            if nw > 0.0 {
                max_residual = max_residual.max(vec_norm(&eq.apply(w)) / (scale * nw));
            }
        }
        if max_residual >= tau_res() {
            return Err(Error::ResidualTooLarge {
                context: "image of (f_q)^k is not singular".into(),
                residual: max_residual,
                bound: tau_res(),
            });
        }
        let rank = numeric_rank(&vectors, self.space.dim(level))?;
        Ok(QImage { vectors, rank, max_residual })
    }

    /// `dim sing_l − dim (f_q)^k(sing_{l−k})`; the full singular dimension
    /// for `k = 0` (non-resonant) or `k > l`.
    pub fn quotient_dimension(&self, level: usize, k: usize) -> Result<usize> {
        let sing = self.q_singular_basis(level)?.len();
        if k == 0 || k > level {
            return Ok(sing);
        }
        Ok(sing - self.fq_power_image(level, k)?.rank)
    }

    /// Largest relative residual of `e_q (f_q)^k v − [Σ2λ − 2(l−k) − k + 1]_q
    /// [k]_q (f_q)^{k−1} v` over singular `v` at level `l − k`.
    pub fn lemma_fk_residual(&self, level: usize, k: usize) -> Result<f64> {
        if k == 0 || k > level {
            return Ok(0.0);
        }
        let src_level = level - k;
        let total: Rational = self.space.lambdas.iter().map(|x| x * int(2)).sum();
        let arg = total - int(2 * src_level as i64) - int(k as i64) + int(1);
        let c = &q_number(&arg, &self.q) * &q_number(&int(k as i64), &self.q);
        let lhs_op = self.act_eq(level).mul(&self.fq_power(src_level, k));
        let rhs_op = self.fq_power(src_level, k - 1).scale(&c);
        let scale = lhs_op.frobenius().max(rhs_op.frobenius()).max(1.0);
        let mut worst: f64 = 0.0;
        for v in self.q_singular_basis(src_level)? {
            let d: Vec<Cx> = lhs_op.apply(&v).iter().zip(rhs_op.apply(&v)).map(|(a, b)| a - &b).collect();
            worst = worst.max(vec_norm(&d) / (scale * vec_norm(&v)));
        }
        Ok(worst)
    }

    /// Relative residuals of `q^h e_q = q e_q q^h`, `q^h f_q = q^{−1} f_q q^h`
    /// and `[e_q, f_q] = (q^{2h} − q^{−2h})/(q − q^{−1})` on the level block.
    pub fn relation_residuals(&self, level: usize) -> RelationResiduals {
        let q = &self.q.q;
        let qinv = &Cx::one() / q;
        let qh = self.act_qh(level);
        let qh_up = self.act_qh(level + 1);
        let f = self.act_fq(level);
        let weight_f = rel(&qh_up.mul(&f), &f.mul(&qh).scale(&qinv));
        let weight_e = if level == 0 {
            0.0
        } else {
            let e = self.act_eq(level);
            rel(&self.act_qh(level - 1).mul(&e), &e.mul(&qh).scale(q))
        };
        let ef = self.act_eq(level + 1).mul(&f);
        let fe = if level == 0 { CMatrix::zeros(f.cols(), f.cols()) } else { self.act_fq(level - 1).mul(&self.act_eq(level)) };
        let q2 = qh.mul(&qh);
        let inv_diag = {
            let mut m = CMatrix::zeros(q2.rows(), q2.cols());
            for i in 0..q2.rows() {
                m[(i, i)] = &Cx::one() / &q2[(i, i)];
            }
            m
        };
        let den = q - &qinv;
        let rhs = q2.sub(&inv_diag).scale(&(&Cx::one() / &den));
        let commutator = rel(&ef.sub(&fe), &rhs);
        RelationResiduals { weight_e, weight_f, commutator }
    }
}

#[derive(Debug, Clone)]
pub struct QImage {
    pub vectors: Vec<CxVector>,
    pub rank: usize,
    /// Largest relative `‖e_q w‖` over image vectors `w`.
    pub max_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelationResiduals {
    pub weight_e: f64,
    pub weight_f: f64,
    pub commutator: f64,
}

impl RelationResiduals {
    pub fn max(&self) -> f64 {
        self.weight_e.max(self.weight_f).max(self.commutator)
    }
}

fn rel(a: &CMatrix, b: &CMatrix) -> f64 {
    let scale = a.frobenius().max(b.frobenius()).max(1.0);
    a.sub(b).frobenius() / scale
}

/// Numerical rank of a list of vectors at threshold `τ_rank`.
pub fn numeric_rank(vs: &[CxVector], dim: usize) -> Result<usize> {
    if vs.is_empty() {
        return Ok(0);
    }
    let m = CMatrix::from_cols(dim, vs);
    Ok(vs.len() - numeric_kernel(&m, tau_rank())?.len())
}
