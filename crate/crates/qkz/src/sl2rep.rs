//! Tensor products of sl(2) Verma and irreducible highest-weight modules on
//! the monomial basis `f^{l_1}v_1 ⊗ … ⊗ f^{l_n}v_n`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Signed;

use crate::linalg::Matrix;
use crate::scalars::{as_integer, int, Field, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Verma,
    /// Quotient of the Verma module by its maximal submodule. Only differs
    /// from `Verma` when `2λ` is a nonnegative integer.
    Irreducible,
}

pub type MultiIndex = Vec<usize>;

/// `2λ` as a nonnegative integer when `λ` is dominant integral (`λ ∈ Λ^+`).
pub fn dominant_cap(lambda: &Rational) -> Option<usize> {
    let two = lambda * int(2);
    if two.is_negative() {
        return None;
    }
    as_integer(&two).map(|c| c as usize)
}

/// All `l̄ ∈ Z^n_{≥0}` with `Σ l_i = level` and `l_i ≤ caps[i]`, in
/// descending lexicographic order (`(1,0)` before `(0,1)`).
pub fn multi_indices(n: usize, level: usize, caps: &[Option<usize>]) -> Vec<MultiIndex> {
    fn go(pos: usize, left: usize, caps: &[Option<usize>], cur: &mut MultiIndex, out: &mut Vec<MultiIndex>) {
        if pos + 1 == cur.len() {
            if caps[pos].map_or(true, |c| left <= c) {
                cur[pos] = left;
                out.push(cur.clone());
            }
            return;
        }
        let top = caps[pos].map_or(left, |c| c.min(left));
        for v in (0..=top).rev() {
            cur[pos] = v;
            go(pos + 1, left - v, caps, cur, out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if level == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    go(0, level, caps, &mut vec![0; n], &mut out);
    out
}

/// Ordered basis of one weight level, with reverse lookup.
#[derive(Debug, Clone)]
pub struct Basis {
    pub indices: Vec<MultiIndex>,
    lookup: BTreeMap<MultiIndex, usize>,
}

impl Basis {
    fn new(indices: Vec<MultiIndex>) -> Self {
        let lookup = indices.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        Basis { indices, lookup }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn position(&self, m: &[usize]) -> Option<usize> {
        self.lookup.get(m).copied()
    }
}

/// An ordered tensor product `M_1 ⊗ … ⊗ M_n` of highest-weight modules.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorSpace {
    pub kinds: Vec<ModuleKind>,
    pub lambdas: Vec<Rational>,
}

impl TensorSpace {
    pub fn new(kinds: Vec<ModuleKind>, lambdas: Vec<Rational>) -> Self {
        assert_eq!(kinds.len(), lambdas.len(), "one kind per weight");
        TensorSpace { kinds, lambdas }
    }

    pub fn uniform(kind: ModuleKind, lambdas: Vec<Rational>) -> Self {
        TensorSpace { kinds: vec![kind; lambdas.len()], lambdas }
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// Per-factor coordinate caps: `2λ_i` for irreducible factors with
    /// `λ_i ∈ Λ^+`, none otherwise.
    pub fn caps(&self) -> Vec<Option<usize>> {
        self.kinds
            .iter()
            .zip(&self.lambdas)
            .map(|(k, l)| match k {
                ModuleKind::Verma => None,
                ModuleKind::Irreducible => dominant_cap(l),
            })
            .collect()
    }

    pub fn basis(&self, level: usize) -> Basis {
        Basis::new(multi_indices(self.n(), level, &self.caps()))
    }

    pub fn dim(&self, level: usize) -> usize {
        self.basis(level).len()
    }

    /// Same weights with every factor of the given kind.
    pub fn with_kind(&self, kind: ModuleKind) -> TensorSpace {
        TensorSpace::uniform(kind, self.lambdas.clone())
    }

    /// The space with factors `i` and `i+1` exchanged.
    pub fn swapped(&self, i: usize) -> TensorSpace {
        let mut s = self.clone();
        s.kinds.swap(i, i + 1);
        s.lambdas.swap(i, i + 1);
        s
    }

    /// Operator from `level` to `target` given by a per-basis-vector rule
    /// returning `(image index, coefficient)` pairs.
    pub fn operator<F: Field>(
        &self,
        level: usize,
        target: Option<usize>,
        rule: impl Fn(&[usize]) -> Vec<(MultiIndex, F)>,
    ) -> Matrix<F> {
        let src = self.basis(level);
        let Some(target) = target else {
            return Matrix::zeros(0, src.len());
        };
        let dst = self.basis(target);
        let mut m: Matrix<F> = Matrix::zeros(dst.len(), src.len());
        for (c, idx) in src.indices.iter().enumerate() {
            for (img, coef) in rule(idx) {
                if coef.is_zero() {
                    continue;
                }
                // Images outside the capped basis vanish in the quotient.
                if let Some(r) = dst.position(&img) {
                    m[(r, c)] = m[(r, c)].clone() + coef;
                }
            }
        }
        m
    }

    /// `h` on the level block: diagonal with entries `Σ (λ_i − l_i)`.
    pub fn act_h<F: Field>(&self, level: usize) -> Matrix<F> {
        self.operator(level, Some(level), |idx| {
            let w: Rational = self.lambdas.iter().zip(idx).map(|(l, &m)| l - int(m as i64)).sum();
            vec![(idx.to_vec(), F::from_rational(&w))]
        })
    }

    /// `f` from `level` to `level + 1`, on factor `j` or (when `None`) the
    /// total coproduct action.
    pub fn act_f<F: Field>(&self, level: usize, factor: Option<usize>) -> Matrix<F> {
        self.operator(level, Some(level + 1), |idx| {
            self.factors(factor)
                .map(|j| {
                    let mut img = idx.to_vec();
                    img[j] += 1;
                    (img, F::one())
                })
                .collect()
        })
    }

    /// `e` from `level` to `level − 1`: `e f^m v = m(2λ − m + 1) f^{m−1} v`.
    pub fn act_e<F: Field>(&self, level: usize, factor: Option<usize>) -> Matrix<F> {
        self.operator(level, level.checked_sub(1), |idx| {
            self.factors(factor)
                .filter(|&j| idx[j] > 0)
                .map(|j| {
                    let mut img = idx.to_vec();
                    img[j] -= 1;
                    (img, F::from_rational(&lowering_coefficient(&self.lambdas[j], idx[j])))
                })
                .collect()
        })
    }

    fn factors(&self, factor: Option<usize>) -> impl Iterator<Item = usize> {
        match factor {
            Some(j) => j..j + 1,
            None => 0..self.n(),
        }
    }

    /// Basis of the singular space `ker e` at `level`, as coordinate vectors.
    pub fn singular_basis<F: Field>(&self, level: usize) -> Vec<Vec<F>> {
        self.act_e::<F>(level, None).kernel()
    }
}

/// `m (2λ − m + 1)`, the coefficient of `e f^m v = · f^{m−1} v`.
pub fn lowering_coefficient(lambda: &Rational, m: usize) -> Rational {
    let m = int(m as i64);
    &m * (lambda * int(2) - &m + int(1))
}

/// `C(a, b)` as `usize`.
pub fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut r: usize = 1;
    for i in 0..b {
        r = r * (a - i) / (i + 1);
    }
    r
}
