//! The Yangian `Y(gl(2))` acting on tensor products of evaluation modules,
//! and the lowering operators built from it.

use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::scalars::{int, Field};
use crate::sl2rep::{lowering_coefficient, MultiIndex, TensorSpace};

/// A tensor space whose `i`-th factor is the evaluation module at `points[i]`.
#[derive(Debug, Clone)]
pub struct EvaluationAssignment<F> {
    pub space: TensorSpace,
    pub points: Vec<F>,
}

/// Which of the two printed forms of `e(z)` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EOrdering {
    /// Coefficient `l_j(2λ_j − l_j + 1)(z_j + λ_j − l_j + Σ_{s>j} 2(λ_s − l_s))`.
    #[default]
    CoefficientDisplay,
    /// `Σ_j (z_j + h^{(j)} + 2 Σ_{s>j} h^{(s)}) e^{(j)}` with the `h` factors
    /// applied after `e^{(j)}`.
    OperatorDisplay,
}

/// Level change of `T_{ij}`: `T_12` raises, `T_21` lowers.
pub fn level_shift(i: usize, j: usize) -> isize {
    match (i, j) {
        (1, 2) => 1,
        (2, 1) => -1,
        _ => 0,
    }
}

fn target_level(level: usize, shift: isize) -> Option<usize> {
    let t = level as isize + shift;
    (t >= 0).then_some(t as usize)
}

impl<F: Field> EvaluationAssignment<F> {
    pub fn new(space: TensorSpace, points: Vec<F>) -> Self {
        assert_eq!(space.n(), points.len(), "one point per factor");
        EvaluationAssignment { space, points }
    }

    fn lambda(&self, a: usize) -> F {
        F::from_rational(&self.space.lambdas[a])
    }

    /// Single-factor action of `X_{ij}` (`X_11 = h`, `X_12 = f`,
    /// `X_21 = e`, `X_22 = −h`) on coordinate `a` of `idx`.
    fn slot(&self, a: usize, i: usize, j: usize, idx: &mut MultiIndex) -> Option<F> {
        let m = idx[a];
        match (i, j) {
            (1, 1) => Some(self.lambda(a) - F::from_i64(m as i64)),
            (2, 2) => Some(F::from_i64(m as i64) - self.lambda(a)),
            (1, 2) => {
                idx[a] += 1;
                Some(F::one())
            }
            (2, 1) => {
                if m == 0 {
                    return None;
                }
                idx[a] -= 1;
                Some(F::from_rational(&lowering_coefficient(&self.space.lambdas[a], m)))
            }
            _ => unreachable!("indices are 1 or 2"),
        }
    }

    /// `T^{(s)}_{ij}` on the level block, through the iterated coproduct
    /// `Δ T^{(s)}_{ij} = Σ_k Σ_r T^{(r)}_{ik} ⊗ T^{(s−r)}_{kj}` and the
    /// evaluation action `T^{(s)}_{ij} = x^{s−1} X_{ij}`.
    pub fn act_t(&self, i: usize, j: usize, s: usize, level: usize) -> Matrix<F> {
        assert!((1..=2).contains(&i) && (1..=2).contains(&j), "generator indices are 1 or 2");
        let n = self.space.n();
        self.space.operator(level, target_level(level, level_shift(i, j)), |idx| {
            let mut out = Vec::new();
            self.expand(0, n, i, j, s, idx.to_vec(), F::one(), &mut out);
            out
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn expand(&self, a: usize, n: usize, k: usize, j: usize, s_left: usize, idx: MultiIndex, coef: F, out: &mut Vec<(MultiIndex, F)>) {
        if a == n {
            if k == j && s_left == 0 {
                out.push((idx, coef));
            }
            return;
        }
        // s_a = 0: identity, index unchanged.
        self.expand(a + 1, n, k, j, s_left, idx.clone(), coef.clone(), out);
        for sa in 1..=s_left {
            let mut zpow = F::one();
            for _ in 1..sa {
                zpow = zpow * self.points[a].clone();
            }
            for next in 1..=2 {
                let mut img = idx.clone();
                if let Some(c) = self.slot(a, k, next, &mut img) {
                    if c.is_zero() {
                        continue;
                    }
                    self.expand(a + 1, n, next, j, s_left - sa, img, coef.clone() * c * zpow.clone(), out);
                }
            }
        }
    }

    /// `T^{(1)}_{21}`: the total `e`.
    pub fn total_e(&self, level: usize) -> Matrix<F> {
        self.act_t(2, 1, 1, level)
    }

    /// `e(z)` from `level` to `level − 1`.
    pub fn op_e_z(&self, level: usize, ordering: EOrdering) -> Matrix<F> {
        let n = self.space.n();
        let shift = match ordering {
            EOrdering::CoefficientDisplay => int(0),
            EOrdering::OperatorDisplay => int(1),
        };
        self.space.operator(level, level.checked_sub(1), |idx| {
            (0..n)
                .filter(|&j| idx[j] > 0)
                .map(|j| {
                    let lam = &self.space.lambdas;
                    let mut c = &lam[j] - int(idx[j] as i64) + &shift;
                    for s in j + 1..n {
                        c += (&lam[s] - int(idx[s] as i64)) * int(2);
                    }
                    let coef = F::from_rational(&lowering_coefficient(&lam[j], idx[j]))
                        * (self.points[j].clone() + F::from_rational(&c));
                    let mut img = idx.to_vec();
                    img[j] -= 1;
                    (img, coef)
                })
                .collect()
        })
    }

    /// `e_x(z) = e(z) + x T^{(1)}_{21}`.
    pub fn op_e_x_z(&self, level: usize, x: &F) -> Matrix<F> {
        self.op_e_z(level, EOrdering::CoefficientDisplay).add(&self.total_e(level).scale(x))
    }

    /// `e(z)` assembled from Yangian generators as
    /// `T^{(2)}_{21} − T^{(1)}_{dd} T^{(1)}_{21}` with `d` the given diagonal
    /// index (1 or 2).
    pub fn op_e_z_from_generators(&self, level: usize, d: usize) -> Matrix<F> {
        let t2 = self.act_t(2, 1, 2, level);
        if level == 0 {
            return t2;
        }
        let diag = self.act_t(d, d, 1, level - 1);
        t2.sub(&diag.mul(&self.total_e(level)))
    }

    /// Classical `E(z)`: `l̄ ↦ Σ_i l_i(2λ_i − l_i + 1) z_i (l̄ − 1_i)`.
    pub fn op_e_classical(&self, level: usize) -> Matrix<F> {
        let n = self.space.n();
        self.space.operator(level, level.checked_sub(1), |idx| {
            (0..n)
                .filter(|&j| idx[j] > 0)
                .map(|j| {
                    let mut img = idx.to_vec();
                    img[j] -= 1;
                    let c = F::from_rational(&lowering_coefficient(&self.space.lambdas[j], idx[j]));
                    (img, c * self.points[j].clone())
                })
                .collect()
        })
    }
}

/// Composes a level-lowering operator family `k` times starting at `level`:
/// `op(level − k + 1) ∘ … ∘ op(level)`.
pub fn lowering_power<F: Field>(level: usize, k: usize, op: impl Fn(usize) -> Matrix<F>) -> Matrix<F> {
    let mut acc = op(level);
    for step in 1..k {
        if level < step {
            break;
        }
        acc = op(level - step).mul(&acc);
    }
    acc
}
