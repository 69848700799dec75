//! Quantized conformal blocks `C(z)`, their classical limit `N(z)`, and the
//! checks that tie them to the qKZ connection.

use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::params::{resonance_order, validate, ParamSet};
use crate::rmatrix_qkz::{QkzData, RCache};
use crate::scalars::{gauss, int, rat, Field, GaussRational, Rational};
use crate::sl2rep::{ModuleKind, TensorSpace};
use crate::yangian::{lowering_power, EOrdering, EvaluationAssignment};

pub type ExactVector = Vec<GaussRational>;

/// A subspace of `(L_{λ_1} ⊗ … ⊗ L_{λ_n})^{sing}_l` given by a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BlocksSpace {
    pub ps: ParamSet,
    /// Order of the lowering power used, `None` when non-resonant.
    pub k: Option<usize>,
    pub basis: Vec<ExactVector>,
}

impl BlocksSpace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

pub fn irreducible_space(ps: &ParamSet) -> TensorSpace {
    TensorSpace::uniform(ModuleKind::Irreducible, ps.lambdas.clone())
}

fn evaluation(ps: &ParamSet) -> EvaluationAssignment<GaussRational> {
    EvaluationAssignment::new(irreducible_space(ps), ps.zs.clone())
}

fn require_valid(ps: &ParamSet) -> Result<()> {
    let report = validate(ps);
    let failure = report.failures().next().map(|c| {
        Error::Precondition(alloc::format!(
            "condition {} fails: {}",
            c.name,
            c.witness.as_ref().map(|w| alloc::format!("{w}")).unwrap_or_default()
        ))
    });
    failure.map_or(Ok(()), Err)
}

/// The resonance order in force: the configured `k`, else the one implied by
/// the weights, if any.
pub fn effective_order(ps: &ParamSet) -> Option<usize> {
    match ps.k {
        Some(k) if ps.resonance_defect(k).is_zero() => Some(k),
        Some(_) => None,
        None => resonance_order(ps),
    }
}

/// Exact basis of `(L_{λ_1} ⊗ … ⊗ L_{λ_n})^{sing}_{level}`.
pub fn singular_space(ps: &ParamSet, level: usize) -> Vec<ExactVector> {
    irreducible_space(ps).singular_basis(level)
}

/// Kernel of the `k`-th power of a lowering family on the singular block at
/// level `l`; the whole block when `k = 0` or `k > l`.
fn power_kernel(
    ps: &ParamSet,
    k: Option<usize>,
    op: impl Fn(usize) -> Matrix<GaussRational>,
) -> Vec<ExactVector> {
    let sing = singular_space(ps, ps.l);
    match k {
        Some(k) if k >= 1 && k <= ps.l => lowering_power(ps.l, k, op).kernel_on(&sing),
        _ => sing,
    }
}

/// `C(z) = {m ∈ sing_l | e(z)^k m = 0}` under resonance, the full singular
/// block otherwise.
pub fn conformal_blocks(ps: &ParamSet) -> Result<BlocksSpace> {
    require_valid(ps)?;
    let k = effective_order(ps);
    let ev = evaluation(ps);
    let basis = power_kernel(ps, k, |lv| ev.op_e_z(lv, EOrdering::CoefficientDisplay));
    Ok(BlocksSpace { ps: ps.clone(), k, basis })
}

/// `N(z)`: kernel of the classical `E(z)^k` on the singular block.
pub fn classical_blocks(ps: &ParamSet) -> Result<BlocksSpace> {
    require_valid(ps)?;
    let k = effective_order(ps);
    let ev = evaluation(ps);
    let basis = power_kernel(ps, k, |lv| ev.op_e_classical(lv));
    Ok(BlocksSpace { ps: ps.clone(), k, basis })
}

/// Kernel of `e_x(z)^k` on the singular block.
pub fn x_kernel(ps: &ParamSet, x: &Rational) -> Vec<ExactVector> {
    let ev = evaluation(ps);
    let x = GaussRational::from(x.clone());
    power_kernel(ps, effective_order(ps), |lv| ev.op_e_x_z(lv, &x))
}

/// `true` when the kernels of `e_x(z)^k` coincide for every `x` given.
pub fn check_x_independence(ps: &ParamSet, xs: &[Rational]) -> Result<bool> {
    require_valid(ps)?;
    if effective_order(ps).is_none() {
        return Err(Error::Precondition("x-independence needs a resonant parameter set".into()));
    }
    let dim = irreducible_space(ps).dim(ps.l);
    let Some((first, rest)) = xs.split_first() else {
        return Ok(true);
    };
    let base = x_kernel(ps, first);
    Ok(rest.iter().all(|x| Matrix::same_span(dim, &base, &x_kernel(ps, x))))
}

/// Which map failed the invariance check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InvarianceWitness {
    /// `K_i(z) v` (0-based `i`, basis vector `v`) is not in the shifted blocks.
    Shift { i: usize, vector: usize },
    /// `P R(z_i − z_{i+1}) v` is not in the swapped blocks.
    Swap { i: usize, vector: usize },
    /// The image has the wrong dimension.
    Dimension { i: usize, swap: bool, expected: usize, found: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub passed: bool,
    pub witness: Option<InvarianceWitness>,
    pub maps_checked: usize,
}

fn annihilated(ps: &ParamSet, k: Option<usize>, v: &[GaussRational]) -> bool {
    match k {
        Some(k) if k >= 1 && k <= ps.l => {
            let ev = evaluation(ps);
            let ek = lowering_power(ps.l, k, |lv| ev.op_e_z(lv, EOrdering::CoefficientDisplay));
            ek.apply(v).iter().all(Zero::is_zero)
        }
        _ => true,
    }
}

fn in_singular(ps: &ParamSet, v: &[GaussRational]) -> bool {
    irreducible_space(ps).act_e::<GaussRational>(ps.l, None).apply(v).iter().all(Zero::is_zero)
}

/// `K_i(z) C(z) = C(z + p·1_i)` for every `i`, and
/// `P R(z_i − z_{i+1}) C(z) = C(…, z_{i+1}, z_i, …)` for every adjacent pair.
pub fn check_invariance(ps: &ParamSet, cache: &RCache<GaussRational>) -> Result<InvarianceReport> {
    let blocks = conformal_blocks(ps)?;
    let k = blocks.k;
    let data = QkzData {
        space: irreducible_space(ps),
        zs: ps.zs.clone(),
        p: GaussRational::from(ps.p.clone()),
    };
    let dim = data.space.dim(ps.l);
    let mut maps_checked = 0;
    let fail = |w, maps_checked| Ok(InvarianceReport { passed: false, witness: Some(w), maps_checked });

    for i in 0..ps.n() {
        let target = ps.shifted(i);
        require_valid(&target)?;
        let op = data.qkz_operator(i, ps.l, cache)?;
        let images: Vec<_> = blocks.basis.iter().map(|v| op.apply(v)).collect();
        maps_checked += 1;
        for (vi, w) in images.iter().enumerate() {
            if !in_singular(&target, w) || !annihilated(&target, k, w) {
                return fail(InvarianceWitness::Shift { i, vector: vi }, maps_checked);
            }
        }
        let expected = conformal_blocks(&target)?.dim();
        let found = Matrix::span_rank(dim, &images);
        if found != blocks.dim() || expected != found {
            return fail(InvarianceWitness::Dimension { i, swap: false, expected, found }, maps_checked);
        }
    }

    for i in 0..ps.n().saturating_sub(1) {
        let target = ps.swapped(i);
        require_valid(&target)?;
        let op = data.swap_operator(i, ps.l, cache)?;
        let images: Vec<_> = blocks.basis.iter().map(|v| op.apply(v)).collect();
        maps_checked += 1;
        for (vi, w) in images.iter().enumerate() {
            if !in_singular(&target, w) || !annihilated(&target, k, w) {
                return fail(InvarianceWitness::Swap { i, vector: vi }, maps_checked);
            }
        }
        let expected = conformal_blocks(&target)?.dim();
        let found = Matrix::span_rank(dim, &images);
        if found != blocks.dim() || expected != found {
            return fail(InvarianceWitness::Dimension { i, swap: true, expected, found }, maps_checked);
        }
    }
    Ok(InvarianceReport { passed: true, witness: None, maps_checked })
}

/// Dimensions of `C(z)`, `N(z)`, `sing_l` and `sing_{l−k}` with the verdicts
/// relating them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionReport {
    pub k: Option<usize>,
    pub dim_c: usize,
    pub dim_n: usize,
    pub dim_sing_l: usize,
    /// `dim sing_{l−k}`; zero when non-resonant or `k > l`.
    pub dim_sing_lmk: usize,
    /// `2λ_i ≤ −p − 2` for all `i`, all `λ_i` dominant, `−p` a positive integer.
    pub good_condition: bool,
    /// `l ≤ 2λ_i` for all `i`.
    pub bad_condition: bool,
    /// `dim N ≥ dim C`.
    pub classical_bounds_quantum: bool,
    /// `dim C = dim N = dim sing_l − dim sing_{l−k}`.
    pub count_matches: bool,
}

pub fn dimension_report(ps: &ParamSet) -> Result<DimensionReport> {
    let c = conformal_blocks(ps)?;
    let n = classical_blocks(ps)?;
    let report = validate(ps);
    let dim_sing_l = singular_space(ps, ps.l).len();
    let dim_sing_lmk = match c.k {
        Some(k) if k <= ps.l => singular_space(ps, ps.l - k).len(),
        _ => 0,
    };
    Ok(DimensionReport {
        k: c.k,
        dim_c: c.dim(),
        dim_n: n.dim(),
        dim_sing_l,
        dim_sing_lmk,
        good_condition: report.good_condition,
        bad_condition: report.bad_condition,
        classical_bounds_quantum: n.dim() >= c.dim(),
        count_matches: c.dim() == n.dim() && c.dim() + dim_sing_lmk == dim_sing_l,
    })
}

const SPREAD_PRIMES: [i64; 12] = [101, 211, 307, 401, 503, 601, 701, 809, 907, 1009, 1103, 1201];

/// Deterministic "generic" positions: distinct rationals with large pairwise
/// differences and small imaginary parts. Each `attempt` gives a new draw.
pub fn generic_positions(n: usize, attempt: usize) -> Vec<GaussRational> {
    (0..n)
        .map(|i| {
            let a = SPREAD_PRIMES[(i + attempt) % SPREAD_PRIMES.len()];
            let den = 7 + 2 * attempt as i64;
            let re = rat(a * (i as i64 + 1) * 37 + attempt as i64, den) - int(50 * n as i64);
            let im = rat((i as i64 + 1) * (attempt as i64 + 3), 13);
            gauss(re, im)
        })
        .collect()
}

/// Dimension report at generic positions. Samples are redrawn until two
/// consecutive draws agree on `(dim C, dim N)`; the smaller kernels win on
/// disagreement, since non-generic points can only enlarge a kernel.
pub fn generic_dimension_report(ps: &ParamSet, max_attempts: usize) -> Result<DimensionReport> {
    let mut best: Option<DimensionReport> = None;
    let mut prev: Option<(usize, usize)> = None;
    for attempt in 0..max_attempts.max(2) {
        let trial = ps.with_zs(generic_positions(ps.n(), attempt));
        if !validate(&trial).passed() {
            continue;
        }
        let rep = dimension_report(&trial)?;
        let key = (rep.dim_c, rep.dim_n);
        if best.as_ref().map_or(true, |b| key < (b.dim_c, b.dim_n)) {
            best = Some(rep);
        }
        if prev == Some(key) {
            break;
        }
        prev = Some(key);
    }
    best.ok_or_else(|| Error::Precondition("no generic sample passed validation".into()))
}

/// Convenience: all-zero positions as Gaussian rationals.
pub fn zero_positions(n: usize) -> Vec<GaussRational> {
    vec![GaussRational::zero(); n]
}

/// `true` when `E(z)^k` (any of the supported lowering families) kills `v`.
pub fn power_annihilates<F: Field>(op: impl Fn(usize) -> Matrix<F>, level: usize, k: usize, v: &[F]) -> bool {
    lowering_power(level, k, op).apply(v).iter().all(Zero::is_zero)
}
