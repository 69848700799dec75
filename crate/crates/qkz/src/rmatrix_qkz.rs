//! Rational R-matrices from the intertwiner equations, qKZ operators and
//! flatness of the qKZ connection.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalars::{Field, Rational};
use crate::sl2rep::{ModuleKind, TensorSpace};
use crate::yangian::{level_shift, EvaluationAssignment};

/// `R_{M_1 M_2}(x)` on the weight levels `0..=l` of `M_1 ⊗ M_2`, each block
/// in the basis of [`TensorSpace::basis`].
#[derive(Clone)]
pub struct RMatrixBlock<F> {
    pub kinds: [ModuleKind; 2],
    pub lambda1: Rational,
    pub lambda2: Rational,
    pub x: F,
    pub blocks: Vec<Matrix<F>>,
}

impl<F: Field> fmt::Debug for RMatrixBlock<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RMatrixBlock")
            .field("kinds", &self.kinds)
            .field("lambda1", &format!("{}", self.lambda1))
            .field("lambda2", &format!("{}", self.lambda2))
            .field("x", &self.x.key())
            .field("blocks", &self.blocks)
            .finish()
    }
}

impl<F: Field> RMatrixBlock<F> {
    pub fn space(&self) -> TensorSpace {
        TensorSpace::new(self.kinds.to_vec(), vec![self.lambda1.clone(), self.lambda2.clone()])
    }

    pub fn max_level(&self) -> usize {
        self.blocks.len() - 1
    }
}

const GENERATORS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

/// Coordinates of the `P`-swapped pair basis vector.
fn flip(idx: &[usize]) -> [usize; 2] {
    [idx[1], idx[0]]
}

/// Solves for `R_L` given `R_{L−1}` using generators `T^{(s)}_{ij}` with
/// `s ∈ orders`. Returns the solution and the nullity of the system.
fn solve_level<F: Field>(
    a: &EvaluationAssignment<F>,
    b: &EvaluationAssignment<F>,
    level: usize,
    prev: &Matrix<F>,
    orders: &[usize],
) -> Result<(Matrix<F>, usize)> {
    let a_basis = a.space.basis(level);
    let b_basis = b.space.basis(level);
    let d = a_basis.len();
    if b_basis.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: b_basis.len() });
    }
    // Unknown R_L[r][c] has index r·d + c. (P R_L)[β][·] = R_L[π⁻¹β][·].
    let pinv: Vec<usize> = b_basis
        .indices
        .iter()
        .map(|bi| a_basis.position(&flip(bi)).expect("flip preserves the capped basis"))
        .collect();
    let a_prev = a.space.basis(level.saturating_sub(1));
    let b_prev = b.space.basis(level.saturating_sub(1));
    // P R_{L−1} as a B×A matrix at level L−1.
    let p_prev = if level > 0 {
        let mut m = Matrix::zeros(b_prev.len(), a_prev.len());
        for (beta, bi) in b_prev.indices.iter().enumerate() {
            let r = a_prev.position(&flip(bi)).expect("flip preserves the capped basis");
            for c in 0..a_prev.len() {
                m[(beta, c)] = prev[(r, c)].clone();
            }
        }
        Some(m)
    } else {
        None
    };

    let mut rows: Vec<Vec<F>> = Vec::new();
    let mut rhs: Vec<F> = Vec::new();
    for &s in orders {
        for (i, j) in GENERATORS {
            match level_shift(i, j) {
                0 => {
                    let ta = a.act_t(i, j, s, level);
                    let tb = b.act_t(i, j, s, level);
                    for beta in 0..d {
                        for c in 0..d {
                            let mut row = vec![F::zero(); d * d];
                            for m in 0..d {
                                let v = &ta[(m, c)];
                                if !v.is_zero() {
                                    let u = pinv[beta] * d + m;
                                    row[u] = row[u].clone() + v.clone();
                                }
                            }
                            for gamma in 0..d {
                                let v = &tb[(beta, gamma)];
                                if !v.is_zero() {
                                    let u = pinv[gamma] * d + c;
                                    row[u] = row[u].clone() - v.clone();
                                }
                            }
                            rows.push(row);
                            rhs.push(F::zero());
                        }
                    }
                }
                1 if level > 0 => {
                    // P R_L T^A_{L−1} = T^B_{L−1} P R_{L−1}
                    let ta = a.act_t(i, j, s, level - 1);
                    let known = b.act_t(i, j, s, level - 1).mul(p_prev.as_ref().expect("level > 0"));
                    for beta in 0..d {
                        for c in 0..a_prev.len() {
                            let mut row = vec![F::zero(); d * d];
                            for m in 0..d {
                                let v = &ta[(m, c)];
                                if !v.is_zero() {
                                    row[pinv[beta] * d + m] = v.clone();
                                }
                            }
                            rows.push(row);
                            rhs.push(known[(beta, c)].clone());
                        }
                    }
                }
                -1 if level > 0 => {
                    // T^B_L P R_L = P R_{L−1} T^A_L
                    let tb = b.act_t(i, j, s, level);
                    let known = p_prev.as_ref().expect("level > 0").mul(&a.act_t(i, j, s, level));
                    for beta in 0..b_prev.len() {
                        for c in 0..d {
                            let mut row = vec![F::zero(); d * d];
                            for gamma in 0..d {
                                let v = &tb[(beta, gamma)];
                                if !v.is_zero() {
                                    row[pinv[gamma] * d + c] = v.clone();
                                }
                            }
                            rows.push(row);
                            rhs.push(known[(beta, c)].clone());
                        }
                    }
                }
                _ => {}
            }
        }
    }
    if level == 0 {
        // Normalization R(v_1 ⊗ v_2) = v_1 ⊗ v_2.
        let mut row = vec![F::zero(); 1];
        row[0] = F::one();
        rows.push(row);
        rhs.push(F::one());
    }
    let system = Matrix::from_rows(rows);
    let Some((x, kernel)) = system.solve(&rhs) else {
        return Err(Error::Inconsistent { context: format!("R-matrix level {level}") });
    };
    let mut r = Matrix::zeros(d, d);
    for row in 0..d {
        for c in 0..d {
            r[(row, c)] = x[row * d + c].clone();
        }
    }
    Ok((r, kernel.len()))
}

/// The normalized R-matrix `R_{M_1 M_2}(x)` on levels `0..=l`: the unique
/// operator with `P R` intertwining the Yangian actions on
/// `M_1(x) ⊗ M_2(0)` and `M_2(0) ⊗ M_1(x)`, fixing `v_1 ⊗ v_2`.
pub fn r_matrix<F: Field>(
    kinds: [ModuleKind; 2],
    lambda1: &Rational,
    lambda2: &Rational,
    x: &F,
    l: usize,
) -> Result<RMatrixBlock<F>> {
    let a = EvaluationAssignment::new(
        TensorSpace::new(kinds.to_vec(), vec![lambda1.clone(), lambda2.clone()]),
        vec![x.clone(), F::zero()],
    );
    let b = EvaluationAssignment::new(
        TensorSpace::new(vec![kinds[1], kinds[0]], vec![lambda2.clone(), lambda1.clone()]),
        vec![F::zero(), x.clone()],
    );
    let mut blocks: Vec<Matrix<F>> = Vec::with_capacity(l + 1);
    for level in 0..=l {
        let prev = blocks.last().cloned().unwrap_or_else(|| Matrix::zeros(0, 0));
        let (mut r, mut nullity) = solve_level(&a, &b, level, &prev, &[1, 2])?;
        if nullity > 0 {
            (r, nullity) = solve_level(&a, &b, level, &prev, &[1, 2, 3])?;
        }
        if nullity > 0 {
            return Err(Error::NonUnique { context: format!("R-matrix level {level} at x = {}", x.key()), nullity });
        }
        blocks.push(r);
    }
    Ok(RMatrixBlock { kinds, lambda1: lambda1.clone(), lambda2: lambda2.clone(), x: x.clone(), blocks })
}

/// Positions (within the level basis of `space`) of vectors outside the
/// capped basis of `capped`.
fn submodule_positions(space: &TensorSpace, capped: &TensorSpace, level: usize) -> (Vec<usize>, Vec<usize>) {
    let full = space.basis(level);
    let cb = capped.basis(level);
    let mut inside = Vec::new();
    let mut quotient = Vec::new();
    for (i, idx) in full.indices.iter().enumerate() {
        if cb.position(idx).is_some() {
            quotient.push(i);
        } else {
            inside.push(i);
        }
    }
    (inside, quotient)
}

/// Restricts an operator on the level block of `space` to the quotient by
/// the submodule spanned by basis vectors exceeding the caps of `capped`,
/// after checking the submodule is preserved.
pub fn factor_block<F: Field>(op: &Matrix<F>, space: &TensorSpace, capped: &TensorSpace, level: usize) -> Result<Matrix<F>> {
    let (inside, quotient) = submodule_positions(space, capped, level);
    for &c in &inside {
        for &r in &quotient {
            if !op[(r, c)].is_zero() {
                return Err(Error::SubmoduleNotPreserved { level });
            }
        }
    }
    Ok(op.select(&quotient, &quotient))
}

/// Quotient of a Verma R-matrix to the irreducible modules
/// `L_{λ_1} ⊗ L_{λ_2}`.
pub fn factor_to_irreducible<F: Field>(r: &RMatrixBlock<F>) -> Result<RMatrixBlock<F>> {
    let space = r.space();
    let capped = space.with_kind(ModuleKind::Irreducible);
    let blocks = r
        .blocks
        .iter()
        .enumerate()
        .map(|(level, m)| factor_block(m, &space, &capped, level))
        .collect::<Result<Vec<_>>>()?;
    Ok(RMatrixBlock { kinds: [ModuleKind::Irreducible; 2], blocks, ..r.clone() })
}

/// Read-mostly cache of R-matrix blocks keyed by `(kinds, λ_1, λ_2, x, l)`.
pub struct RCache<F> {
    map: spin::RwLock<BTreeMap<String, Arc<RMatrixBlock<F>>>>,
}

impl<F: Field> Default for RCache<F> {
    fn default() -> Self {
        RCache { map: spin::RwLock::new(BTreeMap::new()) }
    }
}

impl<F: Field> RCache<F> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, kinds: [ModuleKind; 2], lambda1: &Rational, lambda2: &Rational, x: &F, l: usize) -> Result<Arc<RMatrixBlock<F>>> {
        let key = format!("{kinds:?}|{lambda1}|{lambda2}|{}|{l}", x.key());
        if let Some(r) = self.map.read().get(&key) {
            return Ok(r.clone());
        }
        let r = Arc::new(r_matrix(kinds, lambda1, lambda2, x, l)?);
        Ok(self.map.write().entry(key).or_insert(r).clone())
    }
}

/// `R_{M_a M_b}` embedded in the level block of the `n`-fold space, acting
/// on tensor positions `(a, b)` with `M_a` as its first factor.
pub fn embed_pair<F: Field>(r: &RMatrixBlock<F>, space: &TensorSpace, a: usize, b: usize, level: usize) -> Matrix<F> {
    let pair = r.space();
    let pair_bases: Vec<_> = (0..=level).map(|lv| pair.basis(lv)).collect();
    space.operator(level, Some(level), |idx| {
        let lv = idx[a] + idx[b];
        let basis = &pair_bases[lv];
        let col = basis.position(&[idx[a], idx[b]]).expect("pair index in basis");
        basis
            .indices
            .iter()
            .enumerate()
            .filter(|(row, _)| !r.blocks[lv][(*row, col)].is_zero())
            .map(|(row, img)| {
                let mut out = idx.to_vec();
                out[a] = img[0];
                out[b] = img[1];
                (out, r.blocks[lv][(row, col)].clone())
            })
            .collect()
    })
}

/// Data fixing a family of qKZ operators: weights, module kind, positions
/// and step.
#[derive(Clone)]
pub struct QkzData<F> {
    pub space: TensorSpace,
    pub zs: Vec<F>,
    pub p: F,
}

impl<F: Field> QkzData<F> {
    pub fn shifted(&self, i: usize) -> QkzData<F> {
        let mut d = self.clone();
        d.zs[i] = d.zs[i].clone() + self.p.clone();
        d
    }

    fn verma(&self) -> TensorSpace {
        self.space.with_kind(ModuleKind::Verma)
    }

    fn pair_r(&self, cache: &RCache<F>, m: usize, j: usize, x: F, level: usize) -> Result<Matrix<F>> {
        let lam = &self.space.lambdas;
        let r = cache.get([ModuleKind::Verma; 2], &lam[m], &lam[j], &x, level)?;
        Ok(embed_pair(&r, &self.verma(), m, j, level))
    }

    /// `K_m(z)` (0-based `m`) on the level block:
    /// `R_{m,m−1}(z_m − z_{m−1} + p) ⋯ R_{m,1}(z_m − z_1 + p)
    ///  · R_{m,n}(z_m − z_n) ⋯ R_{m,m+1}(z_m − z_{m+1})`.
    /// Built on Verma modules, then factored to the requested kinds.
    pub fn qkz_operator(&self, m: usize, level: usize, cache: &RCache<F>) -> Result<Matrix<F>> {
        let n = self.space.n();
        let verma = self.verma();
        let mut k = Matrix::identity(verma.dim(level));
        // Rightmost factor first.
        for j in m + 1..n {
            let x = self.zs[m].clone() - self.zs[j].clone();
            k = self.pair_r(cache, m, j, x, level)?.mul(&k);
        }
        for j in 0..m {
            let x = self.zs[m].clone() - self.zs[j].clone() + self.p.clone();
            k = self.pair_r(cache, m, j, x, level)?.mul(&k);
        }
        factor_block(&k, &verma, &self.space, level)
    }

    /// `P R_{M_i M_{i+1}}(z_i − z_{i+1})` from the level block of this space
    /// to the level block of the space with factors `i`, `i+1` exchanged.
    pub fn swap_operator(&self, i: usize, level: usize, cache: &RCache<F>) -> Result<Matrix<F>> {
        let verma = self.verma();
        let x = self.zs[i].clone() - self.zs[i + 1].clone();
        let r = self.pair_r(cache, i, i + 1, x, level)?;
        let r = factor_block(&r, &verma, &self.space, level)?;
        let src = self.space.basis(level);
        let dst_space = self.space.swapped(i);
        let dst = dst_space.basis(level);
        let mut perm = Matrix::zeros(dst.len(), src.len());
        for (c, idx) in src.indices.iter().enumerate() {
            let mut img = idx.clone();
            img.swap(i, i + 1);
            let row = dst.position(&img).expect("swapped index in basis");
            perm[(row, c)] = F::one();
        }
        Ok(perm.mul(&r))
    }
}

/// Outcome of the flatness check.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatnessReport {
    pub passed: bool,
    /// First failing pair `(i, j)` (0-based) and entry `(row, col)`.
    pub witness: Option<(usize, usize, usize, usize)>,
    pub pairs_checked: usize,
}

/// `K_i(z + p·1_j) K_j(z) = K_j(z + p·1_i) K_i(z)` on the level block, for all
/// `i < j`.
pub fn check_flatness<F: Field>(data: &QkzData<F>, level: usize, cache: &RCache<F>) -> Result<FlatnessReport> {
    let n = data.space.n();
    let mut pairs_checked = 0;
    for i in 0..n {
        for j in i + 1..n {
            let lhs = data.shifted(j).qkz_operator(i, level, cache)?.mul(&data.qkz_operator(j, level, cache)?);
            let rhs = data.shifted(i).qkz_operator(j, level, cache)?.mul(&data.qkz_operator(i, level, cache)?);
            pairs_checked += 1;
            if lhs != rhs {
                let diff = lhs.sub(&rhs);
                let (r, c) = (0..diff.rows())
                    .flat_map(|r| (0..diff.cols()).map(move |c| (r, c)))
                    .find(|&(r, c)| !diff[(r, c)].is_zero())
                    .unwrap_or((0, 0));
                return Ok(FlatnessReport { passed: false, witness: Some((i, j, r, c)), pairs_checked });
            }
        }
    }
    Ok(FlatnessReport { passed: true, witness: None, pairs_checked })
}
