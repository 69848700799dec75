//! Rational, trigonometric and singular trigonometric weight functions, the
//! rational and trigonometric actions of the symmetric group, and the map
//! from q-vectors to trigonometric weight functions.
//!
//! Products of sines are accumulated as sums of logarithms so that points far
//! up the imaginary direction do not overflow.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::params::ParamSet;
use crate::scalars::{int, working_digits, Cx, Rational, Real};
use crate::sl2rep::{MultiIndex, TensorSpace};

/// Positions, weights and step shared by every weight function evaluation.
#[derive(Debug, Clone)]
pub struct TrigContext {
    pub zs: Vec<Cx>,
    pub lambdas: Vec<Rational>,
    pub p: Rational,
    lam: Vec<Cx>,
    pi_over_p: Real,
}

/// Relative pole tolerance; multiplied by the local scale.
pub const POLE_EPS: f64 = 1e-8;

impl TrigContext {
    pub fn new(ps: &ParamSet) -> Self {
        Self::from_parts(ps.zs.iter().map(Cx::from_gauss).collect(), ps.lambdas.clone(), ps.p.clone())
    }

    pub fn from_parts(zs: Vec<Cx>, lambdas: Vec<Rational>, p: Rational) -> Self {
        let lam = lambdas.iter().map(Cx::from_rational).collect();
        let pi_over_p = Real::pi() / Real::from_rational(&p);
        TrigContext { zs, lambdas, p, lam, pi_over_p }
    }

    pub fn n(&self) -> usize {
        self.zs.len()
    }

    pub fn z(&self, i: usize) -> &Cx {
        &self.zs[i]
    }

    pub fn lambda(&self, i: usize) -> &Cx {
        &self.lam[i]
    }

    pub fn p_cx(&self) -> Cx {
        Cx::from_rational(&self.p)
    }

    /// `max(|t_j|, |z_i|, 1)`.
    pub fn local_scale(&self, t: &[Cx]) -> f64 {
        t.iter().chain(&self.zs).map(Cx::abs_f64).fold(1.0, f64::max)
    }

    /// Fails when the rational denominator `x` is within the pole tolerance.
    pub fn check_denominator(&self, x: &Cx, t: &[Cx], context: &'static str) -> Result<()> {
        let d = x.abs_f64();
        if d < POLE_EPS * self.local_scale(t) {
            return Err(Error::PoleProximity { context: context.into(), distance: d });
        }
        Ok(())
    }

    /// `log sin(πx/p)` on some branch; only ever exponentiated. Fails near
    /// the zeros `x ∈ pZ`.
    pub fn log_sin(&self, x: &Cx, t: &[Cx]) -> Result<Cx> {
        let (xr, xi) = x.to_f64_pair();
        let pf = Real::from_rational(&self.p).to_f64();
        let k = libm::round(xr / pf);
        let d = libm::hypot(xr - k * pf, xi);
        if d < POLE_EPS * self.local_scale(t) {
            return Err(Error::PoleProximity { context: "sine zero".into(), distance: d });
        }
        let a = x.scale(&self.pi_over_p);
        let ia = a.mul_i();
        let half = Real::one() / Real::from_i64(2);
        let half_pi = Real::pi() * &half;
        // sin A = (i/2) e^{−iA} (1 − e^{2iA}) for Im A > 0, and
        // sin A = (−i/2) e^{iA} (1 − e^{−2iA}) otherwise.
        let below = a.im.is_negative() || a.im.is_zero();
        let lead = if below { Cx::new(half.ln(), -half_pi) + &ia } else { Cx::new(half.ln(), half_pi) - &ia };
        // Far from the real axis the correction is below working precision.
        if libm::fabs(a.im.to_f64()) > 1.2 * working_digits() as f64 + 10.0 {
            return Ok(lead);
        }
        let twice = &ia + &ia;
        let rest = Cx::one() - if below { (-twice).exp() } else { twice.exp() };
        Ok(lead + rest.ln())
    }

    /// `sin(πa/p) / sin(πb/p)`.
    pub fn sin_ratio(&self, a: &Cx, b: &Cx, t: &[Cx]) -> Result<Cx> {
        Ok((self.log_sin(a, t)? - self.log_sin(b, t)?).exp())
    }

    /// `sin(πx/p)` for real-valued arguments of moderate size.
    fn sin_real(&self, x: &Rational) -> Real {
        (Real::from_rational(x) * &self.pi_over_p).sin()
    }

    /// `log [sin(π(t − z_k + λ_k)/p) / sin(π(t − z_k − λ_k)/p)]`.
    fn log_ratio(&self, tj: &Cx, k: usize, t: &[Cx]) -> Result<Cx> {
        let u = tj - &self.zs[k];
        Ok(self.log_sin(&(&u + &self.lam[k]), t)? - self.log_sin(&(&u - &self.lam[k]), t)?)
    }
}

/// Which symmetric-group action.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymKind {
    /// Prefactor `(x − 1)/(x + 1)`, `x = t_i − t_{i+1}`.
    Rational,
    /// Prefactor `sin(π(x − 1)/p)/sin(π(x + 1)/p)`.
    Trigonometric,
}

/// A function of `t` evaluated against a context.
pub type TFn<'a> = dyn Fn(&[Cx]) -> Result<Cx> + 'a;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymAction {
    pub kind: SymKind,
    pub l: usize,
}

impl SymAction {
    pub fn new(kind: SymKind, l: usize) -> Self {
        SymAction { kind, l }
    }

    /// Prefactor of a simple transposition at `x = t_i − t_{i+1}`.
    pub fn cocycle(&self, ctx: &TrigContext, x: &Cx, t: &[Cx]) -> Result<Cx> {
        let one = Cx::one();
        match self.kind {
            SymKind::Rational => {
                let den = x + &one;
                ctx.check_denominator(&den, t, "rational action")?;
                Ok((x - &one) / den)
            }
            SymKind::Trigonometric => ctx.sin_ratio(&(x - &one), &(x + &one), t),
        }
    }

    /// `[f]_σ(t)` for `σ = s_{w_1} ⋯ s_{w_k}` (0-based letters), acting on
    /// the right: `[f]_{στ} = [[f]_σ]_τ`.
    pub fn apply_word(&self, ctx: &TrigContext, f: &TFn<'_>, word: &[usize], t: &[Cx]) -> Result<Cx> {
        let mut cur = t.to_vec();
        let mut factor = Cx::one();
        for &i in word.iter().rev() {
            let x = &cur[i] - &cur[i + 1];
            factor = factor * self.cocycle(ctx, &x, t)?;
            cur.swap(i, i + 1);
        }
        Ok(factor * f(&cur)?)
    }

    /// `Σ_{σ ∈ S^l} [f]_σ(t)` with one reduced word per permutation.
    pub fn symmetrize(&self, ctx: &TrigContext, f: &TFn<'_>, t: &[Cx]) -> Result<Cx> {
        self.symmetrize_with(ctx, f, &reduced_words(self.l), t)
    }

    pub fn symmetrize_with(&self, ctx: &TrigContext, f: &TFn<'_>, words: &[Vec<usize>], t: &[Cx]) -> Result<Cx> {
        if self.l <= 1 {
            return f(t);
        }
        let mut acc = Cx::zero();
        for w in words {
            acc = acc + self.apply_word(ctx, f, w, t)?;
        }
        Ok(acc)
    }
}

/// All permutations of `0..l` in lexicographic order.
pub fn permutations(l: usize) -> Vec<Vec<usize>> {
    fn go(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                go(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; l], &mut out);
    out
}

/// One reduced word per permutation, from bubble sort: the recorded
/// adjacent swaps `s_{i_1}, …, s_{i_k}` sort the permutation, so it equals
/// `s_{i_1} ⋯ s_{i_k}`.
pub fn reduced_words(l: usize) -> Vec<Vec<usize>> {
    permutations(l)
        .into_iter()
        .map(|mut perm| {
            let mut word = Vec::new();
            loop {
                let mut swapped = false;
                for i in 0..perm.len().saturating_sub(1) {
                    if perm[i] > perm[i + 1] {
                        perm.swap(i, i + 1);
                        word.push(i);
                        swapped = true;
                    }
                }
                if !swapped {
                    break;
                }
            }
            word
        })
        .collect()
}

/// A second reduced word per permutation (same order as [`reduced_words`]),
/// moving the largest entry to the end first.
pub fn reduced_words_alt(l: usize) -> Vec<Vec<usize>> {
    permutations(l)
        .into_iter()
        .map(|mut perm| {
            let mut word = Vec::new();
            for target in (0..perm.len()).rev() {
                let mut pos = perm.iter().position(|&v| v == target).expect("entry present");
                while pos < target {
                    perm.swap(pos, pos + 1);
                    word.push(pos);
                    pos += 1;
                }
            }
            word
        })
        .collect()
}

/// Word for the transposition `(0, a)`: `s_0 s_1 ⋯ s_{a−1} ⋯ s_1 s_0`.
pub fn transposition_word(a: usize) -> Vec<usize> {
    if a == 0 {
        return Vec::new();
    }
    let mut w: Vec<usize> = (0..a).collect();
    w.extend((0..a - 1).rev());
    w
}

/// Block owner of each variable: `t_j` belongs to factor `m` when
/// `l^{m−1} < j ≤ l^m`.
fn owners(idx: &[usize]) -> Vec<usize> {
    idx.iter().enumerate().flat_map(|(m, &c)| core::iter::repeat(m).take(c)).collect()
}

fn factorial(n: usize) -> Real {
    (1..=n).fold(Real::one(), |acc, k| acc * Real::from_i64(k as i64))
}

/// `η_l̄(t)`: `∏_m (1/l_m!) ∏_{j ∈ block m} (t_j − z_m − λ_m)^{−1}
/// ∏_{k<m} (t_j − z_k + λ_k)/(t_j − z_k − λ_k)`.
pub fn eta(idx: &[usize], t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    let own = owners(idx);
    assert_eq!(own.len(), t.len(), "arity equals the level");
    let mut acc = Cx::one();
    for (j, &m) in own.iter().enumerate() {
        let u = &t[j] - ctx.z(m);
        let den = &u - ctx.lambda(m);
        ctx.check_denominator(&den, t, "rational weight function")?;
        acc = acc / den;
        for k in 0..m {
            let u = &t[j] - ctx.z(k);
            let den = &u - ctx.lambda(k);
            ctx.check_denominator(&den, t, "rational weight function")?;
            acc = acc * (&u + ctx.lambda(k)) / den;
        }
    }
    let norm = idx.iter().fold(Real::one(), |a, &c| a * factorial(c));
    Ok(acc.scale(&(Real::one() / norm)))
}

/// Rational weight function `w_l̄ = Σ_σ [η_l̄]^{rat}_σ`.
pub fn w_rational(idx: &[usize], t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    let act = SymAction::new(SymKind::Rational, t.len());
    act.symmetrize(ctx, &|s: &[Cx]| eta(idx, s, ctx), t)
}

/// `∏_m ∏_{s=1}^{l_m} sin(π/p) / sin(πs/p)`.
fn block_normalizer(idx: &[usize], ctx: &TrigContext) -> Real {
    let s1 = ctx.sin_real(&int(1));
    let mut acc = Real::one();
    for &c in idx {
        for s in 1..=c {
            acc = acc * &s1 / ctx.sin_real(&int(s as i64));
        }
    }
    acc
}

/// Unsymmetrized term of the trigonometric weight function `W_l̄`.
pub fn trig_term(idx: &[usize], t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    let own = owners(idx);
    assert_eq!(own.len(), t.len(), "arity equals the level");
    let mut log = Cx::zero();
    let ipp = Cx::new(Real::zero(), ctx.pi_over_p.clone());
    for (j, &m) in own.iter().enumerate() {
        log = log + &ipp * &(ctx.z(m) - &t[j]);
        log = log - ctx.log_sin(&(&(&t[j] - ctx.z(m)) - ctx.lambda(m)), t)?;
        for k in 0..m {
            log = log + ctx.log_ratio(&t[j], k, t)?;
        }
    }
    Ok(log.exp().scale(&block_normalizer(idx, ctx)))
}

/// Trigonometric weight function `W_l̄ = Σ_σ [term]^{trig}_σ`.
pub fn w_trig(idx: &[usize], t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    let act = SymAction::new(SymKind::Trigonometric, t.len());
    act.symmetrize(ctx, &|s: &[Cx]| trig_term(idx, s, ctx), t)
}

/// Unsymmetrized term of `W^sing_l̄` (`l̄` has `n − 1` entries).
pub fn sing_term(idx: &[usize], t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    assert_eq!(idx.len() + 1, ctx.n(), "singular index has n − 1 entries");
    let own = owners(idx);
    assert_eq!(own.len(), t.len(), "arity equals the level");
    let mut log = Cx::zero();
    let mut constant = Cx::one();
    let s1 = Cx::from_real(ctx.sin_real(&int(1)));
    for (m, &c) in idx.iter().enumerate() {
        let base = &(&(ctx.z(m) - ctx.lambda(m)) - ctx.z(m + 1)) - ctx.lambda(m + 1);
        for s in 1..=c {
            let arg = &base + &Cx::from_i64(s as i64 - 1);
            let shifted = (arg.scale(&ctx.pi_over_p)).sin();
            constant = constant * &s1 * shifted / Cx::from_real(ctx.sin_real(&int(s as i64)));
        }
    }
    for (j, &m) in own.iter().enumerate() {
        log = log - ctx.log_sin(&(&(&t[j] - ctx.z(m)) - ctx.lambda(m)), t)?;
        log = log - ctx.log_sin(&(&(&t[j] - ctx.z(m + 1)) - ctx.lambda(m + 1)), t)?;
        for k in 0..m {
            log = log + ctx.log_ratio(&t[j], k, t)?;
        }
    }
    Ok(constant * log.exp())
}

/// Singular trigonometric weight function `W^sing_l̄`.
pub fn w_sing(idx: &[usize], t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    let act = SymAction::new(SymKind::Trigonometric, t.len());
    act.symmetrize(ctx, &|s: &[Cx]| sing_term(idx, s, ctx), t)
}

/// `c_l̄(λ) = ∏_m ∏_{s=0}^{l_m−1} sin(π(s+1)/p) sin(π(2λ_m − s)/p) / sin(π/p)`.
pub fn weight_coefficient(idx: &[usize], lambdas: &[Rational], p: &Rational) -> Real {
    let pi_over_p = Real::pi() / Real::from_rational(p);
    let sin = |x: Rational| (Real::from_rational(&x) * &pi_over_p).sin();
    let s1 = sin(int(1));
    let mut acc = Real::one();
    for (m, &c) in idx.iter().enumerate() {
        for s in 0..c as i64 {
            acc = acc * sin(int(s + 1)) * sin(&lambdas[m] * int(2) - int(s)) / &s1;
        }
    }
    acc
}

/// A trigonometric weight function, evaluated lazily.
#[derive(Debug, Clone)]
pub enum TrigWeight {
    Zero { arity: usize },
    /// `W_l̄`.
    Basis(MultiIndex),
    /// `W^sing_l̄`.
    Singular(MultiIndex),
    /// `e^{πiΣz_j/p} e^{±πit/p} / ∏_j sin(π(t − z_j − λ_j)/p)` at level 1.
    /// The first factor makes the function `p`-periodic in every `z_j`.
    Exponential { sign: i8 },
    /// `Σ_l̄ v_l̄ c_l̄(λ) W_l̄`: the image of a q-vector.
    Image { indices: Vec<MultiIndex>, coords: Vec<Cx> },
    /// `f_q` applied on the function side.
    FqImage(Box<TrigWeight>),
    Combination(Vec<(Cx, TrigWeight)>),
}

impl TrigWeight {
    pub fn arity(&self) -> usize {
        match self {
            TrigWeight::Zero { arity } => *arity,
            TrigWeight::Basis(i) | TrigWeight::Singular(i) => i.iter().sum(),
            TrigWeight::Exponential { .. } => 1,
            TrigWeight::Image { indices, .. } => indices.first().map_or(0, |i| i.iter().sum()),
            TrigWeight::FqImage(x) => x.arity() + 1,
            TrigWeight::Combination(terms) => terms.first().map_or(0, |(_, w)| w.arity()),
        }
    }

    pub fn eval(&self, ctx: &TrigContext, t: &[Cx]) -> Result<Cx> {
        match self {
            TrigWeight::Zero { .. } => Ok(Cx::zero()),
            TrigWeight::Basis(idx) => w_trig(idx, t, ctx),
            TrigWeight::Singular(idx) => w_sing(idx, t, ctx),
            TrigWeight::Exponential { sign } => {
                let ipp = Cx::new(Real::zero(), ctx.pi_over_p.clone());
                let zsum = ctx.zs.iter().fold(Cx::zero(), |a, z| a + z);
                let mut log = &ipp * &zsum;
                let tt = if *sign >= 0 { t[0].clone() } else { -&t[0] };
                log = log + &ipp * &tt;
                for j in 0..ctx.n() {
                    log = log - ctx.log_sin(&(&(&t[0] - ctx.z(j)) - ctx.lambda(j)), t)?;
                }
                Ok(log.exp())
            }
            TrigWeight::Image { indices, coords } => {
                let mut acc = Cx::zero();
                for (idx, v) in indices.iter().zip(coords) {
                    if v.is_zero() {
                        continue;
                    }
                    let c = weight_coefficient(idx, &ctx.lambdas, &ctx.p);
                    acc = acc + v * &w_trig(idx, t, ctx)?.scale(&c);
                }
                Ok(acc)
            }
            TrigWeight::FqImage(x) => fq_on_trig(x, ctx, t),
            TrigWeight::Combination(terms) => {
                let mut acc = Cx::zero();
                for (c, w) in terms {
                    acc = acc + c * &w.eval(ctx, t)?;
                }
                Ok(acc)
            }
        }
    }
}

/// `𝔟`: the q-vector with coordinates `coords` on the level-`level` basis
/// of `space` becomes `Σ coords_l̄ c_l̄ W_l̄`.
pub fn map_b(space: &TensorSpace, level: usize, coords: &[Cx]) -> TrigWeight {
    let indices = space.basis(level).indices;
    assert_eq!(indices.len(), coords.len(), "one coordinate per basis vector");
    TrigWeight::Image { indices, coords: coords.to_vec() }
}

/// `(f_q X)(t_1, …, t_{l+1}) = e^{−πi(l + Σλ)/p} Σ_a [X(t_2, …)
/// (e^{2πil/p} ∏_m ρ_m(t_1) ∏_{b≥2} σ(t_1 − t_b) − e^{2πiΣλ/p})]^{trig}_{(1,a)}`
/// with `ρ_m` the sine ratio of factor `m` and
/// `σ(x) = sin(π(x − 1)/p)/sin(π(x + 1)/p)`.
pub fn fq_on_trig(x: &TrigWeight, ctx: &TrigContext, t: &[Cx]) -> Result<Cx> {
    let l = x.arity();
    assert_eq!(t.len(), l + 1, "f_q raises the arity by one");
    let lam_sum: Rational = ctx.lambdas.iter().sum();
    let ipp = Cx::new(Real::zero(), ctx.pi_over_p.clone());
    let two = Cx::from_i64(2);
    let e_l = (&(&two * &ipp) * &Cx::from_i64(l as i64)).exp();
    let e_lam = (&(&two * &ipp) * &Cx::from_rational(&lam_sum)).exp();
    let one = Cx::one();
    let g = |s: &[Cx]| -> Result<Cx> {
        let mut log = Cx::zero();
        for m in 0..ctx.n() {
            log = log + ctx.log_ratio(&s[0], m, s)?;
        }
        for b in 1..s.len() {
            let d = &s[0] - &s[b];
            log = log + ctx.log_sin(&(&d - &one), s)? - ctx.log_sin(&(&d + &one), s)?;
        }
        let bracket = &e_l * &log.exp() - &e_lam;
        Ok(x.eval(ctx, &s[1..])? * bracket)
    };
    let act = SymAction::new(SymKind::Trigonometric, l + 1);
    let mut acc = Cx::zero();
    for a in 0..=l {
        acc = acc + act.apply_word(ctx, &g, &transposition_word(a), t)?;
    }
    let pre = (-(&ipp * &Cx::from_rational(&(lam_sum + int(l as i64))))).exp();
    Ok(pre * acc)
}
