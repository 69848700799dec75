//! Parameter sets `(z, λ, p, l, k)` and the genericity conditions every
//! computation relies on.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Signed, Zero};

use crate::scalars::{as_integer, int, GaussRational, Rational};
use crate::sl2rep::{dominant_cap, multi_indices, MultiIndex};

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSet {
    pub lambdas: Vec<Rational>,
    /// Positions with exact rational real and imaginary parts.
    pub zs: Vec<GaussRational>,
    pub p: Rational,
    pub l: usize,
    pub k: Option<usize>,
}

impl ParamSet {
    pub fn new(lambdas: Vec<Rational>, zs: Vec<GaussRational>, p: Rational, l: usize, k: Option<usize>) -> Self {
        assert_eq!(lambdas.len(), zs.len(), "one position per weight");
        ParamSet { lambdas, zs, p, l, k }
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `Σ 2λ_i − 2l + p + k + 1` for the given `k`.
    pub fn resonance_defect(&self, k: usize) -> Rational {
        let two_sum: Rational = self.lambdas.iter().map(|l| l * int(2)).sum();
        two_sum - int(2 * self.l as i64) + &self.p + int(k as i64 + 1)
    }

    /// The same parameters with `z_i` replaced by `z_i + p`.
    pub fn shifted(&self, i: usize) -> ParamSet {
        let mut ps = self.clone();
        ps.zs[i].re += &self.p;
        ps
    }

    /// The same parameters with factors `i` and `i+1` exchanged.
    pub fn swapped(&self, i: usize) -> ParamSet {
        let mut ps = self.clone();
        ps.zs.swap(i, i + 1);
        ps.lambdas.swap(i, i + 1);
        ps
    }

    pub fn with_zs(&self, zs: Vec<GaussRational>) -> ParamSet {
        ParamSet { zs, ..self.clone() }
    }

    pub fn with_p(&self, p: Rational) -> ParamSet {
        ParamSet { p, ..self.clone() }
    }

    pub fn with_k(&self, k: Option<usize>) -> ParamSet {
        ParamSet { k, ..self.clone() }
    }
}

/// `true` when `x ∈ pZ` (complex `x`, rational `p`).
fn in_p_lattice(x: &GaussRational, p: &Rational) -> bool {
    x.im.is_zero() && (&x.re / p).is_integer()
}

fn real_in_p_lattice(x: &Rational, p: &Rational) -> bool {
    (x / p).is_integer()
}

pub fn is_dominant(lambda: &Rational) -> bool {
    dominant_cap(lambda).is_some()
}

/// Offending data for a failed condition.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `Re p ≥ 0`.
    NonNegativeStep,
    /// `1 ∈ pZ`.
    UnitInLattice,
    /// Integer `s` lying in `pZ`.
    Integer { s: i64 },
    /// `2λ_m − s ∈ pZ` (`m` is 1-based).
    Weight { m: usize, s: i64 },
    /// `z_k − z_m ± (λ_k + λ_m) + s ∈ pZ` (1-based indices).
    Pair { k: usize, m: usize, sign: i8, s: i64 },
    /// `Σ 2λ_i − 2l + p + k + 1` is not zero.
    Resonance { defect: Rational },
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Witness::NonNegativeStep => write!(f, "Re p >= 0"),
            Witness::UnitInLattice => write!(f, "1 lies in pZ"),
            Witness::Integer { s } => write!(f, "s={s} lies in pZ"),
            Witness::Weight { m, s } => write!(f, "2*lambda_{m} - {s} lies in pZ"),
            Witness::Pair { k, m, sign, s } => {
                let sg = if *sign > 0 { '+' } else { '-' };
                write!(f, "z_{k} - z_{m} {sg} (lambda_{k} + lambda_{m}) + {s} lies in pZ")
            }
            Witness::Resonance { defect } => write!(f, "resonance defect {defect} != 0"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub name: &'static str,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConditionReport {
    /// Conditions that must hold for any computation.
    pub conditions: Vec<Condition>,
    /// `2λ_i ≤ −p − 2` with all `λ_i ∈ Λ^+` and `−p ∈ Z_{>0}`; informational.
    pub good_condition: bool,
    /// `l ≤ 2λ_i` for all `i`; informational.
    pub bad_condition: bool,
}

impl ConditionReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Condition> {
        self.conditions.iter().filter(|c| !c.passed)
    }
}

fn condition(name: &'static str, witness: Option<Witness>) -> Condition {
    Condition { name, passed: witness.is_none(), witness }
}

/// Evaluates every genericity condition exactly.
pub fn validate(ps: &ParamSet) -> ConditionReport {
    let p = &ps.p;
    let l = ps.l as i64;
    let mut conditions = Vec::new();

    let step = if !p.is_negative() {
        Some(Witness::NonNegativeStep)
    } else if real_in_p_lattice(&Rational::one(), p) {
        Some(Witness::UnitInLattice)
    } else {
        None
    };
    conditions.push(condition("step", step));

    // s ∈ Z_{>0}, s < 2 max Re λ, s ≤ l.
    let max2 = ps.lambdas.iter().map(|x| x * int(2)).fold(None::<Rational>, |acc, x| match acc {
        Some(a) if a >= x => Some(a),
        _ => Some(x),
    });
    let weights1 = (1..=l).find(|&s| max2.as_ref().is_some_and(|m| int(s) < *m) && real_in_p_lattice(&int(s), p));
    conditions.push(condition("weights1", weights1.map(|s| Witness::Integer { s })));

    // 2λ_m − s with s ∈ Z_{≥0}, s < 2 Re λ_m, s < l.
    let mut weights2 = None;
    'outer: for (m, lam) in ps.lambdas.iter().enumerate() {
        for s in 0..l {
            if int(s) < lam * int(2) && real_in_p_lattice(&(lam * int(2) - int(s)), p) {
                weights2 = Some(Witness::Weight { m: m + 1, s });
                break 'outer;
            }
        }
    }
    conditions.push(condition("weights2", weights2));

    let mut pair = None;
    'pairs: for k in 0..ps.n() {
        for m in 0..ps.n() {
            if k == m {
                continue;
            }
            let dz = &ps.zs[k] - &ps.zs[m];
            let lam = &ps.lambdas[k] + &ps.lambdas[m];
            for sign in [1i8, -1] {
                for s in (1 - l)..=(l - 1) {
                    let mut x = dz.clone();
                    x.re += if sign > 0 { lam.clone() } else { -lam.clone() };
                    x.re += int(s);
                    if in_p_lattice(&x, p) {
                        pair = Some(Witness::Pair { k: k + 1, m: m + 1, sign, s });
                        break 'pairs;
                    }
                }
            }
        }
    }
    conditions.push(condition("resonance'", pair));

    let non_dominant: Vec<usize> = (0..ps.n()).filter(|&i| !is_dominant(&ps.lambdas[i])).collect();
    let step3 = if non_dominant.is_empty() {
        None
    } else {
        (1..=l).find(|&s| real_in_p_lattice(&int(s), p)).map(|s| Witness::Integer { s })
    };
    conditions.push(condition("step3", step3));

    let mut weights3 = None;
    'w3: for &i in &non_dominant {
        for s in 0..l {
            if real_in_p_lattice(&(&ps.lambdas[i] * int(2) - int(s)), p) {
                weights3 = Some(Witness::Weight { m: i + 1, s });
                break 'w3;
            }
        }
    }
    conditions.push(condition("weights3", weights3));

    if let Some(k) = ps.k {
        let defect = ps.resonance_defect(k);
        let w = if defect.is_zero() { None } else { Some(Witness::Resonance { defect }) };
        conditions.push(condition("resonance", w));
    }

    let neg_p = -p.clone();
    let good_condition = neg_p.is_integer()
        && neg_p.is_positive()
        && ps.lambdas.iter().all(|x| is_dominant(x) && x * int(2) <= &neg_p - int(2));
    let bad_condition = ps.lambdas.iter().all(|x| int(l) <= x * int(2));

    ConditionReport { conditions, good_condition, bad_condition }
}

/// The unique `k ∈ Z_{>0}` with `Σ 2λ_i − 2l + p + k + 1 = 0`, if any.
pub fn resonance_order(ps: &ParamSet) -> Option<usize> {
    let k = -ps.resonance_defect(0);
    match as_integer(&k) {
        Some(v) if v > 0 => Some(v as usize),
        _ => None,
    }
}

/// `true` when every coordinate of `idx` is λ-admissible:
/// either `λ_i ∉ Λ^+` or `l_i ≤ 2λ_i`.
pub fn is_admissible(idx: &[usize], lambdas: &[Rational]) -> bool {
    idx.iter().zip(lambdas).all(|(&li, lam)| dominant_cap(lam).map_or(true, |c| li <= c))
}

/// Every `l̄` with `Σ l̄ = l`, flagged by admissibility.
pub fn admissibility_flags(ps: &ParamSet) -> Vec<(MultiIndex, bool)> {
    multi_indices(ps.n(), ps.l, &alloc::vec![None; ps.n()])
        .into_iter()
        .map(|idx| {
            let ok = is_admissible(&idx, &ps.lambdas);
            (idx, ok)
        })
        .collect()
}

/// Renders a report as `name: pass` / `name: FAIL (witness)` lines.
pub fn describe(report: &ConditionReport) -> String {
    let mut s = String::new();
    for c in &report.conditions {
        match &c.witness {
            None => s.push_str(&alloc::format!("{}: pass\n", c.name)),
            Some(w) => s.push_str(&alloc::format!("{}: FAIL ({w})\n", c.name)),
        }
    }
    s
}
