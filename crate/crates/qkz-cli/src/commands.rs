//! Single-purpose subcommands: matrix export and point evaluations.

use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use qkz::blocks::{check_invariance, check_x_independence, dimension_report, effective_order, irreducible_space};
use qkz::hyperint::{build_contour, integrate_i, membership_residuals, solution_vectors, QuadratureSpec};
use qkz::params::ParamSet;
use qkz::rmatrix_qkz::{factor_to_irreducible, r_matrix, RCache};
use qkz::scalars::{format_rational, int, parse_rational, precision_digits, Cx, GaussRational, Rational};
use qkz::sl2rep::{multi_indices, ModuleKind};
use qkz::uqsl2::QTensorSpace;
use qkz::weightfn::{w_rational, w_sing, w_trig, TrigContext, TrigWeight};
use serde_json::{json, Value};

use crate::suite::{example_weights, qkz_residuals};

/// Parses `"1,0,0"`.
pub fn parse_index(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|x| x.trim().parse::<usize>().with_context(|| format!("bad index entry {x:?} in {s:?}")))
        .collect()
}

/// Parses `"re,im"` or `"re"` with exact rational or decimal parts.
pub fn parse_point(s: &str) -> Result<Cx> {
    let (re, im) = s.split_once(',').unwrap_or((s, "0"));
    let re = parse_rational(re).with_context(|| format!("point {s:?}"))?;
    let im = parse_rational(im).with_context(|| format!("point {s:?}"))?;
    Ok(Cx::from_gauss(&GaussRational::new(re, im)))
}

fn cx_json(v: &Cx) -> Value {
    json!(v.to_decimal_pair(precision_digits()))
}

/// A weight function named on the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum WeightSpec {
    /// `sing:N`: the `N`-th singular index (in enumeration order).
    SingularPosition(usize),
    /// `sing-index:a,b`: an explicit singular index with `n − 1` entries.
    SingularIndex(Vec<usize>),
    /// `basis:a,b,c`.
    Basis(Vec<usize>),
    /// `plus` / `minus`: the level-one exponential weights.
    Exponential(i8),
}

impl FromStr for WeightSpec {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.split_once(':') {
            Some(("sing", n)) => WeightSpec::SingularPosition(n.trim().parse().with_context(|| format!("weight {s:?}"))?),
            Some(("sing-index", idx)) => WeightSpec::SingularIndex(parse_index(idx)?),
            Some(("basis", idx)) => WeightSpec::Basis(parse_index(idx)?),
            None if s == "plus" => WeightSpec::Exponential(1),
            None if s == "minus" => WeightSpec::Exponential(-1),
            _ => bail!("unknown weight {s:?}; expected sing:N, sing-index:I, basis:I, plus or minus"),
        })
    }
}

impl WeightSpec {
    pub fn resolve(&self, ps: &ParamSet) -> Result<TrigWeight> {
        let n = ps.n();
        Ok(match self {
            WeightSpec::SingularPosition(pos) => {
                ensure!(n >= 2, "singular weights need at least two points");
                let all = multi_indices(n - 1, ps.l, &vec![None; n - 1]);
                let idx = all.get(*pos).with_context(|| format!("only {} singular indices at level {}", all.len(), ps.l))?;
                TrigWeight::Singular(idx.clone())
            }
            WeightSpec::SingularIndex(idx) => {
                ensure!(idx.len() + 1 == n && idx.iter().sum::<usize>() == ps.l, "singular index needs n - 1 entries summing to l");
                TrigWeight::Singular(idx.clone())
            }
            WeightSpec::Basis(idx) => {
                ensure!(idx.len() == n && idx.iter().sum::<usize>() == ps.l, "index needs n entries summing to l");
                TrigWeight::Basis(idx.clone())
            }
            WeightSpec::Exponential(sign) => TrigWeight::Exponential { sign: *sign },
        })
    }
}

/// Exact blocks of `R(x)` on levels `0..=level` as CSV with columns
/// `level,row,col,row_index,col_index,value`. Indices are `;`-separated.
pub fn rmatrix_csv(l1: &Rational, l2: &Rational, x: &Rational, level: usize, kind: ModuleKind) -> Result<String> {
    let mut r = r_matrix::<Rational>([ModuleKind::Verma; 2], l1, l2, x, level)?;
    if kind == ModuleKind::Irreducible {
        r = factor_to_irreducible(&r)?;
    }
    let space = r.space();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["level", "row", "col", "row_index", "col_index", "value"])?;
    let join = |idx: &[usize]| idx.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
    for (lv, block) in r.blocks.iter().enumerate() {
        let basis = space.basis(lv);
        for row in 0..block.rows() {
            for col in 0..block.cols() {
                w.write_record([
                    lv.to_string(),
                    row.to_string(),
                    col.to_string(),
                    join(&basis.indices[row]),
                    join(&basis.indices[col]),
                    format_rational(&block[(row, col)]),
                ])?;
            }
        }
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn blocks_json(ps: &ParamSet) -> Result<Value> {
    let dims = dimension_report(ps)?;
    let invariance = check_invariance(ps, &RCache::new())?;
    let x_independence = match effective_order(ps) {
        Some(_) => verdict(check_x_independence(ps, &[int(0), ps.p.clone(), int(17)])?),
        None => "not_applicable",
    };
    Ok(json!({
        "k": dims.k,
        "dims": {"C": dims.dim_c, "N": dims.dim_n, "sing_l": dims.dim_sing_l, "sing_lmk": dims.dim_sing_lmk},
        "invariance": verdict(invariance.passed),
        "x_independence": x_independence,
    }))
}

fn verdict(b: bool) -> &'static str {
    if b {
        "pass"
    } else {
        "fail"
    }
}

pub fn uq_quotient_json(ps: &ParamSet) -> Result<Value> {
    let k = effective_order(ps).or(ps.k).context("no order k: give \"k\" in the configuration")?;
    let q = QTensorSpace::new(irreducible_space(ps), &ps.p)?;
    let l = ps.l;
    let image = q.fq_power_image(l, k.min(l))?;
    Ok(json!({
        "l": l,
        "k": k,
        "quotient_dimension": q.quotient_dimension(l, k)?,
        "dims": {
            "q_sing_l": q.q_singular_basis(l)?.len(),
            "q_sing_lmk": if k <= l { q.q_singular_basis(l - k)?.len() } else { 0 },
            "image_rank": image.rank,
        },
        "residuals": {
            "relations": q.relation_residuals(l).max(),
            "image_singularity": image.max_residual,
            "f_power_lemma": q.lemma_fk_residual(l, k)?,
        },
    }))
}

pub fn integrate_json(ps: &ParamSet, w_index: &[usize], weight: &WeightSpec) -> Result<Value> {
    ensure!(w_index.len() == ps.n() && w_index.iter().sum::<usize>() == ps.l, "w-index needs n entries summing to l");
    let weight = weight.resolve(ps)?;
    let ctx = TrigContext::new(ps);
    let path = build_contour(&ctx)?;
    let integral = integrate_i(w_index, &weight, &ctx, &path, &QuadratureSpec::default())?;
    Ok(json!({
        "value": cx_json(&integral.values[0]),
        "est_error": integral.est_error()[0],
        "evaluations": integral.evaluations,
    }))
}

/// The level-one Example end to end: `Ψ^±`, both scalar equations, the
/// operator residual and the qKZ residual for every `m`.
pub fn verify_example_json(ps: &ParamSet) -> Result<Value> {
    let k = effective_order(ps).context("the Example needs resonant parameters")?;
    ensure!(ps.l == 1 && ps.n() % 2 == 1, "the Example weights need level one and an odd number of points");
    let quad = QuadratureSpec::default();
    let weights = example_weights();
    let path = build_contour(&TrigContext::new(ps))?;
    let sols = solution_vectors(&weights, ps, false, &path, &quad)?;
    let qkz = qkz_residuals(ps, &weights, &sols, &quad, &RCache::new()).into_iter().collect::<qkz::Result<Vec<f64>>>()?;
    let per_weight: Vec<Value> = sols
        .iter()
        .zip(["W+", "W-"])
        .map(|(s, name)| {
            let m = membership_residuals(ps, k, s);
            json!({
                "weight": name,
                "coordinates": s.indices.iter().zip(&s.values).map(|(i, v)| json!({"index": i, "value": cx_json(v)})).collect::<Vec<_>>(),
                "node_doubling_change": s.max_relative_error(),
                "example_residual": m.example_residual,
                "singularity_residual": m.singularity_residual,
                "operator_residual": m.operator_residual,
            })
        })
        .collect();
    Ok(json!({"k": k, "solutions": per_weight, "qkz_residual_per_m": qkz}))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum WeightKind {
    Rational,
    Trig,
    Sing,
}

pub fn weightfn_eval_json(ps: &ParamSet, kind: WeightKind, index: &[usize], t: &[Cx]) -> Result<Value> {
    let n = ps.n();
    let want = if kind == WeightKind::Sing { n.saturating_sub(1) } else { n };
    ensure!(index.len() == want && want > 0, "index needs {want} entries");
    ensure!(index.iter().sum::<usize>() == t.len(), "one --t point per unit of the index sum");
    let ctx = TrigContext::new(ps);
    let v = match kind {
        WeightKind::Rational => w_rational(index, t, &ctx)?,
        WeightKind::Trig => w_trig(index, t, &ctx)?,
        WeightKind::Sing => w_sing(index, t, &ctx)?,
    };
    Ok(json!({"value": cx_json(&v)}))
}
