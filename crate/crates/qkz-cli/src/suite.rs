//! The exact and numeric verification suites behind `qkz run`.

use std::thread;
use std::time::Instant;

use num_traits::Zero;
use qkz::blocks::{
    check_invariance, check_x_independence, dimension_report, effective_order, generic_dimension_report,
    irreducible_space,
};
use qkz::hyperint::{
    build_contour, check_kernel, check_lemma_derivative, check_qkz_from, membership_residuals, solution_vectors,
    QuadratureSpec, SolutionVector,
};
use qkz::params::{validate, ParamSet};
use qkz::rmatrix_qkz::{check_flatness, QkzData, RCache};
use qkz::scalars::{int, set_precision_digits, Cx, GaussRational};
use qkz::sl2rep::{multi_indices, ModuleKind, TensorSpace};
use qkz::uqsl2::QTensorSpace;
use qkz::weightfn::{TrigContext, TrigWeight};
use serde_json::json;
use thiserror::Error;

use crate::config::ConfigEcho;
use crate::report::{CheckRecord, RunReport, Status, Timing, Validation, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Exact,
    Numeric,
    All,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Exact => "exact",
            Suite::Numeric => "numeric",
            Suite::All => "all",
        }
    }

    fn exact(self) -> bool {
        self != Suite::Numeric
    }

    fn numeric(self) -> bool {
        self != Suite::Exact
    }
}

pub const EXACT_CHECKS: [&str; 5] = ["flatness", "invariance", "x_independence", "dimensions", "q_quotient"];
pub const NUMERIC_CHECKS: [&str; 4] = ["qkz_residual", "example_equation", "kernel", "lemma_derivative"];

pub const QKZ_BOUND: f64 = 1e-6;
pub const EXAMPLE_BOUND: f64 = 1e-6;
pub const KERNEL_BOUND: f64 = 1e-5;
pub const LEMMA_BOUND: f64 = 1e-10;
pub const LEMMA_POINTS: usize = 100;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub suite: Suite,
    pub precision: usize,
    /// Run (and report) even when validation fails.
    pub force: bool,
    pub timing: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { suite: Suite::All, precision: 30, force: false, timing: false }
    }
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("parameters fail validation (use --force to report anyway):\n{0}")]
    Validation(String),
    #[error(transparent)]
    Engine(#[from] qkz::Error),
}

type Job<'a> = Box<dyn FnOnce() -> (Vec<CheckRecord>, Vec<Timing>) + Send + 'a>;

fn timed(name: &'static str, f: impl FnOnce() -> CheckRecord) -> (Vec<CheckRecord>, Vec<Timing>) {
    let start = Instant::now();
    let rec = f();
    (vec![rec], vec![Timing { name, seconds: start.elapsed().as_secs_f64() }])
}

fn run_jobs(jobs: Vec<Job<'_>>) -> (Vec<CheckRecord>, Vec<Timing>) {
    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = jobs.into_iter().map(|j| s.spawn(j)).collect();
        handles.into_iter().map(|h| h.join().expect("check thread panicked")).collect()
    });
    let mut checks = Vec::new();
    let mut timing = Vec::new();
    for (c, t) in results {
        checks.extend(c);
        timing.extend(t);
    }
    (checks, timing)
}

/// Runs the selected suites on `ps` and assembles the report.
pub fn run(ps: &ParamSet, opts: &RunOptions) -> Result<RunReport, RunError> {
    set_precision_digits(opts.precision);
    if opts.suite.numeric() && ps.l != 1 {
        return Err(qkz::Error::UnsupportedScale {
            context: format!("numeric suite supports level 1 only, configuration has l = {}", ps.l),
        }
        .into());
    }
    let report = validate(ps);
    let failures: Vec<String> = report
        .failures()
        .map(|c| match &c.witness {
            Some(w) => format!("{}: {w}", c.name),
            None => c.name.to_string(),
        })
        .collect();
    if !report.passed() && !opts.force {
        return Err(RunError::Validation(failures.join("\n")));
    }

    let cache = RCache::<GaussRational>::new();
    let mut jobs: Vec<Job<'_>> = Vec::new();
    if opts.suite.exact() {
        let c = &cache;
        jobs.push(Box::new(move || timed("flatness", || flatness(ps, c))));
        jobs.push(Box::new(move || timed("invariance", || invariance(ps, c))));
        jobs.push(Box::new(|| timed("x_independence", || x_independence(ps))));
        jobs.push(Box::new(|| timed("dimensions", || dimensions(ps))));
        jobs.push(Box::new(|| timed("q_quotient", || q_quotient(ps))));
    }
    if opts.suite.numeric() {
        let c = &cache;
        jobs.push(Box::new(move || solution_checks(ps, c)));
        jobs.push(Box::new(|| timed("kernel", || kernel(ps))));
        jobs.push(Box::new(|| timed("lemma_derivative", || lemma_derivative(ps))));
    }
    let (checks, timing) = run_jobs(jobs);
    let passed = checks.iter().all(|c| !matches!(c.status, Status::Fail | Status::Error));
    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho::of(ps),
        suite: opts.suite.name(),
        precision_digits: opts.precision,
        validation: Validation { passed: report.passed(), failures },
        checks,
        passed,
        timing: opts.timing.then_some(timing),
    })
}

fn flatness(ps: &ParamSet, cache: &RCache<GaussRational>) -> CheckRecord {
    const NAME: &str = "flatness";
    let data = QkzData {
        space: TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone()),
        zs: ps.zs.clone(),
        p: GaussRational::from(ps.p.clone()),
    };
    match check_flatness(&data, ps.l, cache) {
        Ok(r) => {
            let rec = CheckRecord::verdict(NAME, "exact", r.passed).with_details(json!({"pairs_checked": r.pairs_checked}));
            match r.witness {
                Some((i, j, row, col)) => rec.with_witness(format!("pair ({}, {}) differs at entry ({row}, {col})", i + 1, j + 1)),
                None => rec,
            }
        }
        Err(e) => CheckRecord::failed(NAME, "exact", e),
    }
}

fn invariance(ps: &ParamSet, cache: &RCache<GaussRational>) -> CheckRecord {
    const NAME: &str = "invariance";
    match check_invariance(ps, cache) {
        Ok(r) => {
            let rec = CheckRecord::verdict(NAME, "exact", r.passed).with_details(json!({"maps_checked": r.maps_checked}));
            match r.witness {
                Some(w) => rec.with_witness(format!("{w:?}")),
                None => rec,
            }
        }
        Err(e) => CheckRecord::failed(NAME, "exact", e),
    }
}

fn x_independence(ps: &ParamSet) -> CheckRecord {
    const NAME: &str = "x_independence";
    if effective_order(ps).is_none() {
        return CheckRecord::skipped(NAME, "exact", "no resonant order");
    }
    let xs = [int(0), ps.p.clone(), int(17)];
    match check_x_independence(ps, &xs) {
        Ok(same) => CheckRecord::verdict(NAME, "exact", same).with_details(json!({"x": ["0", qkz::scalars::format_rational(&ps.p), "17"]})),
        Err(e) => CheckRecord::failed(NAME, "exact", e),
    }
}

fn dimensions(ps: &ParamSet) -> CheckRecord {
    const NAME: &str = "dimensions";
    match dimension_report(ps) {
        Ok(r) => CheckRecord::verdict(NAME, "exact", r.count_matches && r.classical_bounds_quantum).with_details(json!({
            "k": r.k,
            "C": r.dim_c,
            "N": r.dim_n,
            "sing_l": r.dim_sing_l,
            "sing_lmk": r.dim_sing_lmk,
            "good_condition": r.good_condition,
            "bad_condition": r.bad_condition,
        })),
        Err(e) => CheckRecord::failed(NAME, "exact", e),
    }
}

/// `dim sing^q_l / (f_q)^k sing^q_{l−k}` against `dim C(z)` at generic `z`.
fn q_quotient(ps: &ParamSet) -> CheckRecord {
    const NAME: &str = "q_quotient";
    let Some(k) = effective_order(ps).filter(|&k| k <= ps.l) else {
        return CheckRecord::skipped(NAME, "exact", "no resonant order at most l");
    };
    let run = || -> qkz::Result<CheckRecord> {
        let q = QTensorSpace::new(irreducible_space(ps), &ps.p)?;
        let quotient = q.quotient_dimension(ps.l, k)?;
        let generic = generic_dimension_report(ps, 4)?.dim_c;
        Ok(CheckRecord::verdict(NAME, "exact", quotient == generic)
            .with_details(json!({"quotient_dimension": quotient, "generic_dim_C": generic})))
    };
    run().unwrap_or_else(|e| CheckRecord::failed(NAME, "exact", e))
}

/// `W^+` and `W^-`. They are `p`-periodic in `t` only for an odd number of
/// points.
pub fn example_weights() -> [TrigWeight; 2] {
    [TrigWeight::Exponential { sign: 1 }, TrigWeight::Exponential { sign: -1 }]
}

/// The singular weight functions `W^sing` at level `l`, labelled by index.
pub fn singular_weights(ps: &ParamSet) -> Vec<(String, TrigWeight)> {
    let n = ps.n();
    if n < 2 {
        return Vec::new();
    }
    multi_indices(n - 1, ps.l, &vec![None; n - 1])
        .into_iter()
        .map(|idx| (format!("sing{idx:?}"), TrigWeight::Singular(idx)))
        .collect()
}

/// Residuals of `Ψ(z + p·1_m) = K_m(z) Ψ(z)` per `m` (0-based), each the
/// worst over the given weights. The shifted passes run concurrently.
pub fn qkz_residuals(
    ps: &ParamSet,
    weights: &[TrigWeight],
    here: &[SolutionVector],
    quad: &QuadratureSpec,
    cache: &RCache<GaussRational>,
) -> Vec<qkz::Result<f64>> {
    thread::scope(|s| {
        let handles: Vec<_> = (0..ps.n())
            .map(|m| s.spawn(move || check_qkz_from(ps, weights, here, m, quad, cache).map(|r| r.into_iter().fold(0.0, f64::max))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("qKZ thread panicked")).collect()
    })
}

/// Solution pass for every `W^sing`, then the qKZ and Example-equation
/// checks that share it.
fn solution_checks(ps: &ParamSet, cache: &RCache<GaussRational>) -> (Vec<CheckRecord>, Vec<Timing>) {
    let start = Instant::now();
    let quad = QuadratureSpec::default();
    let (names, weights): (Vec<String>, Vec<TrigWeight>) = singular_weights(ps).into_iter().unzip();
    let vanishing = effective_order(ps).is_some() && dimension_report(ps).is_ok_and(|d| d.dim_c == 0);
    let why = if weights.is_empty() {
        Some("no singular weight functions")
    } else if vanishing {
        Some("the blocks space is zero, so every solution vanishes and relative residuals are meaningless")
    } else {
        None
    };
    if let Some(why) = why {
        return (
            vec![CheckRecord::skipped("qkz_residual", "numeric", why), CheckRecord::skipped("example_equation", "numeric", why)],
            Vec::new(),
        );
    }
    let here = build_contour(&TrigContext::new(ps)).and_then(|path| solution_vectors(&weights, ps, false, &path, &quad));
    let pass_time = Timing { name: "solution_pass", seconds: start.elapsed().as_secs_f64() };
    let here = match here {
        Ok(h) => h,
        Err(e) => {
            return (
                vec![CheckRecord::failed("qkz_residual", "numeric", &e), CheckRecord::failed("example_equation", "numeric", &e)],
                vec![pass_time],
            )
        }
    };

    let start = Instant::now();
    let per_m = qkz_residuals(ps, &weights, &here, &quad, cache);
    let qkz_rec = match per_m.iter().cloned().collect::<qkz::Result<Vec<f64>>>() {
        Ok(rs) => CheckRecord::bounded("qkz_residual", "numeric", rs.iter().cloned().fold(0.0, f64::max), QKZ_BOUND)
            .with_details(json!({"per_m": rs, "weights": names})),
        Err(e) => CheckRecord::failed("qkz_residual", "numeric", e),
    };
    let qkz_time = Timing { name: "qkz_residual", seconds: start.elapsed().as_secs_f64() };

    let start = Instant::now();
    let example_rec = example_equation(ps, &here, &names);
    let example_time = Timing { name: "example_equation", seconds: start.elapsed().as_secs_f64() };
    (vec![qkz_rec, example_rec], vec![pass_time, qkz_time, example_time])
}

fn example_equation(ps: &ParamSet, here: &[SolutionVector], names: &[String]) -> CheckRecord {
    const NAME: &str = "example_equation";
    let Some(k) = effective_order(ps) else {
        return CheckRecord::skipped(NAME, "numeric", "no resonant order");
    };
    let reports: Vec<_> = here.iter().map(|s| membership_residuals(ps, k, s)).collect();
    let worst = reports
        .iter()
        .flat_map(|r| [Some(r.operator_residual), r.example_residual, r.singularity_residual])
        .flatten()
        .fold(0.0, f64::max);
    let details: Vec<_> = reports
        .iter()
        .zip(names)
        .map(|(r, w)| {
            json!({
                "weight": w,
                "operator": r.operator_residual,
                "example": r.example_residual,
                "singularity": r.singularity_residual,
            })
        })
        .collect();
    CheckRecord::bounded(NAME, "numeric", worst, EXAMPLE_BOUND).with_details(json!(details))
}

fn kernel(ps: &ParamSet) -> CheckRecord {
    const NAME: &str = "kernel";
    let Some(k) = ps.k else {
        return CheckRecord::skipped(NAME, "numeric", "no order k in the configuration");
    };
    if !ps.resonance_defect(k).is_zero() {
        return CheckRecord::skipped(NAME, "numeric", "parameters are not resonant");
    }
    if k > ps.l {
        return CheckRecord::skipped(NAME, "numeric", "order k exceeds the level");
    }
    let dim = TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone()).dim(ps.l - k);
    let mut v = vec![Cx::zero(); dim];
    v[0] = Cx::one();
    match check_kernel(ps, &v, &QuadratureSpec::default()) {
        Ok(r) => CheckRecord::bounded(NAME, "numeric", r.residual, KERNEL_BOUND).with_details(json!({"norm": r.norm, "scale": r.scale})),
        Err(e) => CheckRecord::failed(NAME, "numeric", e),
    }
}

/// Deterministic sample points `t` in `[−3, 3] × [−6, 8]`.
pub fn lemma_points(count: usize) -> Vec<Cx> {
    const A: f64 = 0.618_033_988_749_894_9;
    const B: f64 = 0.414_213_562_373_095_1;
    (1..=count)
        .map(|j| {
            let (u, v) = ((j as f64 * A).fract(), (j as f64 * B).fract());
            Cx::from_f64(-3.0 + 6.0 * u, -6.0 + 14.0 * v)
        })
        .collect()
}

fn lemma_derivative(ps: &ParamSet) -> CheckRecord {
    const NAME: &str = "lemma_derivative";
    let ctx = TrigContext::new(ps);
    let mut worst: f64 = 0.0;
    for t in lemma_points(LEMMA_POINTS) {
        match check_lemma_derivative(&ctx, &t) {
            Ok(r) => worst = worst.max(r),
            Err(e) => return CheckRecord::failed(NAME, "numeric", e),
        }
    }
    CheckRecord::bounded(NAME, "numeric", worst, LEMMA_BOUND).with_details(json!({"points": LEMMA_POINTS}))
}
