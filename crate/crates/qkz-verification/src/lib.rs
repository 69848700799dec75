//! Fixtures and a small runner for the acceptance criteria.
//!
//! The criteria live in `tests/acceptance.rs`. Each one returns an
//! [`Outcome`]; [`run_criteria`] prints one line per criterion and reports
//! whether all of them passed.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use qkz::params::ParamSet;
use qkz::scalars::{gauss, int, rat, GaussRational, Rational};

/// Three spin-1/2 points at level one with the staggered imaginary parts of
/// the worked three-point Example. Resonant (`k = 1`) at `p = −3`.
pub fn example(p: Rational) -> ParamSet {
    ParamSet::new(
        vec![rat(1, 2); 3],
        vec![gauss(rat(1, 10), int(-4)), gauss(rat(-1, 5), int(1)), gauss(rat(3, 10), int(6))],
        p,
        1,
        Some(1),
    )
}

/// `λ = (3/2, 3/2, 3/2)`, `p = −7`, level two, resonant of order one.
pub fn resonant_level_two(zs: Vec<GaussRational>) -> ParamSet {
    ParamSet::new(vec![rat(3, 2); 3], zs, int(-7), 2, Some(1))
}

pub fn level_two_positions() -> Vec<GaussRational> {
    vec![gauss(rat(3, 11), int(0)), gauss(rat(-41, 6), rat(1, 5)), gauss(rat(97, 9), int(-2))]
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

pub struct Criterion<'a> {
    pub id: u32,
    pub title: &'static str,
    pub check: Box<dyn FnOnce() -> Outcome + 'a>,
}

/// Runs every criterion (a panic counts as a failure), printing
/// `criterion N PASS|FAIL title (seconds): detail`. Returns `true` when all
/// pass.
pub fn run_criteria(criteria: Vec<Criterion<'_>>) -> bool {
    let mut all = true;
    for c in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Outcome::new(false, format!("panicked: {msg}"))
        });
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} {} ({:.1} s): {}", c.id, c.title, start.elapsed().as_secs_f64(), outcome.detail);
        all &= outcome.passed;
    }
    all
}
