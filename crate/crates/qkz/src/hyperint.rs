//! Hypergeometric integrals: the phase function, contours separating the two
//! pole ladders, composite Gauss–Legendre quadrature with algebraic and
//! exponential tails, solution vectors, and the numeric checks built on them.
//!
//! Contours are oriented upwards, from `−i∞` to `+i∞`, and integrals are
//! taken against `dt`.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero as _;

use crate::blocks::effective_order;
use crate::error::{Error, Result};
use crate::linalg::{singular_values, vec_norm, CMatrix};
use crate::params::{is_admissible, ParamSet};
use crate::rmatrix_qkz::{QkzData, RCache};
use crate::scalars::{int, log_gamma, working_bits, Cx, GaussRational, Real, ScalarError};
use crate::sl2rep::{ModuleKind, MultiIndex, TensorSpace};
use crate::uqsl2::QTensorSpace;
use crate::weightfn::{eta, map_b, weight_coefficient, TrigContext, TrigWeight, TFn};
use crate::yangian::{lowering_power, EvaluationAssignment};

fn gamma_err(e: ScalarError) -> Error {
    match e {
        ScalarError::GammaPole { nearest } => {
            Error::PoleProximity { context: format!("phase Gamma pole at {nearest}"), distance: 0.0 }
        }
        other => Error::Scalar(other),
    }
}

/// `log Φ(t)` for `Φ = ∏_{i,j} Γ((t_j − z_i + λ_i)/p)/Γ((t_j − z_i − λ_i)/p)
/// ∏_{i<j} Γ((t_i − t_j − 1)/p)/Γ((t_i − t_j + 1)/p)`.
pub fn log_phase(t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    let p = ctx.p_cx();
    let one = Cx::one();
    let mut acc = Cx::zero();
    for tj in t {
        for i in 0..ctx.n() {
            let u = tj - ctx.z(i);
            acc = acc + log_gamma(&((&u + ctx.lambda(i)) / &p)).map_err(gamma_err)?;
            acc = acc - log_gamma(&((&u - ctx.lambda(i)) / &p)).map_err(gamma_err)?;
        }
    }
    for a in 0..t.len() {
        for b in a + 1..t.len() {
            let d = &t[a] - &t[b];
            acc = acc + log_gamma(&((&d - &one) / &p)).map_err(gamma_err)?;
            acc = acc - log_gamma(&((&d + &one) / &p)).map_err(gamma_err)?;
        }
    }
    Ok(acc)
}

pub fn phase(t: &[Cx], ctx: &TrigContext) -> Result<Cx> {
    Ok(log_phase(t, ctx)?.exp())
}

/// `(D_i φ)(t) = φ(…, t_i + p, …) − φ(t)` (0-based `i`).
pub fn discrete_derivative<'a>(f: &'a TFn<'a>, i: usize, p: Cx) -> Box<TFn<'a>> {
    Box::new(move |t: &[Cx]| {
        let mut s = t.to_vec();
        s[i] = &s[i] + &p;
        Ok(f(&s)? - f(t)?)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Pole ladder `start + k·step`, `k ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ladder {
    pub factor: usize,
    pub side: Side,
    pub start: (f64, f64),
    pub step: f64,
}

impl Ladder {
    pub fn point(&self, k: usize) -> (f64, f64) {
        (self.start.0 + self.step * k as f64, self.start.1)
    }
}

/// The ladders `z_j − λ_j + |p|k` (to the right of the contour) and
/// `z_j + λ_j − |p|k` (to the left).
pub fn ladders(ctx: &TrigContext) -> Vec<Ladder> {
    let a = Real::from_rational(&ctx.p).to_f64().abs();
    let mut out = Vec::new();
    for j in 0..ctx.n() {
        let (zr, zi) = ctx.z(j).to_f64_pair();
        let lam = ctx.lambda(j).re.to_f64();
        out.push(Ladder { factor: j, side: Side::Right, start: (zr - lam, zi), step: a });
        out.push(Ladder { factor: j, side: Side::Left, start: (zr + lam, zi), step: -a });
    }
    out
}

/// Required margin between the contour and the ladders.
pub fn separation_margin(ctx: &TrigContext) -> f64 {
    Real::from_rational(&ctx.p).to_f64().abs().min(1.0) / 8.0
}

/// Free parameters of the staircase construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourShape {
    /// Where a crossing sits between two neighbouring ladder points, in
    /// `[0.3, 0.7]`.
    pub crossing_fraction: f64,
    /// Vertical overshoot beyond a band, as a fraction of the free gap, in
    /// `[0.4, 0.6]`.
    pub lift: f64,
    /// Use the imaginary axis whenever it separates the ladders.
    pub allow_straight: bool,
}

impl Default for ContourShape {
    fn default() -> Self {
        ContourShape { crossing_fraction: 0.5, lift: 0.5, allow_straight: true }
    }
}

/// Piecewise-linear contour with vertical tails below the first vertex and
/// above the last one.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub vertices: Vec<(f64, f64)>,
    pub ladders: Vec<Ladder>,
    pub margin: f64,
}

/// Heights closer than this share a band.
const BAND_MERGE: f64 = 1.0;
/// Length of the straight run added before each tail.
const TAIL_LEAD: f64 = 2.0;

pub fn build_contour(ctx: &TrigContext) -> Result<ContourPath> {
    build_contour_with(ctx, ContourShape::default())
}

pub fn build_contour_with(ctx: &TrigContext, shape: ContourShape) -> Result<ContourPath> {
    let ladders = ladders(ctx);
    let margin = separation_margin(ctx);
    let a = Real::from_rational(&ctx.p).to_f64().abs();
    if Real::from_rational(&ctx.p).to_f64() >= 0.0 {
        return Err(Error::Precondition("the step p must be negative".into()));
    }
    let heights: Vec<f64> = ladders.iter().map(|l| l.start.1).collect();
    let (ymin, ymax) = heights.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &y| (lo.min(y), hi.max(y)));

    let straight = ladders.iter().all(|l| match l.side {
        Side::Right => l.start.0 >= margin,
        Side::Left => l.start.0 <= -margin,
    });
    if shape.allow_straight && straight {
        let vertices = vec![(0.0, ymin - 1.0 - TAIL_LEAD), (0.0, ymax + 1.0 + TAIL_LEAD)];
        return Ok(ContourPath { vertices, ladders, margin });
    }

    // Group heights into bands.
    let mut sorted = heights.clone();
    sorted.sort_by(f64::total_cmp);
    let mut bands: Vec<(f64, f64)> = Vec::new();
    for y in sorted {
        match bands.last_mut() {
            Some(b) if y - b.1 < BAND_MERGE => b.1 = y,
            _ => bands.push((y, y)),
        }
    }

    let mut vertices: Vec<(f64, f64)> = Vec::new();
    for (bi, &(ylo, yhi)) in bands.iter().enumerate() {
        let below = if bi == 0 { f64::INFINITY } else { ylo - bands[bi - 1].1 };
        let above = if bi + 1 == bands.len() { f64::INFINITY } else { bands[bi + 1].0 - yhi };
        let h = 1.0f64.min(below / 3.0).min(above / 3.0);
        let in_band: Vec<&Ladder> = ladders.iter().filter(|l| l.start.1 >= ylo && l.start.1 <= yhi).collect();
        let starts = in_band.iter().map(|l| l.start.0);
        let lo = starts.clone().fold(f64::INFINITY, f64::min) - a;
        let hi = starts.fold(f64::NEG_INFINITY, f64::max) + a;
        // (x, side, factor) for every ladder point inside the window.
        let mut pts: Vec<(f64, Side, usize)> = Vec::new();
        for l in &in_band {
            let mut k = 0;
            loop {
                let (x, _) = l.point(k);
                if x < lo || x > hi {
                    break;
                }
                pts.push((x, l.side, l.factor));
                k += 1;
            }
        }
        pts.sort_by(|u, v| u.0.total_cmp(&v.0));
        let mut crossings: Vec<f64> = Vec::new();
        let mut side = Side::Left;
        let lead = 4.0 * margin;
        for (i, &(x, s, f)) in pts.iter().enumerate() {
            if s == side {
                continue;
            }
            let c = if i == 0 {
                x - lead
            } else {
                let (xp, _, fp) = pts[i - 1];
                if x - xp < 2.0 * margin {
                    return Err(Error::LaddersNotSeparable {
                        first: fp,
                        second: f,
                        detail: format!("points {xp:.6} and {x:.6} at height {ylo:.6} are {:.3e} apart", x - xp),
                    });
                }
                xp + shape.crossing_fraction * (x - xp)
            };
            crossings.push(c);
            side = s;
        }
        if side == Side::Left {
            let last = pts.last().map_or(0.0, |p| p.0);
            crossings.push(last + lead);
        }
        let count = crossings.len();
        let lift = |i: usize| h * shape.lift * (1.0 + 0.5 * i as f64 / count as f64);
        for (i, &c) in crossings.iter().enumerate() {
            let top = (c, yhi + lift(i));
            let bottom = (c, ylo - lift(i));
            if i % 2 == 0 {
                vertices.push(bottom);
                vertices.push(top);
            } else {
                vertices.push(top);
                vertices.push(bottom);
            }
        }
    }
    let first = vertices[0];
    let last = *vertices.last().expect("at least one band");
    vertices.insert(0, (first.0, first.1 - TAIL_LEAD));
    vertices.push((last.0, last.1 + TAIL_LEAD));
    let path = ContourPath { vertices, ladders, margin };
    path.check_separation(ctx)?;
    Ok(path)
}

fn segment_distance(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    let s = if len2 == 0.0 { 0.0 } else { (((p.0 - a.0) * dx + (p.1 - a.1) * dy) / len2).clamp(0.0, 1.0) };
    libm::hypot(a.0 + s * dx - p.0, a.1 + s * dy - p.1)
}

impl ContourPath {
    pub fn is_straight(&self) -> bool {
        self.vertices.iter().all(|v| v.0 == 0.0)
    }

    /// Segments including the two tails, truncated at `±reach` beyond the
    /// end vertices.
    fn segments(&self, reach: f64) -> Vec<((f64, f64), (f64, f64))> {
        let first = self.vertices[0];
        let last = *self.vertices.last().expect("nonempty");
        let mut segs = vec![((first.0, first.1 - reach), first)];
        segs.extend(self.vertices.windows(2).map(|w| (w[0], w[1])));
        segs.push((last, (last.0, last.1 + reach)));
        segs
    }

    pub fn distance_to(&self, p: (f64, f64)) -> f64 {
        let reach = 1e6 + libm::fabs(p.1);
        self.segments(reach).iter().map(|&(a, b)| segment_distance(a, b, p)).fold(f64::INFINITY, f64::min)
    }

    /// Side of a point off the contour, from the signed number of crossings
    /// of the horizontal ray towards `+∞`.
    pub fn side_of(&self, p: (f64, f64)) -> Side {
        let reach = 1e6 + libm::fabs(p.1);
        let mut winding = 0i32;
        for (a, b) in self.segments(reach) {
            let (lo, hi) = if a.1 < b.1 { (a, b) } else { (b, a) };
            if !(lo.1 <= p.1 && p.1 < hi.1) {
                continue;
            }
            let x = lo.0 + (p.1 - lo.1) / (hi.1 - lo.1) * (hi.0 - lo.0);
            if x > p.0 {
                winding += if b.1 > a.1 { 1 } else { -1 };
            }
        }
        if winding > 0 {
            Side::Left
        } else {
            Side::Right
        }
    }

    /// Checks ladder points with index up to the depth needed to leave the
    /// contour's horizontal extent by two steps; returns the smallest
    /// distance found.
    pub fn check_separation(&self, _ctx: &TrigContext) -> Result<f64> {
        let (xlo, xhi) = self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.0), hi.max(v.0)));
        let mut worst = f64::INFINITY;
        for l in &self.ladders {
            let depth = ((xhi - xlo + libm::fabs(l.start.0) + libm::fabs(xlo) + libm::fabs(xhi)) / libm::fabs(l.step)) as usize + 2;
            for k in 0..=depth {
                let p = l.point(k);
                let d = self.distance_to(p);
                worst = worst.min(d);
                if d < self.margin * 0.999 || self.side_of(p) != l.side {
                    return Err(Error::LaddersNotSeparable {
                        first: l.factor,
                        second: l.factor,
                        detail: format!("ladder point {k} of factor {} at ({:.6}, {:.6}) is misplaced", l.factor, p.0, p.1),
                    });
                }
            }
        }
        Ok(worst)
    }

    /// Ladder points near the finite part of the contour.
    fn nearby_poles(&self) -> Vec<(f64, f64)> {
        let (mut xlo, mut xhi, mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            xlo = xlo.min(v.0);
            xhi = xhi.max(v.0);
            ylo = ylo.min(v.1);
            yhi = yhi.max(v.1);
        }
        let pad = 4.0;
        let mut out = Vec::new();
        for l in &self.ladders {
            if l.start.1 < ylo - pad || l.start.1 > yhi + pad {
                continue;
            }
            for k in 0.. {
                let p = l.point(k);
                if p.0 < xlo - pad - libm::fabs(l.step) || p.0 > xhi + pad + libm::fabs(l.step) {
                    break;
                }
                out.push(p);
            }
        }
        out
    }
}

/// Composite Gauss–Legendre settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Nodes per panel for the coarse rule; the reported value uses the
    /// same rule on both halves of every panel.
    pub nodes: usize,
    /// Longest panel on the finite part.
    pub max_panel: f64,
    /// Panels may be this many times longer than their distance to the
    /// nearest pole.
    pub pole_ratio: f64,
    /// Tails stop once the integrand times `|dt/ds|` stays below
    /// `tail_tol` times the largest magnitude seen on the finite part.
    pub tail_tol: f64,
    /// Unit panels allowed in the tail variable before giving up.
    pub max_tail_panels: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { nodes: 16, max_panel: 1.0, pole_ratio: 1.5, tail_tol: 1e-14, max_tail_panels: 80 }
    }
}

type NodeTable = Vec<(usize, usize, Vec<(Real, Real)>)>;

static GL_CACHE: spin::Mutex<NodeTable> = spin::Mutex::new(Vec::new());

/// Gauss–Legendre nodes and weights on `[0, 1]` at the working precision.
pub fn gauss_legendre(n: usize) -> Vec<(Real, Real)> {
    let bits = working_bits();
    let mut cache = GL_CACHE.lock();
    if let Some((_, _, v)) = cache.iter().find(|(b, m, _)| *b == bits && *m == n) {
        return v.clone();
    }
    let one = Real::one();
    let two = Real::from_i64(2);
    let eps = crate::scalars::ten_pow_neg(crate::scalars::working_digits());
    let legendre = |x: &Real| {
        let (mut p0, mut p1) = (one.clone(), x.clone());
        for k in 2..=n {
            let kk = Real::from_i64(k as i64);
            let p2 = (Real::from_i64(2 * k as i64 - 1) * x * &p1 - Real::from_i64(k as i64 - 1) * &p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        let dp = Real::from_i64(n as i64) * (x * &p1 - &p0) / (x * x - &one);
        (p1, dp)
    };
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let guess = libm::cos(core::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5));
        let mut x = Real::from_f64(guess);
        for _ in 0..100 {
            let (p, dp) = legendre(&x);
            let dx = p / &dp;
            x = &x - &dx;
            if dx.abs().to_f64() < eps {
                break;
            }
        }
        let (_, dp) = legendre(&x);
        let w = &two / ((&one - &x * &x) * &dp * &dp);
        out.push(((&one + &x) / &two, w / &two));
    }
    cache.push((bits, n, out.clone()));
    out
}

/// A vector-valued contour integral with its node-doubling estimate.
#[derive(Debug, Clone)]
pub struct Integral {
    /// Value from the refined rule.
    pub values: Vec<Cx>,
    /// Value from the coarse rule (half the nodes).
    pub coarse: Vec<Cx>,
    pub evaluations: usize,
    /// Tail truncation in the tail variable `s`, below and above.
    pub tail_panels: (usize, usize),
}

impl Integral {
    pub fn est_error(&self) -> Vec<f64> {
        self.values.iter().zip(&self.coarse).map(|(a, b)| (a - b).abs_f64()).collect()
    }

    /// Largest `|fine − coarse| / |fine|` over components.
    pub fn max_relative_change(&self) -> f64 {
        self.values.iter().zip(self.est_error()).map(|(v, e)| e / v.abs_f64().max(1e-300)).fold(0.0, f64::max)
    }
}

fn cx_of(p: (f64, f64)) -> Cx {
    Cx::from_f64(p.0, p.1)
}

struct Accumulator<'f> {
    width: usize,
    fine: Vec<Cx>,
    coarse: Vec<Cx>,
    evaluations: usize,
    scale: f64,
    f: &'f mut dyn FnMut(&Cx) -> Result<Vec<Cx>>,
    rule: Vec<(Real, Real)>,
}

impl Accumulator<'_> {
    /// `Σ w_k f(t(s_k)) t'(s_k)` on `[s0, s1]`; returns the sum and the
    /// largest `|f t'|`.
    fn rule_on(&mut self, s0: &Real, s1: &Real, map: &dyn Fn(&Real) -> (Cx, Cx)) -> Result<(Vec<Cx>, f64)> {
        let len = s1 - s0;
        let mut acc = vec![Cx::zero(); self.width];
        let mut peak: f64 = 0.0;
        for (x, w) in self.rule.clone() {
            let s = s0 + &(&x * &len);
            let (t, dt) = map(&s);
            let vals = (self.f)(&t)?;
            self.evaluations += 1;
            let wt = dt.scale(&(&w * &len));
            for (a, v) in acc.iter_mut().zip(&vals) {
                let term = v * &wt;
                peak = peak.max(v.abs_f64() * dt.abs_f64());
                *a = &*a + &term;
            }
        }
        Ok((acc, peak))
    }

    fn panel(&mut self, s0: &Real, s1: &Real, map: &dyn Fn(&Real) -> (Cx, Cx)) -> Result<f64> {
        let mid = (s0 + s1) / Real::from_i64(2);
        let (coarse, _) = self.rule_on(s0, s1, map)?;
        let (left, p1) = self.rule_on(s0, &mid, map)?;
        let (right, p2) = self.rule_on(&mid, s1, map)?;
        for i in 0..self.width {
            self.coarse[i] = &self.coarse[i] + &coarse[i];
            self.fine[i] = &self.fine[i] + &(&left[i] + &right[i]);
        }
        Ok(p1.max(p2))
    }
}

/// Splits `[0, 1]` so that each piece of the segment `a → b` is no longer
/// than `min(max_len, ratio · distance to the nearest pole)`.
fn split_segment(a: (f64, f64), b: (f64, f64), poles: &[(f64, f64)], quad: &QuadratureSpec, margin: f64) -> Result<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut stack = vec![(0.0f64, 1.0f64)];
    let at = |s: f64| (a.0 + s * (b.0 - a.0), a.1 + s * (b.1 - a.1));
    while let Some((s0, s1)) = stack.pop() {
        let (p0, p1) = (at(s0), at(s1));
        let len = libm::hypot(p1.0 - p0.0, p1.1 - p0.1);
        let d = poles.iter().map(|&q| segment_distance(p0, p1, q)).fold(f64::INFINITY, f64::min);
        if d < margin * 1e-3 {
            return Err(Error::PoleProximity { context: "pole on the contour".into(), distance: d });
        }
        if len > quad.max_panel.min(quad.pole_ratio * d) && len > 1e-6 {
            let m = 0.5 * (s0 + s1);
            stack.push((m, s1));
            stack.push((s0, m));
        } else {
            out.push((s0, s1));
        }
    }
    Ok(out)
}

/// `∫_C f(t) dt` for a vector-valued `f` of one variable.
pub fn integrate_path(path: &ContourPath, quad: &QuadratureSpec, width: usize, f: &mut dyn FnMut(&Cx) -> Result<Vec<Cx>>) -> Result<Integral> {
    let poles = path.nearby_poles();
    let mut acc = Accumulator {
        width,
        fine: vec![Cx::zero(); width],
        coarse: vec![Cx::zero(); width],
        evaluations: 0,
        scale: 0.0,
        f,
        rule: gauss_legendre(quad.nodes),
    };
    for w in path.vertices.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ca, cb) = (cx_of(a), cx_of(b));
        let d = &cb - &ca;
        let map = |s: &Real| (&ca + &d.scale(s), d.clone());
        for (s0, s1) in split_segment(a, b, &poles, quad, path.margin)? {
            let peak = acc.panel(&Real::from_f64(s0), &Real::from_f64(s1), &map)?;
            acc.scale = acc.scale.max(peak);
        }
    }
    if acc.scale == 0.0 {
        acc.scale = f64::MIN_POSITIVE;
    }
    let first = path.vertices[0];
    let last = *path.vertices.last().expect("nonempty");
    let mut tails = [0usize; 2];
    for (slot, (base, dir)) in [(first, -1.0), (last, 1.0)].into_iter().enumerate() {
        // t(s) = base ± i L (e^s − 1); both tails contribute ∫_0^∞ f i L e^s ds.
        let cb = cx_of(base);
        let lead = TAIL_LEAD;
        let l_re = Real::from_f64(lead);
        let map = |s: &Real| {
            let grow = &l_re * &s.exp();
            let y = &grow - &l_re;
            let t = &cb + &Cx::new(Real::zero(), if dir > 0.0 { y } else { -y });
            (t, Cx::new(Real::zero(), grow))
        };
        let mut quiet = 0;
        let mut k = 0;
        loop {
            if k >= quad.max_tail_panels {
                return Err(Error::NonConvergence { context: format!("integrand does not decay along the {} tail", if dir > 0.0 { "upper" } else { "lower" }) });
            }
            let y0 = lead * (libm::exp(k as f64) - 1.0);
            let y1 = lead * (libm::exp(k as f64 + 1.0) - 1.0);
            let a = (base.0, base.1 + dir * y0);
            let b = (base.0, base.1 + dir * y1);
            let mut peak: f64 = 0.0;
            for (s0, s1) in split_segment(a, b, &poles, &QuadratureSpec { max_panel: f64::INFINITY, ..*quad }, path.margin)? {
                // Map the fraction of the vertical piece back to s.
                let s_of = |frac: f64| libm::log(1.0 + (y0 + frac * (y1 - y0)) / lead);
                peak = peak.max(acc.panel(&Real::from_f64(s_of(s0)), &Real::from_f64(s_of(s1)), &map)?);
            }
            k += 1;
            if peak < quad.tail_tol * acc.scale {
                quiet += 1;
                if quiet >= 2 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        tails[slot] = k;
    }
    Ok(Integral { values: acc.fine, coarse: acc.coarse, evaluations: acc.evaluations, tail_panels: (tails[0], tails[1]) })
}

/// `I(w_l̄, W) = ∫ Φ w_l̄ W dt` at level one.
pub fn integrate_i(idx: &[usize], weight: &TrigWeight, ctx: &TrigContext, path: &ContourPath, quad: &QuadratureSpec) -> Result<Integral> {
    require_level_one(weight.arity())?;
    integrate_path(path, quad, 1, &mut |t| {
        let tt = core::slice::from_ref(t);
        let w = weight.eval(ctx, tt)?;
        if w.is_zero() {
            return Ok(vec![Cx::zero()]);
        }
        Ok(vec![phase(tt, ctx)? * eta(idx, tt, ctx)? * w])
    })
}

fn require_level_one(l: usize) -> Result<()> {
    if l != 1 {
        return Err(Error::UnsupportedScale { context: format!("numeric integration at level {l}; only level 1 is integrated") });
    }
    Ok(())
}

/// `Ψ_W = Σ_l̄ I(w_l̄, W) f^{l̄} v` restricted to `indices`.
#[derive(Debug, Clone)]
pub struct SolutionVector {
    pub indices: Vec<MultiIndex>,
    pub values: Vec<Cx>,
    pub est_error: Vec<f64>,
    pub admissible_only: bool,
}

impl SolutionVector {
    pub fn norm(&self) -> f64 {
        vec_norm(&self.values)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Cx::abs_f64).fold(0.0, f64::max)
    }

    pub fn coordinate(&self, idx: &[usize]) -> Option<&Cx> {
        self.indices.iter().position(|i| i == idx).map(|k| &self.values[k])
    }

    pub fn max_relative_error(&self) -> f64 {
        self.values.iter().zip(&self.est_error).map(|(v, e)| e / v.abs_f64().max(1e-300)).fold(0.0, f64::max)
    }
}

/// Level-`l` indices: all of them, or the λ-admissible ones.
pub fn solution_indices(ps: &ParamSet, admissible_only: bool) -> Vec<MultiIndex> {
    let all = TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone()).basis(ps.l).indices;
    all.into_iter().filter(|i| !admissible_only || is_admissible(i, &ps.lambdas)).collect()
}

/// Solution vectors for several `W` on one contour, sharing phase evaluations.
pub fn solution_vectors(weights: &[TrigWeight], ps: &ParamSet, admissible_only: bool, path: &ContourPath, quad: &QuadratureSpec) -> Result<Vec<SolutionVector>> {
    require_level_one(ps.l)?;
    for w in weights {
        if !matches!(w, TrigWeight::Zero { .. }) {
            require_level_one(w.arity())?;
        }
    }
    let ctx = TrigContext::new(ps);
    let indices = solution_indices(ps, admissible_only);
    let width = weights.len() * indices.len();
    let integral = integrate_path(path, quad, width, &mut |t| {
        let tt = core::slice::from_ref(t);
        let ws: Vec<Cx> = weights.iter().map(|w| w.eval(&ctx, tt)).collect::<Result<_>>()?;
        let mut out = vec![Cx::zero(); width];
        if ws.iter().all(Cx::is_zero) {
            return Ok(out);
        }
        let ph = phase(tt, &ctx)?;
        for (c, idx) in indices.iter().enumerate() {
            let base = &ph * &eta(idx, tt, &ctx)?;
            for (k, w) in ws.iter().enumerate() {
                out[k * indices.len() + c] = &base * w;
            }
        }
        Ok(out)
    })?;
    let errs = integral.est_error();
    Ok((0..weights.len())
        .map(|k| {
            let r = k * indices.len()..(k + 1) * indices.len();
            SolutionVector {
                indices: indices.clone(),
                values: integral.values[r.clone()].to_vec(),
                est_error: errs[r].to_vec(),
                admissible_only,
            }
        })
        .collect())
}

/// Solution vector on the default contour for `ps`.
pub fn solution_psi(weight: &TrigWeight, ps: &ParamSet, admissible_only: bool, quad: &QuadratureSpec) -> Result<SolutionVector> {
    let path = build_contour(&TrigContext::new(ps))?;
    Ok(solution_vectors(core::slice::from_ref(weight), ps, admissible_only, &path, quad)?.remove(0))
}

/// `K_m(z)` on the Verma level-`l` block, as a numeric matrix.
pub fn qkz_matrix(ps: &ParamSet, m: usize, cache: &RCache<GaussRational>) -> Result<CMatrix> {
    let data = QkzData {
        space: TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone()),
        zs: ps.zs.clone(),
        p: GaussRational::new(ps.p.clone(), int(0)),
    };
    Ok(CMatrix::from_exact(&data.qkz_operator(m, ps.l, cache)?))
}

/// Relative residuals `‖Ψ(z + p·1_m) − K_m(z) Ψ(z)‖ / ‖Ψ(z)‖`, one per
/// weight function (0-based `m`). Contours are rebuilt at the shifted point.
pub fn check_qkz(ps: &ParamSet, weights: &[TrigWeight], m: usize, quad: &QuadratureSpec, cache: &RCache<GaussRational>) -> Result<Vec<f64>> {
    let here = solution_vectors(weights, ps, false, &build_contour(&TrigContext::new(ps))?, quad)?;
    check_qkz_from(ps, weights, &here, m, quad, cache)
}

/// As [`check_qkz`], reusing solution vectors already computed at `ps`.
pub fn check_qkz_from(ps: &ParamSet, weights: &[TrigWeight], here: &[SolutionVector], m: usize, quad: &QuadratureSpec, cache: &RCache<GaussRational>) -> Result<Vec<f64>> {
    let shifted = ps.shifted(m);
    let there = solution_vectors(weights, &shifted, false, &build_contour(&TrigContext::new(&shifted))?, quad)?;
    let k = qkz_matrix(ps, m, cache)?;
    Ok(here
        .iter()
        .zip(&there)
        .map(|(a, b)| {
            let ka = k.apply(&a.values);
            let diff: Vec<Cx> = b.values.iter().zip(&ka).map(|(x, y)| x - y).collect();
            let n = a.norm();
            if n == 0.0 {
                vec_norm(&diff)
            } else {
                vec_norm(&diff) / n
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MembershipReport {
    /// `‖e_p(z)^k Ψ‖ / (‖e_p(z)^k‖_F ‖Ψ‖)`.
    pub operator_residual: f64,
    /// `|Σ 2λ_i (z_i + λ_i + 2Σ_{j>i} λ_j) I_i| / max_i |I_i|` (level one,
    /// order one).
    pub example_residual: Option<f64>,
    /// `|Σ 2λ_i I_i| / max_i |I_i|` at level one.
    pub singularity_residual: Option<f64>,
}

/// Whether a solution vector lies in the kernel of `e_x(z)^k` with `x = p`.
pub fn check_blocks_membership(ps: &ParamSet, sol: &SolutionVector) -> Result<MembershipReport> {
    let k = effective_order(ps).ok_or_else(|| Error::Precondition("blocks membership needs a resonant order".into()))?;
    let membership = membership_residuals(ps, k, sol);
    Ok(membership)
}

/// The residuals of [`check_blocks_membership`] for an explicit order `k`,
/// also off resonance (used for control runs).
pub fn membership_residuals(ps: &ParamSet, k: usize, sol: &SolutionVector) -> MembershipReport {
    let kind = if sol.admissible_only { ModuleKind::Irreducible } else { ModuleKind::Verma };
    let space = TensorSpace::uniform(kind, ps.lambdas.clone());
    let basis = space.basis(ps.l);
    let mut psi = vec![Cx::zero(); basis.len()];
    for (idx, v) in sol.indices.iter().zip(&sol.values) {
        if let Some(r) = basis.position(idx) {
            psi[r] = v.clone();
        }
    }
    let ev = EvaluationAssignment::new(space, ps.zs.clone());
    let x = GaussRational::new(ps.p.clone(), int(0));
    let op = CMatrix::from_exact(&lowering_power(ps.l, k, |lv| ev.op_e_x_z(lv, &x)));
    let norm = vec_norm(&psi);
    let operator_residual = if norm == 0.0 || op.rows() == 0 { 0.0 } else { vec_norm(&op.apply(&psi)) / (op.frobenius().max(1e-300) * norm) };

    let n = ps.n();
    let scale = sol.max_abs();
    let unit = |i: usize| {
        let mut idx = vec![0; n];
        idx[i] = 1;
        sol.coordinate(&idx).cloned().unwrap_or_else(Cx::zero)
    };
    let level_one = ps.l == 1;
    let ratio = |v: Cx| if scale == 0.0 { 0.0 } else { v.abs_f64() / scale };
    let singularity_residual = level_one.then(|| {
        ratio((0..n).fold(Cx::zero(), |acc, i| acc + Cx::from_rational(&(&ps.lambdas[i] * int(2))) * unit(i)))
    });
    let example_residual = (level_one && k == 1).then(|| {
        ratio((0..n).fold(Cx::zero(), |acc, i| {
            let tail: crate::scalars::Rational = ps.lambdas[i + 1..].iter().sum::<crate::scalars::Rational>() * int(2);
            let c = Cx::from_gauss(&ps.zs[i]) + Cx::from_rational(&(&ps.lambdas[i] + tail));
            acc + Cx::from_rational(&(&ps.lambdas[i] * int(2))) * c * unit(i)
        }))
    });
    MembershipReport { operator_residual, example_residual, singularity_residual }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    /// `‖Ψ^adm‖` for `W = 𝔟((f_q)^k ṽ)`.
    pub norm: f64,
    /// `max_l̄ |I(w_l̄, W_big)|` with `W_big` the largest term of `W`.
    pub scale: f64,
    pub residual: f64,
    pub resonant: bool,
}

/// `Ψ^adm` for `W = 𝔟((f_q)^k ṽ)`, measured against the integrals of the
/// largest single term of `W`. `ṽ` has coordinates on the Verma basis at
/// level `l − k`.
pub fn check_kernel(ps: &ParamSet, v_tilde: &[Cx], quad: &QuadratureSpec) -> Result<KernelReport> {
    let k = ps.k.ok_or_else(|| Error::Precondition("kernel check needs an order k".into()))?;
    let resonant = ps.resonance_defect(k).is_zero();
    let l = ps.l;
    if k > l {
        return Err(Error::Precondition("order k exceeds the level".into()));
    }
    let space = TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone());
    let q = QTensorSpace::new(space.clone(), &ps.p)?;
    let image = q.fq_power(l - k, k).apply(v_tilde);
    if image.iter().all(Cx::is_zero) {
        return Ok(KernelReport { norm: 0.0, scale: 0.0, residual: 0.0, resonant });
    }
    let weight = map_b(&space, l, &image);
    let indices = space.basis(l).indices;
    let big = indices
        .iter()
        .zip(&image)
        .map(|(idx, v)| (v.abs_f64() * weight_coefficient(idx, &ps.lambdas, &ps.p).abs().to_f64(), idx, v))
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, idx, v)| TrigWeight::Image { indices: vec![idx.clone()], coords: vec![v.clone()] })
        .expect("nonempty image");
    let path = build_contour(&TrigContext::new(ps))?;
    let sols = solution_vectors(&[weight, big], ps, true, &path, quad)?;
    let norm = sols[0].norm();
    let scale = sols[1].max_abs();
    let residual = if scale == 0.0 { norm } else { norm / scale };
    Ok(KernelReport { norm, scale, residual, resonant })
}

/// Matrix of `v^q ↦ Ψ_{𝔟(v^q)}` at level one.
#[derive(Debug, Clone)]
pub struct HypergeometricMap {
    /// Columns: coordinates of the solutions for the q-singular basis.
    pub matrix: CMatrix,
    /// The same columns expressed in an orthonormal basis of the classical
    /// singular block.
    pub reduced: CMatrix,
    pub singular_values: Vec<f64>,
    /// `|det reduced| / σ_max²` for a square reduced matrix.
    pub relative_det: Option<f64>,
}

impl HypergeometricMap {
    pub fn numeric_rank(&self, gap: f64) -> usize {
        let top = self.singular_values.iter().cloned().fold(0.0, f64::max);
        self.singular_values.iter().filter(|&&s| s > top / gap).count()
    }
}

pub fn hypergeometric_map_matrix(ps: &ParamSet, quad: &QuadratureSpec) -> Result<HypergeometricMap> {
    require_level_one(ps.l)?;
    let space = TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone());
    let q = QTensorSpace::new(space.clone(), &ps.p)?;
    let sing = q.q_singular_basis(1)?;
    let weights: Vec<TrigWeight> = sing.iter().map(|v| map_b(&space, 1, v)).collect();
    let path = build_contour(&TrigContext::new(ps))?;
    let sols = solution_vectors(&weights, ps, false, &path, quad)?;
    let cols: Vec<Vec<Cx>> = sols.into_iter().map(|s| s.values).collect();
    let dim = space.dim(1);
    let matrix = CMatrix::from_cols(dim, &cols);

    let classical: Vec<Vec<Cx>> = space
        .singular_basis::<crate::scalars::Rational>(1)
        .iter()
        .map(|v| v.iter().map(Cx::from_rational).collect())
        .collect();
    let ortho = orthonormalize(&classical);
    let mut reduced = CMatrix::zeros(ortho.len(), cols.len());
    for (i, e) in ortho.iter().enumerate() {
        for (j, c) in cols.iter().enumerate() {
            reduced[(i, j)] = e.iter().zip(c).fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * b);
        }
    }
    let mut singular_values = singular_values(&reduced).sigma;
    singular_values.sort_by(|a, b| b.total_cmp(a));
    let relative_det = (reduced.rows() == 2 && reduced.cols() == 2).then(|| {
        let det = &reduced[(0, 0)] * &reduced[(1, 1)] - &reduced[(0, 1)] * &reduced[(1, 0)];
        let top = singular_values.first().cloned().unwrap_or(0.0);
        if top == 0.0 {
            0.0
        } else {
            det.abs_f64() / (top * top)
        }
    });
    Ok(HypergeometricMap { matrix, reduced, singular_values, relative_det })
}

fn orthonormalize(vs: &[Vec<Cx>]) -> Vec<Vec<Cx>> {
    let mut out: Vec<Vec<Cx>> = Vec::new();
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = e.iter().zip(&w).fold(Cx::zero(), |acc, (a, b)| acc + a.conj() * b);
                w = w.iter().zip(e).map(|(x, y)| x - &(&c * y)).collect();
            }
        }
        let n = vec_norm(&w);
        if n > 1e-20 {
            let inv = Real::one() / Real::from_f64(n);
            out.push(w.iter().map(|x| x.scale(&inv)).collect());
        }
    }
    out
}

/// Pointwise residual of `D_1(tΦ) = (p + Σ2λ_i)Φ + Σ_i 2λ_i(z_i + p + λ_i +
/// Σ_{j>i} 2λ_j) w_i Φ` at level one, relative to `|(t+p)Φ(t+p)| + |tΦ(t)|`.
pub fn check_lemma_derivative(ctx: &TrigContext, t: &Cx) -> Result<f64> {
    let p = ctx.p_cx();
    let n = ctx.n();
    let t_phase = |s: &[Cx]| -> Result<Cx> { Ok(&s[0] * &phase(s, ctx)?) };
    let lhs = discrete_derivative(&t_phase, 0, p.clone())(core::slice::from_ref(t))?;
    let ph = phase(core::slice::from_ref(t), ctx)?;
    let two = Cx::from_i64(2);
    let lam_sum = (0..n).fold(Cx::zero(), |a, i| a + ctx.lambda(i));
    let mut rhs = (&p + &(&two * &lam_sum)) * &ph;
    for i in 0..n {
        let tail = (i + 1..n).fold(Cx::zero(), |a, j| a + ctx.lambda(j));
        let coef = &(&two * ctx.lambda(i)) * &(&(&(ctx.z(i) + &p) + ctx.lambda(i)) + &(&two * &tail));
        let mut idx = vec![0; n];
        idx[i] = 1;
        rhs = rhs + coef * eta(&idx, core::slice::from_ref(t), ctx)? * &ph;
    }
    let shifted = t + &p;
    let scale = (&shifted * &phase(core::slice::from_ref(&shifted), ctx)?).abs_f64() + (t * &ph).abs_f64();
    Ok((lhs - rhs).abs_f64() / scale.max(1e-300))
}
