use num_complex::Complex64 as C;
use qkz::hyperint::*;
use qkz::linalg::{vec_norm, CMatrix};
use qkz::params::ParamSet;
use qkz::rmatrix_qkz::RCache;
use qkz::scalars::{gauss, int, rat, Cx, GaussRational, Rational};
use qkz::sl2rep::{ModuleKind, TensorSpace};
use qkz::weightfn::*;
use qkz::yangian::EvaluationAssignment;
use qkz::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn desk_two_points() -> ParamSet {
    ParamSet::new(
        vec![rat(1, 3), rat(1, 4)],
        vec![gauss(rat(1, 5), int(-1)), gauss(rat(-3, 10), int(2))],
        rat(-5, 2),
        1,
        None,
    )
}

fn example(p: Rational) -> ParamSet {
    ParamSet::new(
        vec![rat(1, 2); 3],
        vec![gauss(rat(1, 10), int(-4)), gauss(rat(-1, 5), int(1)), gauss(rat(3, 10), int(6))],
        p,
        1,
        Some(1),
    )
}

#[test]
fn discrete_derivative_examples() {
    let p = Cx::from_i64(-3);
    let t = [Cx::from_f64(0.3, -1.1)];
    let constant = |_: &[Cx]| Ok(Cx::from_f64(2.5, 1.0));
    assert!(discrete_derivative(&constant, 0, p.clone())(&t).unwrap().is_zero());
    let periodic = |s: &[Cx]| Ok((s[0].scale(&(qkz::scalars::Real::pi() * qkz::scalars::Real::from_rational(&rat(-2, 3))))).sin());
    assert!(discrete_derivative(&periodic, 0, p.clone())(&t).unwrap().abs_f64() < 1e-25);
    let identity = |s: &[Cx]| Ok(s[0].clone());
    assert!((discrete_derivative(&identity, 0, p.clone())(&t).unwrap() - p).abs_f64() < 1e-28);
}

#[test]
fn straight_contour_when_the_axis_separates() {
    let ctx = TrigContext::from_parts(
        vec![Cx::from_f64(0.0, -1.0), Cx::from_f64(0.1, 2.0)],
        vec![rat(-1, 2), rat(-1, 3)],
        rat(-5, 2),
    );
    let path = build_contour(&ctx).unwrap();
    assert!(path.is_straight());
    let bent = build_contour_with(&ctx, ContourShape { allow_straight: false, ..Default::default() }).unwrap();
    assert!(!bent.is_straight());
    bent.check_separation(&ctx).unwrap();
}

#[test]
fn example_staircase_separates_ladders() {
    let ps = example(int(-3));
    let ctx = TrigContext::new(&ps);
    for shape in [ContourShape::default(), ContourShape { crossing_fraction: 0.35, lift: 0.42, allow_straight: true }] {
        let path = build_contour_with(&ctx, shape).unwrap();
        assert!(!path.is_straight());
        // Explicit predicate, independent of the construction.
        for l in ladders(&ctx) {
            for k in 0..12 {
                let pt = l.point(k);
                assert_eq!(path.side_of(pt), l.side, "factor {} depth {k}", l.factor);
                assert!(path.distance_to(pt) >= separation_margin(&ctx) * 0.999);
            }
        }
        // Non-horizontal segments, vertical ends.
        for w in path.vertices.windows(2) {
            assert!(w[0].1 != w[1].1);
        }
        let v = &path.vertices;
        assert_eq!(v[0].0, v[1].0);
        assert_eq!(v[v.len() - 1].0, v[v.len() - 2].0);
    }
}

#[test]
fn colliding_ladders_are_rejected() {
    // Right ladder of the first factor meets the left ladder start of the second.
    let ctx = TrigContext::from_parts(vec![Cx::from_f64(0.0, 0.0), Cx::from_f64(2.0, 0.0)], vec![rat(1, 2), rat(1, 2)], int(-3));
    assert!(matches!(build_contour(&ctx), Err(Error::LaddersNotSeparable { .. })));
    let ctx = TrigContext::from_parts(vec![Cx::from_f64(0.0, 0.0)], vec![rat(1, 2)], int(3));
    assert!(matches!(build_contour(&ctx), Err(Error::Precondition(_))));
}

#[test]
fn zero_weight_gives_zero() {
    let ps = desk_two_points();
    let sol = solution_psi(&TrigWeight::Zero { arity: 1 }, &ps, false, &QuadratureSpec::default()).unwrap();
    assert!(sol.values.iter().all(Cx::is_zero));
    let space = TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone());
    let zero_image = map_b(&space, 1, &[Cx::zero(), Cx::zero()]);
    let sol = solution_psi(&zero_image, &ps, false, &QuadratureSpec::default()).unwrap();
    assert!(sol.values.iter().all(Cx::is_zero));
    let ex = example(int(-3));
    let k = check_kernel(&ex, &[Cx::zero()], &QuadratureSpec::default()).unwrap();
    assert_eq!(k.residual, 0.0);
}

#[test]
fn higher_levels_are_out_of_numeric_scope() {
    let mut ps = desk_two_points();
    ps.l = 3;
    let w = TrigWeight::Singular(vec![3]);
    assert!(matches!(solution_psi(&w, &ps, false, &QuadratureSpec::default()), Err(Error::UnsupportedScale { .. })));
}

#[test]
fn desk_two_points_solution() {
    let ps = desk_two_points();
    let ctx = TrigContext::new(&ps);
    let quad = QuadratureSpec::default();
    let sing = TrigWeight::Singular(vec![1]);
    let other = TrigWeight::Basis(vec![1, 0]);
    let (a, b) = (Cx::from_f64(1.5, -0.5), Cx::from_f64(-0.25, 2.0));
    let combo = TrigWeight::Combination(vec![(a.clone(), sing.clone()), (b.clone(), other.clone())]);
    let path = build_contour(&ctx).unwrap();
    let sols = solution_vectors(&[sing.clone(), other, combo], &ps, false, &path, &quad).unwrap();

    // Linearity.
    for c in 0..2 {
        let direct = &a * &sols[0].values[c] + &b * &sols[1].values[c];
        assert!((&direct - &sols[2].values[c]).abs_f64() < 1e-20 * direct.abs_f64());
    }
    // Node doubling.
    for s in &sols {
        assert!(s.max_relative_error() < 1e-8, "{}", s.max_relative_error());
    }
    // Singularity of the value.
    let m = membership_residuals(&ps, 1, &sols[0]);
    assert!(m.singularity_residual.unwrap() < 1e-20);

    // A second valid contour gives the same integrals.
    let alt = build_contour_with(&ctx, ContourShape { crossing_fraction: 0.32, lift: 0.58, allow_straight: false }).unwrap();
    assert_ne!(alt.vertices, path.vertices);
    let again = solution_vectors(&[sing.clone()], &ps, false, &alt, &quad).unwrap();
    for (x, y) in again[0].values.iter().zip(&sols[0].values) {
        assert!((x - y).abs_f64() < 1e-12 * y.abs_f64());
    }

    // e_x(z) for x = 0 and x = p agree on the singular value.
    let space = TensorSpace::uniform(ModuleKind::Verma, ps.lambdas.clone());
    let ev = EvaluationAssignment::new(space, ps.zs.clone());
    let e0 = CMatrix::from_exact(&ev.op_e_x_z(1, &GaussRational::new(int(0), int(0))));
    let ep = CMatrix::from_exact(&ev.op_e_x_z(1, &GaussRational::new(ps.p.clone(), int(0))));
    let d: Vec<Cx> = e0.apply(&sols[0].values).iter().zip(ep.apply(&sols[0].values)).map(|(x, y)| x - &y).collect();
    assert!(vec_norm(&d) < 1e-20 * sols[0].norm());

    // qKZ for the singular weight function.
    let cache = RCache::new();
    for m in 0..2 {
        let r = check_qkz_from(&ps, &[sing.clone()], &sols[..1], m, &quad, &cache).unwrap();
        assert!(r[0] < 1e-6, "m = {m}: {r:?}");
    }
}

#[test]
fn membership_needs_resonance() {
    let ps = example(rat(-7, 2));
    let sol = SolutionVector {
        indices: vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
        values: vec![Cx::one(), Cx::zero(), Cx::zero()],
        est_error: vec![0.0; 3],
        admissible_only: false,
    };
    assert!(matches!(check_blocks_membership(&ps, &sol), Err(Error::Precondition(_))));
}

#[test]
fn lemma_derivative_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for p in [int(-3), rat(-7, 2)] {
        let ctx = TrigContext::new(&example(p));
        for _ in 0..40 {
            let t = Cx::from_f64(rng.gen_range(-3.0..3.0), rng.gen_range(-6.0..8.0));
            let r = check_lemma_derivative(&ctx, &t).unwrap();
            assert!(r < 1e-10, "{r:e}");
        }
    }
    // All weights zero: D_1(t) = p.
    let flat = TrigContext::from_parts(vec![Cx::from_f64(0.2, 0.0); 2], vec![int(0), int(0)], int(-3));
    assert!(check_lemma_derivative(&flat, &Cx::from_f64(0.7, 0.4)).unwrap() < 1e-28);
}

#[test]
fn phase_weight_product_is_symmetric() {
    let ctx = TrigContext::from_parts(
        vec![Cx::from_f64(0.1, -0.3), Cx::from_f64(-0.4, 0.8)],
        vec![rat(1, 3), rat(2, 5)],
        rat(-7, 2),
    );
    let t = [Cx::from_f64(0.35, 0.2), Cx::from_f64(-0.6, -0.45)];
    let s = [t[1].clone(), t[0].clone()];
    for (rat_idx, trig_idx) in [(vec![2, 0], vec![1, 1]), (vec![1, 1], vec![0, 2]), (vec![1, 1], vec![1, 1])] {
        let f = |u: &[Cx]| phase(u, &ctx).unwrap() * w_rational(&rat_idx, u, &ctx).unwrap() * w_trig(&trig_idx, u, &ctx).unwrap();
        let (a, b) = (f(&t), f(&s));
        assert!((&a - &b).abs_f64() < 1e-20 * a.abs_f64(), "{rat_idx:?} {trig_idx:?}");
    }
}

#[test]
fn singular_integrand_decays_along_the_tails() {
    let ps = desk_two_points();
    let ctx = TrigContext::new(&ps);
    let f = |y: f64| {
        let t = [Cx::from_f64(0.0, y)];
        (phase(&t, &ctx).unwrap() * eta(&[0, 1], &t, &ctx).unwrap() * w_sing(&[1], &t, &ctx).unwrap()).abs_f64()
    };
    for sign in [1.0, -1.0] {
        let mags: Vec<f64> = [10.0, 20.0, 40.0].iter().map(|y| f(sign * y)).collect();
        assert!(mags[1] < 1e-3 * mags[0] && mags[2] < 1e-3 * mags[1], "{mags:?}");
    }
}

// Independent f64 oracle for a level-one, one-point integral.

fn log_sin(a: C) -> C {
    if a.im > 0.0 {
        -C::i() * a + C::new(0.5f64.ln(), PI / 2.0) + (1.0 - (2.0 * C::i() * a).exp()).ln()
    } else {
        C::i() * a + C::new(0.5f64.ln(), -PI / 2.0) + (1.0 - (-2.0 * C::i() * a).exp()).ln()
    }
}

fn lanczos_lgamma(z: C) -> C {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if z.re < 0.5 {
        return C::new(PI.ln(), 0.0) - log_sin(PI * z) - lanczos_lgamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = C::new(COEF[0], 0.0);
    for (i, c) in COEF.iter().enumerate().skip(1) {
        x += c / (z + i as f64);
    }
    let t = z + G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

fn adaptive_simpson(f: &dyn Fn(f64) -> C, a: f64, b: f64, tol: f64) -> C {
    fn rec(f: &dyn Fn(f64) -> C, a: f64, b: f64, fa: C, fm: C, fb: C, whole: C, tol: f64, depth: u32) -> C {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[test]
fn desk_integral_matches_independent_oracle() {
    // With one point every trigonometric weight function has its poles on
    // the left ladder only and the integral vanishes, so the smallest
    // informative case has two points.
    let ps = desk_two_points();
    let ctx = TrigContext::new(&ps);
    let path = build_contour(&ctx).unwrap();
    let weight = TrigWeight::Singular(vec![1]);
    let got = integrate_i(&[0, 1], &weight, &ctx, &path, &QuadratureSpec::default()).unwrap();
    assert!(got.max_relative_change() < 1e-8);

    let (lam, p) = ([1.0 / 3.0, 0.25], -2.5f64);
    let z = [C::new(0.2, -1.0), C::new(-0.3, 2.0)];
    let integrand = |t: C| {
        let mut log = C::new(0.0, 0.0);
        for i in 0..2 {
            log += lanczos_lgamma((t - z[i] + lam[i]) / p) - lanczos_lgamma((t - z[i] - lam[i]) / p);
        }
        log -= log_sin(PI * (t - z[0] - lam[0]) / p) + log_sin(PI * (t - z[1] - lam[1]) / p);
        let numerator = (PI * (z[0] - lam[0] - z[1] - lam[1]) / p).sin();
        let w = (t - z[0] + lam[0]) / ((t - z[0] - lam[0]) * (t - z[1] - lam[1]));
        log.exp() * numerator * w
    };
    let v = &path.vertices;
    let mut want = C::new(0.0, 0.0);
    let tol = 1e-14;
    for w in v.windows(2) {
        let (a, b) = (C::new(w[0].0, w[0].1), C::new(w[1].0, w[1].1));
        want += adaptive_simpson(&|s| integrand(a + (b - a) * s) * (b - a), 0.0, 1.0, tol);
    }
    // Tails: y = y0 ± (1 − u)/u, u ∈ (0, 1].
    let (first, last) = (v[0], v[v.len() - 1]);
    let lower = |u: f64| integrand(C::new(first.0, first.1 - (1.0 - u) / u)) * C::i() / (u * u);
    let upper = |u: f64| integrand(C::new(last.0, last.1 + (1.0 - u) / u)) * C::i() / (u * u);
    want += adaptive_simpson(&lower, 1e-3, 1.0, tol);
    want += adaptive_simpson(&upper, 1e-3, 1.0, tol);

    let (gr, gi) = got.values[0].to_f64_pair();
    let rel = (C::new(gr, gi) - want).norm() / want.norm();
    assert!(rel < 1e-8, "quadrature {gr} {gi}, oracle {want}, relative {rel:e}");
}
