use qkz::linalg::span_residual;
use qkz::scalars::{rat, Cx, Rational};
use qkz::sl2rep::{multi_indices, ModuleKind, TensorSpace};
use qkz::uqsl2::QTensorSpace;
use qkz::weightfn::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn close(a: &Cx, b: &Cx, tol: f64) -> bool {
    (a - b).abs_f64() <= tol * a.abs_f64().max(b.abs_f64()).max(1e-30)
}

fn generic_ctx() -> TrigContext {
    TrigContext::from_parts(
        vec![Cx::from_f64(0.13, -0.4), Cx::from_f64(-0.71, 0.25), Cx::from_f64(0.37, 0.9)],
        vec![rat(1, 3), rat(2, 5), rat(3, 7)],
        rat(-7, 2),
    )
}

fn sample(rng: &mut ChaCha8Rng, l: usize) -> Vec<Cx> {
    (0..l).map(|_| Cx::from_f64(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))).collect()
}

/// `[f]_σ(t) = f(t_{σ(1)}, …) ∏_{inversions a<b} c(t_{σ(a)} − t_{σ(b)})`.
fn closed_form(kind: SymKind, ctx: &TrigContext, f: &TFn<'_>, perm: &[usize], t: &[Cx]) -> Cx {
    let act = SymAction::new(kind, t.len());
    let permuted: Vec<Cx> = perm.iter().map(|&i| t[i].clone()).collect();
    let mut acc = f(&permuted).unwrap();
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                acc = acc * act.cocycle(ctx, &(&t[perm[b]] - &t[perm[a]]), t).unwrap();
            }
        }
    }
    acc
}

#[test]
fn reduced_words_agree_with_each_other_and_closed_form() {
    let ctx = generic_ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let idx = vec![1, 0, 2];
    for kind in [SymKind::Rational, SymKind::Trigonometric] {
        let f = |s: &[Cx]| match kind {
            SymKind::Rational => eta(&idx, s, &ctx),
            SymKind::Trigonometric => trig_term(&idx, s, &ctx),
        };
        let act = SymAction::new(kind, 3);
        for _ in 0..3 {
            let t = sample(&mut rng, 3);
            let perms = permutations(3);
            for ((perm, w1), w2) in perms.iter().zip(reduced_words(3)).zip(reduced_words_alt(3)) {
                let a = act.apply_word(&ctx, &f, &w1, &t).unwrap();
                let b = act.apply_word(&ctx, &f, &w2, &t).unwrap();
                assert!(close(&a, &b, 1e-24), "{kind:?} {w1:?} vs {w2:?}");
                let c = closed_form(kind, &ctx, &f, perm, &t);
                assert!(close(&a, &c, 1e-24), "{kind:?} {perm:?}");
            }
        }
    }
}

#[test]
fn symmetrized_functions_are_invariant() {
    let ctx = generic_ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for idx in [vec![2, 1, 0], vec![0, 1, 2], vec![1, 1, 1]] {
        let t = sample(&mut rng, 3);
        for kind in [SymKind::Rational, SymKind::Trigonometric] {
            let f = |s: &[Cx]| match kind {
                SymKind::Rational => w_rational(&idx, s, &ctx),
                SymKind::Trigonometric => w_trig(&idx, s, &ctx),
            };
            let act = SymAction::new(kind, 3);
            let base = f(&t).unwrap();
            for i in 0..2 {
                let moved = act.apply_word(&ctx, &f, &[i], &t).unwrap();
                assert!(close(&base, &moved, 1e-22), "{kind:?} {idx:?} s_{i}");
            }
        }
    }
    let sing = |s: &[Cx]| w_sing(&[1, 1], s, &ctx);
    let t = sample(&mut rng, 2);
    let act = SymAction::new(SymKind::Trigonometric, 2);
    assert!(close(&sing(&t).unwrap(), &act.apply_word(&ctx, &sing, &[0], &t).unwrap(), 1e-22));
}

#[test]
fn level_one_closed_forms() {
    // Independent f64 evaluation of η and W at level one.
    let ctx = generic_ctx();
    let zs = [(0.13, -0.4), (-0.71, 0.25), (0.37, 0.9)];
    let lam = [1.0 / 3.0, 0.4, 3.0 / 7.0];
    let p = -3.5_f64;
    let t = (0.21_f64, 0.63_f64);
    type C = num_complex::Complex64;
    let tc = C::new(t.0, t.1);
    let sin = |x: C| (x * std::f64::consts::PI / p).sin();
    for m in 0..3 {
        let zm = C::new(zs[m].0, zs[m].1);
        let mut e = 1.0 / (tc - zm - lam[m]);
        let mut w = (C::i() * std::f64::consts::PI * (zm - tc) / p).exp() / sin(tc - zm - lam[m]);
        for k in 0..m {
            let zk = C::new(zs[k].0, zs[k].1);
            e *= (tc - zk + lam[k]) / (tc - zk - lam[k]);
            w *= sin(tc - zk + lam[k]) / sin(tc - zk - lam[k]);
        }
        let mut idx = vec![0; 3];
        idx[m] = 1;
        let tt = [Cx::from_f64(t.0, t.1)];
        let (er, ei) = eta(&idx, &tt, &ctx).unwrap().to_f64_pair();
        let (wr, wi) = w_trig(&idx, &tt, &ctx).unwrap().to_f64_pair();
        assert!((C::new(er, ei) - e).norm() < 1e-12 * e.norm());
        assert!((C::new(wr, wi) - w).norm() < 1e-12 * w.norm());
    }
    let lam_r: Vec<Rational> = vec![rat(1, 3), rat(2, 5), rat(3, 7)];
    let c = weight_coefficient(&[1, 0, 0], &lam_r, &rat(-7, 2)).to_f64();
    let direct = (std::f64::consts::PI / p).sin() * (2.0 * std::f64::consts::PI * lam[0] / p).sin()
        / (std::f64::consts::PI / p).sin();
    assert!((c - direct).abs() < 1e-12);
}

#[test]
fn trigonometric_functions_are_periodic() {
    let ctx = generic_ctx();
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let p = ctx.p_cx();
    let t = sample(&mut rng, 2);
    for idx in [vec![1, 0, 1], vec![0, 2, 0], vec![1, 1, 0]] {
        let base = w_trig(&idx, &t, &ctx).unwrap();
        for j in 0..2 {
            let mut s = t.clone();
            s[j] = &s[j] + &p;
            assert!(close(&base, &w_trig(&idx, &s, &ctx).unwrap(), 1e-22), "t shift {idx:?} {j}");
        }
        for m in 0..3 {
            let mut zs = ctx.zs.clone();
            zs[m] = &zs[m] + &p;
            let shifted = TrigContext::from_parts(zs, ctx.lambdas.clone(), ctx.p.clone());
            assert!(close(&base, &w_trig(&idx, &t, &shifted).unwrap(), 1e-22), "z shift {idx:?} {m}");
        }
    }
    for sign in [1, -1] {
        let w = TrigWeight::Exponential { sign };
        let t1 = &t[..1];
        let base = w.eval(&ctx, t1).unwrap();
        let s = [&t1[0] + &p];
        assert!(close(&base, &w.eval(&ctx, &s).unwrap(), 1e-22));
        let mut zs = ctx.zs.clone();
        zs[1] = &zs[1] + &p;
        let shifted = TrigContext::from_parts(zs, ctx.lambdas.clone(), ctx.p.clone());
        assert!(close(&base, &w.eval(&shifted, t1).unwrap(), 1e-22));
    }
}

#[test]
fn stable_far_up_the_imaginary_direction() {
    let ctx = generic_ctx();
    for y in [1e3, 1e6, -1e6, 1e9] {
        let t = [Cx::from_f64(0.3, y)];
        let v = w_trig(&[0, 1, 0], &t, &ctx).unwrap();
        assert!(v.is_finite());
        let s = w_sing(&[1, 0], &t, &ctx).unwrap();
        assert!(s.is_finite());
    }
}

#[test]
fn poles_are_reported() {
    let ctx = generic_ctx();
    let on_pole = [&(ctx.z(0) + ctx.lambda(0)) + &Cx::from_f64(1e-12, 0.0)];
    assert!(matches!(w_trig(&[1, 0, 0], &on_pole, &ctx), Err(qkz::Error::PoleProximity { .. })));
    assert!(matches!(eta(&[1, 0, 0], &on_pole, &ctx), Err(qkz::Error::PoleProximity { .. })));
    let t = [Cx::from_f64(0.2, 0.1), Cx::from_f64(1.2, 0.1)];
    assert!(matches!(w_rational(&[2, 0, 0], &t, &ctx), Err(qkz::Error::PoleProximity { .. })));
}

fn function_vector(w: &TrigWeight, ctx: &TrigContext, points: &[Vec<Cx>]) -> Vec<Cx> {
    points.iter().map(|t| w.eval(ctx, t).unwrap()).collect()
}

fn points(seed: u64, l: usize, count: usize) -> Vec<Vec<Cx>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| sample(&mut rng, l)).collect()
}

#[test]
fn f_q_intertwines_the_map_to_functions() {
    let ctx = generic_ctx();
    let space = TensorSpace::uniform(ModuleKind::Verma, ctx.lambdas.clone());
    let q = QTensorSpace::new(space.clone(), &ctx.p).unwrap();
    for level in 0..2 {
        let fq = q.act_fq(level);
        let pts = points(20 + level as u64, level + 1, 4);
        for c in 0..space.dim(level) {
            let mut v = vec![Cx::zero(); space.dim(level)];
            v[c] = Cx::one();
            let lhs = TrigWeight::FqImage(Box::new(map_b(&space, level, &v)));
            let rhs = map_b(&space, level + 1, &fq.apply(&v));
            for t in &pts {
                let a = lhs.eval(&ctx, t).unwrap();
                let b = rhs.eval(&ctx, t).unwrap();
                assert!(close(&a, &b, 1e-20), "level {level} basis {c}: {a:?} vs {b:?}");
            }
        }
    }
}

#[test]
fn singular_functions_come_from_q_singular_vectors() {
    let ctx = generic_ctx();
    let space = TensorSpace::uniform(ModuleKind::Verma, ctx.lambdas.clone());
    let q = QTensorSpace::new(space.clone(), &ctx.p).unwrap();
    for level in 1..=2 {
        let pts = points(30 + level as u64, level, 6);
        let images: Vec<Vec<Cx>> = q
            .q_singular_basis(level)
            .unwrap()
            .iter()
            .map(|v| function_vector(&map_b(&space, level, v), &ctx, &pts))
            .collect();
        for idx in multi_indices(2, level, &[None, None]) {
            let s = function_vector(&TrigWeight::Singular(idx.clone()), &ctx, &pts);
            let r = span_residual(&images, &s);
            assert!(r < 1e-20, "level {level} {idx:?}: residual {r:e}");
        }
    }
}

#[test]
fn linear_combinations_evaluate_termwise() {
    let ctx = generic_ctx();
    let t = [Cx::from_f64(0.4, -0.2)];
    let a = TrigWeight::Basis(vec![1, 0, 0]);
    let b = TrigWeight::Exponential { sign: 1 };
    let combo = TrigWeight::Combination(vec![(Cx::from_f64(2.0, 1.0), a.clone()), (Cx::from_f64(-0.5, 0.0), b.clone())]);
    let direct = &Cx::from_f64(2.0, 1.0) * &a.eval(&ctx, &t).unwrap() + &Cx::from_f64(-0.5, 0.0) * &b.eval(&ctx, &t).unwrap();
    assert!(close(&combo.eval(&ctx, &t).unwrap(), &direct, 1e-25));
    assert_eq!(combo.arity(), 1);
    assert_eq!(TrigWeight::FqImage(Box::new(combo)).arity(), 2);
}
