use proptest::prelude::*;
use qkz::blocks::{
    check_invariance, check_x_independence, classical_blocks, conformal_blocks, dimension_report, generic_dimension_report,
    generic_positions, irreducible_space, power_annihilates, singular_space,
};
use qkz::linalg::Matrix;
use qkz::params::{validate, ParamSet};
use qkz::rmatrix_qkz::RCache;
use qkz::scalars::{gauss, int, rat, GaussRational, Rational};
use qkz::yangian::{EOrdering, EvaluationAssignment};

fn resonant_example(zs: Vec<GaussRational>) -> ParamSet {
    ParamSet::new(vec![rat(3, 2); 3], zs, int(-7), 2, Some(1))
}

fn example_zs() -> Vec<GaussRational> {
    vec![gauss(rat(3, 11), int(0)), gauss(rat(-41, 6), rat(1, 5)), gauss(rat(97, 9), int(-2))]
}

/// Independent count for `k = 1`: the kernel of `e` stacked on `e(z)`, where
/// `e(z)` comes from the Yangian generators rather than the closed formula.
fn oracle_dim_c_k1(ps: &ParamSet) -> usize {
    let ev = EvaluationAssignment::new(irreducible_space(ps), ps.zs.clone());
    let ez = ev.op_e_z_from_generators(ps.l, 2).sub(&ev.total_e(ps.l));
    ev.total_e(ps.l).vstack(&ez).kernel().len()
}

/// `dim sing_l = dim V_l − dim V_{l−1}` while `f` is injective on level `l−1`.
fn character_sing(ps: &ParamSet, level: usize) -> usize {
    let s = irreducible_space(ps);
    s.dim(level) - if level == 0 { 0 } else { s.dim(level - 1) }
}

#[test]
fn resonant_example_dimensions() {
    for attempt in 0..3 {
        let ps = resonant_example(if attempt == 0 { example_zs() } else { generic_positions(3, attempt) });
        assert!(validate(&ps).passed());
        let rep = dimension_report(&ps).unwrap();
        assert_eq!((rep.dim_c, rep.dim_n, rep.dim_sing_l, rep.dim_sing_lmk), (1, 1, 3, 2));
        assert_eq!(rep.dim_c, oracle_dim_c_k1(&ps));
        assert_eq!(rep.dim_sing_l, character_sing(&ps, 2));
        assert_eq!(rep.dim_sing_lmk, character_sing(&ps, 1));
        assert!(rep.good_condition && rep.bad_condition && rep.count_matches && rep.classical_bounds_quantum);
    }
}

#[test]
fn blocks_are_annihilated() {
    let ps = resonant_example(example_zs());
    let c = conformal_blocks(&ps).unwrap();
    let ev = EvaluationAssignment::new(irreducible_space(&ps), ps.zs.clone());
    for v in &c.basis {
        assert!(power_annihilates(|lv| ev.op_e_z(lv, EOrdering::CoefficientDisplay), 2, 1, v));
        // The operator display differs by a multiple of `e`, which kills
        // singular vectors.
        assert!(power_annihilates(|lv| ev.op_e_z(lv, EOrdering::OperatorDisplay), 2, 1, v));
    }
    assert_eq!(Matrix::span_rank(irreducible_space(&ps).dim(2), &c.basis), c.dim());
}

#[test]
fn non_resonant_and_large_order_give_full_space() {
    let ps = ParamSet::new(vec![rat(5, 7), rat(-4, 9), rat(11, 5)], example_zs(), rat(-31, 7), 2, None);
    let c = conformal_blocks(&ps).unwrap();
    assert_eq!(c.k, None);
    assert_eq!(c.basis, singular_space(&ps, 2));
    assert_eq!(c.dim(), 3);

    let ps = ParamSet::new(vec![rat(3, 2); 3], example_zs(), int(-9), 2, Some(3));
    assert!(validate(&ps).passed());
    let c = conformal_blocks(&ps).unwrap();
    assert_eq!(c.k, Some(3));
    assert_eq!(c.basis, singular_space(&ps, 2));
}

#[test]
fn classical_blocks_edge_cases() {
    let ps = resonant_example(vec![GaussRational::from(int(0)); 3]);
    assert!(validate(&ps).passed());
    assert_eq!(classical_blocks(&ps).unwrap().dim(), 3);

    let one = ParamSet::new(vec![rat(5, 2)], vec![gauss(int(3), int(0))], rat(-9, 2), 2, None);
    assert_eq!(classical_blocks(&one).unwrap().dim(), 0);
    assert_eq!(conformal_blocks(&one).unwrap().dim(), 0);
}

#[test]
fn invariance_resonant_example() {
    let cache = RCache::new();
    let rep = check_invariance(&resonant_example(example_zs()), &cache).unwrap();
    assert!(rep.passed, "{:?}", rep.witness);
    assert_eq!(rep.maps_checked, 5);
}

#[test]
fn invariance_swap_two_points() {
    let cache = RCache::new();
    let ps = ParamSet::new(vec![rat(3, 2); 2], vec![gauss(rat(2, 9), int(1)), gauss(rat(-13, 3), int(0))], int(-4), 2, Some(1));
    let rep = check_invariance(&ps, &cache).unwrap();
    assert!(rep.passed, "{:?}", rep.witness);
    // Both singular blocks are lines, so the count gives 1 − 1.
    assert_eq!(conformal_blocks(&ps).unwrap().dim(), 0);
    assert_eq!(oracle_dim_c_k1(&ps), 0);
}

#[test]
fn invariance_non_resonant() {
    let cache = RCache::new();
    let ps = ParamSet::new(vec![rat(5, 7), rat(-4, 9), rat(11, 5)], example_zs(), rat(-31, 7), 2, None);
    assert!(check_invariance(&ps, &cache).unwrap().passed);
}

#[test]
fn x_independence() {
    let ps = resonant_example(example_zs());
    assert!(check_x_independence(&ps, &[int(0)]).unwrap());
    assert!(check_x_independence(&ps, &[int(0), int(-7)]).unwrap());
    assert!(check_x_independence(&ps, &[int(0), int(17), rat(-5, 3)]).unwrap());
    let nonres = ParamSet::new(vec![rat(5, 7), rat(-4, 9), rat(11, 5)], example_zs(), rat(-31, 7), 2, None);
    assert!(check_x_independence(&nonres, &[int(0)]).is_err());
}

/// Resonant parameter sets meeting both the good and bad conditions, `n = 3`.
fn corollary_cases() -> Vec<ParamSet> {
    let z = generic_positions(3, 0);
    vec![
        ParamSet::new(vec![rat(1, 2); 3], z.clone(), int(-3), 1, Some(1)),
        ParamSet::new(vec![rat(3, 2); 3], z.clone(), int(-7), 2, Some(1)),
        ParamSet::new(vec![int(1); 3], z.clone(), int(-4), 2, Some(1)),
        ParamSet::new(vec![int(1), rat(3, 2), rat(3, 2)], z.clone(), int(-6), 2, Some(1)),
        ParamSet::new(vec![rat(3, 2); 3], z.clone(), int(-5), 3, Some(1)),
        ParamSet::new(vec![rat(3, 2), rat(3, 2), int(2)], z.clone(), int(-6), 3, Some(1)),
        ParamSet::new(vec![rat(3, 2); 3], z, int(-6), 3, Some(2)),
    ]
}

#[test]
fn dimension_count_under_both_conditions() {
    for ps in corollary_cases() {
        let rep = validate(&ps);
        assert!(rep.passed() && rep.good_condition && rep.bad_condition, "{ps:?}");
        let d = generic_dimension_report(&ps, 4).unwrap();
        assert!(d.count_matches, "{d:?}");
        assert_eq!(d.dim_c + character_sing(&ps, ps.l - ps.k.unwrap()), character_sing(&ps, ps.l));
    }
}

fn small() -> impl Strategy<Value = Rational> {
    (-60i64..60, 1i64..11).prop_map(|(a, b)| rat(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn classical_bounds_quantum(zs in proptest::collection::vec((small(), small()), 3), pick in 0usize..7) {
        let ps = corollary_cases()[pick].with_zs(zs.into_iter().map(|(a, b)| gauss(a, b)).collect());
        prop_assume!(validate(&ps).passed());
        let c = conformal_blocks(&ps).unwrap();
        let n = classical_blocks(&ps).unwrap();
        prop_assert!(n.dim() >= c.dim());
        let ev = EvaluationAssignment::new(irreducible_space(&ps), ps.zs.clone());
        for v in &c.basis {
            prop_assert!(power_annihilates(|lv| ev.op_e_z(lv, EOrdering::CoefficientDisplay), ps.l, c.k.unwrap(), v));
        }
    }
}
