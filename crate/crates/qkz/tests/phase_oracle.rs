//! The phase function against frozen 50-digit Gamma-quotient references
//! (computed independently with direct Gamma evaluations). Runs at 55 digits.

use qkz::hyperint::{log_phase, phase};
use qkz::scalars::{rat, set_precision_digits, Cx, Rational, Real};
use qkz::weightfn::TrigContext;

fn q(re: Rational, im: Rational) -> Cx {
    Cx::new(Real::from_rational(&re), Real::from_rational(&im))
}

fn reference(re: &str, im: &str) -> Cx {
    Cx::new(Real::parse(re).unwrap(), Real::parse(im).unwrap())
}

#[test]
fn phase_matches_gamma_quotients() {
    set_precision_digits(55);
    let ctx1 = TrigContext::from_parts(vec![q(rat(1, 5), rat(-1, 2))], vec![rat(1, 3)], rat(-5, 2));
    let t1 = [q(rat(3, 10), rat(1, 5))];
    let want1 = reference(
        "0.5602387090385216837076074099569672993754569566634101",
        "0.874296835702971700503355520494847584668600095669516",
    );
    let got1 = phase(&t1, &ctx1).unwrap();
    assert!((&got1 - &want1).abs_f64() < 1e-48, "{got1:?}");

    let ctx2 = TrigContext::from_parts(
        vec![q(rat(1, 5), rat(-1, 2)), q(rat(-2, 7), rat(3, 4))],
        vec![rat(1, 3), rat(3, 4)],
        rat(-5, 2),
    );
    let t2 = [q(rat(3, 10), rat(1, 5)), q(rat(-7, 10), rat(6, 5))];
    let want2 = reference(
        "-1.976719948589648362862205897972872628578401746985999",
        "-1.424288778445748089226046077750391741987649815654985",
    );
    let got2 = phase(&t2, &ctx2).unwrap();
    assert!((&got2 - &want2).abs_f64() < 1e-47, "{got2:?}");

    // Empty products and equal numerator and denominator.
    assert!((phase(&[], &ctx2).unwrap() - Cx::one()).abs_f64() < 1e-50);
    let flat = TrigContext::from_parts(vec![q(rat(1, 5), rat(0, 1))], vec![rat(0, 1)], rat(-5, 2));
    assert!(log_phase(&t1, &flat).unwrap().abs_f64() < 1e-50);
}
