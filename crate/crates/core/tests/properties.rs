mod common;

use common::*;
use hierarchy_core::jets::{
    apply_T, d_t, representation_residual, total_x, JetExpression, JetWindow,
};
use hierarchy_core::psdo::{
    kp_flows, leibniz_compose, split, zero_curvature_residual, PsdoOperator,
};
use hierarchy_core::rings::{Generator, Monomial, Polynomial, Rational};
use hierarchy_core::weyl::{bracket, BasisIndex, WeylElement};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn small_poly(r: &mut ChaCha8Rng, gens: impl Fn(&mut ChaCha8Rng) -> Generator) -> Polynomial {
    let n = r.gen_range(0..4);
    Polynomial::from_terms((0..n).map(|_| {
        let k = r.gen_range(0..3);
        let mono = Monomial::from_factors((0..k).map(|_| (gens(r), r.gen_range(1..3))));
        (mono, Rational::new(r.gen_range(-9..10), r.gen_range(1..4)))
    }))
}

fn v_gen(r: &mut ChaCha8Rng) -> Generator {
    Generator::V { a: r.gen_range(1..4), r: r.gen_range(0..2) }
}

fn jet_gen(r: &mut ChaCha8Rng) -> Generator {
    if r.gen_bool(0.5) {
        Generator::P(r.gen_range(0..4))
    } else {
        Generator::T(r.gen_range(1..5))
    }
}

fn small_operator(r: &mut ChaCha8Rng) -> PsdoOperator {
    let top: i64 = r.gen_range(-1..3);
    let tail = top - r.gen_range(0..4);
    let exact = r.gen_bool(0.25) && tail >= 0;
    let orders: Vec<(i64, Polynomial)> = (tail..=top).map(|a| (a, small_poly(r, v_gen))).collect();
    PsdoOperator::from_orders(orders, if exact { None } else { Some(tail) })
}

fn small_weyl(r: &mut ChaCha8Rng) -> WeylElement {
    let mut e = WeylElement::zero();
    for _ in 0..r.gen_range(0..4) {
        e.add_term(
            BasisIndex::new(r.gen_range(0..4), r.gen_range(0..4)),
            &Rational::new(r.gen_range(-5..6), r.gen_range(1..3)),
        );
    }
    e
}

const JETS: JetWindow = JetWindow { tmax: 4, jetmax: 16 };

fn jet(r: &mut ChaCha8Rng) -> JetExpression {
    JetExpression::new(small_poly(r, jet_gen), JETS).unwrap()
}

/// Common orders of two results, each compared only where both are certified.
fn agree(a: &PsdoOperator, b: &PsdoOperator) -> bool {
    let floor = match (a.tail(), b.tail()) {
        (Some(x), Some(y)) => x.max(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => i64::MIN,
    };
    a.truncate(floor).sub(&b.truncate(floor)).orders().next().is_none()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_field_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (rational(&mut r), rational(&mut r), rational(&mut r));
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        if !a.is_zero() {
            prop_assert!((&(&b / &a) * &a) == b);
        }
        prop_assert_eq!(a.to_fraction_string().parse::<Rational>().unwrap(), a);
    }

    #[test]
    fn polynomial_ring_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (polynomial(&mut r), polynomial(&mut r), polynomial(&mut r));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn weyl_product_is_associative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (small_weyl(&mut r), small_weyl(&mut r), small_weyl(&mut r));
        prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
    }

    #[test]
    fn bracket_is_antisymmetric_and_jacobi(
        a in (0u32..3, 0u32..3), b in (0u32..3, 0u32..3), c in (0u32..3, 0u32..3)
    ) {
        let (a, b, c) = (BasisIndex::new(a.0, a.1), BasisIndex::new(b.0, b.1), BasisIndex::new(c.0, c.1));
        prop_assert_eq!(bracket(a, b), bracket(b, a).scale(&Rational::from(-1)));
        let ext = |x: &WeylElement, y: BasisIndex| {
            let mut out = WeylElement::zero();
            for (i, k) in x.terms() {
                out = out.add(&bracket(*i, y).scale(k));
            }
            out
        };
        let jac = ext(&bracket(a, b), c).add(&ext(&bracket(b, c), a)).add(&ext(&bracket(c, a), b));
        prop_assert!(jac.is_zero(), "{}", jac);
    }

    #[test]
    fn composition_is_associative_where_certified(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (small_operator(&mut r), small_operator(&mut r), small_operator(&mut r));
        let left = leibniz_compose(&leibniz_compose(&a, &b), &c);
        let right = leibniz_compose(&a, &leibniz_compose(&b, &c));
        prop_assert!(agree(&left, &right), "{} vs {}", left, right);
    }

    #[test]
    fn split_is_idempotent(seed in any::<u64>()) {
        let mut r = rng(seed);
        let op = operator(&mut r);
        let (plus, minus) = split(&op);
        prop_assert_eq!(split(&plus).0, plus.clone());
        prop_assert!(split(&plus).1.is_zero());
        prop_assert_eq!(split(&minus).1, minus.clone());
        prop_assert!(split(&minus).0.is_zero());
        prop_assert!(agree(&plus.add(&minus), &op));
    }

    #[test]
    fn flows_commute_and_x_symmetry_bracket_is_one(seed in any::<u64>(), i in 1u32..5, j in 1u32..5) {
        let mut r = rng(seed);
        let e = jet(&mut r);
        prop_assert_eq!(d_t(i, &d_t(j, &e).unwrap()).unwrap(), d_t(j, &d_t(i, &e).unwrap()).unwrap());
        let xt = total_x(&apply_T(&e).unwrap()).unwrap();
        let tx = apply_T(&total_x(&e).unwrap()).unwrap();
        prop_assert_eq!(xt.sub(&tx), e);
    }

    #[test]
    fn symmetries_represent_the_bracket(
        seed in any::<u64>(), a in (0u32..3, 0u32..3), b in (0u32..3, 0u32..3)
    ) {
        let mut r = rng(seed);
        let e = JetExpression::new(small_poly(&mut r, jet_gen), JetWindow::new(4, 40)).unwrap();
        let (a, b) = (BasisIndex::new(a.0, a.1), BasisIndex::new(b.0, b.1));
        let res = representation_residual(a, b, &bracket(a, b), &e).unwrap();
        prop_assert!(res.is_zero(), "{}", res);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn zero_curvature_is_antisymmetric(j in 1u32..5, k in 1u32..5) {
        // depth 7 gives the t4 flow of v3, which (L^4)_+ needs
        let a = zero_curvature_residual(j, k, 7).unwrap();
        let b = zero_curvature_residual(k, j, 7).unwrap();
        prop_assert!(a.add(&b).is_zero());
        prop_assert!(a.is_zero());
    }

    #[test]
    fn lax_brackets_are_integral(j in 1u32..5, depth in 4u32..8) {
        let flows = kp_flows(j, depth).unwrap();
        // [(L^j)_+, L] is certified down to order −depth+j
        prop_assert_eq!(flows.len() as u32, depth - j);
    }
}

#[test]
fn zero_curvature_reports_an_uncovered_flow() {
    let err = zero_curvature_residual(4, 4, 6).unwrap_err();
    assert!(matches!(err, hierarchy_core::Error::MissingFlow(_)), "{err}");
    assert_eq!(err.exit_code(), 3);
}
