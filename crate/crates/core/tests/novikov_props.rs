use num_bigint::BigInt;
use proptest::prelude::*;
use torsionlab_core::novikov::{NovikovElement, Term};
use torsionlab_core::rational::{Extended, Q};

fn term() -> impl Strategy<Value = Term> {
    (-4i64..=4, 0i64..=12, 1i64..=4, -1i64..=1).prop_filter_map("zero coefficient", |(c, num, den, e)| {
        (c != 0).then(|| Term::new(Q::from_integer(c.into()), Q::new(BigInt::from(num), BigInt::from(den)), e))
    })
}

fn element(trunc: Extended) -> impl Strategy<Value = NovikovElement> {
    prop::collection::vec(term(), 1..5)
        .prop_map(move |terms| NovikovElement::from_terms(terms, trunc.clone()))
        .prop_filter("zero element", |x| !x.is_zero())
}

fn exact() -> impl Strategy<Value = NovikovElement> {
    element(Extended::Infinity)
}

fn finite(level: i64) -> impl Strategy<Value = NovikovElement> {
    element(Extended::Finite(Q::from_integer(level.into())))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1200))]

    #[test]
    fn valuation_is_multiplicative(x in exact(), y in exact()) {
        let product = &x * &y;
        prop_assert_eq!(product.valuation(), &x.valuation() + &y.valuation());
    }

    #[test]
    fn valuation_of_sum_is_ultrametric(x in exact(), y in exact()) {
        let sum = &x + &y;
        let lower = x.valuation().min(y.valuation());
        prop_assert!(sum.valuation() >= lower);
        if x.valuation() != y.valuation() {
            prop_assert_eq!(sum.valuation(), lower);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn ring_laws_hold_at_finite_truncation(x in finite(6), y in finite(6), z in finite(6)) {
        prop_assert!((&(&x * &y) * &z).eq_up_to_trunc(&(&x * &(&y * &z))));
        prop_assert!((&x * &(&y + &z)).eq_up_to_trunc(&(&(&x * &y) + &(&x * &z))));
        prop_assert!((&x * &y).eq_up_to_trunc(&(&y * &x)));
        prop_assert!((&x + &y).eq_up_to_trunc(&(&y + &x)));
    }

    #[test]
    fn inverse_is_accurate_to_the_available_precision(x in finite(6)) {
        let x = x.collapse_e();
        prop_assume!(!x.is_zero());
        let v = x.valuation().as_finite().unwrap().clone();
        let inv = x.invert().unwrap();
        let residual = &(&inv * &x) - &NovikovElement::one();
        prop_assert!(residual.is_zero());
        let level = Q::from_integer(6.into()) - &v;
        prop_assert!(*residual.trunc() >= Extended::Finite(level));
    }

    #[test]
    fn text_form_round_trips(x in finite(7)) {
        let parsed: NovikovElement = x.to_text().parse().unwrap();
        prop_assert_eq!(parsed, x);
    }
}
