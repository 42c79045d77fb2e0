use proptest::prelude::*;
use qaff::laurent::qfactorial;
use qaff::{qbinom, qint, shift_class, LaurentPoly, Side};

fn poly() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec((-6i64..=6, -20i64..=20), 0..6)
        .prop_map(|ts| LaurentPoly::from_terms(ts.into_iter().map(|(e, c)| (e, c.into()))))
}

fn p(s: &str) -> LaurentPoly {
    s.parse().unwrap()
}

#[test]
fn quantum_integers() {
    assert_eq!(qint(2), p("q + q^-1"));
    assert!(qint(0).is_zero());
    assert_eq!(qint(-3), p("-q^2 - 1 - q^-2"));
    assert_eq!(qbinom(2, 1).unwrap(), qint(2));
    assert_eq!(qbinom(4, 2).unwrap(), p("q^4 + q^2 + 2 + q^-2 + q^-4"));
    assert!(qbinom(3, 5).unwrap().is_zero());
}

#[test]
fn shift_classes() {
    assert_eq!(shift_class(Side::Symmetric, 0, 1), p("q"));
    assert_eq!(shift_class(Side::Skew, 1, -1), p("-q^-1"));
    assert!(shift_class(Side::Skew, 2, 0).is_one());
    assert_eq!(Side::Skew.angle(1), p("-q^-1"));
    assert_eq!(Side::Symmetric.angle(-2), p("q^-2"));
}

#[test]
fn positivity() {
    assert!(qint(2).is_positive());
    assert!(!p("q^2 - 1").is_positive());
    assert!(LaurentPoly::zero().is_positive());
}

proptest! {
    #[test]
    fn ring_axioms(a in poly(), b in poly(), c in poly()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &LaurentPoly::one(), a.clone());
    }

    #[test]
    fn text_round_trip(a in poly()) {
        let s = a.to_string();
        prop_assert_eq!(s.parse::<LaurentPoly>().unwrap(), a);
    }

    #[test]
    fn exact_division(a in poly(), b in poly()) {
        prop_assume!(!b.is_zero());
        prop_assert_eq!((&a * &b).div_exact(&b).unwrap(), a);
    }

    #[test]
    fn bar_is_ring_involution(a in poly(), b in poly()) {
        prop_assert_eq!(a.bar().bar(), a.clone());
        prop_assert_eq!((&a * &b).bar(), &a.bar() * &b.bar());
    }

    #[test]
    fn qint_bar_invariant_and_odd(n in -12i64..=12) {
        prop_assert_eq!(qint(n).bar(), qint(n));
        prop_assert_eq!(qint(-n), -&qint(n));
        prop_assert_eq!(qint(n).eval_int(1).unwrap(), n.into());
    }

    #[test]
    fn qint_recursion(n in -10i64..=10) {
        // [n+1] = [2][n] - [n-1]
        prop_assert_eq!(qint(n + 1), &(&qint(2) * &qint(n)) - &qint(n - 1));
    }

    #[test]
    fn qbinom_pascal_and_factorials(n in 1i64..=8, k in 0i64..=8) {
        prop_assume!(k <= n);
        let lhs = qbinom(n, k).unwrap();
        let via_fact = qfactorial(n as u32)
            .div_exact(&(&qfactorial(k as u32) * &qfactorial((n - k) as u32)))
            .unwrap();
        prop_assert_eq!(&lhs, &via_fact);
        if k >= 1 {
            // [n choose k] = q^-k [n-1 choose k] + q^(n-k) [n-1 choose k-1]
            let a = qbinom(n - 1, k).unwrap().shift(-k);
            let b = qbinom(n - 1, k - 1).unwrap().shift(n - k);
            prop_assert_eq!(lhs.clone(), &a + &b);
        }
        prop_assert!(lhs.is_positive());
    }

    #[test]
    fn specialization_is_a_homomorphism(a in poly(), b in poly(), x in prop::sample::select(vec![-1i64, 1])) {
        let ea = a.eval_int(x).unwrap();
        let eb = b.eval_int(x).unwrap();
        prop_assert_eq!((&a * &b).eval_int(x).unwrap(), &ea * &eb);
        prop_assert_eq!((&a + &b).eval_int(x).unwrap(), ea + eb);
    }
}
