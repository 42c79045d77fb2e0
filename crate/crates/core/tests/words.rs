use proptest::prelude::*;
use proptest::test_runner::Config;
use qaff::word::{left_adjoint, parse, parse_for, right_adjoint, weight_flow, Factor, Flow, ShiftKind, Word, WordError};
use qaff::Weight;

fn w(s: &str) -> Weight {
    s.parse().unwrap()
}

fn factor(n: usize) -> impl Strategy<Value = Factor> {
    let i = 0..n;
    prop_oneof![
        4 => (i.clone(), 1u32..=4).prop_map(|(i, p)| Factor::e(i, p)),
        4 => (i.clone(), 1u32..=4).prop_map(|(i, p)| Factor::f(i, p)),
        // loop generators only carry finite indices
        1 => (1..n).prop_map(|i| Factor::ELoop { i }),
        1 => (1..n).prop_map(|i| Factor::FLoop { i }),
        2 => (i.clone(), any::<bool>(), any::<bool>()).prop_map(|(i, prime, inverse)| Factor::T { i, prime, inverse }),
        1 => (i, any::<bool>(), any::<bool>()).prop_map(|(i, prime, inverse)| Factor::Phi { i, prime, inverse }),
        1 => any::<bool>().prop_map(|inverse| Factor::RPrime { inverse }),
        1 => (prop::sample::select(vec![ShiftKind::Angle, ShiftKind::Cohom, ShiftKind::Internal]), -5i64..=5)
            .prop_map(|(kind, amount)| Factor::Shift { kind, amount }),
    ]
}

fn any_word() -> impl Strategy<Value = (usize, Word)> {
    (2usize..=5).prop_flat_map(|n| {
        (
            Just(n),
            prop::collection::vec(factor(n), 0..8),
            prop::option::of(prop::collection::vec(0i64..=4, n)),
        )
            .prop_map(|(n, mut fs, idem)| {
                if let Some(k) = idem {
                    fs.push(Factor::Idem(Weight::new(k)));
                }
                (n, Word::new(fs))
            })
    })
}

/// E/F words with a source idempotent at a nonzero weight.
fn ef_word() -> impl Strategy<Value = (usize, i64, Word, Weight)> {
    (2usize..=4, 1i64..=3).prop_flat_map(|(n, level)| {
        let objs = Weight::all_objects(n, level);
        (
            Just(n),
            Just(level),
            prop::collection::vec((0..n, 1u32..=2, any::<bool>()), 0..6),
            prop::sample::select(objs),
        )
            .prop_map(|(n, level, gens, k)| {
                let mut fs: Vec<Factor> =
                    gens.into_iter().map(|(i, p, e)| if e { Factor::e(i, p) } else { Factor::f(i, p) }).collect();
                fs.push(Factor::Idem(k.clone()));
                (n, level, Word::new(fs), k)
            })
    })
}

#[test]
fn parse_examples() {
    let a = parse("F0^(2) F1^(2) 1_(0,2)").unwrap();
    assert_eq!(a.factors, vec![Factor::f(0, 2), Factor::f(1, 2), Factor::Idem(w("(0,2)"))]);
    let b = parse("T1' T0' 1_(1,0,1)").unwrap();
    assert_eq!(b.factors[0], Factor::T { i: 1, prime: true, inverse: false });
    assert_eq!(b.factors[1], Factor::T { i: 0, prime: true, inverse: false });
    assert!(matches!(parse_for("E9", 3), Err(WordError::IndexOutOfRange { index: 9, n: 3, .. })));
    assert!(matches!(parse("E1 F"), Err(WordError::Syntax { offset: 4, .. })));
    assert!(matches!(parse_for("1_(0,2)", 3), Err(WordError::DimensionMismatch { .. })));
}

#[test]
fn flow_examples() {
    let flow = |t: &str, k: &str, level| weight_flow(&parse(t).unwrap(), &w(k), level).unwrap();
    assert_eq!(flow("E1 1_(1,1)", "(1,1)", 2), Flow::Weights(vec![w("(1,1)"), w("(0,2)")]));
    assert_eq!(flow("E1 1_(0,2)", "(0,2)", 2), Flow::Zero);
    assert_eq!(flow("F0 F1 1_(0,1)", "(0,1)", 1), Flow::Weights(vec![w("(0,1)"), w("(1,0)"), w("(0,1)")]));
    assert_eq!(flow("1_(1,1)", "(0,2)", 2), Flow::Zero);
}

#[test]
fn adjoint_examples() {
    let e1 = parse("E1 1_(1,1)").unwrap();
    assert_eq!(right_adjoint(&e1, &w("(1,1)")).unwrap().to_string(), "<1> F1 1_(0,2)");
    let fe = parse("F1 E1 1_(2,0)").unwrap();
    assert_eq!(right_adjoint(&fe, &w("(2,0)")).unwrap().to_string(), "F1 E1 1_(2,0)");
}

proptest! {
    #![proptest_config(Config::with_cases(10_000))]

    #[test]
    fn print_parse_round_trip((n, word) in any_word()) {
        prop_assume!(!word.is_empty());
        let text = word.to_string();
        let back = parse_for(&text, n).unwrap();
        prop_assert_eq!(&back, &word);
        prop_assert_eq!(back.to_string(), text);
    }
}

proptest! {
    #[test]
    fn flow_is_compositional((_n, level, word, k) in ef_word(), cut in 0usize..7) {
        // split X = Y Z: the flow of X is the flow of Z followed by the flow of Y from Z's target
        let gens: Vec<Factor> = word.generators().cloned().collect();
        let cut = cut.min(gens.len());
        let y = Word::new(gens[..cut].to_vec());
        let mut zf = gens[cut..].to_vec();
        zf.push(Factor::Idem(k.clone()));
        let z = Word::new(zf);
        let whole = weight_flow(&word, &k, level).unwrap();
        match weight_flow(&z, &k, level).unwrap() {
            Flow::Zero => prop_assert_eq!(whole, Flow::Zero),
            Flow::Weights(zw) => {
                let mid = zw.last().unwrap().clone();
                match (weight_flow(&y, &mid, level).unwrap(), whole) {
                    (Flow::Weights(yw), Flow::Weights(all)) => {
                        let mut joined = zw.clone();
                        joined.extend(yw.into_iter().skip(1));
                        prop_assert_eq!(joined, all);
                    }
                    (Flow::Zero, Flow::Zero) => {}
                    (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
                }
            }
        }
    }

    #[test]
    fn adjoints_are_mutually_inverse((_n, _level, word, k) in ef_word()) {
        let target = word.target(&k).unwrap();
        let r = right_adjoint(&word, &k).unwrap();
        prop_assert_eq!(r.source(), Some(&target));
        prop_assert_eq!(left_adjoint(&r, &target).unwrap(), word.clone());
        let l = left_adjoint(&word, &k).unwrap();
        prop_assert_eq!(right_adjoint(&l, &target).unwrap(), word);
    }
}
