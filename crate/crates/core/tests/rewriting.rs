use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qaff::eval::evaluate;
use qaff::kmodel::{combine, Convention, Model, ModelConfig, ModelError};
use qaff::rules::{apply_rule, RuleError, RuleId, RuleSpec};
use qaff::word::{parse_for, Factor, Word};
use qaff::{LaurentPoly, Side, Weight};

fn apply(text: &str, rule: &str, pos: usize, n: usize) -> Result<(Vec<(String, String)>, bool), RuleError> {
    let w = parse_for(text, n).unwrap();
    let out = apply_rule(&w, &rule.parse().unwrap(), pos, n)?;
    Ok((out.summands.into_iter().map(|(m, w)| (m.to_string(), w.to_string())).collect(), out.exact))
}

fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
    v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

#[test]
fn rule_examples() {
    let (s, exact) = apply("E1 F1 1_(0,2)", "sl2", 0, 2).unwrap();
    assert!(exact);
    assert_eq!(s, pairs(&[("1", "F1 E1 1_(0,2)"), ("q + q^-1", "1_(0,2)")]));

    let (s, exact) = apply("F1 F1 1_(0,2)", "merge", 0, 2).unwrap();
    assert!(exact);
    assert_eq!(s, pairs(&[("q + q^-1", "F1^(2) 1_(0,2)")]));

    let (s, exact) = apply("F1 F2 F1 1_(0,0,2)", "sl3", 0, 3).unwrap();
    assert!(exact);
    let words: Vec<_> = s.iter().map(|(_, w)| w.as_str()).collect();
    assert_eq!(words, vec!["F1^(2) F2 1_(0,0,2)", "F2 F1^(2) 1_(0,0,2)"]);

    // <k, alpha_1> <= 0: E F is only a summand of F E
    let (s, exact) = apply("E1 F1 1_(2,1)", "ef-commute", 0, 2).unwrap();
    assert!(!exact);
    assert_eq!(s, pairs(&[("1", "F1 E1 1_(2,1)")]));

    // E^(2) F at (1,1): the l = 0, 1 family
    let (s, _) = apply("E1^(2) F1 1_(1,1)", "ef-commute", 0, 2).unwrap();
    let words: Vec<_> = s.iter().map(|(_, w)| w.as_str()).collect();
    assert!(words.contains(&"F1 E1^(2) 1_(1,1)") && words.contains(&"E1 1_(1,1)"));

    assert!(matches!(apply("E1 F1 1_(2,0)", "sl2", 0, 2), Err(RuleError::WeightFlowZero { .. })));
    assert!(matches!(apply("F1 F2", "merge", 0, 3), Err(RuleError::PatternMismatch { .. })));
    assert!("nonsense".parse::<RuleSpec>().is_err());
    assert_eq!("split:2".parse::<RuleSpec>().unwrap(), RuleSpec::with(RuleId::Split, 2));
}

fn random_word(rng: &mut StdRng, n: usize, k: &Weight) -> Word {
    let len = rng.gen_range(1..=5);
    let mut fs = Vec::with_capacity(len + 1);
    for _ in 0..len {
        let i = rng.gen_range(0..n);
        let p = rng.gen_range(1..=2);
        fs.push(match rng.gen_range(0..10) {
            0..=3 => Factor::e(i, p),
            4..=7 => Factor::f(i, p),
            8 => Factor::t(i),
            _ => Factor::t_inv(i),
        });
    }
    fs.push(Factor::Idem(k.clone()));
    Word::new(fs)
}

/// Hand-picked words hitting the rules that need a specific shape.
fn seeded_words(n: usize, level: i64) -> Vec<String> {
    let eta = Weight::eta(n, level);
    let a = |l: i64| {
        let mut s = Vec::new();
        if l > 0 {
            for i in 0..n {
                s.push(format!("F{i}^({l})"));
            }
        } else {
            for i in (0..n).rev() {
                s.push(format!("E{i}^({})", -l));
            }
        }
        s.join(" ")
    };
    let mut out = vec![
        format!("{} {} 1_{eta}", a(-level), a(level)),
        format!("E{} F0 F{} 1_{eta}", n - 1, n - 1),
        format!("F{} F{} 1_{eta}", n - 2, n - 1),
        format!("T1^-1 T0^-1 E1 T0 T1 1_{eta}"),
        format!("T1^-1 T0^-1 F1 T0 T1 1_{eta}"),
        format!("E0 1_{}", Weight::new({
            let mut v = vec![0; n];
            v[0] = level;
            v
        })),
        format!("T1 T0 T1 1_{eta}"),
        format!("T1 T1^-1 E0 1_{eta}"),
    ];
    if n >= 3 {
        out.push(format!("T1 T2 E1 1_{eta}"));
        out.push(format!("E2 T1 T2 1_{eta}"));
        out.push(format!("T1 T2 T1 1_{eta}"));
        out.push(format!("T1^-1 T2 T1 1_{eta}"));
        out.push(format!("F1 F2 F1 1_{eta}"));
        out.push(format!("F1 F2^(2) F1 1_{eta}"));
    }
    if n >= 3 && level >= 2 {
        let chain: Vec<String> = (1..n - 1).map(|i| format!("F{i}")).collect();
        out.push(format!("{} F{}^(2) 1_{eta}", chain.join(" "), n - 1));
    }
    out
}

struct Tally {
    checked: BTreeMap<&'static str, usize>,
    failures: Vec<String>,
}

fn check_all_rules(model: &Model, w: &Word, source: &Weight, tally: &mut Tally) {
    let n = model.config().n;
    let lhs = match evaluate(model, w, source) {
        Ok(op) => op,
        Err(ModelError::UnsupportedFactor(_)) => return,
        Err(e) => panic!("{w}: {e}"),
    };
    for &rule in RuleId::ALL {
        for arg in [None, Some(1), Some(2)] {
            let spec = RuleSpec { rule, arg };
            for pos in 0..=w.len() {
                let Ok(out) = apply_rule(w, &spec, pos, n) else { continue };
                if !out.exact {
                    continue;
                }
                let mut terms: Vec<(LaurentPoly, _)> = Vec::new();
                let mut symbolic = false;
                for (m, word) in &out.summands {
                    match evaluate(model, word, source) {
                        Ok(op) => terms.push((model.from_v(m), op)),
                        Err(ModelError::UnsupportedFactor(_)) => symbolic = true,
                        Err(e) => panic!("{spec} on {w} gave {word}: {e}"),
                    }
                }
                if symbolic {
                    continue;
                }
                let rhs = combine(&terms, source, &lhs.target, model).unwrap_or_else(|e| panic!("{spec} @ {pos} on {w}: {e}"));
                *tally.checked.entry(rule.name()).or_default() += 1;
                if let Some((r, c, d)) = lhs.matrix.first_difference(&rhs.matrix) {
                    tally.failures.push(format!("{} {spec} @ {pos} on {w}: ({r},{c}) off by {d}", model.config()));
                }
            }
        }
    }
}

#[test]
fn exact_rules_are_matrix_identities() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut tally = Tally { checked: BTreeMap::new(), failures: Vec::new() };
    for side in [Side::Symmetric, Side::Skew] {
        for n in 2..=4 {
            for m in 2..=3 {
                for level in 1..=4i64 {
                    if level > 3 && (n < 4 || m > 2) {
                        continue;
                    }
                    let model = Model::new(ModelConfig::new(side, n, m, level).unwrap(), Convention::DEFAULT);
                    for text in seeded_words(n, level) {
                        let w = parse_for(&text, n).unwrap();
                        check_all_rules(&model, &w, w.source().unwrap(), &mut tally);
                    }
                    for k in Weight::all_objects(n, level) {
                        for _ in 0..3 {
                            let w = random_word(&mut rng, n, &k);
                            check_all_rules(&model, &w, &k, &mut tally);
                        }
                    }
                }
            }
        }
    }
    assert!(tally.failures.is_empty(), "{} failures, first: {:?}", tally.failures.len(), &tally.failures[..tally.failures.len().min(5)]);
    for rule in [
        "sl2", "ef-commute", "commute", "merge", "sl3", "absorb", "A-inverse", "hw-regroup", "braid", "braid-conj",
        "cancel", "TiTjEi", "TiTjEi-rev", "E0-def", "F0-def", "fold-E0", "fold-F0", "T-commute",
    ] {
        assert!(tally.checked.get(rule).copied().unwrap_or(0) > 0, "no exact application of {rule} checked: {:?}", tally.checked);
    }
}
