use qaff::kmodel::{Convention, Model, ModelConfig};
use qaff::tree::{associativity_cases, check_associativity, conservativity_check, forest_word, mu, tree_word, TreeError};
use qaff::word::{weight_flow, Flow};
use qaff::{Side, Weight};

fn w(s: &str) -> Weight {
    s.parse().unwrap()
}

#[test]
fn builders() {
    assert_eq!(mu(5, 3), w("(0,0,1,1,1)"));
    let t = tree_word(4, 3).unwrap();
    assert_eq!(t.word.to_string(), "F2 F3^(2) 1_(0,0,0,3)");
    assert_eq!(t, forest_word(&Weight::eta(4, 3)).unwrap());
    assert!(matches!(tree_word(3, 3), Err(TreeError::ConfigMismatch { .. })));
    let f = forest_word(&w("(0,0,3,0,2)")).unwrap();
    assert_eq!(f.word.to_string(), "F1 F2^(2) F4 1_(0,0,3,0,2)");
    assert!(forest_word(&mu(4, 2)).unwrap().word.generators().next().is_none());
    assert!(matches!(forest_word(&w("(0,-1,3)")), Err(TreeError::ZeroObject(_))));
    assert!(matches!(forest_word(&w("(0,4)")), Err(TreeError::InfeasibleFlow { .. })));
}

#[test]
fn every_forest_is_planar_and_flows() {
    for n in 2..=6 {
        for level in 1..=n as i64 {
            for k in Weight::all_objects(n, level) {
                let f = forest_word(&k).unwrap();
                assert!(f.is_planar(), "{k}");
                assert_eq!(f.target, mu(n, level));
                assert!(matches!(weight_flow(&f.word, &k, level).unwrap(), Flow::Weights(_)), "{k}");
            }
        }
    }
}

#[test]
fn conservativity_examples() {
    let skew = Model::new(ModelConfig::new(Side::Skew, 3, 2, 2).unwrap(), Convention::DEFAULT);
    let c = conservativity_check(&skew, &w("(0,2,0)")).unwrap();
    assert!(c.full_column_rank && !c.degenerate);
    assert_eq!((c.rank, c.dim), (1, 1));
    let c = conservativity_check(&skew, &w("(0,1,1)")).unwrap();
    assert_eq!(c.rank, c.dim);
    let c = conservativity_check(&skew, &w("(0,-1,3)")).unwrap();
    assert!(c.degenerate && c.rank == 0);
}

#[test]
fn sweep() {
    let (mut cases, mut checked) = (0, 0);
    for side in [Side::Symmetric, Side::Skew] {
        for n in 2..=4 {
            for m in 2..=3 {
                for level in 1..=3i64 {
                    let model = Model::new(ModelConfig::new(side, n, m, level).unwrap(), Convention::DEFAULT);
                    if n as i64 > level {
                        for k in model.config().weights() {
                            let c = conservativity_check(&model, &k).unwrap();
                            assert!(c.full_column_rank, "{} {k}: rank {} of {}", model.config(), c.rank, c.dim);
                            checked += !c.degenerate as usize;
                        }
                    }
                    for case in associativity_cases(n, level) {
                        assert!(check_associativity(&model, &case).unwrap(), "{} {}", model.config(), case.left);
                        cases += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100 && cases > 0);
}
