use qaff::braid::{a_operator, prime_unit, rickard_t, rotation_r_prime, rotation_r_prime_inv, shifted_t};
use qaff::eval::evaluate;
use qaff::kmodel::{enumerate_basis, Convention, Dir, Hand, Model, ModelConfig, MoveRule};
use qaff::relations::{check_relation, t0_composite, RelationId};
use qaff::word::parse_for;
use qaff::{LaurentPoly, Side, Weight};

fn w(s: &str) -> Weight {
    s.parse().unwrap()
}

fn p(s: &str) -> LaurentPoly {
    s.parse().unwrap()
}

fn model(side: Side, n: usize, m: usize, level: i64) -> Model {
    Model::new(ModelConfig::new(side, n, m, level).unwrap(), Convention::DEFAULT)
}

#[test]
fn bases() {
    let skew = ModelConfig::new(Side::Skew, 2, 2, 2).unwrap();
    let b = enumerate_basis(&skew, &w("(1,1)")).unwrap();
    assert_eq!(b.len(), 4);
    let listed: Vec<_> = (0..4).map(|i| b.describe(i, 2)).collect();
    assert_eq!(listed, vec![vec![vec![1], vec![1]], vec![vec![1], vec![2]], vec![vec![2], vec![1]], vec![vec![2], vec![2]]]);
    let skew3 = ModelConfig::new(Side::Skew, 2, 2, 3).unwrap();
    assert!(enumerate_basis(&skew3, &w("(3,0)")).unwrap().is_empty());
    let sym = ModelConfig::new(Side::Symmetric, 2, 2, 2).unwrap();
    assert_eq!(enumerate_basis(&sym, &w("(0,2)")).unwrap().len(), 3);
}

#[test]
fn evaluation() {
    let m = model(Side::Skew, 2, 2, 2);
    let k = w("(0,2)");
    let id = evaluate(&m, &parse_for("1_(0,2)", 2).unwrap(), &k).unwrap();
    assert!(id.matrix.is_identity());
    // on the skew side [2] is taken in v = -q^-1
    let ef = evaluate(&m, &parse_for("E1 F1 1_(0,2)", 2).unwrap(), &k).unwrap();
    assert_eq!(ef.matrix.shape(), (1, 1));
    assert_eq!(ef.matrix[(0, 0)], p("-q - q^-1"));
    let sym = model(Side::Symmetric, 2, 2, 2);
    let ef = evaluate(&sym, &parse_for("E1 F1 1_(0,2)", 2).unwrap(), &k).unwrap();
    assert_eq!(ef.matrix.rows(), 3);
    let classical = Model::classical(ModelConfig::new(Side::Skew, 2, 2, 2).unwrap());
    let ef = evaluate(&classical, &parse_for("E1 F1 1_(0,2)", 2).unwrap(), &k).unwrap();
    assert_eq!(ef.matrix[(0, 0)], p("2"));
}

#[test]
fn affine_generators_on_empty_slots() {
    let m = model(Side::Symmetric, 3, 2, 2);
    // E_0 needs a box in the last slot
    let e0 = m.generator(Dir::E, 0, 1, &w("(1,1,0)")).unwrap();
    assert!(e0.is_empty());
    let f0 = m.generator(Dir::F, 0, 1, &w("(1,1,0)")).unwrap();
    assert_eq!(f0.target, w("(0,1,1)"));
    assert!(!f0.is_empty());
}

#[test]
fn relation_cells() {
    let m = model(Side::Skew, 2, 2, 2);
    let cells = check_relation(&m, RelationId::Sl2);
    assert!(!cells.is_empty() && cells.iter().all(|c| c.pass));
    let m3 = model(Side::Symmetric, 3, 2, 2);
    assert!(check_relation(&m3, RelationId::EiFjCommute).iter().all(|c| c.pass));

    let corrupted = Convention { e: MoveRule { hand: Hand::Left, sign: 1 }, f: MoveRule { hand: Hand::Right, sign: -1 } };
    let bad = Model::new(ModelConfig::new(Side::Skew, 2, 2, 2).unwrap(), corrupted);
    let failed: Vec<_> = check_relation(&bad, RelationId::Sl2).into_iter().filter(|c| !c.pass).collect();
    assert!(!failed.is_empty());
    assert!(failed.iter().all(|c| !c.detail.is_empty()));
}

#[test]
fn shifted_braid_units() {
    let skew = model(Side::Skew, 2, 2, 2);
    assert_eq!(prime_unit(&skew, 1, &w("(1,1)")), p("q"));
    let sym = model(Side::Symmetric, 2, 2, 2);
    assert_eq!(prime_unit(&sym, 1, &w("(2,0)")), p("q^-2"));
    // k_i = 0: no unit
    let k = w("(0,2)");
    assert_eq!(shifted_t(&sym, 1, &k).unwrap(), *rickard_t(&sym, 1, &k).unwrap());
}

#[test]
fn zero_spaces_give_empty_braids() {
    let m = model(Side::Skew, 2, 1, 2);
    // (0,2) and (2,0) are both zero for one skew column
    let t = rickard_t(&m, 1, &w("(0,2)")).unwrap();
    assert!(t.is_empty());
}

#[test]
fn rotation_is_invertible() {
    let m = model(Side::Symmetric, 3, 2, 2);
    let k = w("(1,1,0)");
    let r = rotation_r_prime(&m, &k).unwrap();
    let ri = rotation_r_prime_inv(&m, &r.target).unwrap();
    assert!(ri.compose(&r).unwrap().matrix.is_identity());
}

#[test]
fn loop_arounds() {
    for side in [Side::Symmetric, Side::Skew] {
        for (n, level) in [(2, 1), (3, 2), (4, 3)] {
            let m = model(side, n, 2, level);
            assert!(a_operator(&m, 0).unwrap().matrix.is_identity());
            let up = a_operator(&m, level).unwrap();
            let down = a_operator(&m, -level).unwrap();
            assert!(up.compose(&down).unwrap().matrix.is_identity());
            assert!(down.compose(&up).unwrap().matrix.is_identity());
        }
    }
}

// The composite in the affine braid definition is not diagonal at generic q; it is at q = 1.
#[test]
fn t0_composite_diagonal_only_classically() {
    let cfg = ModelConfig::new(Side::Skew, 3, 2, 2).unwrap();
    let k = w("(0,1,1)");
    let classical = t0_composite(&Model::classical(cfg), &k).unwrap();
    assert!(classical.matrix.is_diagonal());
    let generic = t0_composite(&Model::new(cfg, Convention::DEFAULT), &k).unwrap();
    assert_eq!(generic.matrix.off_diagonal().len(), 1);
}
