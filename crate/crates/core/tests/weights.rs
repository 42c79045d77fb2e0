use proptest::prelude::*;
use qaff::weight::{cartan, p_map, validate_rank};
use qaff::Weight;

fn w(s: &str) -> Weight {
    s.parse().unwrap()
}

fn weight(n: usize) -> impl Strategy<Value = Weight> {
    prop::collection::vec(-4i64..=6, n).prop_map(Weight::new)
}

fn sized() -> impl Strategy<Value = (usize, Weight)> {
    (2usize..=6).prop_flat_map(|n| (Just(n), weight(n)))
}

#[test]
fn examples() {
    let a1 = Weight::root(3, 1);
    assert_eq!(a1.pairing(&a1).unwrap(), 2);
    assert_eq!(a1.pairing(&Weight::root(3, 2)).unwrap(), -1);
    assert_eq!(w("(0,2)").pairing(&Weight::root(2, 1)).unwrap(), 2);
    assert_eq!(w("(3,0,2)").reflect(1), w("(0,3,2)"));
    assert_eq!(w("(3,0,2)").reflect(0), w("(2,0,3)"));
    assert_eq!(w("(1,1)").reflect(1), w("(1,1)"));
    assert_eq!(w("(0,0,3)").rotate(), w("(0,3,0)"));
    assert_eq!(w("(1,1,1)").rotate(), w("(1,1,1)"));
    assert_eq!(Weight::eta(4, 2).rotate(), w("(0,0,2,0)"));
    assert_eq!(p_map(&[1, 0, 0]), vec![-1, -1]);
    assert_eq!(p_map(&[0, 1, 0]), vec![1, 0]);
    assert_eq!(p_map(&[1, 1, 1]), vec![0, 0]);
    assert!(w("(1,-1)").pairing(&w("(1,0,0)")).is_err());
}

#[test]
fn objects_at_level() {
    let objs = Weight::all_objects(3, 2);
    assert_eq!(objs.len(), 6);
    assert!(objs.iter().all(|k| k.is_nonzero_object(2)));
    assert!(!w("(-1,3)").is_nonzero_object(2));
    assert!(validate_rank(3, 2).is_ok());
    assert!(validate_rank(3, 3).is_err());
}

proptest! {
    #[test]
    fn cartan_matrix_matches_root_pairing(n in 2usize..=6, i in 0usize..6, j in 0usize..6) {
        prop_assume!(i < n && j < n);
        prop_assert_eq!(Weight::root(n, i).pairing(&Weight::root(n, j)).unwrap(), cartan(n, i, j));
    }

    #[test]
    fn roots_change_pairing_by_cartan((n, k) in sized(), i in 0usize..6, j in 0usize..6) {
        prop_assume!(i < n && j < n);
        prop_assert_eq!(k.add_root(j, 1).pair_root(i), k.pair_root(i) + cartan(n, i, j));
        prop_assert_eq!(k.add_root(j, 1).total(), k.total());
    }

    #[test]
    fn reflection_is_an_involution((n, k) in sized(), i in 0usize..6) {
        prop_assume!(i < n);
        prop_assert_eq!(k.reflect(i).reflect(i), k.clone());
        prop_assert_eq!(k.reflect(i).pair_root(i), -k.pair_root(i));
    }

    #[test]
    fn rotation_has_order_n((n, k) in sized()) {
        let mut r = k.clone();
        for _ in 0..n {
            r = r.rotate();
        }
        prop_assert_eq!(&r, &k);
        prop_assert_eq!(k.rotate().rotate_inv(), k.clone());
    }

    #[test]
    fn rotation_shifts_root_index((n, k) in sized(), i in 1usize..6) {
        prop_assume!(i < n);
        // rotating moves alpha_i to alpha_{i-1}
        prop_assert_eq!(k.rotate().pair_root(i - 1), k.pair_root(i));
    }

    #[test]
    fn display_round_trip((_n, k) in sized()) {
        prop_assert_eq!(k.to_string().parse::<Weight>().unwrap(), k);
    }

    #[test]
    fn p_map_kills_the_imaginary_root(n in 2usize..=6, c in -3i64..=3) {
        prop_assert_eq!(p_map(&vec![c; n]), vec![0; n - 1]);
    }
}
