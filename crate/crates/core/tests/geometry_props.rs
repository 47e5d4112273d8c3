mod common;

use joints_core::geometry::{canonicalize_line, concurrency_map, line_intersection, Intersection};
use joints_core::{Field, Scalar};
use proptest::prelude::*;

fn fields() -> impl Strategy<Value = Field> {
    prop_oneof![Just(Field::prime(101).unwrap()), Just(Field::prime(3).unwrap()), Just(Field::rational())]
}

fn vec_of(field: Field, v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&c| field.from_i64(c)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn canonical_form_ignores_base_shift_and_dir_scale(
        field in fields(),
        n in 2usize..=4,
        base in prop::collection::vec(-50i64..50, 4),
        dir in prop::collection::vec(-9i64..9, 4),
        s_num in 1i64..20,
        s_den in 1i64..7,
        neg in any::<bool>(),
        t in -30i64..30,
    ) {
        let dir = &dir[..n];
        prop_assume!(dir.iter().any(|&d| field.modulus().map_or(d != 0, |p| d.rem_euclid(p as i64) != 0)));
        let base = vec_of(field, &base[..n]);
        let dv = vec_of(field, dir);
        let Some(mut s) = field.div(&field.from_i64(s_num), &field.from_i64(s_den)) else { return Ok(()) };
        if neg {
            s = field.neg(&s);
        }
        prop_assume!(!s.is_zero());
        let tt = field.from_i64(t);
        let shifted: Vec<Scalar> = base.iter().zip(&dv).map(|(b, d)| field.add(b, &field.mul(&tt, d))).collect();
        let scaled: Vec<Scalar> = dv.iter().map(|d| field.mul(&s, d)).collect();
        let a = canonicalize_line(field, &base, &dv).unwrap();
        let b = canonicalize_line(field, &shifted, &scaled).unwrap();
        prop_assert_eq!(&a, &b);
        // the pivot coordinate of the direction is 1 and the base is zero there
        let piv = a.dir().pivot();
        prop_assert!(a.dir().coords()[..piv].iter().all(Scalar::is_zero));
        prop_assert_eq!(&a.dir().coords()[piv], &field.one());
        prop_assert!(a.base().coords()[piv].is_zero());
    }

    #[test]
    fn intersection_is_symmetric(seed in any::<u64>(), field in fields()) {
        let arr = common::clustered_arrangement(field, 3, 12, seed);
        let ls = arr.lines();
        for i in 0..ls.len() {
            for j in 0..ls.len() {
                let a = line_intersection(field, &ls[i], &ls[j]);
                let b = line_intersection(field, &ls[j], &ls[i]);
                prop_assert_eq!(&a, &b);
                if let Intersection::Point(x) = a {
                    prop_assert!(ls[i].contains(field, &x) && ls[j].contains(field, &x));
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn concurrency_map_matches_brute_force(seed in any::<u64>(), field in fields(), n in 2usize..=3, l in 2usize..=50) {
        let arr = common::clustered_arrangement(field, n, l, seed);
        let map = concurrency_map(&arr);
        let brute = common::brute_concurrency(field, arr.lines());
        prop_assert_eq!(map.len(), brute.len());
        for (x, ids) in brute {
            let got: Vec<usize> = map[&x].iter().copied().collect();
            prop_assert_eq!(got, ids);
        }
    }
}
