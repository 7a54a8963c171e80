mod common;

use common::*;
use proptest::prelude::*;
use tdga_core::augment::{
    count_augmentations, count_augmentations_all_units, count_augmentations_braid, count_augmentations_naive, AugmentationProblem,
};
use tdga_core::braid::{parse_braid, BraidWord};
use tdga_core::dga::{build_filtered_dga, infinity_dga, specialize, FilteredDga, Specialization};
use tdga_core::Error;

#[test]
fn naive_agrees_on_two_strands() {
    let bad = oracle_mismatches(&all_words(2, 4), &[2, 3, 5]);
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn braid_evaluator_agrees() {
    let braids: Vec<BraidWord> = all_words(2, 4).into_iter().chain(all_words(3, 3)).collect();
    for b in &braids {
        let d = build_filtered_dga(b).unwrap();
        let r = d.ring().r;
        for s in [Specialization::Hat, Specialization::DoubleHat, Specialization::Unfiltered] {
            let sd = s.apply(&d).unwrap();
            let uv = s.uv();
            let uv = (uv.0.unwrap(), uv.1.unwrap());
            for t in unit_tuples(3, 2 * r) {
                let prob = AugmentationProblem::new(&sd, 3, &t[..r], &t[r..], None).unwrap();
                let sym = count_augmentations(&prob).unwrap();
                let ev = count_augmentations_braid(b, 3, &t[..r], &t[r..], uv).unwrap();
                assert_eq!(sym, ev, "{} {} {t:?}", b.to_text(), s.name());
            }
        }
    }
}

#[test]
fn unknot_separation() {
    let dh = |w: &str, n| specialize(&build_filtered_dga(&parse_braid(w, Some(n)).unwrap()).unwrap(), Some(0), Some(0)).unwrap();
    let count = |d: &FilteredDga| count_augmentations(&AugmentationProblem::new(d, 3, &[-1], &[1], None).unwrap()).unwrap();
    assert_eq!(count(&dh("", 1)), 1);
    assert_eq!(count(&dh("-1", 2)), 0);
}

#[test]
fn infinity_problems_need_uv() {
    let d = infinity_dga(&parse_braid("-1", None).unwrap()).unwrap();
    assert!(matches!(AugmentationProblem::new(&d, 3, &[1], &[1], None), Err(Error::Unassigned(_))));
    assert!(matches!(AugmentationProblem::new(&d, 3, &[1], &[1], Some((0, 1))), Err(Error::NotInvertible(_))));
    let rows = count_augmentations_all_units(&d, 3).unwrap();
    assert_eq!(rows.len(), 16);
}

#[test]
fn braid_evaluator_errors() {
    let b = parse_braid("1 1", None).unwrap();
    assert!(matches!(count_augmentations_braid(&b, 4, &[1, 1], &[1, 1], (0, 1)), Err(Error::NotPrime(4))));
    assert!(matches!(count_augmentations_braid(&b, 3, &[1], &[1], (0, 1)), Err(Error::Unassigned(_))));
    assert!(matches!(count_augmentations_braid(&b, 3, &[1, 3], &[1, 1], (0, 1)), Err(Error::NotInvertible(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn naive_agrees_on_random_three_strand_words(w in prop::collection::vec(prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)], 0..=4), p in prop_oneof![Just(2u64), Just(3), Just(5)]) {
        let b = BraidWord::from_signed(3, &w).unwrap();
        let d = specialize(&build_filtered_dga(&b).unwrap(), Some(0), Some(1)).unwrap();
        let r = d.ring().r;
        let prob = AugmentationProblem::new(&d, p, &vec![-1; r], &vec![1; r], None).unwrap();
        prop_assert_eq!(count_augmentations(&prob).unwrap(), count_augmentations_naive(&prob).unwrap());
    }
}
