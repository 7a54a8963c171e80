mod common;

use common::*;
use proptest::prelude::*;
use tdga_core::braid::{parse_braid, BraidWord, Letter};
use tdga_core::dga::{build_filtered_dga, build_unfiltered_dga, infinity_dga, specialize, verify_dga, Specialization};
use tdga_core::json::{dga_from_json, dga_to_json};
use tdga_core::Error;

fn arb_braid(max_n: usize, max_len: usize) -> impl Strategy<Value = BraidWord> {
    (2..=max_n).prop_flat_map(move |n| {
        prop::collection::vec((1..n, any::<bool>()), 0..=max_len).prop_map(move |w| {
            BraidWord::new(n, w.into_iter().map(|(k, s)| Letter::new(k, if s { 1 } else { -1 })).collect()).unwrap()
        })
    })
}

fn assert_verified(b: &BraidWord) {
    let d = build_filtered_dga(b).unwrap();
    let report = verify_dga(&d);
    assert!(report.all_pass(), "{}\n{report}", b.to_text());
}

#[test]
fn short_words() {
    for b in all_words(2, 6).iter().chain(&all_words(3, 3)) {
        assert_verified(b);
    }
}

#[test]
fn seeded_random_words() {
    for b in random_words(7, 50).iter().filter(|b| b.len() <= 6) {
        assert_verified(b);
    }
}

#[test]
fn specializations_verify() {
    for w in ["1", "-1", "1 -2 1", "1 1", "2 -1 2 2"] {
        let d = build_filtered_dga(&parse_braid(w, None).unwrap()).unwrap();
        for s in [Specialization::Hat, Specialization::DoubleHat, Specialization::Unfiltered] {
            assert!(verify_dga(&s.apply(&d).unwrap()).all_pass(), "{w} {}", s.name());
        }
    }
}

#[test]
fn infinity_needs_a_knot() {
    assert!(infinity_dga(&parse_braid("1 1", None).unwrap()).is_err());
    assert!(verify_dga(&infinity_dga(&parse_braid("1 -2", None).unwrap()).unwrap()).all_pass());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn differential_squares_to_zero(b in arb_braid(4, 5)) {
        let d = build_filtered_dga(&b);
        prop_assume!(!matches!(d, Err(Error::TooLarge(_))));
        let d = d.unwrap();
        let report = verify_dga(&d);
        prop_assert!(report.all_pass(), "{}", report);
    }

    #[test]
    fn unfiltered_is_the_specialization(b in arb_braid(3, 5)) {
        let direct = build_unfiltered_dga(&b).unwrap();
        let spec = specialize(&build_filtered_dga(&b).unwrap(), Some(1), Some(1)).unwrap();
        prop_assert_eq!(direct.differential(), spec.differential());
    }

    #[test]
    fn json_round_trip(b in arb_braid(3, 4)) {
        let d = build_filtered_dga(&b).unwrap();
        let text = dga_to_json(&d);
        let back = dga_from_json(&text).unwrap();
        prop_assert_eq!(dga_to_json(&back), text);
        prop_assert_eq!(back, d);
    }

    #[test]
    fn self_linking_under_rotation(b in arb_braid(4, 8), k in 0usize..8) {
        prop_assume!(b.components().r == 1 && !b.is_empty());
        let k = k % b.len();
        let letters = b.letters();
        let rotated = BraidWord::new(b.strands(), [&letters[k..], &letters[..k]].concat()).unwrap();
        prop_assert_eq!(rotated.self_linking().unwrap(), b.self_linking().unwrap());
    }
}
