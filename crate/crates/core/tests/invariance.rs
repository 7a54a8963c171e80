mod common;

use common::*;

#[test]
fn sigma1_matches_trivial_braid() {
    tables_agree("1", "", 3).unwrap();
}

#[test]
fn positive_stabilization() {
    tables_agree("1 2", "1", 3).unwrap();
    tables_agree("-1 2", "-1", 3).unwrap();
}

#[test]
fn conjugation() {
    tables_agree("1 -2 1 -2", "-2 1 -2 1", 3).unwrap();
    tables_agree("1 -2 1 -2", "-2 1 -2 1", 5).unwrap();
    tables_agree("1 1 2 -1 2", "2 1 1 2 -1", 3).unwrap();
}

#[test]
fn infinity_forgets_self_linking() {
    infinity_tables_agree("-1", "", 3).unwrap();
    infinity_tables_agree("-1 -2", "1", 3).unwrap();
}

#[test]
fn self_linking_is_seen() {
    assert!(tables_agree("-1", "", 3).is_err());
}
