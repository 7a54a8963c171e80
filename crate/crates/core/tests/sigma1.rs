mod common;

#[test]
fn sigma1_matches_golden() {
    let bad = common::sigma1_mismatches();
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}
