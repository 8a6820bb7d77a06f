// SPDX-License-Identifier: Apache-2.0
mod common;

#[test]
fn scoap_matches_recursive_oracle() {
    let mut checked = 0;
    for c in common::corpus_upto(200) {
        common::scoap_oracle::check(&c);
        checked += 1;
    }
    assert!(checked >= 20);
}

#[test]
fn boundary_conditions_everywhere() {
    for c in common::corpus() {
        common::scoap_oracle::check_boundaries(&c);
    }
}
