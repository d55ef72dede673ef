mod common;

use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn tree_algorithms_match_oracles(seed in any::<u64>()) {
        if let Err(e) = common::check_instance(seed) {
            prop_assert!(false, "{}", e);
        }
    }
}

#[test]
fn small_forests_exhaustively_seeded() {
    for seed in 0..300 {
        common::check_instance(seed).unwrap();
    }
}
