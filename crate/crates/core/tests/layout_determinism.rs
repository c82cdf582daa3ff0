mod support;

use std::sync::Arc;

use germ_core::layout_gen::{generate_layout, parse_layout, serialize_layout, Requirements};
use proptest::prelude::*;

#[test]
fn regeneration_is_byte_identical() {
    for n in [16, 100] {
        let first = serialize_layout(&generate_layout(&Requirements::new(n)).unwrap());
        for _ in 0..100 {
            assert_eq!(serialize_layout(&generate_layout(&Requirements::new(n)).unwrap()), first);
        }
    }
}

#[test]
fn corpus_layout_matches_generator() {
    let on_disk = std::fs::read_to_string(support::corpus_dir().join("layout16.layout")).unwrap();
    assert_eq!(on_disk, serialize_layout(&generate_layout(&Requirements::new(16)).unwrap()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_layouts_round_trip_and_satisfy_laws(
        n in 1u32..24,
        extra in proptest::collection::btree_set("x_[a-z]{1,4}", 0..3),
    ) {
        let req = Requirements::new(n).with_extra_specials(extra.iter().cloned());
        let layout = generate_layout(&req).unwrap();
        let text = serialize_layout(&layout);
        prop_assert_eq!(&parse_layout(&text).unwrap(), &layout);
        prop_assert_eq!(serialize_layout(&parse_layout(&text).unwrap()), text);
        prop_assert_eq!(layout.slot_count(), n as usize + 2 + extra.len());
        let layout = Arc::new(layout);
        prop_assert!(support::exhaustive_laws(&layout).is_ok());
    }
}
