mod common;

use common::sample;
use proptest::prelude::*;
use reeb_edit::{canonicalize, connect, minimalize};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn canonical_form_shape(genus in 0usize..5, pairs in 0usize..7, seed in any::<u64>()) {
        let g = sample(genus, pairs, seed);
        let res = canonicalize(&g).unwrap();
        let c = &res.canonical_graph;
        prop_assert!(c.is_canonical().unwrap());
        prop_assert_eq!(c.vertex_count(), 2 * genus + 2);
        prop_assert_eq!(c.leaf_counts(), (1, 1));
        prop_assert!(res.cycle_rounds <= genus);
        prop_assert_eq!(&res.sequence.replay(&g).unwrap(), c);
    }

    #[test]
    fn minimalize_leaves_one_minimum_and_maximum(genus in 0usize..4, pairs in 0usize..6, seed in any::<u64>()) {
        let g = sample(genus, pairs, seed);
        let (m, seq) = minimalize(&g).unwrap();
        prop_assert!(m.is_minimal().unwrap());
        prop_assert_eq!(seq.replay(&g).unwrap(), m);
    }

    #[test]
    fn connect_reaches_target(genus in 0usize..4, a in 0usize..4, b in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let g1 = sample(genus, a, s1);
        let g2 = sample(genus, b, s2);
        let seq = connect(&g1, &g2).unwrap();
        prop_assert!(seq.replay(&g1).unwrap().is_isomorphic_to(&g2));
    }
}
