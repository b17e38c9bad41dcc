mod common;

use common::{bumps_and_deaths, equal_diagram_pair, sample};
use proptest::prelude::*;
use reeb_edit::distance::{deletion_eps_bound, upper_bound_canonical};
use reeb_edit::experiment::perturb;
use reeb_edit::{
    bottleneck, distance_report, extended_diagram, rewrite_deletions, DeformationSequence, EditOp, Label, ReebGraph,
    SearchParams,
};

fn quick() -> SearchParams {
    SearchParams {
        beam_width: 6,
        max_depth: 2,
        ..SearchParams::default()
    }
}

fn max_death_cost(g: &ReebGraph, deaths: &[EditOp]) -> Label {
    deaths
        .iter()
        .scan(g.clone(), |cur, op| {
            let c = op.cost(cur).unwrap();
            *cur = op.apply(cur).unwrap();
            Some(c)
        })
        .max()
        .unwrap()
}

fn genus_two(j1: &str, j2: &str) -> ReebGraph {
    ReebGraph::from_lists(
        &[
            ("m", "0"),
            ("s1", "1"),
            ("j1", j1),
            ("s2", "4"),
            ("j2", j2),
            ("M", "10"),
        ],
        &[
            ("m", "s1"),
            ("s1", "j1"),
            ("s1", "j1"),
            ("j1", "s2"),
            ("s2", "j2"),
            ("s2", "j2"),
            ("j2", "M"),
        ],
    )
    .unwrap()
}

#[test]
fn shifted_cycles_are_certified_exactly() {
    let r = distance_report(&genus_two("2", "5"), &genus_two("3", "6"), &quick()).unwrap();
    assert_eq!(r.lower, Label::from_int(1));
    assert_eq!(r.upper, Some(Label::from_int(1)));
}

#[test]
fn equal_diagrams_do_not_certify_isomorphism() {
    let (a, b) = equal_diagram_pair();
    assert_eq!(extended_diagram(&a).unwrap(), extended_diagram(&b).unwrap());
    assert!(!a.is_isomorphic_to(&b));
    let r = distance_report(&a, &b, &quick()).unwrap();
    assert!(r.lower.is_zero());
    assert!(r.upper.unwrap() > Label::zero());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn rewritten_deletions_obey_two_sided_bound(genus in 0usize..3, n in 1usize..6, seed in any::<u64>()) {
        let (g, deaths) = bumps_and_deaths(genus, n, seed);
        let eps = deletion_eps_bound(&g, &deaths).unwrap() / Label::from_int(3);
        let max = max_death_cost(&g, &deaths);
        let s = rewrite_deletions(&g, &deaths, &eps).unwrap();
        let cost = s.total_cost(&g).unwrap();
        let slack = &eps * &Label::from_int(n as i64 - 1);
        prop_assert!(&max - &eps <= cost);
        prop_assert!(cost <= &max + &slack);
        let naive = DeformationSequence::new(deaths).replay(&g).unwrap();
        prop_assert_eq!(s.replay(&g).unwrap(), naive);
    }

    #[test]
    fn reports_are_sandwiched(genus in 0usize..3, a in 0usize..3, b in 0usize..3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let g1 = sample(genus, a, s1);
        let g2 = sample(genus, b, s2);
        let r = distance_report(&g1, &g2, &quick()).unwrap();
        let upper = r.upper.clone().unwrap();
        prop_assert!(r.lower <= upper);
        let w = r.witness.unwrap();
        let (end, cost) = w.ops.replay_with_cost(&g1).unwrap();
        prop_assert!(end.is_isomorphic_to(&g2));
        prop_assert_eq!(cost, upper);
    }

    #[test]
    fn canonical_bound_is_symmetric(genus in 0usize..4, a in 0usize..4, b in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let g1 = sample(genus, a, s1);
        let g2 = sample(genus, b, s2);
        let fwd = upper_bound_canonical(&g1, &g2, None).unwrap();
        let back = upper_bound_canonical(&g2, &g1, None).unwrap();
        prop_assert_eq!(&fwd.cost, &back.cost);
        let lower = bottleneck(&extended_diagram(&g1).unwrap(), &extended_diagram(&g2).unwrap()).value.unwrap();
        prop_assert!(lower <= fwd.cost);
    }

    #[test]
    fn self_distance_is_zero(genus in 0usize..4, a in 0usize..4, seed in any::<u64>()) {
        let g = sample(genus, a, seed);
        let r = distance_report(&g, &g, &quick()).unwrap();
        prop_assert!(r.lower.is_zero());
        prop_assert!(r.upper.unwrap().is_zero());
    }

    #[test]
    fn small_perturbations_cost_at_most_delta(genus in 0usize..4, a in 0usize..3, seed in any::<u64>(), trial in 0usize..1000) {
        let g = sample(genus, a, seed);
        let delta = g.min_label_gap().unwrap() / Label::from_int(100);
        let h = perturb(&g, &delta, seed, trial);
        let r = distance_report(&g, &h, &quick()).unwrap();
        prop_assert!(r.upper.unwrap() <= delta.clone());
        prop_assert!(r.lower <= delta);
    }
}
