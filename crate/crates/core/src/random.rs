//! Seeded sampling of valid labeled Reeb graphs.
//!
//! All randomness comes from `ChaCha8Rng::seed_from_u64(seed)`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::enumerate::enumerate_applicable;
use crate::graph::{ReebGraph, VertexId};
use crate::label::Label;
use crate::ops::{EditOp, OpKind};

/// Random dyadic point strictly inside `(lo, hi)`.
///
/// The step is the power of two giving between 32 and 64 grid points across
/// the interval, so repeated sampling keeps denominators small.
pub(crate) fn label_between<R: Rng>(rng: &mut R, lo: &Label, hi: &Label) -> Label {
    assert!(lo < hi, "empty interval");
    let width = (hi - lo).as_rational().clone();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut step = BigRational::one();
    while &step * BigRational::from_integer(BigInt::from(32)) > width {
        step /= &two;
    }
    while &step * BigRational::from_integer(BigInt::from(64)) <= width {
        step *= &two;
    }
    let kmin: BigInt = (lo.as_rational() / &step).floor().to_integer() + 1;
    let kmax: BigInt = (hi.as_rational() / &step).ceil().to_integer() - 1;
    let span = (&kmax - &kmin).to_u64().expect("small span");
    let k = kmin + BigInt::from(rng.gen_range(0..=span));
    Label::from_rational(BigRational::from_integer(k) * step)
}

/// Canonical chain of genus `g` on the given sorted labels:
/// `m - s1 = j1 - s2 = j2 - ... - M`.
pub fn canonical_chain(labels: &[Label]) -> ReebGraph {
    assert!(
        labels.len() >= 2 && labels.len().is_multiple_of(2),
        "need an even number of labels"
    );
    let g = (labels.len() - 2) / 2;
    let mut ids = vec![VertexId::new("m")];
    for i in 1..=g {
        ids.push(VertexId::new(format!("s{i}")));
        ids.push(VertexId::new(format!("j{i}")));
    }
    ids.push(VertexId::new("M"));
    let mut edges = Vec::new();
    for w in ids.windows(2) {
        edges.push((w[0].clone(), w[1].clone()));
    }
    for i in 0..g {
        edges.push((ids[2 * i + 1].clone(), ids[2 * i + 2].clone()));
    }
    ReebGraph::new(ids.into_iter().zip(labels.iter().cloned()), edges).expect("chain is well formed")
}

/// Valid graph of genus `genus` with `extra_leaf_pairs` births applied to a
/// canonical skeleton, followed by a random walk of relabels and K moves.
/// Labels lie strictly inside `(label_low, label_high)`.
pub fn random_graph(
    genus: usize,
    extra_leaf_pairs: usize,
    label_low: &Label,
    label_high: &Label,
    seed: u64,
) -> ReebGraph {
    assert!(label_low < label_high, "label_low must be below label_high");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 2 * genus + 2;
    let mut set = BTreeSet::new();
    while set.len() < n {
        set.insert(label_between(&mut rng, label_low, label_high));
    }
    let labels: Vec<Label> = set.into_iter().collect();
    let mut g = canonical_chain(&labels);
    for i in 0..extra_leaf_pairs {
        g = random_birth(&g, &mut rng, i);
    }
    let steps = 4 * g.vertex_count();
    for _ in 0..steps {
        g = random_step(&g, &mut rng, label_low, label_high);
    }
    debug_assert!(g.is_valid());
    g
}

/// Birth of a leaf pair in a random free gap along a random edge.
pub fn random_birth<R: Rng>(g: &ReebGraph, rng: &mut R, serial: usize) -> ReebGraph {
    let edges = g.edges();
    let (a, b) = edges.choose(rng).unwrap().clone();
    let (la, lb) = (g.label_of(&a).clone(), g.label_of(&b).clone());
    let mut inside: Vec<Label> = g.sorted_labels().into_iter().filter(|l| l >= &la && l <= &lb).collect();
    inside.dedup();
    let k = rng.gen_range(0..inside.len() - 1);
    let (lo, hi) = (&inside[k], &inside[k + 1]);
    let mut t1 = label_between(rng, lo, hi);
    let mut t2 = label_between(rng, lo, hi);
    while t1 == t2 {
        t2 = label_between(rng, lo, hi);
    }
    if t1 > t2 {
        std::mem::swap(&mut t1, &mut t2);
    }
    // leaf above makes a maximum, leaf below a minimum
    let labels = if rng.gen_bool(0.5) { (t1, t2) } else { (t2, t1) };
    let [u1, u2] = g.fresh_ids(&format!("x{serial}"));
    let op = EditOp::Birth {
        edge: (a, b),
        new_ids: (u1, u2),
        new_labels: labels,
    };
    op.apply(g).expect("birth in a free gap applies")
}

fn random_step<R: Rng>(g: &ReebGraph, rng: &mut R, low: &Label, high: &Label) -> ReebGraph {
    if rng.gen_bool(0.5) {
        let ks = enumerate_applicable(g, &[OpKind::K1, OpKind::K2, OpKind::K3], &Label::zero());
        if let Some(op) = ks.choose(rng) {
            return op.apply(g).expect("enumerated op applies");
        }
    }
    let order = g.sorted_by_label();
    let i = rng.gen_range(0..order.len());
    let v = &order[i];
    if rng.gen_bool(0.3) && i + 1 < order.len() {
        let w = &order[i + 1];
        if g.multiplicity(v, w) == 0 {
            let op = EditOp::Relabel {
                new_labels: [(v.clone(), g.label_of(w).clone()), (w.clone(), g.label_of(v).clone())].into(),
            };
            if let Ok(h) = op.apply(g) {
                return h;
            }
        }
    }
    let lo = if i == 0 { low } else { g.label_of(&order[i - 1]) };
    let hi = order.get(i + 1).map_or(high, |w| g.label_of(w));
    let op = EditOp::Relabel {
        new_labels: [(v.clone(), label_between(rng, lo, hi))].into(),
    };
    op.apply(g).unwrap_or_else(|_| g.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::VertexClass;

    fn sample(genus: usize, k: usize, seed: u64) -> ReebGraph {
        random_graph(genus, k, &Label::zero(), &Label::from_int(100), seed)
    }

    #[test]
    fn small_shapes() {
        let g = sample(0, 0, 3);
        assert_eq!(g.vertex_count(), 2);
        let g = sample(1, 0, 3);
        assert_eq!(g.vertex_count(), 4);
        assert!(g.is_canonical().unwrap());
        let g = sample(2, 0, 3);
        assert_eq!(g.vertex_count(), 6);
        assert!(g.validate().ok);
    }

    #[test]
    fn deterministic_under_seed() {
        assert_eq!(sample(2, 3, 11), sample(2, 3, 11));
        assert_ne!(sample(2, 3, 11), sample(2, 3, 12));
    }

    #[test]
    fn counts_match_leaf_formula() {
        for seed in 0..40 {
            let genus = (seed % 4) as usize;
            let k = (seed % 5) as usize;
            let g = sample(genus, k, seed);
            assert!(g.validate().ok, "{:?}", g.validate());
            assert_eq!(g.genus().unwrap(), genus);
            let (p, q) = g.leaf_counts();
            assert_eq!(p + q, 2 + k);
            assert_eq!(g.vertex_count(), 2 * (p + q + genus - 1));
            let ids: Vec<_> = g.ids().cloned().collect();
            for v in &ids {
                g.classify(v).unwrap();
            }
            if p == 1 && q == 1 {
                let splits = ids
                    .iter()
                    .filter(|v| g.classify(v).unwrap() == VertexClass::SplittingSaddle)
                    .count();
                assert_eq!(splits, genus);
            }
        }
    }
}
