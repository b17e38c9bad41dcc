//! Finite menus of applicable deformations, used by the search.

use std::collections::{BTreeMap, BTreeSet};

use crate::graph::{ReebGraph, VertexId};
use crate::label::Label;
use crate::ops::{EditOp, OpKind, Orientation};

/// Every enumerated op of the requested kinds that applies to `g`.
///
/// `eps` bounds the label moves of relabel nudges, the half-offsets of K
/// moves placed around a midpoint, and the width of births. Only ops whose
/// preconditions hold are returned.
pub fn enumerate_applicable(g: &ReebGraph, kinds: &[OpKind], eps: &Label) -> Vec<EditOp> {
    if !g.is_valid() {
        return Vec::new();
    }
    let mut out = Vec::new();
    for kind in OpKind::ALL {
        if !kinds.contains(&kind) {
            continue;
        }
        let candidates = match kind {
            OpKind::B => births(g, eps),
            OpKind::D => deaths(g),
            OpKind::R => relabels(g, eps),
            OpKind::K1 | OpKind::K2 | OpKind::K3 => k_moves(g, kind, eps),
        };
        out.extend(candidates.into_iter().filter(|op| op.apply(g).is_ok()));
    }
    out
}

fn deaths(g: &ReebGraph) -> Vec<EditOp> {
    g.ids()
        .filter(|v| g.degree(v) == 1)
        .filter_map(|u2| {
            let u1 = &g.neighbors(u2)[0];
            (g.degree(u1) == 3).then(|| EditOp::Death {
                u1: u1.clone(),
                u2: u2.clone(),
            })
        })
        .collect()
}

fn relabels(g: &ReebGraph, eps: &Label) -> Vec<EditOp> {
    let mut out = vec![EditOp::Relabel {
        new_labels: BTreeMap::new(),
    }];
    if eps.is_zero() || eps.is_negative() {
        return out;
    }
    let order = g.sorted_by_label();
    for (i, v) in order.iter().enumerate() {
        let l = g.label_of(v);
        let prev = i.checked_sub(1).map(|j| g.label_of(&order[j]));
        let next = order.get(i + 1).map(|w| g.label_of(w));
        let mut targets: BTreeSet<Label> = BTreeSet::new();
        targets.insert(l + eps);
        targets.insert(l - eps);
        if let Some(n) = next {
            targets.insert(n - eps);
            targets.insert(n + eps);
        }
        if let Some(p) = prev {
            targets.insert(p + eps);
            targets.insert(p - eps);
        }
        targets.remove(l);
        for t in targets {
            out.push(EditOp::Relabel {
                new_labels: BTreeMap::from([(v.clone(), t)]),
            });
        }
    }
    out
}

/// Births in the free interval nearest each edge midpoint.
fn births(g: &ReebGraph, eps: &Label) -> Vec<EditOp> {
    if eps.is_zero() || eps.is_negative() {
        return Vec::new();
    }
    let labels = g.sorted_labels();
    let [u1, u2] = g.fresh_ids("b");
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (a, b) in g.edges() {
        if !seen.insert((a.clone(), b.clone())) {
            continue;
        }
        let (la, lb) = (g.label_of(&a), g.label_of(&b));
        let mid = la.midpoint(lb);
        // free interval (lo, hi) with lo <= mid < hi
        let lo = labels
            .iter()
            .rev()
            .find(|x| *x <= &mid)
            .cloned()
            .unwrap_or_else(|| la.clone());
        let hi = labels.iter().find(|x| *x > &mid).cloned().unwrap_or_else(|| lb.clone());
        let c = lo.midpoint(&hi);
        let quarter = (&hi - &lo).half().half();
        let w = if eps.half() < quarter { eps.half() } else { quarter };
        let (low, high) = (&c - &w, &c + &w);
        for (l1, l2) in [(low.clone(), high.clone()), (high.clone(), low.clone())] {
            out.push(EditOp::Birth {
                edge: (a.clone(), b.clone()),
                new_ids: (u1.clone(), u2.clone()),
                new_labels: (l1, l2),
            });
        }
    }
    out
}

fn k_moves(g: &ReebGraph, kind: OpKind, eps: &Label) -> Vec<EditOp> {
    let order = g.sorted_by_label();
    let mut out = Vec::new();
    for pair in order.windows(2) {
        let (x, y) = (&pair[0], &pair[1]);
        if g.degree(x) != 3 || g.degree(y) != 3 || g.multiplicity(x, y) != 1 {
            continue;
        }
        let (lx, ly) = (g.label_of(x), g.label_of(y));
        let mid = lx.midpoint(ly);
        let half = eps.half();
        // (label that ends up lower, label that ends up higher)
        let mut placements = vec![(lx.clone(), ly.clone())];
        if !half.is_zero() && !half.is_negative() {
            placements.push((&mid - &half, &mid + &half));
        }
        let upper = |v: &VertexId, skip: &VertexId| -> Vec<VertexId> {
            let lv = g.label_of(v);
            dedup(g.neighbors(v).iter().filter(|n| *n != skip && g.label_of(n) > lv))
        };
        let lower = |v: &VertexId, skip: &VertexId| -> Vec<VertexId> {
            let lv = g.label_of(v);
            dedup(g.neighbors(v).iter().filter(|n| *n != skip && g.label_of(n) < lv))
        };
        for (lo, hi) in &placements {
            match kind {
                OpKind::K1 => {
                    for v2 in upper(y, x) {
                        out.push(EditOp::K1 {
                            u1: x.clone(),
                            u2: y.clone(),
                            new_labels: (hi.clone(), lo.clone()),
                            orientation: Orientation::Up,
                            v2,
                        });
                    }
                    for v2 in lower(x, y) {
                        out.push(EditOp::K1 {
                            u1: y.clone(),
                            u2: x.clone(),
                            new_labels: (lo.clone(), hi.clone()),
                            orientation: Orientation::Down,
                            v2,
                        });
                    }
                }
                OpKind::K2 => {
                    for v1 in lower(x, y) {
                        for v3 in upper(y, x) {
                            out.push(EditOp::K2 {
                                u1: x.clone(),
                                u2: y.clone(),
                                new_labels: (hi.clone(), lo.clone()),
                                v1: v1.clone(),
                                v3,
                            });
                        }
                    }
                }
                OpKind::K3 => out.push(EditOp::K3 {
                    u1: y.clone(),
                    u2: x.clone(),
                    new_labels: (lo.clone(), hi.clone()),
                }),
                _ => unreachable!(),
            }
        }
    }
    out
}

fn dedup<'a>(it: impl Iterator<Item = &'a VertexId>) -> Vec<VertexId> {
    let set: BTreeSet<&VertexId> = it.collect();
    set.into_iter().cloned().collect()
}
