//! Constructive reductions: path shortening, cycle shrinking,
//! minimalization, canonicalization and connection of same-genus graphs.
//!
//! Every routine returns an explicit deformation sequence. The sequences are
//! witnesses, not optimal paths.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::Serialize;

use crate::error::CanonError;
use crate::graph::{ReebGraph, VertexClass, VertexId};
use crate::label::Label;
use crate::ops::{DeformationSequence, EditOp, Orientation};

/// Upper bound on the number of ops a single call may emit.
pub const DEFAULT_STEP_BUDGET: usize = 1_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct CanonicalizationResult {
    pub canonical_graph: ReebGraph,
    pub sequence: DeformationSequence,
    /// Number of cycle reductions performed after minimalization.
    pub cycle_rounds: usize,
}

/// Graph under rewriting plus the ops emitted so far.
struct Rewriter {
    g: ReebGraph,
    ops: Vec<EditOp>,
    budget: usize,
}

impl Rewriter {
    fn new(g: &ReebGraph, budget: usize) -> Self {
        Rewriter {
            g: g.clone(),
            ops: Vec::new(),
            budget,
        }
    }

    fn push(&mut self, op: EditOp) -> Result<(), CanonError> {
        if self.ops.len() >= self.budget {
            return Err(CanonError::BudgetExhausted(self.budget));
        }
        self.g = op.apply(&self.g)?;
        self.ops.push(op);
        Ok(())
    }

    fn label(&self, v: &VertexId) -> &Label {
        self.g.label_of(v)
    }

    /// Vertices reachable from `v` along strictly increasing (or decreasing) labels.
    fn monotone_reach(&self, v: &VertexId, upward: bool) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::new();
        let mut stack = vec![v.clone()];
        while let Some(x) = stack.pop() {
            let lx = self.label(&x).clone();
            for y in self.g.neighbors(&x) {
                let ly = self.label(y);
                if (upward && ly > &lx || !upward && ly < &lx) && seen.insert(y.clone()) {
                    stack.push(y.clone());
                }
            }
        }
        seen
    }

    /// Swaps the labels of two order-adjacent vertices.
    fn swap_labels(&mut self, x: &VertexId, y: &VertexId) -> Result<(), CanonError> {
        let op = EditOp::Relabel {
            new_labels: BTreeMap::from([(x.clone(), self.label(y).clone()), (y.clone(), self.label(x).clone())]),
        };
        self.push(op)
    }

    /// Reorders the vertices with labels in `[l(n), l(w)]` so that the
    /// lower part of `w` sits below `n`, everything else above `w`, and `n`,
    /// `w` become order-adjacent. Realized by single swaps.
    fn separate(&mut self, n: &VertexId, w: &VertexId) -> Result<(), CanonError> {
        let down_w = self.monotone_reach(w, false);
        let (ln, lw) = (self.label(n).clone(), self.label(w).clone());
        let interval: Vec<VertexId> = self
            .g
            .sorted_by_label()
            .into_iter()
            .filter(|x| self.label(x) >= &ln && self.label(x) <= &lw)
            .collect();
        let mut target: Vec<&VertexId> = interval
            .iter()
            .filter(|x| *x != n && *x != w && down_w.contains(*x))
            .collect();
        target.push(n);
        target.push(w);
        target.extend(interval.iter().filter(|x| *x != n && *x != w && !down_w.contains(*x)));
        let rank: BTreeMap<&VertexId, usize> = target.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut order = interval.clone();
        while let Some(i) = (0..order.len().saturating_sub(1)).find(|&i| rank[&order[i]] > rank[&order[i + 1]]) {
            let (x, y) = (order[i].clone(), order[i + 1].clone());
            self.swap_labels(&x, &y)?;
            order.swap(i, i + 1);
        }
        Ok(())
    }

    /// Shrinks a path (fixed leaf endpoints) or a cycle (fixed bottom at
    /// index 0) until it has two edges, respectively two vertices.
    fn shrink(&mut self, mut seq: Vec<VertexId>, closed: bool) -> Result<Vec<VertexId>, CanonError> {
        loop {
            let len = seq.len();
            let done = if closed { len <= 2 } else { len <= 3 };
            if done {
                return Ok(seq);
            }
            let interior: Vec<usize> = if closed {
                (1..len).collect()
            } else {
                (1..len - 1).collect()
            };
            let i = *interior
                .iter()
                .max_by(|&&a, &&b| self.label(&seq[a]).cmp(self.label(&seq[b])))
                .unwrap();
            let prev = |j: usize| if j == 0 { len - 1 } else { j - 1 };
            let next = |j: usize| if j + 1 == len { 0 } else { j + 1 };
            let w = seq[i].clone();
            let sides = [(prev(i), next(i), true), (next(i), prev(i), false)];
            let mut best: Option<(u8, usize, usize)> = None;
            for (j, other, toward_prev) in sides {
                let is_interior = if closed { j != 0 } else { j != 0 && j != len - 1 };
                if !is_interior {
                    continue;
                }
                let n = &seq[j];
                let a = &seq[other];
                if self.monotone_reach(n, true).contains(a) {
                    continue;
                }
                let c_idx = if toward_prev { prev(j) } else { next(j) };
                let c = &seq[c_idx];
                let rank = match self.g.class_of(n) {
                    VertexClass::JoiningSaddle => 0,
                    VertexClass::SplittingSaddle if self.label(c) < self.label(n) => 0,
                    VertexClass::SplittingSaddle => 1,
                    _ => continue,
                };
                if best.is_none_or(|b| rank < b.0) {
                    best = Some((rank, j, c_idx));
                }
            }
            let (_, j, c_idx) = best.ok_or_else(|| {
                CanonError::Edit(crate::error::EditError::Inconsistent(format!(
                    "no reducible side next to {w}"
                )))
            })?;
            let n = seq[j].clone();
            let c = seq[c_idx].clone();
            self.separate(&n, &w)?;
            let (ln, lw) = (self.label(&n).clone(), self.label(&w).clone());
            let shortens = match self.g.class_of(&n) {
                VertexClass::JoiningSaddle => {
                    self.push(EditOp::K1 {
                        u1: w.clone(),
                        u2: n.clone(),
                        new_labels: (ln, lw),
                        orientation: Orientation::Down,
                        v2: c.clone(),
                    })?;
                    true
                }
                _ => {
                    let lower = self.label(&c) < &ln;
                    self.push(EditOp::K3 {
                        u1: w.clone(),
                        u2: n.clone(),
                        new_labels: (ln, lw),
                    })?;
                    lower
                }
            };
            if shortens {
                seq.remove(j);
            }
        }
    }
}

/// Ops after which the two leaves `u`, `v` (both minima or both maxima)
/// share a neighbor. Uses only R, K1 and K3 moves.
pub fn reduce_path(g: &ReebGraph, u: &VertexId, v: &VertexId) -> Result<DeformationSequence, CanonError> {
    reduce_path_with_budget(g, u, v, DEFAULT_STEP_BUDGET)
}

pub fn reduce_path_with_budget(
    g: &ReebGraph,
    u: &VertexId,
    v: &VertexId,
    budget: usize,
) -> Result<DeformationSequence, CanonError> {
    g.require_valid()?;
    if u == v {
        return Err(CanonError::SameVertex);
    }
    let (cu, cv) = (g.classify(u)?, g.classify(v)?);
    if cu != cv || !cu.is_leaf() {
        return Err(CanonError::ClassMismatch(u.clone(), v.clone()));
    }
    if cu == VertexClass::Maximum {
        return Ok(reduce_path_with_budget(&g.mirrored(), u, v, budget)?.mirrored());
    }
    let path = g
        .shortest_path(u, v, &BTreeSet::new())
        .ok_or_else(|| CanonError::Graph(crate::error::GraphError::Invalid("graph is not connected".into())))?;
    let mut rw = Rewriter::new(g, budget);
    rw.shrink(path, false)?;
    Ok(DeformationSequence::new(rw.ops))
}

fn check_cycle(g: &ReebGraph, cycle: &[VertexId]) -> Result<(), CanonError> {
    let m = cycle.len();
    if m < 2 {
        return Err(CanonError::NotACycle("a cycle needs at least two vertices".into()));
    }
    let distinct: BTreeSet<&VertexId> = cycle.iter().collect();
    if distinct.len() != m {
        return Err(CanonError::NotACycle("vertices repeat".into()));
    }
    for v in cycle {
        if !g.contains(v) {
            return Err(CanonError::Graph(crate::error::GraphError::UnknownVertex(v.clone())));
        }
    }
    if m == 2 {
        if g.multiplicity(&cycle[0], &cycle[1]) < 2 {
            return Err(CanonError::NotACycle(format!(
                "{} and {} are not joined by a double edge",
                cycle[0], cycle[1]
            )));
        }
        return Ok(());
    }
    for i in 0..m {
        let (a, b) = (&cycle[i], &cycle[(i + 1) % m]);
        if g.multiplicity(a, b) == 0 {
            return Err(CanonError::NotACycle(format!("{a} and {b} are not adjacent")));
        }
    }
    Ok(())
}

/// Ops turning the simple cycle `cycle` (vertices in cyclic order) into a
/// 2-cycle whose lower vertex is the cycle's lowest vertex.
pub fn reduce_cycle(g: &ReebGraph, cycle: &[VertexId]) -> Result<DeformationSequence, CanonError> {
    reduce_cycle_with_budget(g, cycle, DEFAULT_STEP_BUDGET)
}

pub fn reduce_cycle_with_budget(
    g: &ReebGraph,
    cycle: &[VertexId],
    budget: usize,
) -> Result<DeformationSequence, CanonError> {
    g.require_valid()?;
    check_cycle(g, cycle)?;
    let mut rw = Rewriter::new(g, budget);
    reduce_cycle_in(&mut rw, cycle)?;
    Ok(DeformationSequence::new(rw.ops))
}

fn reduce_cycle_in(rw: &mut Rewriter, cycle: &[VertexId]) -> Result<(), CanonError> {
    let bottom = (0..cycle.len())
        .min_by(|&a, &b| rw.label(&cycle[a]).cmp(rw.label(&cycle[b])))
        .unwrap();
    let mut seq = cycle.to_vec();
    seq.rotate_left(bottom);
    rw.shrink(seq, true)?;
    Ok(())
}

/// Removes all but one minimum, pairing leaves along shortest paths.
fn drop_extra_minima(rw: &mut Rewriter) -> Result<(), CanonError> {
    loop {
        let minima = rw.g.minima();
        if minima.len() <= 1 {
            return Ok(());
        }
        let (u, v) = closest_pair(&rw.g, &minima);
        let path = rw.g.shortest_path(&u, &v, &BTreeSet::new()).expect("connected");
        let path = rw.shrink(path, false)?;
        let w = path[1].clone();
        let (u, v) = if rw.label(&u) < rw.label(&v) { (u, v) } else { (v, u) };
        debug_assert!(rw.g.neighbors(&u).contains(&w));
        // move v up past everything between it and w
        loop {
            let order = rw.g.sorted_by_label();
            let pos = order.iter().position(|x| x == &v).unwrap();
            let blocker = order[pos + 1].clone();
            if blocker == w {
                break;
            }
            let above = rw.label(&order[pos + 2]).clone();
            let target = rw.label(&blocker).midpoint(&above);
            rw.push(EditOp::Relabel {
                new_labels: BTreeMap::from([(v.clone(), target)]),
            })?;
        }
        rw.push(EditOp::Death { u1: w, u2: v })?;
    }
}

/// Pair of leaves with the shortest connecting path; ties go to the path
/// with the smaller maximal interior label, then to the smaller ids.
fn closest_pair(g: &ReebGraph, leaves: &[VertexId]) -> (VertexId, VertexId) {
    let mut best: Option<(usize, Label, VertexId, VertexId)> = None;
    for (i, u) in leaves.iter().enumerate() {
        for v in &leaves[i + 1..] {
            let path = g.shortest_path(u, v, &BTreeSet::new()).expect("connected");
            let top = path[1..path.len() - 1]
                .iter()
                .map(|x| g.label_of(x).clone())
                .max()
                .unwrap_or_else(Label::zero);
            let key = (path.len(), top, u.clone(), v.clone());
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
    }
    let (_, _, u, v) = best.expect("at least two leaves");
    (u, v)
}

/// Sequence to a graph with exactly one minimum and one maximum.
pub fn minimalize(g: &ReebGraph) -> Result<(ReebGraph, DeformationSequence), CanonError> {
    minimalize_with_budget(g, DEFAULT_STEP_BUDGET)
}

pub fn minimalize_with_budget(g: &ReebGraph, budget: usize) -> Result<(ReebGraph, DeformationSequence), CanonError> {
    g.require_valid()?;
    let mut rw = Rewriter::new(g, budget);
    drop_extra_minima(&mut rw)?;
    let mut mirrored = Rewriter::new(&rw.g.mirrored(), budget.saturating_sub(rw.ops.len()));
    drop_extra_minima(&mut mirrored)?;
    let mut ops = rw.ops;
    ops.extend(mirrored.ops.iter().map(EditOp::mirrored));
    Ok((mirrored.g.mirrored(), DeformationSequence::new(ops)))
}

/// Shortest cycle of the simple graph (parallel edges collapsed) through
/// the lowest vertex that lies on any such cycle.
fn lowest_simple_cycle(g: &ReebGraph) -> Option<Vec<VertexId>> {
    let simple: BTreeMap<&VertexId, BTreeSet<&VertexId>> = g
        .ids()
        .map(|v| (v, g.neighbors(v).iter().collect::<BTreeSet<_>>()))
        .collect();
    for v in g.sorted_by_label() {
        let mut best: Option<Vec<VertexId>> = None;
        for y in &simple[&v] {
            // BFS from y back to v without the edge v-y
            let mut prev: BTreeMap<&VertexId, &VertexId> = BTreeMap::new();
            let mut queue = VecDeque::from([*y]);
            let mut seen = BTreeSet::from([*y]);
            let mut found = false;
            while let Some(x) = queue.pop_front() {
                for z in &simple[x] {
                    if x == *y && *z == &v {
                        continue;
                    }
                    if *z == &v {
                        prev.insert(&v, x);
                        found = true;
                        break;
                    }
                    if seen.insert(z) {
                        prev.insert(z, x);
                        queue.push_back(z);
                    }
                }
                if found {
                    break;
                }
            }
            if !found {
                continue;
            }
            let mut cycle = vec![v.clone()];
            let mut cur = prev[&v];
            loop {
                cycle.push(cur.clone());
                if cur == *y {
                    break;
                }
                cur = prev[cur];
            }
            if best.as_ref().is_none_or(|b| cycle.len() < b.len()) {
                best = Some(cycle);
            }
        }
        if best.is_some() {
            return best;
        }
    }
    None
}

/// Canonical form with the sequence that reaches it.
pub fn canonicalize(g: &ReebGraph) -> Result<CanonicalizationResult, CanonError> {
    canonicalize_with_budget(g, DEFAULT_STEP_BUDGET)
}

pub fn canonicalize_with_budget(g: &ReebGraph, budget: usize) -> Result<CanonicalizationResult, CanonError> {
    let genus = g.genus()?;
    let (minimal, seq) = minimalize_with_budget(g, budget)?;
    let mut rw = Rewriter::new(&minimal, budget.saturating_sub(seq.len()));
    let mut rounds = 0;
    while let Some(cycle) = lowest_simple_cycle(&rw.g) {
        rounds += 1;
        assert!(rounds <= genus, "more cycle rounds than the genus");
        reduce_cycle_in(&mut rw, &cycle)?;
    }
    let mut sequence = seq;
    sequence.ops.extend(rw.ops);
    debug_assert!(rw.g.is_canonical().unwrap_or(false));
    Ok(CanonicalizationResult {
        canonical_graph: rw.g,
        sequence,
        cycle_rounds: rounds,
    })
}

/// Explicit sequence from `g1` to a graph isomorphic to `g2`:
/// canonicalize `g1`, match the two canonical chains by one relabel,
/// then undo the canonicalization of `g2`.
pub fn connect(g1: &ReebGraph, g2: &ReebGraph) -> Result<DeformationSequence, CanonError> {
    let (a, b) = (g1.genus()?, g2.genus()?);
    if a != b {
        return Err(CanonError::GenusMismatch(a, b));
    }
    let c1 = canonicalize(g1)?;
    let c2 = canonicalize(g2)?;
    join_canonical(&c1.sequence, &c1.canonical_graph, g2, &c2.sequence, &c2.canonical_graph)
}

/// `to_first` leads to `canon1`; `to_second` leads from `g2` to `canon2`.
/// Returns `to_first`, the matching relabel, then `to_second` reversed.
pub(crate) fn join_canonical(
    to_first: &DeformationSequence,
    canon1: &ReebGraph,
    g2: &ReebGraph,
    to_second: &DeformationSequence,
    canon2: &ReebGraph,
) -> Result<DeformationSequence, CanonError> {
    let mut ops = to_first.clone();
    let (middle, rename) = match_canonical(canon1, canon2);
    ops.push(middle);
    let back = to_second.inverse(g2)?;
    ops.extend(rename_born(&back, &rename, canon1, g2));
    Ok(ops)
}

/// The order-preserving relabel from one canonical graph onto another of the
/// same genus, and the id map sending the second graph's vertices to the first's.
pub(crate) fn match_canonical(c1: &ReebGraph, c2: &ReebGraph) -> (EditOp, BTreeMap<VertexId, VertexId>) {
    let o1 = c1.sorted_by_label();
    let o2 = c2.sorted_by_label();
    debug_assert_eq!(o1.len(), o2.len());
    let mut new_labels = BTreeMap::new();
    let mut rename = BTreeMap::new();
    for (x, y) in o1.iter().zip(&o2) {
        if c1.label_of(x) != c2.label_of(y) {
            new_labels.insert(x.clone(), c2.label_of(y).clone());
        }
        rename.insert(y.clone(), x.clone());
    }
    (EditOp::Relabel { new_labels }, rename)
}

/// Maps `seq` (written against ids of `source`) through `rename`; ids of
/// vertices it creates get fresh names when they would clash with `host`.
pub(crate) fn rename_born(
    seq: &DeformationSequence,
    rename: &BTreeMap<VertexId, VertexId>,
    host: &ReebGraph,
    source: &ReebGraph,
) -> DeformationSequence {
    let mut map = rename.clone();
    let mut taken: BTreeSet<VertexId> = host.ids().cloned().collect();
    taken.extend(source.ids().cloned());
    taken.extend(rename.values().cloned());
    for op in &seq.ops {
        if let EditOp::Birth { new_ids, .. } = op {
            for id in [&new_ids.0, &new_ids.1] {
                if map.contains_key(id) {
                    continue;
                }
                let target = if host.contains(id) || rename.values().any(|x| x == id) {
                    let fresh = (1..)
                        .map(|i| VertexId::new(format!("{id}~{i}")))
                        .find(|c| !taken.contains(c))
                        .unwrap();
                    taken.insert(fresh.clone());
                    fresh
                } else {
                    id.clone()
                };
                map.insert(id.clone(), target);
            }
        }
    }
    seq.map_ids(|v| map.get(v).cloned().unwrap_or_else(|| v.clone()))
}
