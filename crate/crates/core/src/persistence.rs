//! Extended persistence of the label function on a Reeb graph and the
//! bottleneck distance between such diagrams.

use std::collections::BTreeMap;
use std::fmt;

use petgraph::algo::maximum_matching;
use petgraph::graph::UnGraph;
use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use crate::error::{DiagramError, GraphError};
use crate::graph::{ReebGraph, VertexId};
use crate::label::Label;

pub type Point = (Label, Label);

/// Per-type multisets of persistence pairs, each kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    /// Sublevel merges: (minimum, joining saddle).
    pub ord0: Vec<Point>,
    /// Superlevel merges: (maximum, splitting saddle).
    pub rel_ord0_neg: Vec<Point>,
    /// (global minimum, global maximum).
    pub ess0: Point,
    /// Cycles: (joining saddle closing it, splitting saddle opening it).
    pub ess1: Vec<Point>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiagramKind {
    Ord0,
    RelOrd0Neg,
    Ess0,
    Ess1,
}

impl DiagramKind {
    pub const ALL: [DiagramKind; 4] = [
        DiagramKind::Ord0,
        DiagramKind::RelOrd0Neg,
        DiagramKind::Ess0,
        DiagramKind::Ess1,
    ];

    /// Essential points may not be matched to the diagonal.
    pub fn is_essential(self) -> bool {
        matches!(self, DiagramKind::Ess0 | DiagramKind::Ess1)
    }
}

impl fmt::Display for DiagramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DiagramKind::Ord0 => "ord0",
            DiagramKind::RelOrd0Neg => "rel_ord0_neg",
            DiagramKind::Ess0 => "ess0",
            DiagramKind::Ess1 => "ess1",
        })
    }
}

impl PersistenceDiagram {
    pub fn points(&self, kind: DiagramKind) -> Vec<Point> {
        match kind {
            DiagramKind::Ord0 => self.ord0.clone(),
            DiagramKind::RelOrd0Neg => self.rel_ord0_neg.clone(),
            DiagramKind::Ess0 => vec![self.ess0.clone()],
            DiagramKind::Ess1 => self.ess1.clone(),
        }
    }

    fn normalize(&mut self) {
        self.ord0.sort();
        self.rel_ord0_neg.sort();
        self.ess1.sort();
    }
}

fn vertex_index(g: &ReebGraph) -> (Vec<VertexId>, BTreeMap<VertexId, usize>) {
    let order = g.sorted_by_label();
    let index = order.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    (order, index)
}

/// Merge pairs of a sweep over `order` (vertices in sweep order); returns
/// (pairs as (birth vertex, death vertex), vertices that closed a loop).
fn merge_sweep(
    g: &ReebGraph,
    order: &[VertexId],
    index: &BTreeMap<VertexId, usize>,
) -> (Vec<(usize, usize)>, Vec<usize>) {
    let n = order.len();
    let mut uf: UnionFind<usize> = UnionFind::new(n);
    // oldest vertex of each root, by sweep position
    let mut oldest: Vec<usize> = (0..n).collect();
    let mut pairs = Vec::new();
    let mut loops = Vec::new();
    for (pos, v) in order.iter().enumerate() {
        let earlier: Vec<usize> = g.neighbors(v).iter().map(|x| index[x]).filter(|&i| i < pos).collect();
        for i in earlier {
            let (ra, rb) = (uf.find_mut(pos), uf.find_mut(i));
            if ra == rb {
                loops.push(pos);
                continue;
            }
            let (oa, ob) = (oldest[ra], oldest[rb]);
            // the current vertex alone is not a feature yet
            if oa != pos && ob != pos {
                pairs.push((oa.max(ob), pos));
            }
            uf.union(ra, rb);
            let r = uf.find_mut(ra);
            oldest[r] = oa.min(ob);
        }
    }
    (pairs, loops)
}

/// Extended persistence diagram of the label function.
pub fn extended_diagram(g: &ReebGraph) -> Result<PersistenceDiagram, GraphError> {
    g.require_valid()?;
    let (up, up_index) = vertex_index(g);
    let lab = |v: &VertexId| g.label_of(v).clone();
    let (ord, _) = merge_sweep(g, &up, &up_index);
    let ord0 = ord.into_iter().map(|(b, d)| (lab(&up[b]), lab(&up[d]))).collect();

    let down: Vec<VertexId> = up.iter().rev().cloned().collect();
    let down_index: BTreeMap<VertexId, usize> = down.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
    let (rel, loops) = merge_sweep(g, &down, &down_index);
    let rel_ord0_neg = rel.into_iter().map(|(b, d)| (lab(&down[b]), lab(&down[d]))).collect();

    let ess0 = (lab(&up[0]), lab(up.last().unwrap()));
    let ess1 = loops
        .into_iter()
        .map(|pos| {
            let s = &down[pos];
            (cycle_closing_label(g, s, &up, &up_index), lab(s))
        })
        .collect();
    let mut d = PersistenceDiagram {
        ord0,
        rel_ord0_neg,
        ess0,
        ess1,
    };
    d.normalize();
    Ok(d)
}

/// Smallest label `t` such that the two upper slots of the splitting saddle
/// `s` are connected through vertices with labels in `(l(s), t]`.
fn cycle_closing_label(g: &ReebGraph, s: &VertexId, up: &[VertexId], index: &BTreeMap<VertexId, usize>) -> Label {
    let ls = g.label_of(s);
    let slots: Vec<usize> = g
        .neighbors(s)
        .iter()
        .filter(|x| g.label_of(x) > ls)
        .map(|x| index[x])
        .collect();
    let (a, b) = (slots[0], slots[1]);
    let start = index[s] + 1;
    let mut uf: UnionFind<usize> = UnionFind::new(up.len());
    for (pos, v) in up.iter().enumerate().skip(start) {
        for x in g.neighbors(v) {
            let i = index[x];
            if i >= start && i < pos {
                uf.union(pos, i);
            }
        }
        if a <= pos && b <= pos && uf.equiv(a, b) {
            return g.label_of(v).clone();
        }
    }
    unreachable!("an essential saddle closes a cycle")
}

fn linf(p: &Point, q: &Point) -> Label {
    p.0.abs_diff(&q.0).max(p.1.abs_diff(&q.1))
}

fn to_diagonal(p: &Point) -> Label {
    p.0.abs_diff(&p.1).half()
}

/// One matched pair; `None` stands for the diagonal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assignment {
    pub kind: DiagramKind,
    pub left: Option<Point>,
    pub right: Option<Point>,
    pub cost: Label,
}

/// Bottleneck distance; `value` is `None` when the essential cycle counts
/// differ and no finite matching exists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BottleneckValue {
    pub value: Option<Label>,
    pub per_kind: BTreeMap<DiagramKind, Option<Label>>,
    pub matching: Vec<Assignment>,
}

impl BottleneckValue {
    pub fn is_infinite(&self) -> bool {
        self.value.is_none()
    }
}

/// Bipartite instance: left is `a` plus diagonal copies of `b`, right is
/// `b` plus diagonal copies of `a`.
struct MatchingProblem<'a> {
    a: &'a [Point],
    b: &'a [Point],
    diagonal: bool,
}

impl MatchingProblem<'_> {
    fn edge_cost(&self, i: usize, j: usize) -> Option<Label> {
        let (na, nb) = (self.a.len(), self.b.len());
        match (i < na, j < nb) {
            (true, true) => Some(linf(&self.a[i], &self.b[j])),
            (true, false) => (j - nb == i).then(|| to_diagonal(&self.a[i])),
            (false, true) => (i - na == j).then(|| to_diagonal(&self.b[j])),
            (false, false) => Some(Label::zero()),
        }
    }

    fn size(&self) -> usize {
        if self.diagonal {
            self.a.len() + self.b.len()
        } else {
            self.a.len()
        }
    }

    /// Perfect matching using only edges of cost at most `r`, as (left, right) pairs.
    fn matching_within(&self, r: &Label) -> Option<Vec<(usize, usize)>> {
        let n = self.size();
        let mut graph: UnGraph<(), ()> = UnGraph::with_capacity(2 * n, n * n);
        let nodes: Vec<_> = (0..2 * n).map(|_| graph.add_node(())).collect();
        for i in 0..n {
            for j in 0..n {
                if self.edge_cost(i, j).is_some_and(|c| &c <= r) {
                    graph.add_edge(nodes[i], nodes[n + j], ());
                }
            }
        }
        let m = maximum_matching(&graph);
        if !m.is_perfect() {
            return None;
        }
        let pairs = (0..n).map(|i| (i, m.mate(nodes[i]).unwrap().index() - n)).collect();
        Some(pairs)
    }

    fn candidates(&self) -> Vec<Label> {
        let n = self.size();
        let mut c: Vec<Label> = (0..n)
            .flat_map(|i| (0..n).filter_map(move |j| self.edge_cost(i, j)))
            .collect();
        c.push(Label::zero());
        c.sort();
        c.dedup();
        c
    }

    fn solve(&self, kind: DiagramKind) -> (Label, Vec<Assignment>) {
        let cand = self.candidates();
        let (mut lo, mut hi) = (0, cand.len() - 1);
        let mut best = self.matching_within(&cand[hi]).expect("largest radius is feasible");
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.matching_within(&cand[mid]) {
                Some(m) => {
                    best = m;
                    hi = mid;
                }
                None => lo = mid + 1,
            }
        }
        let (na, nb) = (self.a.len(), self.b.len());
        let assignments = best
            .into_iter()
            .filter(|&(i, j)| i < na || j < nb)
            .map(|(i, j)| Assignment {
                kind,
                left: (i < na).then(|| self.a[i].clone()),
                right: (j < nb).then(|| self.b[j].clone()),
                cost: self.edge_cost(i, j).unwrap(),
            })
            .collect();
        (cand[lo].clone(), assignments)
    }
}

/// Exact bottleneck distance, matched per diagram type; the overall value
/// is the maximum over the types.
pub fn bottleneck(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> BottleneckValue {
    let mut per_kind = BTreeMap::new();
    let mut matching = Vec::new();
    let mut value = Some(Label::zero());
    for kind in DiagramKind::ALL {
        let (a, b) = (d1.points(kind), d2.points(kind));
        if kind.is_essential() && a.len() != b.len() {
            per_kind.insert(kind, None);
            value = None;
            continue;
        }
        let problem = MatchingProblem {
            a: &a,
            b: &b,
            diagonal: !kind.is_essential(),
        };
        let (v, m) = if problem.size() == 0 {
            (Label::zero(), Vec::new())
        } else {
            problem.solve(kind)
        };
        matching.extend(m);
        value = value.map(|cur| cur.max(v.clone()));
        per_kind.insert(kind, Some(v));
    }
    BottleneckValue {
        value,
        per_kind,
        matching,
    }
}

/// Largest number of points per type the exhaustive oracle accepts.
pub const ORACLE_CAP: usize = 7;

/// Bottleneck distance by enumerating every matching; for testing.
pub fn bottleneck_oracle(d1: &PersistenceDiagram, d2: &PersistenceDiagram) -> Result<BottleneckValue, DiagramError> {
    let mut per_kind = BTreeMap::new();
    let mut value = Some(Label::zero());
    for kind in DiagramKind::ALL {
        let (a, b) = (d1.points(kind), d2.points(kind));
        let got = a.len().max(b.len());
        if got > ORACLE_CAP {
            return Err(DiagramError::OracleCapExceeded { cap: ORACLE_CAP, got });
        }
        let v = if kind.is_essential() {
            if a.len() != b.len() {
                None
            } else {
                Some(best_forced(&a, &b, &mut vec![false; b.len()], 0))
            }
        } else {
            Some(best_partial(&a, &b, &mut vec![false; b.len()], 0))
        };
        value = match (value, &v) {
            (Some(cur), Some(x)) => Some(cur.max(x.clone())),
            _ => None,
        };
        per_kind.insert(kind, v);
    }
    Ok(BottleneckValue {
        value,
        per_kind,
        matching: Vec::new(),
    })
}

fn best_forced(a: &[Point], b: &[Point], used: &mut Vec<bool>, i: usize) -> Label {
    if i == a.len() {
        return Label::zero();
    }
    let mut best: Option<Label> = None;
    for j in 0..b.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        let c = linf(&a[i], &b[j]).max(best_forced(a, b, used, i + 1));
        used[j] = false;
        if best.as_ref().is_none_or(|x| &c < x) {
            best = Some(c);
        }
    }
    best.unwrap()
}

fn best_partial(a: &[Point], b: &[Point], used: &mut Vec<bool>, i: usize) -> Label {
    if i == a.len() {
        return b
            .iter()
            .zip(used.iter())
            .filter(|(_, u)| !**u)
            .map(|(p, _)| to_diagonal(p))
            .max()
            .unwrap_or_else(Label::zero);
    }
    let mut best = to_diagonal(&a[i]).max(best_partial(a, b, used, i + 1));
    for j in 0..b.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        let c = linf(&a[i], &b[j]).max(best_partial(a, b, used, i + 1));
        used[j] = false;
        if c < best {
            best = c;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn l(s: &str) -> Label {
        s.parse().unwrap()
    }

    fn p(a: &str, b: &str) -> Point {
        (l(a), l(b))
    }

    fn empty_with(ess1: Vec<Point>) -> PersistenceDiagram {
        PersistenceDiagram {
            ord0: vec![],
            rel_ord0_neg: vec![],
            ess0: p("0", "10"),
            ess1,
        }
    }

    #[test]
    fn min_max_edge_diagram() {
        let g = ReebGraph::from_lists(&[("a", "0"), ("b", "1")], &[("a", "b")]).unwrap();
        let d = extended_diagram(&g).unwrap();
        assert!(d.ord0.is_empty() && d.rel_ord0_neg.is_empty() && d.ess1.is_empty());
        assert_eq!(d.ess0, p("0", "1"));
    }

    #[test]
    fn torus_diagram() {
        let g = ReebGraph::from_lists(
            &[("m", "0"), ("s1", "1"), ("s2", "2"), ("M", "3")],
            &[("m", "s1"), ("s1", "s2"), ("s1", "s2"), ("s2", "M")],
        )
        .unwrap();
        let d = extended_diagram(&g).unwrap();
        assert_eq!(d.ess0, p("0", "3"));
        assert_eq!(d.ess1, vec![p("2", "1")]);
        assert!(d.ord0.is_empty());
    }

    #[test]
    fn three_bumps_have_three_ordinary_pairs() {
        let g = ReebGraph::from_lists(
            &[
                ("m", "0"),
                ("p1", "1"),
                ("q1", "3"),
                ("p2", "4"),
                ("q2", "6"),
                ("p3", "7"),
                ("q3", "9"),
                ("M", "10"),
            ],
            &[
                ("m", "q1"),
                ("p1", "q1"),
                ("q1", "q2"),
                ("p2", "q2"),
                ("q2", "q3"),
                ("p3", "q3"),
                ("q3", "M"),
            ],
        )
        .unwrap();
        let d = extended_diagram(&g).unwrap();
        assert_eq!(d.ord0, vec![p("1", "3"), p("4", "6"), p("7", "9")]);
        assert!(d.rel_ord0_neg.is_empty());
    }

    #[test]
    fn bottleneck_examples() {
        let d = empty_with(vec![p("2", "1")]);
        assert!(bottleneck(&d, &d).value.unwrap().is_zero());
        let shifted = empty_with(vec![p("2.5", "1.5")]);
        assert_eq!(bottleneck(&d, &shifted).value.unwrap(), l("0.5"));
        let mut one = empty_with(vec![]);
        one.ord0 = vec![p("1", "3")];
        let none = empty_with(vec![]);
        assert_eq!(bottleneck(&one, &none).value.unwrap(), l("1"));
        assert!(bottleneck(&d, &none).is_infinite());
    }

    #[test]
    fn oracle_agrees_on_small_cases() {
        let mut a = empty_with(vec![p("5", "1"), p("6", "2")]);
        a.ord0 = vec![p("1", "3"), p("2", "2.5"), p("0.5", "4")];
        let mut b = empty_with(vec![p("6.5", "1.5"), p("5", "0")]);
        b.ord0 = vec![p("1.2", "3.1"), p("0", "5")];
        b.rel_ord0_neg = vec![p("9", "8")];
        let fast = bottleneck(&a, &b);
        let slow = bottleneck_oracle(&a, &b).unwrap();
        assert_eq!(fast.value, slow.value);
        assert_eq!(fast.per_kind, slow.per_kind);
        let worst = fast.matching.iter().map(|m| m.cost.clone()).max().unwrap();
        assert_eq!(Some(worst), fast.value);
    }

    #[test]
    fn oracle_cap() {
        let mut a = empty_with(vec![]);
        a.ord0 = (0..8).map(|i| (Label::from_int(i), Label::from_int(i + 1))).collect();
        assert!(matches!(
            bottleneck_oracle(&a, &a),
            Err(DiagramError::OracleCapExceeded { .. })
        ));
    }
}
