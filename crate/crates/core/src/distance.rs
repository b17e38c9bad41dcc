//! Certified bounds on the edit distance: witness sequences from above,
//! bottleneck distance of extended diagrams from below.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::canonical::{canonicalize, join_canonical};
use crate::enumerate::enumerate_applicable;
use crate::error::DistanceError;
use crate::graph::{IsoKey, ReebGraph, VertexId};
use crate::label::Label;
use crate::ops::{DeformationSequence, EditOp, OpKind, SequenceFile};
use crate::par::{map_ordered, ExecMode};
use crate::persistence::{bottleneck, extended_diagram, PersistenceDiagram};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchParams {
    pub beam_width: usize,
    pub max_depth: usize,
    /// Label step for enumerated moves; `None` means 1/1000 of the smallest
    /// label gap in either input.
    pub eps_grid: Option<Label>,
    /// Breaks ties between equally ranked beam states.
    pub seed: u64,
    #[serde(default)]
    pub exec: ExecMode,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            beam_width: 32,
            max_depth: 8,
            eps_grid: None,
            seed: 0,
            exec: ExecMode::default(),
        }
    }
}

impl SearchParams {
    pub fn check(&self) -> Result<(), DistanceError> {
        if self.beam_width == 0 {
            return Err(DistanceError::BadParams("beam_width"));
        }
        if self.max_depth == 0 {
            return Err(DistanceError::BadParams("max_depth"));
        }
        if self.eps_grid.as_ref().is_some_and(|e| e.is_zero() || e.is_negative()) {
            return Err(DistanceError::BadParams("eps_grid"));
        }
        Ok(())
    }

    fn eps_for(&self, g1: &ReebGraph, g2: &ReebGraph) -> Label {
        self.eps_grid.clone().unwrap_or_else(|| default_eps_grid(g1, g2))
    }
}

/// 1/1000 of the smallest label gap in either graph.
pub fn default_eps_grid(g1: &ReebGraph, g2: &ReebGraph) -> Label {
    let gap = match (g1.min_label_gap(), g2.min_label_gap()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) | (None, Some(a)) => a,
        (None, None) => Label::from_int(1),
    };
    gap / Label::from_int(1000)
}

/// A sequence certifying `cost` as an upper bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub sequence: DeformationSequence,
    pub cost: Label,
    pub provenance: String,
}

fn death_interval(g: &ReebGraph, op: &EditOp) -> (Label, Label) {
    let EditOp::Death { u1, u2 } = op else {
        unreachable!("checked by caller")
    };
    let (a, b) = (g.label_of(u1).clone(), g.label_of(u2).clone());
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Intervals of the deaths not strictly inside another one.
fn maximal_intervals(intervals: &[(Label, Label)]) -> Vec<(Label, Label)> {
    intervals
        .iter()
        .filter(|(a, b)| !intervals.iter().any(|(c, d)| c < a && b < d))
        .cloned()
        .collect()
}

fn check_deaths(g: &ReebGraph, deaths: &[EditOp]) -> Result<Vec<(Label, Label)>, DistanceError> {
    if let Some(i) = deaths.iter().position(|op| !op.is_death()) {
        return Err(DistanceError::NotAllDeaths(i));
    }
    DeformationSequence::new(deaths.to_vec()).replay(g)?;
    Ok(deaths.iter().map(|op| death_interval(g, op)).collect())
}

/// Smallest half-width over the maximal deletion intervals; `eps` must be
/// strictly below it.
pub fn deletion_eps_bound(g: &ReebGraph, deaths: &[EditOp]) -> Result<Label, DistanceError> {
    let intervals = check_deaths(g, deaths)?;
    Ok(maximal_intervals(&intervals)
        .iter()
        .map(|(a, b)| (b - a).half())
        .min()
        .unwrap_or_else(Label::zero))
}

/// Replaces a run of deaths by one relabel that squeezes every maximal
/// deletion interval `[a, b]` affinely onto `[c - eps, c + eps]` around its
/// midpoint `c`, followed by the same deaths.
pub fn rewrite_deletions(g: &ReebGraph, deaths: &[EditOp], eps: &Label) -> Result<DeformationSequence, DistanceError> {
    let intervals = check_deaths(g, deaths)?;
    if deaths.is_empty() {
        return Ok(DeformationSequence::default());
    }
    let maximal = maximal_intervals(&intervals);
    let bound = maximal.iter().map(|(a, b)| (b - a).half()).min().unwrap();
    if eps.is_zero() || eps.is_negative() || eps >= &bound {
        return Err(DistanceError::EpsilonOutOfRange {
            eps: Box::new(eps.clone()),
            bound: Box::new(bound),
        });
    }
    let mut new_labels = BTreeMap::new();
    for op in deaths {
        let EditOp::Death { u1, u2 } = op else { unreachable!() };
        for v in [u1, u2] {
            let x = g.label_of(v);
            let (a, b) = maximal.iter().find(|(a, b)| a <= x && x <= b).unwrap();
            let c = a.midpoint(b);
            let squeezed = &(&c - eps) + &((x - a) * (eps + eps) / (b - a));
            if &squeezed != x {
                new_labels.insert(v.clone(), squeezed);
            }
        }
    }
    let mut out = DeformationSequence::new(vec![EditOp::Relabel { new_labels }]);
    out.ops.extend(deaths.iter().cloned());
    Ok(out)
}

/// Rewrites every maximal run of two or more consecutive deaths in `seq`;
/// the step for each run is `eps_grid` clamped to half its bound.
pub fn rewrite_death_runs(
    start: &ReebGraph,
    seq: &DeformationSequence,
    eps_grid: &Label,
) -> Result<DeformationSequence, DistanceError> {
    let mut out = DeformationSequence::default();
    let mut g = start.clone();
    let mut i = 0;
    while i < seq.len() {
        let run_end = (i..seq.len()).find(|&j| !seq.ops[j].is_death()).unwrap_or(seq.len());
        if run_end - i >= 2 {
            let run = &seq.ops[i..run_end];
            let bound = deletion_eps_bound(&g, run)?.half();
            let eps = if eps_grid < &bound { eps_grid.clone() } else { bound };
            let rewritten = rewrite_deletions(&g, run, &eps)?;
            g = rewritten.replay(&g)?;
            out.extend(rewritten);
            i = run_end;
        } else {
            let op = &seq.ops[i];
            g = op.apply(&g)?;
            out.push(op.clone());
            i += 1;
        }
    }
    Ok(out)
}

/// A single relabel taking `from` onto `to` when both graphs have the same
/// edge structure under the rank order of their labels.
pub fn order_preserving_relabel(from: &ReebGraph, to: &ReebGraph) -> Option<EditOp> {
    if from.vertex_count() != to.vertex_count() || from.edge_count() != to.edge_count() {
        return None;
    }
    let ranked = |g: &ReebGraph| -> (Vec<VertexId>, Vec<(usize, usize)>) {
        let order = g.sorted_by_label();
        let rank: BTreeMap<&VertexId, usize> = order.iter().enumerate().map(|(i, v)| (v, i)).collect();
        let mut edges: Vec<(usize, usize)> = g.edges().iter().map(|(a, b)| (rank[a], rank[b])).collect();
        edges.sort_unstable();
        (order, edges)
    };
    let (o1, e1) = ranked(from);
    let (o2, e2) = ranked(to);
    if e1 != e2 {
        return None;
    }
    let new_labels = o1
        .iter()
        .zip(&o2)
        .filter(|(x, y)| from.label_of(x) != to.label_of(y))
        .map(|(x, y)| (x.clone(), to.label_of(y).clone()))
        .collect();
    let op = EditOp::Relabel { new_labels };
    op.apply(from).is_ok().then_some(op)
}

fn require_same_genus(g1: &ReebGraph, g2: &ReebGraph) -> Result<(), DistanceError> {
    let (a, b) = (g1.genus()?, g2.genus()?);
    if a != b {
        return Err(DistanceError::GenusMismatch(a, b));
    }
    Ok(())
}

fn direct_relabel_witness(g1: &ReebGraph, g2: &ReebGraph) -> Option<Witness> {
    let op = order_preserving_relabel(g1, g2)?;
    let cost = op.cost(g1).ok()?;
    Some(Witness {
        sequence: DeformationSequence::new(vec![op]),
        cost,
        provenance: "order-preserving relabel".into(),
    })
}

/// Upper bound from the canonical pipeline: canonicalize both graphs, with
/// runs of deaths rewritten, and join them through one relabel. When the
/// graphs already agree up to an order-preserving relabel that single op is
/// used if it is cheaper. The value is symmetric in the arguments.
pub fn upper_bound_canonical(
    g1: &ReebGraph,
    g2: &ReebGraph,
    eps_grid: Option<&Label>,
) -> Result<Witness, DistanceError> {
    require_same_genus(g1, g2)?;
    let eps = eps_grid.cloned().unwrap_or_else(|| default_eps_grid(g1, g2));
    let c1 = canonicalize(g1)?;
    let c2 = canonicalize(g2)?;
    let s1 = rewrite_death_runs(g1, &c1.sequence, &eps)?;
    let s2 = rewrite_death_runs(g2, &c2.sequence, &eps)?;
    let sequence = join_canonical(&s1, &c1.canonical_graph, g2, &s2, &c2.canonical_graph)?;
    let cost = sequence.total_cost(g1)?;
    let pipeline = Witness {
        sequence,
        cost,
        provenance: "canonical pipeline with rewritten deletions".into(),
    };
    Ok(match direct_relabel_witness(g1, g2) {
        Some(direct) if direct.cost < pipeline.cost => direct,
        _ => pipeline,
    })
}

struct State {
    graph: ReebGraph,
    seq: DeformationSequence,
    cost: Label,
}

struct Child {
    state: State,
    key: IsoKey,
    heuristic: Label,
    finish: Option<(DeformationSequence, Label)>,
}

fn expand(
    state: &State,
    target: &ReebGraph,
    target_diagram: &PersistenceDiagram,
    eps: &Label,
    bound: &Label,
) -> Vec<Child> {
    let mut out = Vec::new();
    for op in enumerate_applicable(&state.graph, &OpKind::ALL, eps) {
        let Ok((graph, step)) = op.apply_with_cost(&state.graph) else {
            continue;
        };
        let cost = &state.cost + &step;
        if &cost >= bound {
            continue;
        }
        let mut seq = state.seq.clone();
        seq.push(op);
        let finish = if graph.is_isomorphic_to(target) {
            Some((seq.clone(), cost.clone()))
        } else {
            order_preserving_relabel(&graph, target).and_then(|r| {
                let total = &cost + &r.cost(&graph).ok()?;
                let mut s = seq.clone();
                s.push(r);
                Some((s, total))
            })
        };
        let heuristic = extended_diagram(&graph)
            .ok()
            .and_then(|d| bottleneck(&d, target_diagram).value)
            .unwrap_or_else(Label::zero);
        out.push(Child {
            key: graph.iso_key(),
            state: State { graph, seq, cost },
            heuristic,
            finish,
        });
    }
    out
}

/// Beam search over enumerated ops, ranked by accumulated cost plus the
/// bottleneck lower bound to `g2`. Starts from the canonical bound as the
/// incumbent, so the result never exceeds it.
pub fn beam_search_upper(g1: &ReebGraph, g2: &ReebGraph, params: &SearchParams) -> Result<Witness, DistanceError> {
    params.check()?;
    let eps = params.eps_for(g1, g2);
    let mut best = upper_bound_canonical(g1, g2, Some(&eps))?;
    if best.cost.is_zero() {
        return Ok(best);
    }
    let target_diagram = extended_diagram(g2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut seen: BTreeMap<IsoKey, Label> = BTreeMap::new();
    seen.insert(g1.iso_key(), Label::zero());
    let mut frontier = vec![State {
        graph: g1.clone(),
        seq: DeformationSequence::default(),
        cost: Label::zero(),
    }];
    for depth in 1..=params.max_depth {
        let bound = best.cost.clone();
        let expanded = map_ordered(params.exec, &frontier, |s| expand(s, g2, &target_diagram, &eps, &bound));
        let mut ranked = Vec::new();
        for child in expanded.into_iter().flatten() {
            if let Some((seq, cost)) = child.finish {
                if cost < best.cost {
                    best = Witness {
                        sequence: seq,
                        cost,
                        provenance: format!("beam search at depth {depth}"),
                    };
                }
            }
            let score = &child.state.cost + &child.heuristic;
            if score >= best.cost {
                continue;
            }
            if seen.get(&child.key).is_some_and(|c| c <= &child.state.cost) {
                continue;
            }
            seen.insert(child.key, child.state.cost.clone());
            let tie: u64 = rng.gen();
            ranked.push((score, tie, child.state));
        }
        ranked.sort_by(|a, b| (&a.0, &a.2.cost, a.1).cmp(&(&b.0, &b.2.cost, b.1)));
        frontier = ranked
            .into_iter()
            .filter(|(score, _, _)| score < &best.cost)
            .take(params.beam_width)
            .map(|(_, _, s)| s)
            .collect();
        if frontier.is_empty() {
            break;
        }
    }
    Ok(best)
}

#[derive(Debug, Clone, Serialize)]
pub struct DistanceReport {
    pub lower: Label,
    /// Absent when the genera differ.
    pub upper: Option<Label>,
    pub witness: Option<SequenceFile>,
    pub lower_provenance: String,
    pub upper_provenance: String,
    pub params: SearchParams,
}

/// Lower bound from diagrams, upper bound from the best witness found.
/// Panics if the bounds cross, which would indicate a bug.
pub fn distance_report(g1: &ReebGraph, g2: &ReebGraph, params: &SearchParams) -> Result<DistanceReport, DistanceError> {
    params.check()?;
    let (d1, d2) = (extended_diagram(g1)?, extended_diagram(g2)?);
    let lower_value = bottleneck(&d1, &d2);
    let lower_provenance = "bottleneck distance of extended persistence diagrams".to_string();
    let (a, b) = (g1.genus()?, g2.genus()?);
    if a != b {
        return Ok(DistanceReport {
            lower: lower_value.value.unwrap_or_else(Label::zero),
            upper: None,
            witness: None,
            lower_provenance: format!("{lower_provenance}; genus mismatch {a} vs {b}, essential classes unmatched"),
            upper_provenance: format!("genus mismatch {a} vs {b}"),
            params: params.clone(),
        });
    }
    let lower = lower_value.value.expect("same genus gives a finite bottleneck value");
    let witness = beam_search_upper(g1, g2, params)?;
    assert!(
        lower <= witness.cost,
        "lower bound {lower} exceeds upper bound {}",
        witness.cost
    );
    debug_assert!(witness
        .sequence
        .replay(g1)
        .map(|h| h.is_isomorphic_to(g2))
        .unwrap_or(false));
    Ok(DistanceReport {
        lower,
        upper: Some(witness.cost),
        witness: Some(SequenceFile {
            start_graph: g1.clone(),
            ops: witness.sequence,
        }),
        lower_provenance,
        upper_provenance: witness.provenance,
        params: params.clone(),
    })
}
