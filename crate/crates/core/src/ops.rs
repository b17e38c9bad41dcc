//! The six elementary deformations, their costs and inverses.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::EditError;
use crate::graph::{ReebGraph, VertexClass, VertexId};
use crate::label::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpKind {
    B,
    D,
    R,
    K1,
    K2,
    K3,
}

impl OpKind {
    pub const ALL: [OpKind; 6] = [OpKind::B, OpKind::D, OpKind::R, OpKind::K1, OpKind::K2, OpKind::K3];
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Which way the two saddles of a K1 move sit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Two splitting saddles, `u1` below `u2`.
    Up,
    /// Two joining saddles, `u1` above `u2`.
    Down,
}

impl Orientation {
    pub fn flipped(self) -> Self {
        match self {
            Orientation::Up => Orientation::Down,
            Orientation::Down => Orientation::Up,
        }
    }
}

/// One elementary deformation.
///
/// In `Birth`, `u1` is the new degree-3 vertex and `u2` the new leaf. K-ops
/// carry the ids of the vertices whose edges move where the pair `(u1, u2)`
/// alone leaves a choice: `v2` for K1, `v1` and `v3` for K2.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum EditOp {
    #[serde(rename = "B")]
    Birth {
        edge: (VertexId, VertexId),
        new_ids: (VertexId, VertexId),
        new_labels: (Label, Label),
    },
    #[serde(rename = "D")]
    Death { u1: VertexId, u2: VertexId },
    /// Only the vertices whose label changes need to be listed.
    #[serde(rename = "R")]
    Relabel { new_labels: BTreeMap<VertexId, Label> },
    #[serde(rename = "K1")]
    K1 {
        u1: VertexId,
        u2: VertexId,
        new_labels: (Label, Label),
        orientation: Orientation,
        v2: VertexId,
    },
    #[serde(rename = "K2")]
    K2 {
        u1: VertexId,
        u2: VertexId,
        new_labels: (Label, Label),
        v1: VertexId,
        v3: VertexId,
    },
    #[serde(rename = "K3")]
    K3 {
        u1: VertexId,
        u2: VertexId,
        new_labels: (Label, Label),
    },
}

fn label<'a>(g: &'a ReebGraph, v: &VertexId) -> Result<&'a Label, EditError> {
    g.label(v).ok_or_else(|| EditError::UnknownVertex(v.clone()))
}

fn ensure(cond: bool, rule: &'static str, details: impl FnOnce() -> String) -> Result<(), EditError> {
    if cond {
        Ok(())
    } else {
        Err(EditError::pre(rule, details()))
    }
}

/// Neighbor slots of `v` other than one copy of `skip`, split into below/above.
fn split_slots(g: &ReebGraph, v: &VertexId, skip: Option<&VertexId>) -> (Vec<VertexId>, Vec<VertexId>) {
    let lv = g.label_of(v);
    let mut rest: Vec<VertexId> = g.neighbors(v).to_vec();
    if let Some(s) = skip {
        if let Some(p) = rest.iter().position(|x| x == s) {
            rest.remove(p);
        }
    }
    rest.into_iter().partition(|n| g.label_of(n) < lv)
}

fn check_collision(g: &ReebGraph, l: &Label, except: &[&VertexId]) -> Result<(), EditError> {
    match g.vertex_with_label(l) {
        Some(holder) if !except.contains(&holder) => Err(EditError::LabelCollision {
            label: l.clone(),
            holder: holder.clone(),
        }),
        _ => Ok(()),
    }
}

impl EditOp {
    pub fn kind(&self) -> OpKind {
        match self {
            EditOp::Birth { .. } => OpKind::B,
            EditOp::Death { .. } => OpKind::D,
            EditOp::Relabel { .. } => OpKind::R,
            EditOp::K1 { .. } => OpKind::K1,
            EditOp::K2 { .. } => OpKind::K2,
            EditOp::K3 { .. } => OpKind::K3,
        }
    }

    pub fn is_death(&self) -> bool {
        matches!(self, EditOp::Death { .. })
    }

    /// Applies the deformation, checking every precondition of its clause.
    pub fn apply(&self, g: &ReebGraph) -> Result<ReebGraph, EditError> {
        g.require_valid()?;
        let out = match self {
            EditOp::Birth {
                edge,
                new_ids,
                new_labels,
            } => apply_birth(g, edge, new_ids, new_labels)?,
            EditOp::Death { u1, u2 } => apply_death(g, u1, u2)?,
            EditOp::Relabel { new_labels } => apply_relabel(g, new_labels)?,
            EditOp::K1 {
                u1,
                u2,
                new_labels,
                orientation,
                v2,
            } => match orientation {
                Orientation::Up => apply_k1_up(g, u1, u2, new_labels, v2)?,
                Orientation::Down => {
                    let nl = (-&new_labels.0, -&new_labels.1);
                    apply_k1_up(&g.mirrored(), u1, u2, &nl, v2)?.mirrored()
                }
            },
            EditOp::K2 {
                u1,
                u2,
                new_labels,
                v1,
                v3,
            } => apply_k2(g, u1, u2, new_labels, v1, v3)?,
            EditOp::K3 { u1, u2, new_labels } => apply_k3(g, u1, u2, new_labels)?,
        };
        let report = out.validate();
        if !report.ok {
            return Err(EditError::pre("result-valid", report.summary()));
        }
        Ok(out)
    }

    /// Cost of the deformation when applied to `g`.
    pub fn cost(&self, g: &ReebGraph) -> Result<Label, EditError> {
        Ok(match self {
            EditOp::Birth { new_labels, .. } => new_labels.0.abs_diff(&new_labels.1).half(),
            EditOp::Death { u1, u2 } => label(g, u1)?.abs_diff(label(g, u2)?).half(),
            EditOp::Relabel { new_labels } => {
                let mut best = Label::zero();
                for (v, l) in new_labels {
                    let d = label(g, v)?.abs_diff(l);
                    if d > best {
                        best = d;
                    }
                }
                best
            }
            EditOp::K1 { u1, u2, new_labels, .. }
            | EditOp::K2 { u1, u2, new_labels, .. }
            | EditOp::K3 { u1, u2, new_labels } => {
                let a = label(g, u1)?.abs_diff(&new_labels.0);
                let b = label(g, u2)?.abs_diff(&new_labels.1);
                a.max(b)
            }
        })
    }

    /// Applies and returns the result together with the cost.
    pub fn apply_with_cost(&self, g: &ReebGraph) -> Result<(ReebGraph, Label), EditError> {
        let out = self.apply(g)?;
        let c = self.cost(g)?;
        Ok((out, c))
    }

    /// Inverse deformation, checked against the `before`/`after` pair.
    pub fn inverse(&self, before: &ReebGraph, after: &ReebGraph) -> Result<EditOp, EditError> {
        let replayed = self.apply(before)?;
        if replayed.label_isomorphism(after).is_none() {
            return Err(EditError::Inconsistent(
                "after is not the result of applying the operation to before".into(),
            ));
        }
        self.inverse_from(before)
    }

    /// Inverse computed from the graph the operation was applied to.
    pub fn inverse_from(&self, before: &ReebGraph) -> Result<EditOp, EditError> {
        Ok(match self {
            EditOp::Birth { new_ids, .. } => EditOp::Death {
                u1: new_ids.0.clone(),
                u2: new_ids.1.clone(),
            },
            EditOp::Death { u1, u2 } => {
                let (below, above) = split_slots(before, u1, Some(u2));
                let (Some(v1), Some(v2)) = (below.first(), above.first()) else {
                    return Err(EditError::Inconsistent(format!("{u1} is not a deletable saddle")));
                };
                EditOp::Birth {
                    edge: (v1.clone(), v2.clone()),
                    new_ids: (u1.clone(), u2.clone()),
                    new_labels: (label(before, u1)?.clone(), label(before, u2)?.clone()),
                }
            }
            EditOp::Relabel { new_labels } => EditOp::Relabel {
                new_labels: new_labels
                    .keys()
                    .map(|v| Ok((v.clone(), label(before, v)?.clone())))
                    .collect::<Result<_, EditError>>()?,
            },
            EditOp::K1 {
                u1,
                u2,
                orientation,
                v2,
                ..
            } => EditOp::K1 {
                u1: u2.clone(),
                u2: u1.clone(),
                new_labels: (label(before, u2)?.clone(), label(before, u1)?.clone()),
                orientation: *orientation,
                v2: v2.clone(),
            },
            EditOp::K2 { u1, u2, .. } => EditOp::K3 {
                u1: u1.clone(),
                u2: u2.clone(),
                new_labels: (label(before, u1)?.clone(), label(before, u2)?.clone()),
            },
            EditOp::K3 { u1, u2, .. } => {
                let (below_u2, _) = split_slots(before, u2, None);
                let (_, above_u1) = split_slots(before, u1, None);
                let (Some(v1), Some(v3)) = (below_u2.first(), above_u1.first()) else {
                    return Err(EditError::Inconsistent(format!("{u1}, {u2} do not form a K3 pair")));
                };
                EditOp::K2 {
                    u1: u1.clone(),
                    u2: u2.clone(),
                    new_labels: (label(before, u1)?.clone(), label(before, u2)?.clone()),
                    v1: v1.clone(),
                    v3: v3.clone(),
                }
            }
        })
    }

    /// The same deformation expressed on the mirrored graph (labels negated).
    pub fn mirrored(&self) -> EditOp {
        let neg = |p: &(Label, Label)| (-&p.0, -&p.1);
        match self {
            EditOp::Birth {
                edge,
                new_ids,
                new_labels,
            } => EditOp::Birth {
                edge: (edge.1.clone(), edge.0.clone()),
                new_ids: new_ids.clone(),
                new_labels: neg(new_labels),
            },
            EditOp::Death { .. } => self.clone(),
            EditOp::Relabel { new_labels } => EditOp::Relabel {
                new_labels: new_labels.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            },
            EditOp::K1 {
                u1,
                u2,
                new_labels,
                orientation,
                v2,
            } => EditOp::K1 {
                u1: u1.clone(),
                u2: u2.clone(),
                new_labels: neg(new_labels),
                orientation: orientation.flipped(),
                v2: v2.clone(),
            },
            EditOp::K2 {
                u1,
                u2,
                new_labels,
                v1,
                v3,
            } => EditOp::K2 {
                u1: u2.clone(),
                u2: u1.clone(),
                new_labels: (-&new_labels.1, -&new_labels.0),
                v1: v3.clone(),
                v3: v1.clone(),
            },
            EditOp::K3 { u1, u2, new_labels } => EditOp::K3 {
                u1: u2.clone(),
                u2: u1.clone(),
                new_labels: (-&new_labels.1, -&new_labels.0),
            },
        }
    }

    /// Renames every vertex id through `f`.
    pub fn map_ids(&self, f: impl Fn(&VertexId) -> VertexId) -> EditOp {
        match self {
            EditOp::Birth {
                edge,
                new_ids,
                new_labels,
            } => EditOp::Birth {
                edge: (f(&edge.0), f(&edge.1)),
                new_ids: (f(&new_ids.0), f(&new_ids.1)),
                new_labels: new_labels.clone(),
            },
            EditOp::Death { u1, u2 } => EditOp::Death { u1: f(u1), u2: f(u2) },
            EditOp::Relabel { new_labels } => EditOp::Relabel {
                new_labels: new_labels.iter().map(|(k, v)| (f(k), v.clone())).collect(),
            },
            EditOp::K1 {
                u1,
                u2,
                new_labels,
                orientation,
                v2,
            } => EditOp::K1 {
                u1: f(u1),
                u2: f(u2),
                new_labels: new_labels.clone(),
                orientation: *orientation,
                v2: f(v2),
            },
            EditOp::K2 {
                u1,
                u2,
                new_labels,
                v1,
                v3,
            } => EditOp::K2 {
                u1: f(u1),
                u2: f(u2),
                new_labels: new_labels.clone(),
                v1: f(v1),
                v3: f(v3),
            },
            EditOp::K3 { u1, u2, new_labels } => EditOp::K3 {
                u1: f(u1),
                u2: f(u2),
                new_labels: new_labels.clone(),
            },
        }
    }
}

fn apply_birth(
    g: &ReebGraph,
    edge: &(VertexId, VertexId),
    new_ids: &(VertexId, VertexId),
    new_labels: &(Label, Label),
) -> Result<ReebGraph, EditError> {
    let (a, b) = edge;
    let (la, lb) = (label(g, a)?, label(g, b)?);
    let (v1, v2, l1, l2) = if la < lb { (a, b, la, lb) } else { (b, a, lb, la) };
    ensure(g.multiplicity(v1, v2) > 0, "B-edge", || format!("no edge {v1}-{v2}"))?;
    let (u1, u2) = new_ids;
    for u in [u1, u2] {
        if u.as_str().is_empty() {
            return Err(EditError::pre("B-ids", "new vertex ids must be non-empty"));
        }
        if g.contains(u) {
            return Err(EditError::IdInUse(u.clone()));
        }
    }
    ensure(u1 != u2, "B-ids", || "new vertex ids must differ".into())?;
    let (lu1, lu2) = new_labels;
    ensure(lu1 != lu2, "B-labels", || "new labels must differ".into())?;
    for l in [lu1, lu2] {
        check_collision(g, l, &[])?;
        ensure(l1 < l && l < l2, "B-order", || {
            format!("new label {l} must lie strictly between {l1} and {l2}")
        })?;
    }
    ensure(!g.has_label_between(lu1, lu2, &[]), "B-gap", || {
        format!("some label lies strictly between {lu1} and {lu2}")
    })?;
    let mut out = g.clone();
    out.remove_edge(v1, v2);
    out.insert_vertex(u1.clone(), lu1.clone());
    out.insert_vertex(u2.clone(), lu2.clone());
    out.add_edge(v1, u1);
    out.add_edge(u1, u2);
    out.add_edge(u1, v2);
    Ok(out)
}

fn apply_death(g: &ReebGraph, u1: &VertexId, u2: &VertexId) -> Result<ReebGraph, EditError> {
    let (l1, l2) = (label(g, u1)?, label(g, u2)?);
    ensure(g.degree(u1) == 3, "D-degree", || format!("{u1} must have degree 3"))?;
    ensure(g.degree(u2) == 1, "D-degree", || format!("{u2} must have degree 1"))?;
    ensure(g.multiplicity(u1, u2) == 1, "D-edge", || {
        format!("{u1} and {u2} must be adjacent")
    })?;
    let (below, above) = split_slots(g, u1, Some(u2));
    ensure(below.len() == 1 && above.len() == 1, "D-shape", || {
        format!("the other neighbors of {u1} must lie one below and one above it")
    })?;
    let (v1, v2) = (&below[0], &above[0]);
    let (lo, hi) = (g.label_of(v1), g.label_of(v2));
    ensure(lo < l2 && l2 < hi, "D-order", || {
        format!("label of {u2} must lie strictly between {lo} and {hi}")
    })?;
    ensure(!g.has_label_between(l1, l2, &[]), "D-gap", || {
        format!("some label lies strictly between {l1} and {l2}")
    })?;
    let mut out = g.clone();
    out.remove_vertex(u2);
    out.remove_vertex(u1);
    out.add_edge(v1, v2);
    Ok(out)
}

fn apply_relabel(g: &ReebGraph, new_labels: &BTreeMap<VertexId, Label>) -> Result<ReebGraph, EditError> {
    for v in new_labels.keys() {
        label(g, v)?;
    }
    let before = g.sorted_by_label();
    let mut out = g.clone();
    for (v, l) in new_labels {
        out.set_label(v, l.clone());
    }
    let mut seen: BTreeMap<&Label, &VertexId> = BTreeMap::new();
    for v in out.ids() {
        let l = out.label_of(v);
        if let Some(holder) = seen.insert(l, v) {
            return Err(EditError::LabelCollision {
                label: l.clone(),
                holder: holder.clone(),
            });
        }
    }
    let after = out.sorted_by_label();
    let moved: Vec<usize> = (0..before.len()).filter(|&i| before[i] != after[i]).collect();
    match moved.as_slice() {
        [] => {}
        [i, j] if *j == i + 1 && before[*i] == after[*j] && before[*j] == after[*i] => {
            let (a, b) = (&before[*i], &before[*j]);
            ensure(g.multiplicity(a, b) == 0, "R-swap", || {
                format!("swapped vertices {a} and {b} must not be adjacent")
            })?;
        }
        _ => {
            return Err(EditError::pre(
                "R-order",
                "relabeling must keep the vertex order up to one swap of two order-adjacent vertices",
            ))
        }
    }
    Ok(out)
}

/// Common checks on the pair `u1 - u2` of every K clause.
fn k_pair<'a>(
    g: &'a ReebGraph,
    rule: &'static str,
    u1: &VertexId,
    u2: &VertexId,
) -> Result<(&'a Label, &'a Label), EditError> {
    let (l1, l2) = (label(g, u1)?, label(g, u2)?);
    ensure(u1 != u2, rule, || "u1 and u2 must differ".into())?;
    ensure(g.degree(u1) == 3 && g.degree(u2) == 3, rule, || {
        format!("{u1} and {u2} must both have degree 3")
    })?;
    ensure(g.multiplicity(u1, u2) == 1, rule, || {
        format!("{u1} and {u2} must be joined by exactly one edge")
    })?;
    ensure(!g.has_label_between(l1, l2, &[]), rule, || {
        format!("some label lies strictly between {l1} and {l2}")
    })?;
    Ok((l1, l2))
}

/// New labels must not collide and must leave an empty gap.
fn k_new_labels(
    g: &ReebGraph,
    rule: &'static str,
    u1: &VertexId,
    u2: &VertexId,
    nl: &(Label, Label),
) -> Result<(), EditError> {
    check_collision(g, &nl.0, &[u1, u2])?;
    check_collision(g, &nl.1, &[u1, u2])?;
    ensure(!g.has_label_between(&nl.0, &nl.1, &[u1, u2]), rule, || {
        format!("some label lies strictly between the new labels {} and {}", nl.0, nl.1)
    })
}

fn bounds_ok(lower: &[&Label], mid_lo: &Label, mid_hi: &Label, upper: &[&Label]) -> bool {
    mid_lo < mid_hi && lower.iter().all(|l| *l < mid_lo) && upper.iter().all(|l| *l > mid_hi)
}

fn apply_k1_up(
    g: &ReebGraph,
    u1: &VertexId,
    u2: &VertexId,
    nl: &(Label, Label),
    v2: &VertexId,
) -> Result<ReebGraph, EditError> {
    let (l1, l2) = k_pair(g, "K1", u1, u2)?;
    ensure(l1 < l2, "K1-order", || format!("{u1} must lie below {u2}"))?;
    let (below1, above1) = split_slots(g, u1, Some(u2));
    ensure(below1.len() == 1 && above1.len() == 1, "K1-shape", || {
        format!("{u1} must be a splitting saddle below {u2}")
    })?;
    let (below2, above2) = split_slots(g, u2, Some(u1));
    ensure(below2.is_empty() && above2.len() == 2, "K1-shape", || {
        format!("{u2} must be a splitting saddle above {u1}")
    })?;
    let v1 = &below1[0];
    let v4 = &above1[0];
    let pos = above2
        .iter()
        .position(|x| x == v2)
        .ok_or_else(|| EditError::pre("K1-shape", format!("{v2} is not an upper neighbor of {u2}")))?;
    let v3 = &above2[1 - pos];
    let (new1, new2) = (&nl.0, &nl.1);
    ensure(
        bounds_ok(
            &[g.label_of(v1)],
            new2,
            new1,
            &[g.label_of(v2), g.label_of(v3), g.label_of(v4)],
        ),
        "K1-labels",
        || format!("new labels must satisfy l(v1) < l'({u2}) < l'({u1}) < l(v2), l(v3), l(v4)"),
    )?;
    k_new_labels(g, "K1-gap", u1, u2, nl)?;
    let mut out = g.clone();
    out.remove_edge(v1, u1);
    out.remove_edge(u2, v2);
    out.add_edge(v1, u2);
    out.add_edge(u1, v2);
    out.set_label(u1, new1.clone());
    out.set_label(u2, new2.clone());
    Ok(out)
}

fn apply_k2(
    g: &ReebGraph,
    u1: &VertexId,
    u2: &VertexId,
    nl: &(Label, Label),
    v1: &VertexId,
    v3: &VertexId,
) -> Result<ReebGraph, EditError> {
    let (l1, l2) = k_pair(g, "K2", u1, u2)?;
    ensure(l1 < l2, "K2-order", || format!("{u1} must lie below {u2}"))?;
    ensure(g.class_of(u1) == VertexClass::JoiningSaddle, "K2-shape", || {
        format!("{u1} must be a joining saddle")
    })?;
    ensure(g.class_of(u2) == VertexClass::SplittingSaddle, "K2-shape", || {
        format!("{u2} must be a splitting saddle")
    })?;
    let (below1, _) = split_slots(g, u1, Some(u2));
    let (_, above2) = split_slots(g, u2, Some(u1));
    ensure(below1.len() == 2 && above2.len() == 2, "K2-shape", || {
        format!("{u1} needs two lower and {u2} two upper neighbors")
    })?;
    let p1 = below1
        .iter()
        .position(|x| x == v1)
        .ok_or_else(|| EditError::pre("K2-shape", format!("{v1} is not a lower neighbor of {u1}")))?;
    let p3 = above2
        .iter()
        .position(|x| x == v3)
        .ok_or_else(|| EditError::pre("K2-shape", format!("{v3} is not an upper neighbor of {u2}")))?;
    let v2 = &below1[1 - p1];
    let v4 = &above2[1 - p3];
    ensure(
        bounds_ok(
            &[g.label_of(v1), g.label_of(v2)],
            &nl.1,
            &nl.0,
            &[g.label_of(v3), g.label_of(v4)],
        ),
        "K2-labels",
        || format!("new labels must satisfy l(v1), l(v2) < l'({u2}) < l'({u1}) < l(v3), l(v4)"),
    )?;
    k_new_labels(g, "K2-gap", u1, u2, nl)?;
    let mut out = g.clone();
    out.remove_edge(v1, u1);
    out.remove_edge(u2, v3);
    out.add_edge(v1, u2);
    out.add_edge(u1, v3);
    out.set_label(u1, nl.0.clone());
    out.set_label(u2, nl.1.clone());
    Ok(out)
}

fn apply_k3(g: &ReebGraph, u1: &VertexId, u2: &VertexId, nl: &(Label, Label)) -> Result<ReebGraph, EditError> {
    let (l1, l2) = k_pair(g, "K3", u1, u2)?;
    ensure(l2 < l1, "K3-order", || format!("{u2} must lie below {u1}"))?;
    let (below2, above2) = split_slots(g, u2, Some(u1));
    ensure(below2.len() == 1 && above2.len() == 1, "K3-shape", || {
        format!("{u2} must be a splitting saddle below {u1}")
    })?;
    let (below1, above1) = split_slots(g, u1, Some(u2));
    ensure(below1.len() == 1 && above1.len() == 1, "K3-shape", || {
        format!("{u1} must be a joining saddle above {u2}")
    })?;
    let (v1, v4) = (&below2[0], &above2[0]);
    let (v2, v3) = (&below1[0], &above1[0]);
    ensure(
        bounds_ok(
            &[g.label_of(v1), g.label_of(v2)],
            &nl.0,
            &nl.1,
            &[g.label_of(v3), g.label_of(v4)],
        ),
        "K3-labels",
        || format!("new labels must satisfy l(v1), l(v2) < l'({u1}) < l'({u2}) < l(v3), l(v4)"),
    )?;
    k_new_labels(g, "K3-gap", u1, u2, nl)?;
    let mut out = g.clone();
    out.remove_edge(v1, u2);
    out.remove_edge(u1, v3);
    out.add_edge(v1, u1);
    out.add_edge(u2, v3);
    out.set_label(u1, nl.0.clone());
    out.set_label(u2, nl.1.clone());
    Ok(out)
}

/// An ordered list of deformations.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DeformationSequence {
    pub ops: Vec<EditOp>,
}

impl DeformationSequence {
    pub fn new(ops: Vec<EditOp>) -> Self {
        DeformationSequence { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: EditOp) {
        self.ops.push(op);
    }

    pub fn extend(&mut self, other: DeformationSequence) {
        self.ops.extend(other.ops);
    }

    /// Final graph; fails with the index of the first inapplicable op.
    pub fn replay(&self, start: &ReebGraph) -> Result<ReebGraph, EditError> {
        let mut g = start.clone();
        for (index, op) in self.ops.iter().enumerate() {
            g = op.apply(&g).map_err(|e| step(index, e))?;
        }
        Ok(g)
    }

    /// Sum of per-op costs along the replay.
    pub fn total_cost(&self, start: &ReebGraph) -> Result<Label, EditError> {
        Ok(self.replay_with_cost(start)?.1)
    }

    pub fn replay_with_cost(&self, start: &ReebGraph) -> Result<(ReebGraph, Label), EditError> {
        let mut g = start.clone();
        let mut total = Label::zero();
        for (index, op) in self.ops.iter().enumerate() {
            let (next, c) = op.apply_with_cost(&g).map_err(|e| step(index, e))?;
            total = total + c;
            g = next;
        }
        Ok((g, total))
    }

    /// Every graph along the replay, starting with `start`.
    pub fn trace(&self, start: &ReebGraph) -> Result<Vec<ReebGraph>, EditError> {
        let mut out = vec![start.clone()];
        for (index, op) in self.ops.iter().enumerate() {
            let next = op.apply(out.last().unwrap()).map_err(|e| step(index, e))?;
            out.push(next);
        }
        Ok(out)
    }

    /// Reversed list of inverses; takes the start graph of this sequence.
    pub fn inverse(&self, start: &ReebGraph) -> Result<DeformationSequence, EditError> {
        let mut g = start.clone();
        let mut inv = Vec::with_capacity(self.ops.len());
        for (index, op) in self.ops.iter().enumerate() {
            inv.push(op.inverse_from(&g).map_err(|e| step(index, e))?);
            g = op.apply(&g).map_err(|e| step(index, e))?;
        }
        inv.reverse();
        Ok(DeformationSequence { ops: inv })
    }

    pub fn mirrored(&self) -> DeformationSequence {
        DeformationSequence {
            ops: self.ops.iter().map(EditOp::mirrored).collect(),
        }
    }

    pub fn map_ids(&self, f: impl Fn(&VertexId) -> VertexId) -> DeformationSequence {
        DeformationSequence {
            ops: self.ops.iter().map(|op| op.map_ids(&f)).collect(),
        }
    }
}

fn step(index: usize, e: EditError) -> EditError {
    match e {
        EditError::Step { .. } => e,
        other => EditError::Step {
            index,
            source: Box::new(other),
        },
    }
}

/// A start graph with a replayable list of operations.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub start_graph: ReebGraph,
    pub ops: DeformationSequence,
}
