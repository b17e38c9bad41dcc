//! Labeled Reeb graphs: storage, validation, classification, isomorphism.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::label::Label;

/// Opaque vertex identifier, unique within one graph.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(Arc<str>);

impl VertexId {
    pub fn new(s: impl AsRef<str>) -> Self {
        VertexId(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId::new(s)
    }
}

/// Index of the critical point a vertex stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexClass {
    Minimum,
    Maximum,
    JoiningSaddle,
    SplittingSaddle,
}

impl VertexClass {
    pub fn is_leaf(self) -> bool {
        matches!(self, VertexClass::Minimum | VertexClass::Maximum)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub items: Vec<VertexId>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| v.message.clone())
            .collect::<Vec<_>>()
            .join("; ")
    }
}

/// A multigraph with injectively labeled vertices.
///
/// Parallel edges are stored as repeated neighbor entries. The structure
/// itself only enforces unique ids, unique labels, and that edges reference
/// known vertices; the remaining Reeb graph conditions are checked by
/// [`ReebGraph::validate`].
#[derive(Clone, PartialEq, Eq)]
pub struct ReebGraph {
    labels: BTreeMap<VertexId, Label>,
    adj: BTreeMap<VertexId, Vec<VertexId>>,
}

impl ReebGraph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = (VertexId, Label)>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut labels = BTreeMap::new();
        let mut by_label: BTreeMap<Label, VertexId> = BTreeMap::new();
        for (id, label) in vertices {
            if id.as_str().is_empty() {
                return Err(GraphError::EmptyId);
            }
            if labels.contains_key(&id) {
                return Err(GraphError::DuplicateId(id));
            }
            if let Some(first) = by_label.get(&label) {
                return Err(GraphError::DuplicateLabel {
                    label,
                    first: first.clone(),
                    second: id,
                });
            }
            by_label.insert(label.clone(), id.clone());
            labels.insert(id, label);
        }
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> = labels.keys().map(|k| (k.clone(), Vec::new())).collect();
        for (a, b) in edges {
            for x in [&a, &b] {
                if !labels.contains_key(x) {
                    return Err(GraphError::UnknownVertex(x.clone()));
                }
            }
            adj.get_mut(&a).unwrap().push(b.clone());
            adj.get_mut(&b).unwrap().push(a);
        }
        for list in adj.values_mut() {
            list.sort();
        }
        Ok(ReebGraph { labels, adj })
    }

    /// Convenience constructor from string literals, e.g. in tests.
    pub fn from_lists(vertices: &[(&str, &str)], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let vs = vertices
            .iter()
            .map(|(id, l)| Ok((VertexId::new(id), l.parse::<Label>()?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        let es = edges.iter().map(|(a, b)| (VertexId::new(a), VertexId::new(b)));
        ReebGraph::new(vs, es)
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Edge count with multiplicity; a self-loop counts once.
    pub fn edge_count(&self) -> usize {
        self.adj.values().map(Vec::len).sum::<usize>() / 2
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.labels.contains_key(v)
    }

    pub fn label(&self, v: &VertexId) -> Option<&Label> {
        self.labels.get(v)
    }

    pub(crate) fn label_of(&self, v: &VertexId) -> &Label {
        &self.labels[v]
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&VertexId, &Label)> {
        self.labels.iter()
    }

    pub fn ids(&self) -> impl Iterator<Item = &VertexId> {
        self.labels.keys()
    }

    /// Neighbor slots of `v`, sorted, with repetition for parallel edges.
    pub fn neighbors(&self, v: &VertexId) -> &[VertexId] {
        self.adj.get(v).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn degree(&self, v: &VertexId) -> usize {
        self.neighbors(v).len()
    }

    pub fn multiplicity(&self, a: &VertexId, b: &VertexId) -> usize {
        self.neighbors(a).iter().filter(|x| *x == b).count()
    }

    /// Every edge once, as `(lower-labeled, higher-labeled)` endpoints, sorted by labels.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, list) in &self.adj {
            for b in list {
                if a < b {
                    out.push(self.oriented(a, b));
                }
            }
            // a self-loop appears twice in its own list
            let loops = list.iter().filter(|b| *b == a).count() / 2;
            out.extend(std::iter::repeat_n((a.clone(), a.clone()), loops));
        }
        out.sort_by(|x, y| (self.label_of(&x.0), self.label_of(&x.1)).cmp(&(self.label_of(&y.0), self.label_of(&y.1))));
        out
    }

    fn oriented(&self, a: &VertexId, b: &VertexId) -> (VertexId, VertexId) {
        if self.label_of(a) <= self.label_of(b) {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        }
    }

    /// Vertex ids in increasing label order.
    pub fn sorted_by_label(&self) -> Vec<VertexId> {
        let mut ids: Vec<_> = self.labels.keys().cloned().collect();
        ids.sort_by(|a, b| self.labels[a].cmp(&self.labels[b]));
        ids
    }

    pub fn sorted_labels(&self) -> Vec<Label> {
        let mut ls: Vec<_> = self.labels.values().cloned().collect();
        ls.sort();
        ls
    }

    /// Vertex carrying exactly `label`, if any.
    pub fn vertex_with_label(&self, label: &Label) -> Option<&VertexId> {
        self.labels.iter().find(|(_, l)| *l == label).map(|(id, _)| id)
    }

    /// Smallest gap between two distinct labels, if there are at least two vertices.
    pub fn min_label_gap(&self) -> Option<Label> {
        let ls = self.sorted_labels();
        ls.windows(2).map(|w| &w[1] - &w[0]).min()
    }

    /// Whether some vertex other than those in `except` has a label strictly between `a` and `b`.
    pub fn has_label_between(&self, a: &Label, b: &Label, except: &[&VertexId]) -> bool {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        self.labels
            .iter()
            .any(|(id, l)| l > lo && l < hi && !except.contains(&id))
    }

    pub(crate) fn insert_vertex(&mut self, id: VertexId, label: Label) {
        self.adj.insert(id.clone(), Vec::new());
        self.labels.insert(id, label);
    }

    pub(crate) fn remove_vertex(&mut self, id: &VertexId) {
        if let Some(list) = self.adj.remove(id) {
            for n in list {
                if let Some(nl) = self.adj.get_mut(&n) {
                    nl.retain(|x| x != id);
                }
            }
        }
        self.labels.remove(id);
    }

    pub(crate) fn add_edge(&mut self, a: &VertexId, b: &VertexId) {
        let la = self.adj.get_mut(a).expect("known vertex");
        let pos = la.binary_search(b).unwrap_or_else(|p| p);
        la.insert(pos, b.clone());
        let lb = self.adj.get_mut(b).expect("known vertex");
        let pos = lb.binary_search(a).unwrap_or_else(|p| p);
        lb.insert(pos, a.clone());
    }

    /// Removes one copy of the edge; returns false if absent.
    pub(crate) fn remove_edge(&mut self, a: &VertexId, b: &VertexId) -> bool {
        let Some(la) = self.adj.get_mut(a) else {
            return false;
        };
        let Some(pa) = la.iter().position(|x| x == b) else {
            return false;
        };
        la.remove(pa);
        let lb = self.adj.get_mut(b).expect("symmetric adjacency");
        let pb = lb.iter().position(|x| x == a).expect("symmetric adjacency");
        lb.remove(pb);
        true
    }

    pub(crate) fn set_label(&mut self, v: &VertexId, label: Label) {
        *self.labels.get_mut(v).expect("known vertex") = label;
    }

    /// Same graph with every label negated; minima and maxima trade places.
    pub fn mirrored(&self) -> ReebGraph {
        ReebGraph {
            labels: self.labels.iter().map(|(k, v)| (k.clone(), -v)).collect(),
            adj: self.adj.clone(),
        }
    }

    fn is_connected(&self) -> bool {
        let Some(start) = self.labels.keys().next() else {
            return true;
        };
        let mut seen = BTreeSet::new();
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start.clone());
        while let Some(v) = queue.pop_front() {
            for n in self.neighbors(&v) {
                if seen.insert(n.clone()) {
                    queue.push_back(n.clone());
                }
            }
        }
        seen.len() == self.labels.len()
    }

    /// Checks every structural condition of a labeled Reeb graph of a closed
    /// orientable surface. Invalidity is reported, never raised.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.labels.is_empty() {
            violations.push(Violation {
                rule: "non-empty",
                items: vec![],
                message: "graph has no vertices".into(),
            });
        }
        if !self.is_connected() {
            violations.push(Violation {
                rule: "connected",
                items: vec![],
                message: "graph is not connected".into(),
            });
        }
        if !self.labels.len().is_multiple_of(2) {
            violations.push(Violation {
                rule: "even-order",
                items: vec![],
                message: format!("vertex count {} is odd", self.labels.len()),
            });
        }
        for (v, nbrs) in &self.adj {
            if nbrs.contains(v) {
                violations.push(Violation {
                    rule: "no-self-loop",
                    items: vec![v.clone()],
                    message: format!("self-loop at {v}"),
                });
                continue;
            }
            let lv = &self.labels[v];
            match nbrs.len() {
                1 => {}
                3 => {
                    let below = nbrs.iter().any(|n| &self.labels[n] < lv);
                    let above = nbrs.iter().any(|n| &self.labels[n] > lv);
                    if !(below && above) {
                        violations.push(Violation {
                            rule: "saddle-order",
                            items: vec![v.clone()],
                            message: format!("degree-3 vertex {v} needs neighbors both below and above its label {lv}"),
                        });
                    }
                }
                d => violations.push(Violation {
                    rule: "degree",
                    items: vec![v.clone()],
                    message: format!("vertex {v} has degree {d}; degree {d} forbidden"),
                }),
            }
        }
        ValidationReport {
            ok: violations.is_empty(),
            violations,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.validate().ok
    }

    pub(crate) fn require_valid(&self) -> Result<(), GraphError> {
        let report = self.validate();
        if report.ok {
            Ok(())
        } else {
            Err(GraphError::Invalid(report.summary()))
        }
    }

    /// Cycle rank `|E| - |V| + 1`, which equals the genus of the surface.
    pub fn genus(&self) -> Result<usize, GraphError> {
        self.require_valid()?;
        Ok(self.cycle_rank())
    }

    pub(crate) fn cycle_rank(&self) -> usize {
        (self.edge_count() + 1).saturating_sub(self.vertex_count())
    }

    pub fn classify(&self, v: &VertexId) -> Result<VertexClass, GraphError> {
        let lv = self.labels.get(v).ok_or_else(|| GraphError::UnknownVertex(v.clone()))?;
        let nbrs = self.neighbors(v);
        match nbrs.len() {
            1 => Ok(if lv < &self.labels[&nbrs[0]] {
                VertexClass::Minimum
            } else {
                VertexClass::Maximum
            }),
            3 => {
                let above = nbrs.iter().filter(|n| &self.labels[*n] > lv).count();
                Ok(if above == 2 {
                    VertexClass::SplittingSaddle
                } else {
                    VertexClass::JoiningSaddle
                })
            }
            d => Err(GraphError::Invalid(format!("vertex {v} has degree {d}"))),
        }
    }

    pub(crate) fn class_of(&self, v: &VertexId) -> VertexClass {
        self.classify(v).expect("valid graph")
    }

    pub fn minima(&self) -> Vec<VertexId> {
        self.ids()
            .filter(|v| self.degree(v) == 1 && self.classify(v).ok() == Some(VertexClass::Minimum))
            .cloned()
            .collect()
    }

    pub fn maxima(&self) -> Vec<VertexId> {
        self.ids()
            .filter(|v| self.degree(v) == 1 && self.classify(v).ok() == Some(VertexClass::Maximum))
            .cloned()
            .collect()
    }

    /// Exactly one minimum and one maximum.
    pub fn is_minimal(&self) -> Result<bool, GraphError> {
        self.require_valid()?;
        Ok(self.minima().len() == 1 && self.maxima().len() == 1)
    }

    /// Minimal, and collapsing parallel edges leaves a tree.
    pub fn is_canonical(&self) -> Result<bool, GraphError> {
        if !self.is_minimal()? {
            return Ok(false);
        }
        Ok(self.simple_cycle_rank() == 0)
    }

    /// Cycle rank of the simple graph obtained by collapsing parallel edges.
    pub(crate) fn simple_cycle_rank(&self) -> usize {
        let simple_edges: usize = self
            .adj
            .iter()
            .map(|(a, list)| {
                let mut distinct: Vec<_> = list.iter().filter(|b| a < *b).collect();
                distinct.dedup();
                distinct.len()
            })
            .sum();
        (simple_edges + 1).saturating_sub(self.vertex_count())
    }

    /// The label-preserving bijection onto `other`, if it is an isomorphism.
    /// Both graphs must be valid.
    pub fn are_isomorphic(&self, other: &ReebGraph) -> Result<Option<BTreeMap<VertexId, VertexId>>, GraphError> {
        self.require_valid()?;
        other.require_valid()?;
        Ok(self.label_isomorphism(other))
    }

    /// Unchecked variant of [`ReebGraph::are_isomorphic`].
    pub fn label_isomorphism(&self, other: &ReebGraph) -> Option<BTreeMap<VertexId, VertexId>> {
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count() {
            return None;
        }
        let theirs: BTreeMap<&Label, &VertexId> = other.labels.iter().map(|(k, v)| (v, k)).collect();
        let mut map = BTreeMap::new();
        for (id, l) in &self.labels {
            map.insert(id.clone(), (*theirs.get(l)?).clone());
        }
        for (a, list) in &self.adj {
            let mut image: Vec<&VertexId> = list.iter().map(|n| &map[n]).collect();
            image.sort();
            let target: Vec<&VertexId> = other.neighbors(&map[a]).iter().collect();
            if image != target {
                return None;
            }
        }
        Some(map)
    }

    pub fn is_isomorphic_to(&self, other: &ReebGraph) -> bool {
        self.label_isomorphism(other).is_some()
    }

    /// A key that identifies the isomorphism class: labels are injective, so
    /// the sorted label vector plus the edge multiset in label coordinates
    /// determines the graph up to renaming.
    pub fn iso_key(&self) -> IsoKey {
        let mut edges: Vec<(Label, Label)> = self
            .edges()
            .into_iter()
            .map(|(a, b)| (self.labels[&a].clone(), self.labels[&b].clone()))
            .collect();
        edges.sort();
        IsoKey {
            labels: self.sorted_labels(),
            edges,
        }
    }

    /// Fresh id derived from `base` that is not used in this graph.
    pub fn fresh_id(&self, base: &str) -> VertexId {
        let candidate = VertexId::new(base);
        if !self.contains(&candidate) && !base.is_empty() {
            return candidate;
        }
        (1..)
            .map(|i| VertexId::new(format!("{base}~{i}")))
            .find(|c| !self.contains(c))
            .unwrap()
    }

    /// `N` distinct fresh ids derived from `base`.
    pub fn fresh_ids<const N: usize>(&self, base: &str) -> [VertexId; N] {
        let mut taken: Vec<VertexId> = Vec::with_capacity(N);
        let mut candidates = std::iter::once(VertexId::new(base))
            .chain((1..).map(|i| VertexId::new(format!("{base}~{i}"))))
            .filter(|c| !c.as_str().is_empty() && !self.contains(c));
        while taken.len() < N {
            taken.push(candidates.next().unwrap());
        }
        taken.try_into().unwrap()
    }

    /// Shortest path between two vertices (BFS over distinct neighbors),
    /// optionally avoiding a set of vertices. Ties are broken by id order.
    pub fn shortest_path(&self, from: &VertexId, to: &VertexId, avoid: &BTreeSet<VertexId>) -> Option<Vec<VertexId>> {
        let mut prev: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut seen = BTreeSet::from([from.clone()]);
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(v) = queue.pop_front() {
            if &v == to {
                let mut path = vec![v.clone()];
                let mut cur = v;
                while let Some(p) = prev.get(&cur) {
                    path.push(p.clone());
                    cur = p.clone();
                }
                path.reverse();
                return Some(path);
            }
            let mut nbrs: Vec<_> = self.neighbors(&v).to_vec();
            nbrs.dedup();
            for n in nbrs {
                if avoid.contains(&n) && &n != to {
                    continue;
                }
                if seen.insert(n.clone()) {
                    prev.insert(n.clone(), v.clone());
                    queue.push_back(n);
                }
            }
        }
        None
    }

    /// Number of minima and maxima, `(p, q)`.
    pub fn leaf_counts(&self) -> (usize, usize) {
        (self.minima().len(), self.maxima().len())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IsoKey {
    pub labels: Vec<Label>,
    pub edges: Vec<(Label, Label)>,
}

impl fmt::Debug for ReebGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vs: Vec<String> = self
            .sorted_by_label()
            .iter()
            .map(|v| format!("{v}({})", self.labels[v]))
            .collect();
        let es: Vec<String> = self.edges().iter().map(|(a, b)| format!("{a}-{b}")).collect();
        write!(f, "ReebGraph {{ V: [{}], E: [{}] }}", vs.join(", "), es.join(", "))
    }
}
