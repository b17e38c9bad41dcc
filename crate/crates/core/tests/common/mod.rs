//! Brute-force reference implementations shared by the integration tests.

#![allow(dead_code)]

use reeb_edit::random::random_graph;
use reeb_edit::{Label, PersistenceDiagram, ReebGraph};

pub fn sample(genus: usize, leaf_pairs: usize, seed: u64) -> ReebGraph {
    random_graph(genus, leaf_pairs, &Label::zero(), &Label::from_int(100), seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Cell {
    Apex,
    Vertex,
    Edge,
    ConeEdge,
    ConeTriangle,
}

/// Extended diagram computed from the cone over the graph: the sublevel
/// filtration of the graph followed by the cone over superlevel sets, reduced
/// over Z/2.
pub fn cone_diagram(g: &ReebGraph) -> PersistenceDiagram {
    let ids: Vec<_> = g.sorted_by_label();
    let pos = |v: &reeb_edit::VertexId| ids.iter().position(|x| x == v).unwrap();
    let f: Vec<Label> = ids.iter().map(|v| g.label(v).unwrap().clone()).collect();
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|(a, b)| (pos(a), pos(b))).collect();

    // (cell, value, boundary in terms of keys resolved below)
    let mut cells: Vec<(Cell, Label, Vec<usize>)> = vec![(Cell::Apex, Label::zero(), vec![])];
    let mut vertex_cell = vec![0; ids.len()];
    let mut edge_cell = vec![0; edges.len()];
    for v in 0..ids.len() {
        vertex_cell[v] = cells.len();
        cells.push((Cell::Vertex, f[v].clone(), vec![]));
        for (k, &(a, b)) in edges.iter().enumerate() {
            if b == v {
                edge_cell[k] = cells.len();
                cells.push((Cell::Edge, f[v].clone(), vec![vertex_cell[a], vertex_cell[b]]));
            }
        }
    }
    let mut cone_edge = vec![0; ids.len()];
    for v in (0..ids.len()).rev() {
        cone_edge[v] = cells.len();
        cells.push((Cell::ConeEdge, f[v].clone(), vec![0, vertex_cell[v]]));
        for (k, &(a, b)) in edges.iter().enumerate() {
            if a == v {
                cells.push((
                    Cell::ConeTriangle,
                    f[v].clone(),
                    vec![edge_cell[k], cone_edge[a], cone_edge[b]],
                ));
            }
        }
    }

    let n = cells.len();
    let mut columns: Vec<Vec<usize>> = cells
        .iter()
        .map(|(_, _, b)| {
            let mut c = b.clone();
            c.sort_unstable();
            c
        })
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut pairs = Vec::new();
    for j in 0..n {
        while let Some(&low) = columns[j].last() {
            match owner[low] {
                Some(k) => {
                    let other = columns[k].clone();
                    columns[j] = symmetric_difference(&columns[j], &other);
                }
                None => {
                    owner[low] = Some(j);
                    pairs.push((low, j));
                    break;
                }
            }
        }
    }

    let mut d = PersistenceDiagram {
        ord0: vec![],
        rel_ord0_neg: vec![],
        ess0: (Label::zero(), Label::zero()),
        ess1: vec![],
    };
    let mut paired = vec![false; n];
    for (b, e) in pairs {
        paired[b] = true;
        paired[e] = true;
        let (cb, vb) = (cells[b].0, cells[b].1.clone());
        let (ce, ve) = (cells[e].0, cells[e].1.clone());
        match (cb, ce) {
            (Cell::Vertex, Cell::Edge) if vb != ve => d.ord0.push((vb, ve)),
            (Cell::Vertex, Cell::ConeEdge) => d.ess0 = (vb, ve),
            (Cell::ConeEdge, Cell::ConeTriangle) if vb != ve => d.rel_ord0_neg.push((vb, ve)),
            (Cell::Edge, Cell::ConeTriangle) => d.ess1.push((vb, ve)),
            (Cell::Vertex, Cell::Edge) | (Cell::ConeEdge, Cell::ConeTriangle) => {}
            other => panic!("unexpected pair {other:?}"),
        }
    }
    assert_eq!(paired.iter().filter(|p| !**p).count(), 1, "only the apex survives");
    d.ord0.sort();
    d.rel_ord0_neg.sort();
    d.ess1.sort();
    d
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x == y => {
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(*x);
                i += 1;
            }
            (Some(_), Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (Some(x), None) => {
                out.push(*x);
                i += 1;
            }
            (None, Some(y)) => {
                out.push(*y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// A graph with `n` random bumps added to a sample, and the all-death
/// sequence removing them again in reverse order.
pub fn bumps_and_deaths(genus: usize, n: usize, seed: u64) -> (ReebGraph, Vec<reeb_edit::EditOp>) {
    use rand::SeedableRng;
    let base = sample(genus, seed as usize % 3, seed);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut g = base.clone();
    let mut births = reeb_edit::DeformationSequence::default();
    for i in 0..n {
        let next = reeb_edit::random::random_birth(&g, &mut rng, 100 + i);
        let born: Vec<_> = next.ids().filter(|v| !g.contains(v)).cloned().collect();
        let (a, b) = (&born[0], &born[1]);
        // recover the op from the difference
        let (saddle, leaf) = if next.degree(a) == 3 { (a, b) } else { (b, a) };
        let death = reeb_edit::EditOp::Death {
            u1: saddle.clone(),
            u2: leaf.clone(),
        };
        births.push(death.inverse_from(&next).unwrap());
        g = next;
    }
    let deaths = births.inverse(&base).unwrap();
    (g, deaths.ops)
}

/// The same graph with labels replaced by their ranks.
pub fn rank_labels(g: &ReebGraph) -> ReebGraph {
    let order = g.sorted_by_label();
    let labels = order
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), Label::from_int(i as i64)));
    ReebGraph::new(labels, g.edges()).unwrap()
}

/// Two valid genus-0 graphs on the labels 0..5 with equal extended diagrams
/// but different edges, found by sampling shapes and comparing diagrams.
pub fn equal_diagram_pair() -> (ReebGraph, ReebGraph) {
    use std::collections::BTreeMap;
    let mut by_diagram: BTreeMap<String, ReebGraph> = BTreeMap::new();
    for seed in 0..500u64 {
        let g = rank_labels(&sample(0, 2, seed));
        let d = reeb_edit::extended_diagram(&g).unwrap();
        let key = serde_json::to_string(&d).unwrap();
        match by_diagram.get(&key) {
            Some(h) if h.iso_key() != g.iso_key() => return (h.clone(), g),
            Some(_) => {}
            None => {
                by_diagram.insert(key, g);
            }
        }
    }
    panic!("no equal-diagram pair among the samples")
}
