//! Perturbation experiment: relabel within `[-delta, delta]` and check that
//! the reported upper bound stays within `delta`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::distance::{distance_report, SearchParams};
use crate::error::ExperimentError;
use crate::graph::ReebGraph;
use crate::label::Label;
use crate::ops::EditOp;
use crate::par::map_ordered;
use crate::random::label_between;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityRow {
    pub delta: Label,
    pub trial: usize,
    pub upper: Label,
    pub lower: Label,
}

impl StabilityRow {
    pub fn passes(&self) -> bool {
        self.upper <= self.delta
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StabilityTable {
    pub rows: Vec<StabilityRow>,
}

impl StabilityTable {
    pub fn passed(&self) -> usize {
        self.rows.iter().filter(|r| r.passes()).count()
    }

    /// First violated trial, if any.
    pub fn check(&self) -> Result<(), ExperimentError> {
        match self.rows.iter().find(|r| !r.passes()) {
            Some(r) => Err(ExperimentError::BoundViolated {
                trial: r.trial,
                upper: Box::new(r.upper.clone()),
                delta: Box::new(r.delta.clone()),
            }),
            None => Ok(()),
        }
    }
}

/// Every label moved independently by at most `delta`. The trial index
/// selects the generator stream so trials are independent of scheduling.
pub fn perturb(g: &ReebGraph, delta: &Label, seed: u64, trial: usize) -> ReebGraph {
    if delta.is_zero() {
        return g.clone();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    let neg = -delta;
    let new_labels: BTreeMap<_, _> = g
        .sorted_by_label()
        .into_iter()
        .map(|v| {
            let shift = label_between(&mut rng, &neg, delta);
            let l = g.label_of(&v) + &shift;
            (v, l)
        })
        .collect();
    EditOp::Relabel { new_labels }
        .apply(g)
        .expect("shifts below half the gap keep the order")
}

pub fn stability_experiment(
    base: &ReebGraph,
    delta: &Label,
    trials: usize,
    seed: u64,
    params: &SearchParams,
) -> Result<StabilityTable, ExperimentError> {
    base.require_valid()?;
    if delta.is_negative() {
        return Err(ExperimentError::NegativeDelta);
    }
    let half_gap = base.min_label_gap().map(|g| g.half()).unwrap_or_else(Label::zero);
    if !delta.is_zero() && delta >= &half_gap {
        return Err(ExperimentError::DeltaTooLarge {
            delta: Box::new(delta.clone()),
            half_gap: Box::new(half_gap),
        });
    }
    let indices: Vec<usize> = (0..trials).collect();
    let rows = map_ordered(params.exec, &indices, |&trial| {
        let moved = perturb(base, delta, seed, trial);
        let report = distance_report(base, &moved, params)?;
        Ok(StabilityRow {
            delta: delta.clone(),
            trial,
            upper: report.upper.expect("same genus"),
            lower: report.lower,
        })
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>, ExperimentError>>()?;
    Ok(StabilityTable { rows })
}
