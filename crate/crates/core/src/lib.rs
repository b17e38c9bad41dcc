//! Edit calculus on labeled Reeb graphs of closed orientable surfaces.
//!
//! The crate provides validated graph construction, the six elementary
//! deformations with exact costs, canonicalization, constructive connection
//! of same-genus graphs, and lower/upper bounds on the edit distance.

pub mod canonical;
pub mod distance;
pub mod enumerate;
pub mod error;
pub mod experiment;
pub mod graph;
pub mod io;
pub mod label;
pub mod ops;
pub mod par;
pub mod persistence;
pub mod random;

pub use canonical::{canonicalize, connect, minimalize, reduce_cycle, reduce_path, CanonicalizationResult};
pub use distance::{
    beam_search_upper, distance_report, rewrite_deletions, upper_bound_canonical, DistanceReport, SearchParams, Witness,
};
pub use error::{CanonError, DiagramError, DistanceError, EditError, ExperimentError, GraphError, ParseLabelError};
pub use experiment::{stability_experiment, StabilityRow, StabilityTable};
pub use graph::{IsoKey, ReebGraph, ValidationReport, VertexClass, VertexId, Violation};
pub use label::Label;
pub use ops::{DeformationSequence, EditOp, OpKind, Orientation, SequenceFile};
pub use par::ExecMode;
pub use persistence::{
    bottleneck, bottleneck_oracle, extended_diagram, BottleneckValue, DiagramKind, PersistenceDiagram,
};
