//! Group-valued weights on bipartite graphs: holonomies around cycles,
//! contextuality indices, global sections, random weightings and flattening.

pub mod error;
pub mod flatten;
pub mod generate;
pub mod graph;
pub mod group;
pub mod holonomy;
pub mod io;
pub mod scenarios;
pub mod stochastic;
pub mod tolerance;

pub use error::{Error, Result};
pub use flatten::{flatten, FlattenProblem, FlattenTrace, Objective};
pub use graph::{BipartiteGraph, Cycle, CycleFamily, FamilyPolicy, Vertex};
pub use group::{AlgebraElement, DensityState, GroupContext, GroupElement, GroupKind, MetricKind};
pub use holonomy::{Coherence, ContextReport, Section, Weighting};
pub use io::{InstanceDocument, ReportDocument};
pub use stochastic::{estimate_kappa_stoch, DistributionSpec, EstimatorResult};
pub use tolerance::{tolerances, Tolerances};
