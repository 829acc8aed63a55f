use thiserror::Error;

use crate::graph::Vertex;
use crate::group::{GroupKind, MetricKind};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("group context mismatch: {left} vs {right}")]
    ContextMismatch { left: String, right: String },

    #[error("invalid group context: {0}")]
    InvalidContext(String),

    #[error("element violates {kind:?} invariant: {reason}")]
    InvalidElement { kind: GroupKind, reason: String },

    #[error("matrix is numerically singular (|det| = {det:e})")]
    NearSingular { det: f64 },

    #[error("operation not supported for {0:?}")]
    UnsupportedContext(GroupKind),

    #[error("no principal logarithm: {0}")]
    NoPrincipalLog(String),

    #[error("metric {metric:?} is not valid for {kind:?}")]
    MetricContextMismatch { metric: MetricKind, kind: GroupKind },

    #[error("trace is zero to working precision (|tr| = {0:e})")]
    ZeroTrace(f64),

    #[error("support of the first state is not contained in the support of the second")]
    SupportViolation,

    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("vertex or edge index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    #[error("cycle enumeration exceeded the cap of {cap} cycles")]
    ExplosionGuard { cap: usize },

    #[error("cycle family is empty")]
    EmptyFamily,

    #[error("no edge between {0} and {1}")]
    NoSuchEdge(Vertex, Vertex),

    #[error("weighting does not match its graph: {0}")]
    WeightingShape(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("distribution {dist} cannot produce {kind:?} weights")]
    IncompatibleDistribution { dist: String, kind: GroupKind },

    #[error("rejection sampler stalled: {accepted} accepted out of {attempts} attempts")]
    RejectionStall { accepted: usize, attempts: usize },

    #[error("flattening needs a matrix group, got {0:?}")]
    NonMatrixContext(GroupKind),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}
