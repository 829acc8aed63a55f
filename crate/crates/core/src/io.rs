//! JSON instance and report documents.
//!
//! Matrices are row-major; each entry is a real number or an `[re, im]`
//! pair. Floats are written in shortest round-trip form, so emitting and
//! re-parsing a document reproduces every value exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flatten::Objective;
use crate::graph::{BipartiteGraph, Edge, FamilyPolicy, Vertex};
use crate::group::linalg::{CMat, CVec};
use crate::group::{AlgebraElement, GroupContext, GroupElement, MetricKind, Payload};
use crate::holonomy::{Coherence, CoherenceViolation, ContextReport, Weighting};
use crate::stochastic::EstimatorResult;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> num_complex::Complex64 {
        match self {
            Entry::Real(x) => num_complex::Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => num_complex::Complex64::new(re, im),
        }
    }

    fn from_value(z: num_complex::Complex64) -> Self {
        if z.im == 0.0 {
            Entry::Real(z.re)
        } else {
            Entry::Complex([z.re, z.im])
        }
    }
}

/// `0`/`1` or `false`/`true`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Bit {
    Int(u8),
    Bool(bool),
}

impl Bit {
    pub fn value(self) -> Result<bool> {
        match self {
            Bit::Int(0) | Bit::Bool(false) => Ok(false),
            Bit::Int(1) | Bit::Bool(true) => Ok(true),
            Bit::Int(n) => Err(Error::InvalidArgument(format!("bit must be 0 or 1, got {n}"))),
        }
    }
}

/// An algebra element: a matrix, a diagonal, or orthonormal-basis coordinates.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<f64>>,
}

/// One edge weight: exactly one of `bit`, `matrix`, `diag`, or `exp`
/// (optionally with `scale`, giving `exp(scale · X)`).
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bit: Option<Bit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Entry>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exp: Option<AlgebraSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

fn dense(rows: &[Vec<Entry>], n: usize) -> Result<CMat> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("expected a {n}x{n} matrix")));
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j].value()))
}

fn diagonal(entries: &[Entry]) -> CVec {
    CVec::from_iterator(entries.len(), entries.iter().map(|e| e.value()))
}

fn matrix_rows(m: &CMat) -> Vec<Vec<Entry>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| Entry::from_value(m[(i, j)])).collect()).collect()
}

impl AlgebraSpec {
    pub fn build(&self, ctx: GroupContext) -> Result<AlgebraElement> {
        match (&self.matrix, &self.diag, &self.coords) {
            (Some(m), None, None) => AlgebraElement::from_matrix(ctx, dense(m, ctx.dim())?),
            (None, Some(d), None) => AlgebraElement::from_diag(ctx, diagonal(d)),
            (None, None, Some(c)) => AlgebraElement::from_coords(ctx, c),
            _ => Err(Error::InvalidArgument("exp needs exactly one of matrix, diag, coords".into())),
        }
    }

    pub fn from_element(x: &AlgebraElement) -> Self {
        match x.payload() {
            Payload::Diag(d) => Self { diag: Some(d.iter().map(|z| Entry::from_value(*z)).collect()), ..Self::default() },
            _ => Self { matrix: Some(matrix_rows(&x.to_dense())), ..Self::default() },
        }
    }
}

impl WeightSpec {
    pub fn build(&self, ctx: GroupContext) -> Result<GroupElement> {
        let set = [self.bit.is_some(), self.matrix.is_some(), self.diag.is_some(), self.exp.is_some()];
        if set.iter().filter(|&&b| b).count() != 1 {
            return Err(Error::InvalidArgument("weight needs exactly one of bit, matrix, diag, exp".into()));
        }
        if self.scale.is_some() && self.exp.is_none() {
            return Err(Error::InvalidArgument("scale is only meaningful with exp".into()));
        }
        if let Some(b) = self.bit {
            if ctx.kind() != crate::group::GroupKind::Z2 {
                return Err(Error::InvalidElement { kind: ctx.kind(), reason: "bit payload needs Z2".into() });
            }
            return Ok(GroupElement::bit(b.value()?));
        }
        if let Some(m) = &self.matrix {
            return GroupElement::from_matrix(ctx, dense(m, ctx.dim())?);
        }
        if let Some(d) = &self.diag {
            return GroupElement::from_diag(ctx, diagonal(d));
        }
        let x = self.exp.as_ref().expect("checked above").build(ctx)?;
        Ok(x.scaled(self.scale.unwrap_or(1.0)).exp())
    }

    /// Literal payload of `g`.
    pub fn from_element(g: &GroupElement) -> Self {
        match g.payload() {
            Payload::Bit(b) => Self { bit: Some(Bit::Int(*b as u8)), ..Self::default() },
            Payload::Matrix(m) => Self { matrix: Some(matrix_rows(m)), ..Self::default() },
            Payload::Diag(d) => Self { diag: Some(d.iter().map(|z| Entry::from_value(*z)).collect()), ..Self::default() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub n_visible: usize,
    pub n_hidden: usize,
    pub edges: Vec<Edge>,
}

/// A single closed loop given by its factors; the holonomy is the product
/// of the weights in the order listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    pub labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub schema: u32,
    pub group: GroupContext,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    #[serde(default, rename = "loop", skip_serializing_if = "Option::is_none")]
    pub path_loop: Option<LoopSpec>,
    pub weights: Vec<WeightSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyPolicy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<MetricKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flat_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub both_orientations: Option<bool>,
}

fn at(path: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let path = path.into();
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::Parse { path, message: other.to_string() },
    }
}

impl InstanceDocument {
    pub fn from_weighting(w: &Weighting) -> Self {
        let g = w.graph();
        Self {
            schema: SCHEMA_VERSION,
            group: *w.ctx(),
            graph: Some(GraphSpec { n_visible: g.n_visible(), n_hidden: g.n_hidden(), edges: g.edges().to_vec() }),
            path_loop: None,
            weights: w.weights().iter().map(WeightSpec::from_element).collect(),
            family: None,
            metric: None,
            flat_tol: None,
            both_orientations: None,
        }
    }

    pub fn from_loop(ctx: GroupContext, labels: Vec<String>, factors: &[GroupElement]) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            group: ctx,
            graph: None,
            path_loop: Some(LoopSpec { labels }),
            weights: factors.iter().map(WeightSpec::from_element).collect(),
            family: None,
            metric: None,
            flat_tol: None,
            both_orientations: None,
        }
    }

    /// Parses and validates; errors name the offending field.
    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: Self = serde_path_to_error::deserialize(de).map_err(|e| Error::Parse {
            path: if e.path().to_string() == "." { "document".into() } else { e.path().to_string() },
            message: e.inner().to_string(),
        })?;
        doc.validate()?;
        Ok(doc)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse { path: path.display().to_string(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents always serialize");
        s.push('\n');
        s
    }

    pub fn is_loop(&self) -> bool {
        self.path_loop.is_some()
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != SCHEMA_VERSION {
            return Err(Error::Parse { path: "schema".into(), message: format!("unsupported schema {}", self.schema) });
        }
        match (&self.graph, &self.path_loop) {
            (Some(_), None) => {
                self.weighting()?;
            }
            (None, Some(l)) => {
                if l.labels.len() != self.weights.len() {
                    return Err(Error::Parse {
                        path: "loop.labels".into(),
                        message: format!("{} labels for {} weights", l.labels.len(), self.weights.len()),
                    });
                }
                if self.weights.is_empty() {
                    return Err(Error::Parse { path: "weights".into(), message: "a loop needs at least one factor".into() });
                }
                self.loop_factors()?;
            }
            _ => {
                return Err(Error::Parse { path: "document".into(), message: "exactly one of graph or loop is required".into() })
            }
        }
        if let Some(m) = self.metric {
            m.validate_for(&self.group).map_err(at("metric"))?;
        }
        if let Some(t) = self.flat_tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Parse { path: "flat_tol".into(), message: format!("{t} must be positive") });
            }
        }
        Ok(())
    }

    fn elements(&self) -> Result<Vec<GroupElement>> {
        self.weights.iter().enumerate().map(|(i, w)| w.build(self.group).map_err(at(format!("weights[{i}]")))).collect()
    }

    pub fn weighting(&self) -> Result<Weighting> {
        let spec = self
            .graph
            .as_ref()
            .ok_or_else(|| Error::Parse { path: "graph".into(), message: "instance is a loop, not a graph".into() })?;
        let graph = BipartiteGraph::new(spec.n_visible, spec.n_hidden, &spec.edges).map_err(at("graph.edges"))?;
        if self.weights.len() != spec.edges.len() {
            return Err(Error::Parse {
                path: "weights".into(),
                message: format!("{} weights for {} edges", self.weights.len(), spec.edges.len()),
            });
        }
        // Weights follow the document's edge order; the graph stores edges sorted.
        let elements = self.elements()?;
        let mut ordered = vec![None; elements.len()];
        for (e, g) in spec.edges.iter().zip(elements) {
            ordered[graph.edge_index(e.0, e.1).expect("edge was accepted")] = Some(g);
        }
        Weighting::new(graph, self.group, ordered.into_iter().map(|g| g.expect("edges are distinct")).collect())
    }

    pub fn loop_factors(&self) -> Result<Vec<GroupElement>> {
        if self.path_loop.is_none() {
            return Err(Error::Parse { path: "loop".into(), message: "instance is a graph, not a loop".into() });
        }
        self.elements()
    }
}

/// Per-vertex section value in a coherence report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionEntry {
    pub vertex: Vertex,
    pub value: WeightSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    pub tol: f64,
    pub coherent: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section: Option<Vec<SectionEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<CoherenceViolation>,
}

impl CoherenceReport {
    pub fn new(result: &Coherence, tol: f64) -> Self {
        match result {
            Coherence::Coherent { section, max_residual } => Self {
                tol,
                coherent: true,
                max_residual: Some(*max_residual),
                section: Some(
                    section.iter().map(|(vertex, g)| SectionEntry { vertex, value: WeightSpec::from_element(g) }).collect(),
                ),
                violation: None,
            },
            Coherence::Violation(v) => {
                Self { tol, coherent: false, max_residual: None, section: None, violation: Some(*v) }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub group: GroupContext,
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_visible: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_hidden: Option<usize>,
    pub n_weights: usize,
}

impl InstanceSummary {
    pub fn of(doc: &InstanceDocument) -> Self {
        Self {
            group: doc.group,
            mode: if doc.is_loop() { "loop" } else { "bipartite" }.into(),
            n_visible: doc.graph.as_ref().map(|g| g.n_visible),
            n_hidden: doc.graph.as_ref().map(|g| g.n_hidden),
            n_weights: doc.weights.len(),
        }
    }
}

/// `z2_cycle_odds` for one cycle length in the family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormEntry {
    pub length: usize,
    pub cycles: usize,
    pub odds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlattenSummary {
    pub objective: Objective,
    pub converged: bool,
    pub iterations: usize,
    pub initial_kappa: f64,
    pub final_kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: u32,
    pub tool_version: String,
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<InstanceSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<ContextReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coherence: Option<CoherenceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimatorResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub closed_form: Option<Vec<ClosedFormEntry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flatten: Option<FlattenSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<serde_json::Value>,
}

impl ReportDocument {
    pub fn new(command: &str) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            tool_version: TOOL_VERSION.into(),
            command: command.into(),
            instance: None,
            seed: None,
            index: None,
            coherence: None,
            estimate: None,
            closed_form: None,
            flatten: None,
            scenario: None,
        }
    }

    pub fn emit(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports always serialize");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de)
            .map_err(|e| Error::Parse { path: e.path().to_string(), message: e.inner().to_string() })
    }
}

/// Six significant digits for human-readable output.
pub fn human(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

/// Writes `contents` to a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    std::fs::write(&tmp, contents)?;
    std::fs::rename(&tmp, path).inspect_err(|_| {
        let _ = std::fs::remove_file(&tmp);
    })
}
