//! Built-in reference scenarios.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{enumerate_four_cycles, fundamental_cycle_basis, BipartiteGraph};
use crate::group::linalg::CVec;
use crate::group::random::random_element;
use crate::group::{AlgebraElement, GroupContext, GroupElement, MetricKind};
use crate::holonomy::{ordered_product, ContextReport, Weighting};
use crate::io::{human, Entry};
use crate::stochastic::replica_rng;

pub const NAMES: [&str; 4] = ["z2-paper", "su2-triangle", "oddclass-s1", "su3-random"];

/// Weight tables for the small `Z2` example: rows `v1, v2`, columns `h1, h2`.
pub const Z2_ORIGINAL: [[u8; 2]; 2] = [[0, 1], [1, 0]];
pub const Z2_MODIFIED: [[u8; 2]; 2] = [[0, 1], [1, 1]];

pub fn z2_table_weighting(table: [[u8; 2]; 2]) -> Weighting {
    Weighting::from_fn(BipartiteGraph::complete(2, 2), GroupContext::z2(), |_, (v, h)| {
        Ok(GroupElement::bit(table[v][h] == 1))
    })
    .expect("2x2 table fits K2,2")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Z2Table {
    pub name: String,
    pub table: [[u8; 2]; 2],
    pub report: ContextReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Z2Paper {
    pub tables: Vec<Z2Table>,
}

/// Both tables on `K2,2`, the four-cycle counted in both orientations.
pub fn z2_paper() -> Result<Z2Paper> {
    let fam = enumerate_four_cycles(&BipartiteGraph::complete(2, 2)).with_both_orientations();
    let tables = [("original", Z2_ORIGINAL), ("modified", Z2_MODIFIED)]
        .into_iter()
        .map(|(name, table)| {
            let report = z2_table_weighting(table).contextuality_index(&fam, MetricKind::Discrete, 0.5)?;
            Ok(Z2Table { name: name.into(), table, report })
        })
        .collect::<Result<_>>()?;
    Ok(Z2Paper { tables })
}

impl Z2Paper {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for t in &self.tables {
            let _ = writeln!(s, "{} table {:?}", t.name, t.table);
            for c in &t.report.per_cycle {
                let _ = writeln!(s, "  {}  hol = {}", c.cycle, c.iota);
            }
            let _ = writeln!(s, "  kappa = {}", human(t.report.kappa));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Su2Triangle {
    pub theta: [f64; 3],
    /// Row-major `w12 · w23 · w31`.
    pub holonomy: Vec<Vec<Entry>>,
    pub trace: [f64; 2],
    pub arg_trace: f64,
    /// Rotation angle `arccos(Re tr / 2)`.
    pub phi: f64,
    pub half_phi: f64,
    pub iota_frobenius: f64,
}

pub fn su2_triangle_holonomy(theta: [f64; 3]) -> GroupElement {
    let w12 = AlgebraElement::su2(theta[0], 0.0, 0.0).exp();
    let w23 = AlgebraElement::su2(0.0, theta[1], 0.0).exp();
    let w31 = AlgebraElement::su2(0.0, 0.0, theta[2]).exp();
    ordered_product(&GroupContext::su2(), &[w12, w23, w31]).expect("same context")
}

/// `w12 = exp(iθ1 σx)`, `w23 = exp(iθ2 σy)`, `w31 = exp(iθ3 σz)` around the
/// loop `1 → 2 → 3 → 1`, multiplied in the order listed.
pub fn su2_triangle(theta: [f64; 3]) -> Result<Su2Triangle> {
    let hol = su2_triangle_holonomy(theta);
    let m = hol.as_matrix().expect("SU2 is a matrix group");
    let tr = m.trace();
    let phi = (tr.re / 2.0).clamp(-1.0, 1.0).acos();
    Ok(Su2Triangle {
        theta,
        holonomy: (0..2).map(|i| (0..2).map(|j| Entry::Complex([m[(i, j)].re, m[(i, j)].im])).collect()).collect(),
        trace: [tr.re, tr.im],
        arg_trace: tr.im.atan2(tr.re),
        phi,
        half_phi: phi / 2.0,
        iota_frobenius: hol.distance(&GroupContext::su2().identity(), MetricKind::Frobenius)?,
    })
}

impl Su2Triangle {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "theta = ({}, {}, {})", self.theta[0], self.theta[1], self.theta[2]);
        let _ = writeln!(s, "Tr(Hol) = {} + {}i", human(self.trace[0]), human(self.trace[1]));
        let _ = writeln!(s, "arg Tr(Hol) = {}", human(self.arg_trace));
        let _ = writeln!(s, "phi = {}  phi/2 = {}", human(self.phi), human(self.half_phi));
        let _ = writeln!(s, "iota (Frobenius) = {}", human(self.iota_frobenius));
        let _ = writeln!(
            s,
            "note: SU(2) traces are real, so arg Tr is 0 or pi; the reference figure 0.28 rad is not an arg-of-trace value"
        );
        s
    }
}

/// Reference figure quoted for the odd-class loop at `N = 10`; displayed, never asserted.
pub const ODDCLASS_REFERENCE: f64 = 1.52;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OddClass {
    pub truncation: usize,
    pub skew: bool,
    pub eps: [f64; 3],
    pub iota: f64,
    /// `‖exp((ε12 + ε23 + ε31) A) − I‖_HS`, valid because the factors commute.
    pub oracle: f64,
    pub reference: f64,
}

/// `A = diag(tanh(-N), …, tanh(N))`, times `i` when `skew`.
pub fn oddclass_generator(truncation: usize, skew: bool) -> AlgebraElement {
    let n = truncation as i64;
    let d = CVec::from_iterator(
        2 * truncation + 1,
        (-n..=n).map(|k| {
            let s = (k as f64).tanh();
            if skew {
                num_complex::Complex64::new(0.0, s)
            } else {
                num_complex::Complex64::new(s, 0.0)
            }
        }),
    );
    AlgebraElement::from_diag(GroupContext::diag_op(truncation), d).expect("finite diagonal")
}

pub fn oddclass_s1(truncation: usize, eps: [f64; 3], skew: bool) -> Result<OddClass> {
    let ctx = GroupContext::diag_op(truncation);
    let a = oddclass_generator(truncation, skew);
    let factors: Vec<GroupElement> = eps.iter().map(|&e| a.scaled(e).exp()).collect();
    let hol = ordered_product(&ctx, &factors)?;
    let iota = hol.distance(&ctx.identity(), MetricKind::HilbertSchmidt)?;

    let total: f64 = eps.iter().sum();
    let n = truncation as i64;
    let oracle = (-n..=n)
        .map(|k| {
            let s = (k as f64).tanh() * total;
            let z = if skew { num_complex::Complex64::new(0.0, s).exp() } else { num_complex::Complex64::new(s.exp(), 0.0) };
            (z - 1.0).norm_sqr()
        })
        .sum::<f64>()
        .sqrt();
    Ok(OddClass { truncation, skew, eps, iota, oracle, reference: ODDCLASS_REFERENCE })
}

impl OddClass {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "N = {}  eps = ({}, {}, {})  A = {}",
            self.truncation,
            self.eps[0],
            self.eps[1],
            self.eps[2],
            if self.skew { "i diag(tanh n)" } else { "diag(tanh n)" }
        );
        let _ = writeln!(s, "iota (Hilbert-Schmidt) = {}", human(self.iota));
        let _ = writeln!(s, "commuting closed form = {}", human(self.oracle));
        let _ = writeln!(s, "reference value {} (N = 10) is not reproduced by either reading of A", self.reference);
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Su3Random {
    pub seed: u64,
    pub report: ContextReport,
}

/// Random SU(3) weights on `K3,3`, Frobenius `κ` over the fundamental basis.
pub fn su3_random(seed: u64) -> Result<Su3Random> {
    let ctx = GroupContext::sun(3)?;
    let graph = BipartiteGraph::complete(3, 3);
    let mut rng = replica_rng(seed, 0);
    let w = Weighting::from_fn(graph.clone(), ctx, |_, _| random_element(&ctx, &mut rng))?;
    let report = w.contextuality_index(&fundamental_cycle_basis(&graph), MetricKind::Frobenius, 1e-9)?;
    Ok(Su3Random { seed, report })
}

impl Su3Random {
    pub fn summary(&self) -> String {
        let mut s = String::new();
        for c in &self.report.per_cycle {
            let _ = writeln!(s, "{}  iota = {}", c.cycle, human(c.iota));
        }
        let _ = writeln!(s, "kappa = {} over {} basis cycles (seed {})", human(self.report.kappa), self.report.per_cycle.len(), self.seed);
        s
    }
}

pub fn unknown(name: &str) -> Error {
    Error::InvalidArgument(format!("unknown scenario `{name}` (expected one of {})", NAMES.join(", ")))
}
