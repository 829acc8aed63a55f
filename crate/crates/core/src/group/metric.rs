use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::element::Payload;
use super::linalg::{self, c, CMat};
use super::{GroupContext, GroupElement, GroupKind};
use crate::error::{Error, Result};

/// Distance functions `d_G`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricKind {
    /// Cayley metric on `Z2`.
    Discrete,
    Frobenius,
    /// Largest singular value of the difference.
    OperatorNorm,
    /// Half the trace norm of the difference.
    TraceDistance,
    SchattenP(f64),
    /// `‖log(a⁻¹ b)‖_F`.
    Geodesic,
    /// `‖log(a⁻¹ b)‖_op`.
    LogOperatorNorm,
    /// Same as `Frobenius`; the customary name for diagonal operators.
    HilbertSchmidt,
}

impl MetricKind {
    /// The metric each group is paired with unless the caller chooses.
    pub fn default_for(kind: GroupKind) -> MetricKind {
        match kind {
            GroupKind::Z2 => MetricKind::Discrete,
            GroupKind::GLnR => MetricKind::LogOperatorNorm,
            GroupKind::DiagOp => MetricKind::HilbertSchmidt,
            _ => MetricKind::Frobenius,
        }
    }

    pub fn is_log_based(self) -> bool {
        matches!(self, MetricKind::Geodesic | MetricKind::LogOperatorNorm)
    }

    /// Metrics invariant under `X -> U X V` for unitary `U`, `V`.
    pub fn is_unitarily_invariant(self) -> bool {
        matches!(
            self,
            MetricKind::Frobenius
                | MetricKind::HilbertSchmidt
                | MetricKind::OperatorNorm
                | MetricKind::TraceDistance
                | MetricKind::SchattenP(_)
        )
    }

    pub fn validate_for(self, ctx: &GroupContext) -> Result<()> {
        let mismatch = Err(Error::MetricContextMismatch { metric: self, kind: ctx.kind() });
        match (self, ctx.kind()) {
            (MetricKind::Discrete, GroupKind::Z2) => Ok(()),
            (MetricKind::Discrete, _) | (_, GroupKind::Z2) => mismatch,
            (MetricKind::SchattenP(p), _) if !(p >= 1.0 && p.is_finite()) => {
                Err(Error::InvalidArgument(format!("Schatten exponent must be >= 1, got {p}")))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricKind::Discrete => f.write_str("discrete"),
            MetricKind::Frobenius => f.write_str("frobenius"),
            MetricKind::OperatorNorm => f.write_str("operator"),
            MetricKind::TraceDistance => f.write_str("trace"),
            MetricKind::SchattenP(p) => write!(f, "schatten:{p}"),
            MetricKind::Geodesic => f.write_str("geodesic"),
            MetricKind::LogOperatorNorm => f.write_str("log-operator"),
            MetricKind::HilbertSchmidt => f.write_str("hilbert-schmidt"),
        }
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(p) = lower.strip_prefix("schatten:") {
            let p: f64 = p.parse().map_err(|_| Error::InvalidArgument(format!("bad Schatten exponent `{p}`")))?;
            return Ok(MetricKind::SchattenP(p));
        }
        Ok(match lower.as_str() {
            "discrete" => MetricKind::Discrete,
            "frobenius" => MetricKind::Frobenius,
            "operator" | "op" => MetricKind::OperatorNorm,
            "trace" | "trace-distance" => MetricKind::TraceDistance,
            "geodesic" => MetricKind::Geodesic,
            "log-operator" | "log-op" => MetricKind::LogOperatorNorm,
            "hilbert-schmidt" | "hs" => MetricKind::HilbertSchmidt,
            other => return Err(Error::InvalidArgument(format!("unknown metric `{other}`"))),
        })
    }
}

impl Serialize for MetricKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for MetricKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn singular_values_of(diff: &Payload) -> Vec<f64> {
    match diff {
        Payload::Diag(d) => d.iter().map(|z| z.norm()).collect(),
        Payload::Matrix(m) => linalg::singular_values(m),
        Payload::Bit(_) => unreachable!(),
    }
}

fn spectral_norm(s: &[f64], metric: MetricKind) -> f64 {
    match metric {
        MetricKind::Frobenius | MetricKind::HilbertSchmidt | MetricKind::Geodesic => {
            s.iter().map(|x| x * x).sum::<f64>().sqrt()
        }
        MetricKind::OperatorNorm | MetricKind::LogOperatorNorm => s.iter().copied().fold(0.0, f64::max),
        MetricKind::TraceDistance => 0.5 * s.iter().sum::<f64>(),
        MetricKind::SchattenP(p) => s.iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p),
        MetricKind::Discrete => unreachable!(),
    }
}

fn frobenius_payload(p: &Payload) -> f64 {
    match p {
        Payload::Diag(d) => d.norm(),
        Payload::Matrix(m) => linalg::frobenius(m),
        Payload::Bit(_) => unreachable!(),
    }
}

fn difference(a: &Payload, b: &Payload, sign: f64) -> Payload {
    match (a, b) {
        (Payload::Matrix(x), Payload::Matrix(y)) => Payload::Matrix(x - y * c(sign)),
        (Payload::Diag(x), Payload::Diag(y)) => Payload::Diag(x - y * c(sign)),
        _ => unreachable!("payload shape is fixed by the context"),
    }
}

fn norm_of(diff: &Payload, metric: MetricKind) -> f64 {
    match metric {
        MetricKind::Frobenius | MetricKind::HilbertSchmidt => frobenius_payload(diff),
        _ => spectral_norm(&singular_values_of(diff), metric),
    }
}

impl GroupElement {
    /// `d_G(self, other)` under `metric`.
    ///
    /// For `PGLn` the representative difference is minimized over the
    /// residual sign ambiguity of |det| = 1 representatives.
    pub fn distance(&self, other: &GroupElement, metric: MetricKind) -> Result<f64> {
        self.ctx().ensure_same(other.ctx())?;
        metric.validate_for(self.ctx())?;
        let projective = self.ctx().kind() == GroupKind::PGLn;

        if let (Payload::Bit(a), Payload::Bit(b)) = (self.payload(), other.payload()) {
            return Ok(if a ^ b { 1.0 } else { 0.0 });
        }

        if metric.is_log_based() {
            let rel = self.inverse()?.multiply(other)?;
            let candidates: Vec<GroupElement> = if projective {
                let m = rel.as_matrix().expect("PGLn is a matrix kind");
                vec![rel.clone(), GroupElement::from_parts_unchecked(*rel.ctx(), Payload::Matrix(-m))]
            } else {
                vec![rel]
            };
            let mut best: Option<f64> = None;
            let mut last_err = None;
            for cand in candidates {
                match cand.log() {
                    Ok(x) => {
                        let v = norm_of(x.payload(), metric);
                        best = Some(best.map_or(v, |b: f64| b.min(v)));
                    }
                    Err(e) => last_err = Some(e),
                }
            }
            return best.ok_or_else(|| last_err.expect("at least one candidate"));
        }

        let signs: &[f64] = if projective { &[1.0, -1.0] } else { &[1.0] };
        Ok(signs
            .iter()
            .map(|&s| norm_of(&difference(self.payload(), other.payload(), s), metric))
            .fold(f64::INFINITY, f64::min))
    }
}

/// Norm of a raw matrix under a non-log metric.
pub fn matrix_norm(m: &CMat, metric: MetricKind) -> f64 {
    norm_of(&Payload::Matrix(m.clone()), metric)
}
