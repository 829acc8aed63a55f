use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The concrete groups edge weights can live in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupKind {
    /// Integers mod 2 under addition.
    Z2,
    SU2,
    SUn,
    Un,
    /// Invertible real matrices.
    GLnR,
    /// Real projective linear group; elements are stored as |det| = 1 representatives.
    PGLn,
    /// Invertible diagonal operators on a truncated Fourier basis `-N..=N`.
    DiagOp,
}

impl GroupKind {
    pub fn is_unitary(self) -> bool {
        matches!(self, GroupKind::SU2 | GroupKind::SUn | GroupKind::Un)
    }

    pub fn is_special_unitary(self) -> bool {
        matches!(self, GroupKind::SU2 | GroupKind::SUn)
    }

    /// Real-matrix kinds.
    pub fn is_real(self) -> bool {
        matches!(self, GroupKind::GLnR | GroupKind::PGLn)
    }

    /// Everything except `Z2` has a matrix (or diagonal) payload and a Lie algebra.
    pub fn is_continuous(self) -> bool {
        self != GroupKind::Z2
    }

    pub fn name(self) -> &'static str {
        match self {
            GroupKind::Z2 => "Z2",
            GroupKind::SU2 => "SU2",
            GroupKind::SUn => "SUn",
            GroupKind::Un => "Un",
            GroupKind::GLnR => "GLnR",
            GroupKind::PGLn => "PGLn",
            GroupKind::DiagOp => "DiagOp",
        }
    }
}

impl std::str::FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "z2" => GroupKind::Z2,
            "su2" => GroupKind::SU2,
            "sun" => GroupKind::SUn,
            "un" => GroupKind::Un,
            "glnr" | "gln" => GroupKind::GLnR,
            "pgln" => GroupKind::PGLn,
            "diagop" | "diag" => GroupKind::DiagOp,
            other => return Err(Error::InvalidContext(format!("unknown group kind `{other}`"))),
        };
        Ok(kind)
    }
}

/// A group kind together with its matrix side length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawContext", into = "RawContext")]
pub struct GroupContext {
    kind: GroupKind,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct RawContext {
    kind: GroupKind,
    dim: usize,
}

impl TryFrom<RawContext> for GroupContext {
    type Error = Error;

    fn try_from(raw: RawContext) -> Result<Self> {
        GroupContext::new(raw.kind, raw.dim)
    }
}

impl From<GroupContext> for RawContext {
    fn from(ctx: GroupContext) -> Self {
        RawContext { kind: ctx.kind, dim: ctx.dim }
    }
}

impl GroupContext {
    pub fn new(kind: GroupKind, dim: usize) -> Result<Self> {
        let ok = match kind {
            GroupKind::Z2 => dim == 1,
            GroupKind::SU2 => dim == 2,
            GroupKind::DiagOp => dim % 2 == 1,
            _ => dim >= 1,
        };
        if !ok {
            return Err(Error::InvalidContext(format!("{} cannot have dim {dim}", kind.name())));
        }
        Ok(Self { kind, dim })
    }

    pub fn z2() -> Self {
        Self { kind: GroupKind::Z2, dim: 1 }
    }

    pub fn su2() -> Self {
        Self { kind: GroupKind::SU2, dim: 2 }
    }

    pub fn sun(n: usize) -> Result<Self> {
        Self::new(GroupKind::SUn, n)
    }

    pub fn un(n: usize) -> Result<Self> {
        Self::new(GroupKind::Un, n)
    }

    pub fn glnr(n: usize) -> Result<Self> {
        Self::new(GroupKind::GLnR, n)
    }

    pub fn pgln(n: usize) -> Result<Self> {
        Self::new(GroupKind::PGLn, n)
    }

    /// Diagonal operators on the modes `-truncation..=truncation`.
    pub fn diag_op(truncation: usize) -> Self {
        Self { kind: GroupKind::DiagOp, dim: 2 * truncation + 1 }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `N` for a `DiagOp` context.
    pub fn truncation(&self) -> Option<usize> {
        (self.kind == GroupKind::DiagOp).then_some(self.dim / 2)
    }

    pub(crate) fn ensure_same(&self, other: &GroupContext) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ContextMismatch { left: self.to_string(), right: other.to_string() })
        }
    }
}

impl fmt::Display for GroupContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Z2 | GroupKind::SU2 => write!(f, "{}", self.kind.name()),
            GroupKind::DiagOp => write!(f, "DiagOp(N={})", self.dim / 2),
            _ => write!(f, "{}({})", self.kind.name(), self.dim),
        }
    }
}
