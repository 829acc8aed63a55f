//! Numerical tolerances shared by every module.
//!
//! Defaults are tuned for double precision. A process-wide override can be
//! supplied through environment variables, read once on first access:
//!
//! | variable                 | field      | default |
//! |--------------------------|------------|---------|
//! | `HOLONOMY_TOL_UNITARY`   | `unitary`  | 1e-9    |
//! | `HOLONOMY_TOL_SINGULAR`  | `singular` | 1e-12   |
//! | `HOLONOMY_TOL_ALGEBRA`   | `algebra`  | 1e-10   |
//! | `HOLONOMY_TOL_PSD`       | `psd`      | 1e-10   |
//! | `HOLONOMY_FLAT_TOL`      | `flat`     | 1e-9    |

use std::sync::OnceLock;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Unitarity and unit-determinant residuals.
    pub unitary: f64,
    /// Smallest admissible |det| for invertible real matrices.
    pub singular: f64,
    /// Lie algebra structural constraints.
    pub algebra: f64,
    /// Negative eigenvalue slack for density states.
    pub psd: f64,
    /// A cycle is flat when its index is below this.
    pub flat: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitary: 1e-9,
            singular: 1e-12,
            algebra: 1e-10,
            psd: 1e-10,
            flat: 1e-9,
        }
    }
}

impl Tolerances {
    /// Defaults overridden by any `HOLONOMY_*` variables that parse as floats.
    pub fn from_env() -> Self {
        let mut tol = Self::default();
        let read = |name: &str, slot: &mut f64| {
            if let Some(v) = std::env::var(name).ok().and_then(|s| s.trim().parse::<f64>().ok()) {
                if v.is_finite() && v > 0.0 {
                    *slot = v;
                }
            }
        };
        read("HOLONOMY_TOL_UNITARY", &mut tol.unitary);
        read("HOLONOMY_TOL_SINGULAR", &mut tol.singular);
        read("HOLONOMY_TOL_ALGEBRA", &mut tol.algebra);
        read("HOLONOMY_TOL_PSD", &mut tol.psd);
        read("HOLONOMY_FLAT_TOL", &mut tol.flat);
        tol
    }
}

static GLOBAL: OnceLock<Tolerances> = OnceLock::new();

/// The process-wide tolerances.
pub fn tolerances() -> &'static Tolerances {
    GLOBAL.get_or_init(Tolerances::from_env)
}
