//! Central tolerance record.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NumericPolicy {
    /// Relative tolerance for covariance symmetry.
    pub symmetry_rel: f64,
    /// Slack below 1 tolerated for symplectic eigenvalues before a state is rejected.
    pub physicality_slack: f64,
    /// Below this value of `nu - 1` the entropy function switches to its series form.
    pub series_threshold: f64,
    /// Infinity-norm tolerance on `D D^T - I`.
    pub orthogonality: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        Self { symmetry_rel: 1e-9, physicality_slack: 1e-7, series_threshold: 1e-6, orthogonality: 1e-9 }
    }
}
