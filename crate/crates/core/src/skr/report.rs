use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::network::SecurityPolicy;

/// One user's key-rate audit trail. Information quantities are bits per symbol.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserRate {
    pub i_prime: usize,
    pub k: usize,
    pub h: usize,
    pub i_ab: f64,
    pub chi: f64,
    pub i_res: f64,
    pub delta: f64,
    pub beta: f64,
    pub f_s: f64,
    /// `beta I_AB - max(chi, I_res) - Delta` before clamping.
    pub raw: f64,
    /// Key rate in bits per second.
    pub key_rate: f64,
    /// Transmittance used for the repeaterless bound.
    pub t_bound: f64,
    pub bound_bits_per_use: f64,
    /// Bound in bits per second.
    pub bound_rate: f64,
}

impl UserRate {
    /// Key bits per channel use, `K / F_r`.
    pub fn bits_per_use(&self, f_r: f64) -> f64 {
        self.key_rate / f_r
    }
}

/// Joint key of the all-measured partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointRate {
    pub i_ab: f64,
    pub chi: f64,
    pub delta: f64,
    pub q_s: f64,
    pub beta: f64,
    pub f_s: f64,
    pub raw: f64,
    pub key_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkrReport {
    pub policy: SecurityPolicy,
    pub preset: String,
    pub f_r: f64,
    pub per_user: Vec<UserRate>,
    /// Sum of per-user rates, bits per second.
    pub aggregate: f64,
    pub joint: Option<JointRate>,
    /// Sum of per-user bounds, bits per second.
    pub bound_network: f64,
    pub bound_capped: bool,
    /// Number of distinct user classes that were evaluated.
    pub classes: usize,
}

impl SkrReport {
    /// Whether the aggregate rate is zero.
    pub fn clamped(&self) -> bool {
        self.aggregate <= 0.0
    }
}
