//! Architecture presets used for comparison baselines.
//!
//! Every preset starts from the scenario's network section and overrides its topology:
//!
//! - `tsqan`: the network as written.
//! - `dwdm`: one user per frequency mode (`N_B = 1`, no splitter) with an ideal demultiplexer.
//! - `tdm`: one frequency and one user channel shared in time by `users` users, each at `F_r / users`.
//! - `bs`: one frequency broadcast through a `1 x users` splitter.
//!
//! Per-mode or per-user values must be scalars when the preset changes the user count.

use cvqan_core::network::NetworkConfig;
use serde::{Deserialize, Serialize};

use crate::scenario::NetworkSpec;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArchitectureKind {
    #[default]
    Tsqan,
    Dwdm,
    Tdm,
    Bs,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchitectureSpec {
    #[serde(default)]
    pub kind: ArchitectureKind,
    /// User count of the dwdm, tdm and bs presets; defaults to `N_W N_B` (128 for bs).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub users: Option<usize>,
}

/// A preset applied to a network section.
#[derive(Debug, Clone, PartialEq)]
pub struct Realized {
    pub config: NetworkConfig,
    /// Identical copies of `config` that share the aggregate; more than one only for tdm.
    pub replicas: usize,
}

impl ArchitectureSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        match self.users {
            Some(0) => Err(CliError::Validation(vec!["architecture.users must be at least 1".into()])),
            Some(_) if self.kind == ArchitectureKind::Tsqan => {
                Err(CliError::Validation(vec!["architecture.users does not apply to tsqan".into()]))
            }
            _ => Ok(()),
        }
    }

    fn users(&self, base: &NetworkSpec) -> usize {
        self.users.unwrap_or(match self.kind {
            ArchitectureKind::Bs => 128,
            _ => base.n_w * base.n_b,
        })
    }

    pub fn realize(&self, base: &NetworkSpec) -> Result<Realized, CliError> {
        self.validate()?;
        let users = self.users(base);
        let mut spec = base.clone();
        let replicas = match self.kind {
            ArchitectureKind::Tsqan => return Ok(Realized { config: base.to_config()?, replicas: 1 }),
            ArchitectureKind::Dwdm => {
                spec.n_w = users;
                spec.n_b = 1;
                spec.isolation_db = Some(f64::INFINITY);
                1
            }
            ArchitectureKind::Tdm => {
                spec.n_w = 1;
                spec.n_b = 1;
                spec.symbol_rate_hz = base.symbol_rate_hz / users as f64;
                users
            }
            ArchitectureKind::Bs => {
                spec.n_w = 1;
                spec.n_b = users;
                1
            }
        };
        spec.allocation_matrix = None;
        spec.branch_ratios = None;
        if spec.isolation_db.is_none() {
            spec.isolation_db = Some(f64::INFINITY);
        }
        Ok(Realized { config: spec.to_config()?, replicas })
    }
}
