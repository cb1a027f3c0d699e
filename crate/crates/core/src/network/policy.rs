use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::config::{Network, UserIndex};
use super::covariance::bob_mode;
use crate::error::{Error, Result};
use crate::skr::{CorrectionPreset, FiniteSizePolicy};

/// Receiver capability: a local receiver keeps only its own frequency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Capability {
    Local,
    Global,
}

/// Assignment of the non-target Bob modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Partition {
    /// Every other Bob mode belongs to the eavesdropper.
    Untrusted,
    /// Other Bob modes are trusted and left unmeasured.
    Trusted,
    /// All Bob modes are measured by trusted receivers.
    AllMeasured,
}

/// Security level of the key-rate formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    /// Asymptotic.
    AC,
    /// Finite size.
    FS,
    /// Composable.
    CS,
    /// Finite-size composable.
    FC,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecurityPolicy {
    pub capability: Capability,
    pub partition: Partition,
    pub level: Level,
    /// Block size `n` in symbols.
    pub block_size: u64,
    pub eps_pe: f64,
    pub eps_smooth: f64,
    pub eps_hash: f64,
    pub preset: CorrectionPreset,
}

impl SecurityPolicy {
    /// Policy with block size `10^10` and all failure probabilities `10^-10`.
    pub fn new(capability: Capability, partition: Partition, level: Level) -> Self {
        Self {
            capability,
            partition,
            level,
            block_size: 10_000_000_000,
            eps_pe: 1e-10,
            eps_smooth: 1e-10,
            eps_hash: 1e-10,
            preset: CorrectionPreset::Leverrier2010,
        }
    }

    pub fn with_level(mut self, level: Level) -> Self {
        self.level = level;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.level != Level::AC && self.block_size == 0 {
            return Err(Error::Configuration("finite-size levels need a block size of at least 1".into()));
        }
        for (name, e) in [("eps_pe", self.eps_pe), ("eps_smooth", self.eps_smooth), ("eps_hash", self.eps_hash)] {
            if !(e > 0.0 && e < 1.0) {
                return Err(Error::Configuration(format!("{name} = {e} outside (0, 1)")));
            }
        }
        Ok(())
    }

    pub fn finite_size(&self) -> FiniteSizePolicy {
        FiniteSizePolicy {
            level: self.level,
            n: self.block_size,
            eps_pe: self.eps_pe,
            eps_smooth: self.eps_smooth,
            eps_hash: self.eps_hash,
            preset: self.preset,
        }
    }
}

/// Bob-side mode partition for one user. Indices refer to the network state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModePartition {
    pub eve: Vec<usize>,
    pub trusted_unmeasured: Vec<usize>,
    pub measured: Vec<usize>,
    /// Number of frequency-resolved heterodyne outputs the policy implies.
    pub n_m: usize,
}

/// Splits the Bob modes between the eavesdropper, trusted idle receivers and the measured block.
pub fn partition_modes(net: &Network, user: UserIndex, policy: &SecurityPolicy) -> Result<ModePartition> {
    policy.validate()?;
    if user.i_prime() > net.n_users() || user.h() > net.n_b() {
        return Err(Error::Configuration(format!("user {} not in this network", user.i_prime())));
    }
    let target = bob_mode(net, user);
    let others: Vec<usize> = net.users().map(|u| bob_mode(net, u)).filter(|&m| m != target).collect();
    let per_receiver = match policy.capability {
        Capability::Local => 1,
        Capability::Global => net.n_w(),
    };
    Ok(match policy.partition {
        Partition::Untrusted => ModePartition {
            eve: others,
            trusted_unmeasured: Vec::new(),
            measured: alloc::vec![target],
            n_m: per_receiver,
        },
        Partition::Trusted => ModePartition {
            eve: Vec::new(),
            trusted_unmeasured: others,
            measured: alloc::vec![target],
            n_m: per_receiver,
        },
        Partition::AllMeasured => ModePartition {
            eve: Vec::new(),
            trusted_unmeasured: Vec::new(),
            measured: net.users().map(|u| bob_mode(net, u)).collect(),
            n_m: per_receiver * net.n_users(),
        },
    })
}

/// Signal-power factor `Q = r_h |D_kk|^2` for a local receiver and `r_h` for a global one.
pub fn receiver_power_factor(net: &Network, user: UserIndex, capability: Capability) -> f64 {
    let r = net.branch_ratio(user);
    match capability {
        Capability::Local => {
            let d = net.allocation()[(user.k() - 1, user.k() - 1)];
            r * d * d
        }
        Capability::Global => r,
    }
}
