//! Scenario file format.
//!
//! Scenarios are TOML documents gated by `schema = "cvqan-scenario/1"`. Keys carry their unit
//! as a suffix (`_km`, `_db`, `_snu`, `_hz`, `_rad`). Per-mode, per-branch and per-user values
//! accept either one scalar or a full list.

use std::path::{Path, PathBuf};

use cvqan_core::network::{Allocation, Capability, ChannelSpec, Level, NetworkConfig, Partition, SecurityPolicy};
use cvqan_core::pm::{DspConfig, MonitorCalibration, Overlap, PmConfig, TapRatios};
use cvqan_core::skr::CorrectionPreset;
use serde::{Deserialize, Serialize};

use crate::architecture::ArchitectureSpec;
use crate::CliError;

pub const SCHEMA: &str = "cvqan-scenario/1";

/// One value broadcast to every entry, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    pub fn expand(&self, n: usize, name: &str, errs: &mut Vec<String>) -> Vec<f64> {
        match self {
            OneOrMany::One(v) => vec![*v; n],
            OneOrMany::Many(v) if v.len() == n => v.clone(),
            OneOrMany::Many(v) => {
                errs.push(format!("{name}: expected 1 or {n} values, got {}", v.len()));
                vec![f64::NAN; n]
            }
        }
    }

    pub fn set_all(&mut self, value: f64) {
        *self = OneOrMany::One(value);
    }
}

impl From<f64> for OneOrMany {
    fn from(v: f64) -> Self {
        OneOrMany::One(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub n_w: usize,
    pub n_b: usize,
    pub modulation_variance_snu: OneOrMany,
    /// Adjacent-mode isolation; `inf` gives an ideal demultiplexer.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isolation_db: Option<f64>,
    /// Explicit allocation matrix, used instead of `isolation_db`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub allocation_matrix: Option<Vec<Vec<f64>>>,
    /// Splitter power ratios; uniform when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch_ratios: Option<OneOrMany>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub distance_km: Option<OneOrMany>,
    #[serde(default = "default_attenuation")]
    pub attenuation_db_per_km: f64,
    /// Residual channel transmittance, used instead of `distance_km`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transmittance: Option<OneOrMany>,
    pub excess_noise_snu: OneOrMany,
    #[serde(default = "zero")]
    pub phase_rad: OneOrMany,
    pub detector_efficiency: f64,
    pub electronic_noise_snu: f64,
    pub symbol_rate_hz: f64,
    pub reconciliation_efficiency: OneOrMany,
    #[serde(default = "zero")]
    pub frame_error_rate: OneOrMany,
    #[serde(default = "default_utilization")]
    pub frame_utilization: f64,
}

fn default_attenuation() -> f64 {
    0.2
}

fn zero() -> OneOrMany {
    OneOrMany::One(0.0)
}

fn default_utilization() -> f64 {
    0.5
}

impl NetworkSpec {
    /// Raw network configuration; shape errors are collected, value checks happen in
    /// [`NetworkConfig::validate`].
    pub fn to_config(&self) -> Result<NetworkConfig, CliError> {
        let mut errs = Vec::new();
        let n = self.n_w * self.n_b;
        let allocation = match (&self.isolation_db, &self.allocation_matrix) {
            (Some(db), None) => Allocation::Isolation { db: *db },
            (None, Some(m)) => Allocation::Matrix(m.clone()),
            (None, None) => {
                errs.push("network: one of isolation_db or allocation_matrix is required".into());
                Allocation::Isolation { db: f64::INFINITY }
            }
            (Some(_), Some(_)) => {
                errs.push("network: isolation_db and allocation_matrix are mutually exclusive".into());
                Allocation::Isolation { db: f64::INFINITY }
            }
        };
        let channel = match (&self.distance_km, &self.transmittance) {
            (Some(d), None) => ChannelSpec::Distance {
                km: d.expand(n, "distance_km", &mut errs),
                alpha_db_per_km: self.attenuation_db_per_km,
            },
            (None, Some(t)) => ChannelSpec::Transmittance(t.expand(n, "transmittance", &mut errs)),
            _ => {
                errs.push("network: exactly one of distance_km or transmittance is required".into());
                ChannelSpec::Transmittance(vec![f64::NAN; n])
            }
        };
        let branch_ratios = match &self.branch_ratios {
            Some(r) => r.expand(self.n_b, "branch_ratios", &mut errs),
            None => vec![1.0 / self.n_b.max(1) as f64; self.n_b],
        };
        let cfg = NetworkConfig {
            n_w: self.n_w,
            n_b: self.n_b,
            v_a: self.modulation_variance_snu.expand(self.n_w, "modulation_variance_snu", &mut errs),
            allocation,
            branch_ratios,
            channel,
            epsilon: self.excess_noise_snu.expand(n, "excess_noise_snu", &mut errs),
            theta_p: self.phase_rad.expand(n, "phase_rad", &mut errs),
            eta_e: self.detector_efficiency,
            v_el: self.electronic_noise_snu,
            f_r: self.symbol_rate_hz,
            beta: self.reconciliation_efficiency.expand(n, "reconciliation_efficiency", &mut errs),
            fer: self.frame_error_rate.expand(n, "frame_error_rate", &mut errs),
            frame_utilization: self.frame_utilization,
        };
        if errs.is_empty() {
            Ok(cfg)
        } else {
            Err(CliError::Validation(errs))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    pub capability: Capability,
    pub partition: Partition,
    pub level: Level,
    #[serde(default = "default_block")]
    pub block_size: u64,
    #[serde(default = "default_eps")]
    pub eps_pe: f64,
    #[serde(default = "default_eps")]
    pub eps_smooth: f64,
    #[serde(default = "default_eps")]
    pub eps_hash: f64,
    #[serde(default = "default_preset")]
    pub preset: CorrectionPreset,
}

fn default_block() -> u64 {
    10_000_000_000
}

fn default_eps() -> f64 {
    1e-10
}

fn default_preset() -> CorrectionPreset {
    CorrectionPreset::Leverrier2010
}

impl PolicySpec {
    pub fn policy(&self) -> SecurityPolicy {
        SecurityPolicy {
            capability: self.capability,
            partition: self.partition,
            level: self.level,
            block_size: self.block_size,
            eps_pe: self.eps_pe,
            eps_smooth: self.eps_smooth,
            eps_hash: self.eps_hash,
            preset: self.preset,
        }
    }

    /// File-name friendly label such as `local-trusted-AC`.
    pub fn label(&self) -> String {
        let cap = match self.capability {
            Capability::Local => "local",
            Capability::Global => "global",
        };
        let part = match self.partition {
            Partition::Untrusted => "untrusted",
            Partition::Trusted => "trusted",
            Partition::AllMeasured => "all-measured",
        };
        format!("{cap}-{part}-{:?}", self.level)
    }
}

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    DistanceKm,
    ExcessNoiseSnu,
    ModulationVarianceSnu,
    IsolationDb,
    BlockSize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HeatmapSpec {
    /// Users sampled from each frequency group.
    pub samples_per_group: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PmSpec {
    #[serde(default = "default_symbols")]
    pub symbols: usize,
    #[serde(default = "default_monitor")]
    pub monitor_ratio: f64,
    #[serde(default = "default_coupler")]
    pub coupler_ratio: f64,
    /// Monitor mode-matching factor η_A.
    #[serde(default = "one")]
    pub monitor_mode_matching: f64,
    /// Absorb η_A into the measured monitor variance instead of dividing it out.
    #[serde(default = "yes")]
    pub absorb_mode_matching: bool,
    #[serde(default)]
    pub overlap: Overlap,
    #[serde(default = "default_capability")]
    pub capability: Capability,
    #[serde(default = "default_offset")]
    pub lo_offset_rad_per_sample: f64,
    #[serde(default = "default_step")]
    pub phase_step_variance_rad2: f64,
    #[serde(default = "default_beacon")]
    pub beacon_snr_db: f64,
    #[serde(default = "default_window")]
    pub smoothing_window: usize,
    #[serde(default = "one_usize")]
    pub downsample: usize,
    #[serde(default = "default_floor")]
    pub beacon_snr_floor_db: f64,
    /// Relative tolerance of the equivalence check.
    #[serde(default = "default_rel")]
    pub rel_tolerance: f64,
    /// Statistical tolerance of the equivalence check, in standard errors.
    #[serde(default = "default_sigma")]
    pub sigma_tolerance: f64,
}

fn default_symbols() -> usize {
    1_000_000
}
fn default_monitor() -> f64 {
    TapRatios::default().monitor
}
fn default_coupler() -> f64 {
    TapRatios::default().coupler
}
fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn yes() -> bool {
    true
}
fn default_capability() -> Capability {
    Capability::Local
}
fn default_offset() -> f64 {
    DspConfig::default().offset
}
fn default_step() -> f64 {
    DspConfig::default().step_variance
}
fn default_beacon() -> f64 {
    DspConfig::default().beacon_snr_db
}
fn default_window() -> usize {
    DspConfig::default().window
}
fn default_floor() -> f64 {
    DspConfig::default().snr_floor_db
}
fn default_rel() -> f64 {
    0.01
}
fn default_sigma() -> f64 {
    3.0
}

impl Default for PmSpec {
    fn default() -> Self {
        toml::from_str("").expect("every field has a default")
    }
}

impl PmSpec {
    pub fn config(&self) -> PmConfig {
        PmConfig {
            symbols: self.symbols,
            taps: TapRatios { monitor: self.monitor_ratio, coupler: self.coupler_ratio },
            eta_a: self.monitor_mode_matching,
            calibration: if self.absorb_mode_matching {
                MonitorCalibration::Absorbed
            } else {
                MonitorCalibration::Known(self.monitor_mode_matching)
            },
            dsp: DspConfig {
                offset: self.lo_offset_rad_per_sample,
                step_variance: self.phase_step_variance_rad2,
                beacon_snr_db: self.beacon_snr_db,
                window: self.smoothing_window,
                downsample: self.downsample,
                snr_floor_db: self.beacon_snr_floor_db,
            },
            overlap: self.overlap,
            capability: self.capability,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub architecture: ArchitectureSpec,
    pub network: NetworkSpec,
    #[serde(rename = "policy")]
    pub policies: Vec<PolicySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heatmap: Option<HeatmapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pm: Option<PmSpec>,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let value: toml::Value = toml::from_str(text).map_err(|e| CliError::Validation(vec![e.to_string()]))?;
        match value.get("schema").and_then(|s| s.as_str()) {
            Some(SCHEMA) => {}
            Some(other) => {
                return Err(CliError::Validation(vec![format!("unsupported schema {other:?}, expected {SCHEMA:?}")]))
            }
            None => return Err(CliError::Validation(vec![format!("missing schema field, expected {SCHEMA:?}")])),
        }
        let scenario: Scenario = toml::from_str(text).map_err(|e| CliError::Validation(vec![e.to_string()]))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario types serialize to TOML")
    }

    /// Checks that do not need the physics layer.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut errs = Vec::new();
        if self.policies.is_empty() {
            errs.push("at least one [[policy]] is required".into());
        }
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                errs.push("sweep.values is empty".into());
            }
            if s.values.iter().any(|v| !v.is_finite()) {
                errs.push("sweep.values must be finite".into());
            }
            if s.values.windows(2).any(|w| w[0] >= w[1]) {
                errs.push("sweep.values must be strictly increasing".into());
            }
            if s.parameter == SweepParameter::DistanceKm && self.network.distance_km.is_none() {
                errs.push("sweep over distance_km needs network.distance_km".into());
            }
            if s.parameter == SweepParameter::IsolationDb && self.network.isolation_db.is_none() {
                errs.push("sweep over isolation_db needs network.isolation_db".into());
            }
        }
        if let Some(h) = &self.heatmap {
            if h.samples_per_group == 0 || h.samples_per_group > self.network.n_b {
                errs.push(format!(
                    "heatmap.samples_per_group = {} must lie in 1..={}",
                    h.samples_per_group, self.network.n_b
                ));
            }
        }
        if let Err(CliError::Validation(mut e)) = self.architecture.validate() {
            errs.append(&mut e);
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errs))
        }
    }

    /// Copy with the sweep parameter set to `value` everywhere.
    pub fn with_parameter(&self, parameter: SweepParameter, value: f64) -> Scenario {
        let mut s = self.clone();
        match parameter {
            SweepParameter::DistanceKm => s.network.distance_km = Some(value.into()),
            SweepParameter::ExcessNoiseSnu => s.network.excess_noise_snu.set_all(value),
            SweepParameter::ModulationVarianceSnu => s.network.modulation_variance_snu.set_all(value),
            SweepParameter::IsolationDb => s.network.isolation_db = Some(value),
            SweepParameter::BlockSize => {
                for p in &mut s.policies {
                    p.block_size = value as u64;
                }
            }
        }
        s
    }
}
