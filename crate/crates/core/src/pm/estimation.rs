#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{Amplitude, TapRatios};
use crate::error::{Error, Result};

pub const MIN_ESTIMATION_SAMPLES: usize = 10_000;

/// How the monitor mode-matching factor η_A enters the calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MonitorCalibration {
    /// η_A is known and divided out of the monitor power.
    Known(f64),
    /// η_A is absorbed into the measured V_P (equivalently set to one).
    Absorbed,
}

impl MonitorCalibration {
    fn factor(self) -> f64 {
        match self {
            MonitorCalibration::Known(eta_a) => eta_a,
            MonitorCalibration::Absorbed => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationConfig {
    pub eta_e: f64,
    pub v_el: f64,
    pub taps: TapRatios,
    pub calibration: MonitorCalibration,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult {
    pub v_a_hat: f64,
    pub t_hat: f64,
    pub epsilon_hat: f64,
    pub samples: usize,
    /// Three-sigma half-widths of the three estimates.
    pub v_a_half_width: f64,
    pub t_half_width: f64,
    pub epsilon_half_width: f64,
    /// Set when `epsilon_hat` is negative within the noise slack.
    pub negative_epsilon: bool,
}

fn mean(v: impl Iterator<Item = f64>, n: usize) -> f64 {
    v.sum::<f64>() / n as f64
}

/// Modulation variance, transmittance and Alice-referred excess noise from paired traces.
///
/// `d_a` is the monitor outcome of the user's frequency mode and `d_b` the user's recovered
/// outcome. The estimated transmittance is the effective one `T_d r_h D_kk²`.
pub fn estimate_parameters(d_a: &[Amplitude], d_b: &[Amplitude], cfg: &EstimationConfig) -> Result<EstimationResult> {
    if d_a.len() != d_b.len() {
        return Err(Error::Input(alloc::format!("trace lengths differ: {} vs {}", d_a.len(), d_b.len())));
    }
    let n = d_a.len();
    if n < MIN_ESTIMATION_SAMPLES {
        return Err(Error::InsufficientSamples { required: MIN_ESTIMATION_SAMPLES, got: n });
    }
    cfg.taps.validate()?;
    let eta_a = cfg.calibration.factor();
    let shot = 1.0 + cfg.v_el;
    let pa = mean(d_a.iter().map(|z| z.norm_sqr()), n);
    let pb = mean(d_b.iter().map(|z| z.norm_sqr()), n);
    let pa_sq = mean(d_a.iter().map(|z| z.norm_sqr().powi(2)), n);
    let pb_sq = mean(d_b.iter().map(|z| z.norm_sqr().powi(2)), n);
    let se_pa = ((pa_sq - pa * pa).max(0.0) / n as f64).sqrt();
    let se_pb = ((pb_sq - pb * pb).max(0.0) / n as f64).sqrt();

    let to_output = cfg.taps.output_factor() / cfg.taps.monitor;
    let v_p = (pa - shot) / (cfg.eta_e * eta_a);
    let v_a = v_p * to_output;
    if !(v_a > 0.0) {
        return Err(Error::Numerical(alloc::format!("monitor power {pa} gives no modulation")));
    }
    let v_a_half_width = 3.0 * se_pa * to_output / (cfg.eta_e * eta_a);

    // E[D_B D_A*] = √η_e · √(η_e η_A) · √(r_m / ((1 − r_m) c)) · g · V_A
    let scale = cfg.eta_e.sqrt() * (cfg.eta_e * eta_a).sqrt() * to_output.recip().sqrt() * v_a;
    let cross = d_b.iter().zip(d_a).map(|(b, a)| b * a.conj()).sum::<Amplitude>() / n as f64;
    let g = cross / scale;
    let t_hat = g.norm_sqr();
    let se_cross = (pa * pb / n as f64).sqrt();
    let t_half_width = 3.0 * 2.0 * t_hat.sqrt() * se_cross / scale + 2.0 * t_hat * v_a_half_width / v_a;
    if !(0.0..=1.05).contains(&t_hat) {
        return Err(Error::Numerical(alloc::format!("estimated transmittance {t_hat} outside [0, 1.05]")));
    }
    let eta_t = cfg.eta_e * t_hat;
    let epsilon_hat = (pb - shot - eta_t * v_a) / eta_t;
    let epsilon_half_width =
        3.0 * se_pb / eta_t + epsilon_hat.abs() * t_half_width / t_hat.max(f64::MIN_POSITIVE) + v_a_half_width;
    if epsilon_hat < -0.05 {
        return Err(Error::Numerical(alloc::format!("estimated excess noise {epsilon_hat} below -0.05")));
    }
    Ok(EstimationResult {
        v_a_hat: v_a,
        t_hat,
        epsilon_hat,
        samples: n,
        v_a_half_width,
        t_half_width,
        epsilon_half_width,
        negative_epsilon: epsilon_hat < 0.0,
    })
}
