use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::source::circular_gaussian;
use super::{substream, Amplitude, Stage};
use crate::error::{Error, Result};

/// Receiver phase-recovery model in discrete time, one sample per `downsample` of a symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DspConfig {
    /// Local-oscillator frequency offset in rad per sample.
    pub offset: f64,
    /// Variance of the Wiener phase step per sample in rad².
    pub step_variance: f64,
    /// Beacon beat power over its additive noise, in dB.
    pub beacon_snr_db: f64,
    /// Moving-average length of the phase estimator in samples.
    pub window: usize,
    /// Samples integrated per symbol.
    pub downsample: usize,
    /// Minimum beacon SNR after smoothing, in dB.
    pub snr_floor_db: f64,
}

impl Default for DspConfig {
    fn default() -> Self {
        Self { offset: 1e-3, step_variance: 1e-6, beacon_snr_db: 25.0, window: 64, downsample: 1, snr_floor_db: 10.0 }
    }
}

impl DspConfig {
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if self.window == 0 {
            errs.push("window must be at least 1".into());
        }
        if self.downsample == 0 {
            errs.push("downsample must be at least 1".into());
        }
        if !(self.step_variance >= 0.0) {
            errs.push(alloc::format!("phase step variance {} must be non-negative", self.step_variance));
        }
        if !(self.offset.abs() < core::f64::consts::PI) {
            errs.push(alloc::format!("frequency offset {} must lie in (-π, π)", self.offset));
        }
        if !self.beacon_snr_db.is_finite() && self.beacon_snr_db != f64::INFINITY {
            errs.push("beacon SNR must be a number or +inf".into());
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errs))
        }
    }

    /// Beacon SNR in dB after averaging over the window.
    pub fn effective_snr_db(&self) -> f64 {
        self.beacon_snr_db + 10.0 * (self.window as f64).log10()
    }
}

/// Unit phasor `e^{jφ}`.
fn cis(phi: f64) -> Amplitude {
    Amplitude::new(phi.cos(), phi.sin())
}

/// Static frequency ramp plus Wiener phase walk starting at zero.
pub fn synthesize_phase<R: Rng + ?Sized>(n_samples: usize, cfg: &DspConfig, rng: &mut R) -> Vec<f64> {
    let mut walk = 0.0;
    let step = if cfg.step_variance > 0.0 {
        Some(Normal::new(0.0, cfg.step_variance.sqrt()).expect("positive spread"))
    } else {
        None
    };
    (0..n_samples)
        .map(|t| {
            let phi = cfg.offset * t as f64 + walk;
            if let Some(s) = &step {
                walk += s.sample(rng);
            }
            phi
        })
        .collect()
}

/// Phase trace estimated from the beacon beat.
///
/// The frequency offset comes from the lag-one autocorrelation; the residual phase is smoothed
/// by a centred moving average and unwrapped.
pub fn recover_phase(beacon: &[Amplitude], cfg: &DspConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if cfg.effective_snr_db() < cfg.snr_floor_db {
        return Err(Error::RecoveryFailure(alloc::format!(
            "smoothed beacon SNR {:.2} dB below floor {:.2} dB",
            cfg.effective_snr_db(),
            cfg.snr_floor_db
        )));
    }
    let n = beacon.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { required: 2, got: n });
    }
    let lag: Amplitude = beacon.windows(2).map(|w| w[1] * w[0].conj()).sum();
    let omega = lag.im.atan2(lag.re);
    let residual: Vec<Amplitude> = beacon.iter().enumerate().map(|(t, z)| z * cis(-omega * t as f64)).collect();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(Amplitude::new(0.0, 0.0));
    for z in &residual {
        let last = *prefix.last().expect("non-empty");
        prefix.push(last + z);
    }
    let half = cfg.window / 2;
    let mut out = Vec::with_capacity(n);
    let mut prev = 0.0;
    for t in 0..n {
        let lo = t.saturating_sub(half);
        let hi = (lo + cfg.window).min(n);
        let s = prefix[hi] - prefix[lo];
        let mut psi = s.im.atan2(s.re);
        if t > 0 {
            let two_pi = 2.0 * core::f64::consts::PI;
            psi -= two_pi * ((psi - prev) / two_pi).round();
        }
        prev = psi;
        out.push(omega * t as f64 + psi);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DspOutput {
    /// Recovered symbols D_B after compensation, DC removal and integrate-and-dump.
    pub detected: Vec<Amplitude>,
    /// Injected phase per sample.
    pub true_phase: Vec<f64>,
    /// Recovered phase per sample.
    pub recovered_phase: Vec<f64>,
}

/// Receiver heterodyne with a free-running local oscillator and beacon-aided phase recovery.
///
/// Randomness is drawn from the phase, beacon and detector substreams of `(seed, index)`.
pub fn qnu_heterodyne_with_dsp(
    field: &[Amplitude],
    cfg: &DspConfig,
    eta_e: f64,
    v_el: f64,
    seed: u64,
    index: usize,
) -> Result<DspOutput> {
    cfg.validate()?;
    if !(eta_e > 0.0 && eta_e <= 1.0) || !(v_el >= 0.0) {
        return Err(Error::Domain(alloc::format!("detector parameters η={eta_e}, v_el={v_el} out of range")));
    }
    let s = cfg.downsample;
    let n_samples = field.len() * s;
    let true_phase = synthesize_phase(n_samples, cfg, &mut substream(seed, Stage::PhaseNoise, index));
    let beacon_noise = if cfg.beacon_snr_db.is_infinite() {
        alloc::vec![Amplitude::new(0.0, 0.0); n_samples]
    } else {
        circular_gaussian(10f64.powf(-cfg.beacon_snr_db / 10.0), n_samples, &mut substream(seed, Stage::Beacon, index))
    };
    let beacon: Vec<Amplitude> = true_phase.iter().zip(&beacon_noise).map(|(&phi, w)| cis(phi) + w).collect();
    let recovered_phase = recover_phase(&beacon, cfg)?;
    let noise = circular_gaussian(s as f64 * (1.0 + v_el), n_samples, &mut substream(seed, Stage::DetectedBob, index));
    let gain = eta_e.sqrt();
    let mut detected: Vec<Amplitude> = field
        .iter()
        .enumerate()
        .map(|(j, z)| {
            let mut acc = Amplitude::new(0.0, 0.0);
            for t in j * s..(j + 1) * s {
                let y = z * cis(true_phase[t]) * gain + noise[t];
                acc += y * cis(-recovered_phase[t]);
            }
            acc / s as f64
        })
        .collect();
    let dc = detected.iter().sum::<Amplitude>() / detected.len().max(1) as f64;
    for z in &mut detected {
        *z -= dc;
    }
    Ok(DspOutput { detected, true_phase, recovered_phase })
}
