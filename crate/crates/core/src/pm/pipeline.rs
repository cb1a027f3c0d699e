use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{
    channel_transform, empirical_covariance, passive_preparation, qlt_heterodyne, qnu_heterodyne_with_dsp,
    sample_thermal_ensemble, substream, DspConfig, EmpiricalCovariance, MonitorCalibration, Overlap, QuadratureTrace,
    Stage, TapRatios,
};
use crate::error::{Error, Result};
use crate::network::{Capability, Network};

/// Settings of one prepare-and-measure run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PmConfig {
    pub symbols: usize,
    pub taps: TapRatios,
    /// Mode-matching factor of the monitor detector.
    pub eta_a: f64,
    pub calibration: MonitorCalibration,
    pub dsp: DspConfig,
    pub overlap: Overlap,
    pub capability: Capability,
}

impl Default for PmConfig {
    fn default() -> Self {
        Self {
            symbols: 1_000_000,
            taps: TapRatios::default(),
            eta_a: 1.0,
            calibration: MonitorCalibration::Absorbed,
            dsp: DspConfig::default(),
            overlap: Overlap::Compressed,
            capability: Capability::Local,
        }
    }
}

/// Traces of every stage. Sender stages are indexed by frequency mode, receiver stages by user slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PmRun {
    pub seed: u64,
    pub source: Vec<QuadratureTrace>,
    pub monitor: Vec<QuadratureTrace>,
    pub output: Vec<QuadratureTrace>,
    pub alice_detected: Vec<QuadratureTrace>,
    pub received: Vec<QuadratureTrace>,
    pub bob_detected: Vec<QuadratureTrace>,
    /// Root-mean-square phase-recovery error per user in rad.
    pub phase_error_rms: Vec<f64>,
}

impl PmRun {
    /// Every trace in stage order.
    pub fn traces(&self) -> impl Iterator<Item = &QuadratureTrace> {
        self.source
            .iter()
            .chain(&self.monitor)
            .chain(&self.output)
            .chain(&self.alice_detected)
            .chain(&self.received)
            .chain(&self.bob_detected)
    }
}

/// Runs source, preparation, channel and both detectors for every mode and user.
///
/// Each `(stage, mode or user)` draws from its own substream of `seed`, so results do not
/// depend on evaluation order.
pub fn simulate_network(net: &Network, cfg: &PmConfig, seed: u64) -> Result<PmRun> {
    cfg.taps.validate()?;
    cfg.dsp.validate()?;
    if cfg.symbols == 0 {
        return Err(Error::Domain("at least one symbol is required".into()));
    }
    let n = cfg.symbols;
    let mut run = PmRun {
        seed,
        source: Vec::new(),
        monitor: Vec::new(),
        output: Vec::new(),
        alice_detected: Vec::new(),
        received: Vec::new(),
        bob_detected: Vec::new(),
        phase_error_rms: Vec::new(),
    };
    for k in 0..net.n_w() {
        let v0 = cfg.taps.source_variance(net.modulation_variance(k + 1));
        let src = sample_thermal_ensemble(v0, n, &mut substream(seed, Stage::Source, k))?;
        let prep = passive_preparation(&src, cfg.taps)?;
        let d_a = qlt_heterodyne(
            &prep.monitor,
            net.eta_e(),
            net.v_el(),
            cfg.eta_a,
            &mut substream(seed, Stage::DetectedAlice, k),
        )?;
        run.source.push(QuadratureTrace::new(Stage::Source, k, seed, src)?);
        run.monitor.push(QuadratureTrace::new(Stage::Monitor, k, seed, prep.monitor)?);
        run.output.push(QuadratureTrace::new(Stage::Output, k, seed, prep.output)?);
        run.alice_detected.push(QuadratureTrace::new(Stage::DetectedAlice, k, seed, d_a)?);
    }
    let outputs: Vec<Vec<_>> = run.output.iter().map(|t| t.samples.clone()).collect();
    for user in net.users() {
        let s = user.slot();
        let field = channel_transform(
            &outputs,
            net,
            user,
            cfg.capability,
            cfg.overlap,
            &mut substream(seed, Stage::Channel, s),
        )?;
        let dsp = qnu_heterodyne_with_dsp(&field, &cfg.dsp, net.eta_e(), net.v_el(), seed, s)?;
        let two_pi = 2.0 * core::f64::consts::PI;
        let ms = dsp
            .true_phase
            .iter()
            .zip(&dsp.recovered_phase)
            .map(|(a, b)| {
                let d = a - b;
                (d - two_pi * (d / two_pi).round()).powi(2)
            })
            .sum::<f64>()
            / dsp.true_phase.len() as f64;
        run.phase_error_rms.push(ms.sqrt());
        run.received.push(QuadratureTrace::new(Stage::Channel, s, seed, field)?);
        run.bob_detected.push(QuadratureTrace::new(Stage::DetectedBob, s, seed, dsp.detected)?);
    }
    Ok(run)
}

/// Entanglement-based covariance reconstructed from prepare-and-measure data.
///
/// Ordering matches the network covariance: Alice modes, then users by slot. Alice rows use the
/// prepared amplitudes γ₄ (variance `V_A`, so `V = V_A + 1`); cross terms are rescaled by
/// `C/V_A` and conjugated in `p`, and detected outcomes are referred back through the detector
/// model `ηΣ + (1 − η + v_el)`.
pub fn eb_covariance_from_pm(run: &PmRun, net: &Network) -> Result<EmpiricalCovariance> {
    if run.output.len() != net.n_w() || run.bob_detected.len() != net.n_users() {
        return Err(Error::Input("run does not match the network".into()));
    }
    let streams: Vec<&[_]> = run.output.iter().chain(&run.bob_detected).map(|t| t.samples.as_slice()).collect();
    let mut e = empirical_covariance(&streams)?;
    let eta = net.eta_e();
    let v_el = net.v_el();
    let na = 2 * net.n_w();
    let d = e.cov.nrows();
    let alice_factor = |a: usize| -> f64 {
        let v_a = net.modulation_variance(a / 2 + 1);
        let c = ((v_a + 1.0).powi(2) - 1.0).sqrt();
        let z = if a % 2 == 0 { 1.0 } else { -1.0 };
        z * c / v_a
    };
    for a in 0..d {
        for b in 0..d {
            let f = match (a < na, b < na) {
                (true, true) => 1.0,
                (true, false) => alice_factor(a) / eta.sqrt(),
                (false, true) => alice_factor(b) / eta.sqrt(),
                (false, false) => 1.0 / eta,
            };
            e.cov[(a, b)] *= f;
            e.standard_error[(a, b)] *= f.abs();
        }
        if a < na {
            e.cov[(a, a)] += 1.0;
        } else {
            e.cov[(a, a)] -= (1.0 - eta + v_el) / eta;
        }
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{build_network_covariance, NetworkConfig};
    use crate::pm::{estimate_parameters, EstimationConfig};

    fn point_to_point(t: f64, eps: f64) -> Network {
        let mut c = NetworkConfig::uniform(1, 1, 4.47, f64::INFINITY, 0.0, 0.17, eps, 0.56, 0.31);
        c.channel = crate::network::ChannelSpec::Transmittance(alloc::vec![t]);
        c.validate().unwrap()
    }

    fn estimate(net: &Network, seed: u64) -> crate::pm::EstimationResult {
        let cfg = PmConfig::default();
        let run = simulate_network(net, &cfg, seed).unwrap();
        let est =
            EstimationConfig { eta_e: net.eta_e(), v_el: net.v_el(), taps: cfg.taps, calibration: cfg.calibration };
        estimate_parameters(&run.alice_detected[0].samples, &run.bob_detected[0].samples, &est).unwrap()
    }

    #[test]
    fn identical_seeds_give_identical_traces() {
        let net = NetworkConfig::uniform(2, 2, 4.47, 30.0, 5.0, 0.17, 0.07, 0.56, 0.31).validate().unwrap();
        let cfg = PmConfig { symbols: 2_000, ..Default::default() };
        let a = simulate_network(&net, &cfg, 11).unwrap();
        assert_eq!(a, simulate_network(&net, &cfg, 11).unwrap());
        assert_ne!(a, simulate_network(&net, &cfg, 12).unwrap());
    }

    #[test]
    fn excess_noise_is_recovered() {
        let t = 10f64.powf(-0.017 * 5.0);
        for (eps, seed) in [(0.0, 21), (0.07, 22)] {
            let r = estimate(&point_to_point(t, eps), seed);
            assert!((r.epsilon_hat - eps).abs() < r.epsilon_half_width, "{r:?}");
            assert!((r.v_a_hat - 4.47).abs() < r.v_a_half_width, "{r:?}");
        }
    }

    #[test]
    fn transmittance_bias_is_small() {
        for (t, seed) in [(0.1, 31), (0.5, 32), (0.9, 33)] {
            let r = estimate(&point_to_point(t, 0.07), seed);
            assert!((r.t_hat / t - 1.0).abs() < 0.01, "{t} {r:?}");
        }
    }

    #[test]
    fn too_few_samples_are_rejected() {
        let z = alloc::vec![crate::pm::Amplitude::new(0.0, 0.0); 100];
        let est = EstimationConfig {
            eta_e: 0.56,
            v_el: 0.31,
            taps: TapRatios::default(),
            calibration: MonitorCalibration::Absorbed,
        };
        assert!(matches!(estimate_parameters(&z, &z, &est), Err(Error::InsufficientSamples { .. })));
    }

    #[test]
    fn shot_noise_closure_with_signal_off() {
        let n = 200_000;
        let zero = alloc::vec![crate::pm::Amplitude::new(0.0, 0.0); n];
        let out = qnu_heterodyne_with_dsp(&zero, &DspConfig::default(), 0.56, 0.31, 41, 0).unwrap();
        let e = empirical_covariance(&[&out.detected]).unwrap();
        for q in 0..2 {
            assert!((e.cov[(q, q)] - 1.31).abs() < 3.0 * e.standard_error[(q, q)]);
        }
    }

    #[test]
    fn small_network_matches_entanglement_based_model() {
        let net = NetworkConfig::uniform(2, 2, 4.47, 20.0, 5.0, 0.17, 0.07, 0.56, 0.31).validate().unwrap();
        let cfg = PmConfig { symbols: 200_000, ..Default::default() };
        let run = simulate_network(&net, &cfg, 51).unwrap();
        let e = eb_covariance_from_pm(&run, &net).unwrap();
        let eb = build_network_covariance(&net, cfg.capability).unwrap();
        for i in 0..e.cov.nrows() {
            for j in 0..e.cov.nrows() {
                let tol = (0.01 * eb.cov()[(i, j)].abs()).max(4.0 * e.standard_error[(i, j)]);
                assert!(
                    (e.cov[(i, j)] - eb.cov()[(i, j)]).abs() < tol,
                    "({i},{j}) {} vs {}",
                    e.cov[(i, j)],
                    eb.cov()[(i, j)]
                );
            }
        }
    }
}
