use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::Amplitude;
use crate::error::{Error, Result};

/// Power ratios of the two passive splitters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TapRatios {
    /// Fraction of the source power sent to the monitor detector.
    pub monitor: f64,
    /// Transmission of the coupler on the output branch.
    pub coupler: f64,
}

impl Default for TapRatios {
    /// 1:99 tap with the 99% port monitored, followed by a 50:50 coupler.
    fn default() -> Self {
        Self { monitor: 0.99, coupler: 0.5 }
    }
}

impl TapRatios {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("monitor", self.monitor), ("coupler", self.coupler)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Domain(alloc::format!("{name} ratio {v} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Power transmission from the source to the output branch.
    pub fn output_factor(&self) -> f64 {
        (1.0 - self.monitor) * self.coupler
    }

    /// Source variance producing modulation variance `v_a` at the output.
    pub fn source_variance(&self, v_a: f64) -> f64 {
        v_a / self.output_factor()
    }

    /// Monitor variance `V_P` corresponding to modulation variance `v_a`.
    pub fn monitor_variance(&self, v_a: f64) -> f64 {
        self.monitor * self.source_variance(v_a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prepared {
    pub monitor: Vec<Amplitude>,
    pub output: Vec<Amplitude>,
}

/// Splits source amplitudes into the monitor and output branches.
///
/// The vacuum entering the unused splitter ports has zero P-amplitude, so both branches are
/// deterministic scalings of the input.
pub fn passive_preparation(source: &[Amplitude], taps: TapRatios) -> Result<Prepared> {
    taps.validate()?;
    let m = taps.monitor.sqrt();
    let o = taps.output_factor().sqrt();
    Ok(Prepared { monitor: source.iter().map(|z| z * m).collect(), output: source.iter().map(|z| z * o).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pm::{sample_thermal_ensemble, substream, Stage};

    #[test]
    fn full_tap_sends_everything_to_monitor() {
        let src = [Amplitude::new(1.0, -2.0)];
        let p = passive_preparation(&src, TapRatios { monitor: 1.0, coupler: 0.5 }).unwrap();
        assert_eq!(p.output[0], Amplitude::new(0.0, 0.0));
        assert_eq!(p.monitor[0], src[0]);
    }

    #[test]
    fn output_variance_and_correlation() {
        let taps = TapRatios::default();
        let v0 = taps.source_variance(4.47);
        let n = 1_000_000;
        let src = sample_thermal_ensemble(v0, n, &mut substream(4, Stage::Source, 0)).unwrap();
        let p = passive_preparation(&src, taps).unwrap();
        let v_a = p.output.iter().map(|z| z.norm_sqr()).sum::<f64>() / n as f64;
        assert!((v_a - 4.47).abs() < 3.0 * 4.47 / (n as f64).sqrt());
        let cross = p.monitor.iter().zip(&p.output).map(|(a, b)| (a * b.conj()).re).sum::<f64>() / n as f64;
        let expected = (taps.monitor * taps.output_factor()).sqrt() * v0;
        assert!((cross - expected).abs() < 3.0 * expected / (n as f64).sqrt());
    }
}
