use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::Level;

/// Named coefficient sets for the finite-size and composable corrections.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrectionPreset {
    /// Smoothing term `7 sqrt(log2(2/eps_s)/n)`, privacy-amplification term `(2/n) log2(1/eps_hash)`,
    /// parameter estimation on `m = n` symbols with a single confidence level `eps_pe`.
    Leverrier2010,
    /// Same terms, with `eps_pe` split evenly between the transmittance and noise estimates.
    Leverrier2015,
}

/// Coefficients behind a preset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub smoothing: f64,
    /// Parameter-estimation symbols per key symbol.
    pub pe_fraction: f64,
    /// Number of estimated parameters sharing `eps_pe`.
    pub pe_union: f64,
    /// Effective dimension `d` in the composable AEP term.
    pub aep_dimension: f64,
}

impl CorrectionPreset {
    pub fn coefficients(&self) -> Coefficients {
        match self {
            CorrectionPreset::Leverrier2010 => {
                Coefficients { smoothing: 7.0, pe_fraction: 1.0, pe_union: 1.0, aep_dimension: 5.0 }
            }
            CorrectionPreset::Leverrier2015 => {
                Coefficients { smoothing: 7.0, pe_fraction: 1.0, pe_union: 2.0, aep_dimension: 5.0 }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CorrectionPreset::Leverrier2010 => "leverrier2010",
            CorrectionPreset::Leverrier2015 => "leverrier2015",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSizePolicy {
    pub level: Level,
    pub n: u64,
    pub eps_pe: f64,
    pub eps_smooth: f64,
    pub eps_hash: f64,
    pub preset: CorrectionPreset,
}

impl FiniteSizePolicy {
    pub fn asymptotic() -> Self {
        Self {
            level: Level::AC,
            n: 1,
            eps_pe: 1e-10,
            eps_smooth: 1e-10,
            eps_hash: 1e-10,
            preset: CorrectionPreset::Leverrier2010,
        }
    }

    /// Whether the level replaces the channel estimate with its worst case.
    pub fn uses_worst_case(&self) -> bool {
        matches!(self.level, Level::FS | Level::FC)
    }
}

/// Explicit correction `Delta` in bits per symbol, excluding the parameter-estimation penalty.
///
/// `FS` adds the smoothing and privacy-amplification terms; `CS` and `FC` add the composable
/// term `Delta_AEP / sqrt(n)` with `Delta_AEP = 4 log2(2^(d/2) + 2) sqrt(log2(18 / (eps_pe^2 eps_s^4)))`.
pub fn finite_size_delta(policy: &FiniteSizePolicy) -> Result<f64> {
    if policy.level == Level::AC {
        return Ok(0.0);
    }
    if policy.n == 0 {
        return Err(Error::Domain("block size must be at least 1".into()));
    }
    for (name, e) in [("eps_pe", policy.eps_pe), ("eps_smooth", policy.eps_smooth), ("eps_hash", policy.eps_hash)] {
        if !(e > 0.0 && e < 1.0) {
            return Err(Error::Domain(format!("{name} = {e} outside (0, 1)")));
        }
    }
    let c = policy.preset.coefficients();
    let n = policy.n as f64;
    let mut delta =
        c.smoothing * ((2.0 / policy.eps_smooth).log2() / n).sqrt() + 2.0 / n * (1.0 / policy.eps_hash).log2();
    if matches!(policy.level, Level::CS | Level::FC) {
        let aep = 4.0
            * (2f64.powf(c.aep_dimension / 2.0) + 2.0).log2()
            * (18.0 / (policy.eps_pe.powi(2) * policy.eps_smooth.powi(4))).log2().sqrt();
        delta += aep / n.sqrt();
    }
    Ok(delta)
}

/// Inverse complementary error function on `(0, 2)`.
pub fn erfc_inv(y: f64) -> f64 {
    if !(y > 0.0 && y < 2.0) {
        return if y == 0.0 {
            f64::INFINITY
        } else if y == 2.0 {
            f64::NEG_INFINITY
        } else {
            f64::NAN
        };
    }
    if y > 1.0 {
        return -erfc_inv(2.0 - y);
    }
    let target = y.ln();
    let mut z = (-(0.5 * y).ln()).sqrt() * 0.9;
    for _ in 0..100 {
        let e = libm::erfc(z);
        let f = e.ln() - target;
        let df = -2.0 / core::f64::consts::PI.sqrt() * (-z * z).exp() / e;
        let step = f / df;
        z -= step;
        if step.abs() < 1e-15 * z.abs().max(1.0) {
            break;
        }
    }
    z
}

/// Two-sided Gaussian quantile `sqrt(2) erfc^-1(eps)`.
pub fn pe_z_score(eps_pe: f64) -> f64 {
    core::f64::consts::SQRT_2 * erfc_inv(eps_pe)
}

/// Result of the worst-case channel estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstCase {
    /// Lower confidence bound on the transmittance.
    pub t_min: f64,
    /// Excess noise at `t_min` and the upper noise bound.
    pub eps_at_t_min: f64,
    /// Excess noise at the nominal transmittance and the upper noise bound.
    pub eps_at_t_hat: f64,
}

/// Confidence-interval worst case for a heterodyne link.
///
/// With `t = sqrt(eta T / 2)` and `sigma^2 = (2 + v_el + eta T eps) / 2` estimated from
/// `M = 2 m` quadrature samples, `Var(t_hat) = sigma^2 / (M V_A)` and
/// `Var(sigma_hat^2) = 2 sigma^4 / M`. Returns `None` when the lower bound on `t` is not positive.
pub fn worst_case_channel(
    t: f64,
    eps: f64,
    eta: f64,
    v_el: f64,
    v_a: f64,
    policy: &FiniteSizePolicy,
) -> Option<WorstCase> {
    let c = policy.preset.coefficients();
    let z = pe_z_score(policy.eps_pe / c.pe_union);
    let m = 2.0 * c.pe_fraction * policy.n as f64;
    let tt = (eta * t / 2.0).sqrt();
    let s2 = (2.0 + v_el + eta * t * eps) / 2.0;
    if !(v_a > 0.0) {
        return None;
    }
    let t_lo = tt - z * (s2 / (m * v_a)).sqrt();
    let s2_hi = s2 + z * (2.0 * s2 * s2 / m).sqrt();
    if !(t_lo > 0.0) {
        return None;
    }
    let t_min = 2.0 * t_lo * t_lo / eta;
    let noise = 2.0 * s2_hi - 2.0 - v_el;
    Some(WorstCase { t_min, eps_at_t_min: noise / (eta * t_min), eps_at_t_hat: noise / (eta * t) })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(n: u64) -> FiniteSizePolicy {
        FiniteSizePolicy { level: Level::FS, n, ..FiniteSizePolicy::asymptotic() }
    }

    #[test]
    fn asymptotic_is_zero() {
        assert_eq!(finite_size_delta(&FiniteSizePolicy::asymptotic()).unwrap(), 0.0);
    }

    #[test]
    fn fs_delta_at_default_block_size() {
        let d = finite_size_delta(&fs(10_000_000_000)).unwrap();
        assert!((d - 4.094_873_841_230_316e-4).abs() < 1e-15, "{d:e}");
    }

    #[test]
    fn composable_term_value() {
        let p = FiniteSizePolicy { level: Level::CS, ..fs(10_000_000_000) };
        let d = finite_size_delta(&p).unwrap() - finite_size_delta(&fs(10_000_000_000)).unwrap();
        assert!((d - 1.675_691_575_324_451e-3).abs() < 1e-14, "{d:e}");
    }

    #[test]
    fn delta_decreases_with_block_size() {
        for level in [Level::FS, Level::CS, Level::FC] {
            let mut n = 1000u64;
            while n < 1_000_000_000_000 {
                let p = |n| FiniteSizePolicy { level, ..fs(n) };
                assert!(finite_size_delta(&p(2 * n)).unwrap() < finite_size_delta(&p(n)).unwrap());
                n *= 7;
            }
        }
    }

    #[test]
    fn zero_block_is_domain_error() {
        assert!(matches!(finite_size_delta(&fs(0)), Err(Error::Domain(_))));
    }

    #[test]
    fn erfc_inverse_round_trip() {
        for &y in &[1e-300, 1e-10, 1e-3, 0.3, 1.0, 1.5, 1.999] {
            let z = erfc_inv(y);
            assert!(((libm::erfc(z) - y) / y).abs() < 1e-12, "{y}");
        }
        assert!((pe_z_score(1e-10) - 6.466_951_087_240_516).abs() < 1e-9);
    }

    #[test]
    fn worst_case_is_pessimistic() {
        let w = worst_case_channel(0.05, 0.07, 0.56, 0.31, 4.47, &fs(10_000_000_000)).unwrap();
        assert!(w.t_min < 0.05);
        assert!(w.eps_at_t_hat > 0.07);
        assert!(w.eps_at_t_min > w.eps_at_t_hat);
        assert!(worst_case_channel(1e-9, 0.07, 0.56, 0.31, 4.47, &fs(1000)).is_none());
    }
}
