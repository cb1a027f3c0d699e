use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::Amplitude;
use crate::error::{Error, Result};

/// Circular complex Gaussian draws with `⟨|γ|²⟩ = v0`.
pub(crate) fn circular_gaussian<R: Rng + ?Sized>(power: f64, n: usize, rng: &mut R) -> Vec<Amplitude> {
    if power == 0.0 {
        return alloc::vec![Amplitude::new(0.0, 0.0); n];
    }
    let normal = Normal::new(0.0, (power / 2.0).sqrt()).expect("finite non-negative spread");
    (0..n).map(|_| Amplitude::new(normal.sample(rng), normal.sample(rng))).collect()
}

/// Thermal ensemble of coherent-state amplitudes with second moment `v0`.
///
/// Each real component has variance `v0/2`; the SNU quadrature `√2 Re γ` has variance `v0`.
pub fn sample_thermal_ensemble<R: Rng + ?Sized>(v0: f64, n: usize, rng: &mut R) -> Result<Vec<Amplitude>> {
    if !(v0 >= 0.0) || !v0.is_finite() {
        return Err(Error::Domain(alloc::format!("source variance {v0} must be finite and non-negative")));
    }
    if n == 0 {
        return Err(Error::Domain("at least one symbol is required".into()));
    }
    Ok(circular_gaussian(v0, n, rng))
}

/// Mean photon number of the thermal state whose P-function has `⟨|γ|²⟩ = v0`.
pub fn mean_photon_number(v0: f64) -> f64 {
    v0 / 2.0
}

/// Bose-Einstein photon-number probability `n̄ⁿ / (1 + n̄)ⁿ⁺¹`.
pub fn bose_einstein_pmf(n_bar: f64, n: u32) -> f64 {
    let ratio = n_bar / (1.0 + n_bar);
    ratio.powi(n as i32) / (1.0 + n_bar)
}
