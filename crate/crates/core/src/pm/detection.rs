use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::source::circular_gaussian;
use super::Amplitude;
use crate::error::{Error, Result};

fn check(eta: f64, v_el: f64) -> Result<()> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::Domain(alloc::format!("detection efficiency {eta} outside (0, 1]")));
    }
    if !(v_el >= 0.0) {
        return Err(Error::Domain(alloc::format!("electronic noise {v_el} must be non-negative")));
    }
    Ok(())
}

/// Heterodyne outcome `√η·γ + n` with `⟨|n|²⟩ = 1 + v_el`.
///
/// The SNU quadrature of the outcome has variance `η·V + 1 + v_el` for input variance `V`.
pub fn detect<R: Rng + ?Sized>(field: &[Amplitude], eta: f64, v_el: f64, rng: &mut R) -> Result<Vec<Amplitude>> {
    check(eta, v_el)?;
    let noise = circular_gaussian(1.0 + v_el, field.len(), rng);
    let s = eta.sqrt();
    Ok(field.iter().zip(noise).map(|(z, n)| z * s + n).collect())
}

/// Sender-side monitor detection with extra mode-matching factor `eta_a`.
pub fn qlt_heterodyne<R: Rng + ?Sized>(
    monitor: &[Amplitude],
    eta_e: f64,
    v_el: f64,
    eta_a: f64,
    rng: &mut R,
) -> Result<Vec<Amplitude>> {
    if !(eta_a > 0.0 && eta_a <= 1.0) {
        return Err(Error::Domain(alloc::format!("mode-matching factor {eta_a} outside (0, 1]")));
    }
    check(eta_e, v_el)?;
    detect(monitor, eta_e * eta_a, v_el, rng)
}
