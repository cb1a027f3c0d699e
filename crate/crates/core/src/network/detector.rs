use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gaussian::{beamsplitter_in_place, GaussianState, ModeSelection};

/// Network state extended with the trusted-detector ancillas.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectedState {
    pub state: GaussianState,
    /// Ancilla arm mixed into each measured mode, in measurement order.
    pub f_modes: Vec<usize>,
    /// Partner arm of each ancilla pair, kept by the trusted receiver.
    pub g_modes: Vec<usize>,
}

fn check_detector(eta_e: f64, v_el: f64) -> Result<()> {
    if !(eta_e > 0.0 && eta_e <= 1.0) {
        return Err(Error::Domain(format!("detector efficiency {eta_e} outside (0, 1]")));
    }
    if !(v_el >= 0.0 && v_el.is_finite()) {
        return Err(Error::Domain(format!("electronic noise {v_el} must be non-negative")));
    }
    Ok(())
}

/// Appends an EPR pair of variance `V_ee = 1 + v_el / (1 - eta_e)` per measured mode and mixes
/// one arm into the signal on a beam splitter of transmittance `eta_e`.
///
/// The measured-mode variance becomes `eta_e V + (1 - eta_e) V_ee`. For `eta_e = 1` no
/// ancilla is added and `v_el` is added to the measured modes directly.
pub fn attach_detector_model(
    state: &GaussianState,
    measured: &ModeSelection,
    eta_e: f64,
    v_el: f64,
) -> Result<DetectedState> {
    check_detector(eta_e, v_el)?;
    let n = state.n_modes();
    if let Some(&m) = measured.indices().iter().find(|&&m| m >= n) {
        return Err(Error::Input(format!("mode {m} out of range")));
    }
    if eta_e == 1.0 {
        let mut cov = state.cov().clone();
        for &m in measured.indices() {
            cov[(2 * m, 2 * m)] += v_el;
            cov[(2 * m + 1, 2 * m + 1)] += v_el;
        }
        return Ok(DetectedState {
            state: GaussianState::from_parts_unchecked(state.mean().clone(), cov),
            f_modes: Vec::new(),
            g_modes: Vec::new(),
        });
    }
    let m = measured.len();
    let total = n + 2 * m;
    let v_ee = 1.0 + v_el / (1.0 - eta_e);
    let c_ee = (v_ee * v_ee - 1.0).sqrt();
    let mut cov = DMatrix::identity(2 * total, 2 * total);
    cov.view_mut((0, 0), (2 * n, 2 * n)).copy_from(state.cov());
    let mut mean = DVector::zeros(2 * total);
    mean.rows_mut(0, 2 * n).copy_from(state.mean());
    let mut f_modes = Vec::with_capacity(m);
    let mut g_modes = Vec::with_capacity(m);
    for j in 0..m {
        let (f, g) = (n + 2 * j, n + 2 * j + 1);
        for q in 0..2 {
            let sign = if q == 0 { 1.0 } else { -1.0 };
            cov[(2 * f + q, 2 * f + q)] = v_ee;
            cov[(2 * g + q, 2 * g + q)] = v_ee;
            cov[(2 * f + q, 2 * g + q)] = sign * c_ee;
            cov[(2 * g + q, 2 * f + q)] = sign * c_ee;
        }
        f_modes.push(f);
        g_modes.push(g);
    }
    let mut out = GaussianState::from_parts_unchecked(mean, cov);
    for (j, &mode) in measured.indices().iter().enumerate() {
        beamsplitter_in_place(&mut out, mode, f_modes[j], eta_e)?;
    }
    Ok(DetectedState { state: out, f_modes, g_modes })
}

/// Covariance of heterodyne outcomes with `alice` measured ideally and `bob` through the
/// detector model; Alice's coordinates come first.
///
/// Alice block `Sigma_A + I`, cross block `sqrt(eta) Sigma_AB`, Bob block
/// `eta Sigma_B + (2 - eta + v_el) I`.
pub fn detected_outcome_cov(
    state: &GaussianState,
    alice: &[usize],
    bob: &[usize],
    eta_e: f64,
    v_el: f64,
) -> Result<DMatrix<f64>> {
    check_detector(eta_e, v_el)?;
    let n = state.n_modes();
    let sel = ModeSelection::new(alice.iter().chain(bob.iter()).copied().collect(), n)?;
    let q = sel.quadratures();
    let mut out = state.cov().select_rows(q.iter()).select_columns(q.iter());
    let na = 2 * alice.len();
    let d = out.nrows();
    let se = eta_e.sqrt();
    for r in 0..d {
        for c in 0..d {
            let (ra, ca) = (r < na, c < na);
            let f = match (ra, ca) {
                (true, true) => 1.0,
                (false, false) => eta_e,
                _ => se,
            };
            out[(r, c)] *= f;
        }
        out[(r, r)] += if r < na { 1.0 } else { 2.0 - eta_e + v_el };
    }
    Ok(out)
}
