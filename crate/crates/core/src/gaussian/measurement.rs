use alloc::format;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::state::{GaussianState, ModeSelection};
use crate::error::{Error, Result};

/// Natural-log determinant of a symmetric positive-definite matrix.
pub fn log_det_spd(m: &DMatrix<f64>) -> Result<f64> {
    let ch = m.clone().cholesky().ok_or_else(|| Error::Domain("matrix is not positive definite".into()))?;
    Ok(2.0 * ch.l_dirty().diagonal().iter().map(|v| v.ln()).sum::<f64>())
}

/// Covariance of heterodyne outcomes on the selected modes, `Sigma_sub + I`.
pub fn heterodyne_outcome_cov(state: &GaussianState, modes: &ModeSelection) -> Result<DMatrix<f64>> {
    let sub = state.partial_trace(modes)?;
    let d = sub.cov().nrows();
    Ok(sub.into_cov() + DMatrix::identity(d, d))
}

/// Conditional state of the unmeasured modes after heterodyning `measured`.
///
/// The covariance is `Sigma_A - Sigma_AB (Sigma_B + I)^-1 Sigma_AB^T` and does not depend on
/// the outcome. The returned mean is the prior mean of the unmeasured block. Modes keep their
/// relative order.
pub fn heterodyne_condition(state: &GaussianState, measured: &ModeSelection) -> Result<GaussianState> {
    let n = state.n_modes();
    if measured.is_empty() || measured.len() >= n {
        return Err(Error::Input(format!(
            "heterodyne needs a non-empty proper subset of {n} modes, got {}",
            measured.len()
        )));
    }
    if let Some(&m) = measured.indices().iter().find(|&&m| m >= n) {
        return Err(Error::Input(format!("mode {m} out of range")));
    }
    let keep = measured.complement(n);
    let qa = keep.quadratures();
    let qb = measured.quadratures();
    let cov = state.cov();
    let sa = cov.select_rows(qa.iter()).select_columns(qa.iter());
    let sab = cov.select_rows(qa.iter()).select_columns(qb.iter());
    let mut sb = cov.select_rows(qb.iter()).select_columns(qb.iter());
    for i in 0..sb.nrows() {
        sb[(i, i)] += 1.0;
    }
    let ch = sb.cholesky().ok_or_else(|| Error::Numerical("measured block plus identity is singular".into()))?;
    let x = ch.solve(&sab.transpose());
    let cond = &sa - &sab * x;
    let cond = (&cond + cond.transpose()) * 0.5;
    Ok(GaussianState::from_parts_unchecked(state.mean().select_rows(qa.iter()), cond))
}

/// Mutual information in bits between the first `nx` coordinates and the rest.
pub fn gaussian_mutual_information(joint: &DMatrix<f64>, nx: usize) -> Result<f64> {
    let d = joint.nrows();
    if !joint.is_square() || nx == 0 || nx >= d {
        return Err(Error::Input(format!("cannot split a {d}-dimensional covariance at {nx}")));
    }
    let sx = joint.view((0, 0), (nx, nx)).into_owned();
    let sy = joint.view((nx, nx), (d - nx, d - nx)).into_owned();
    let nats = 0.5 * (log_det_spd(&sx)? + log_det_spd(&sy)? - log_det_spd(joint)?);
    Ok(nats / core::f64::consts::LN_2)
}
