use alloc::format;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::state::{quadrature_indices, GaussianState};
use crate::error::{Error, Result};
use crate::numeric::NumericPolicy;

fn check_mode(state: &GaussianState, m: usize) -> Result<()> {
    if m >= state.n_modes() {
        return Err(Error::Input(format!("mode {m} out of range for {} modes", state.n_modes())));
    }
    Ok(())
}

/// Applies a `2m x 2m` symplectic matrix acting on the listed modes.
pub fn apply_local_symplectic(state: &GaussianState, modes: &[usize], s: &DMatrix<f64>) -> Result<GaussianState> {
    let mut out = state.clone();
    local_symplectic_in_place(&mut out, modes, s)?;
    Ok(out)
}

pub(crate) fn local_symplectic_in_place(state: &mut GaussianState, modes: &[usize], s: &DMatrix<f64>) -> Result<()> {
    for (pos, &m) in modes.iter().enumerate() {
        check_mode(state, m)?;
        if modes[..pos].contains(&m) {
            return Err(Error::Input(format!("mode {m} listed twice")));
        }
    }
    let q = quadrature_indices(modes);
    if s.nrows() != q.len() || s.ncols() != q.len() {
        return Err(Error::Input(format!("operator is {}x{}, expected {}", s.nrows(), s.ncols(), q.len())));
    }
    let d = state.cov().nrows();
    {
        let cov = state.cov_mut();
        let rows = cov.select_rows(q.iter());
        let new_rows = s * rows;
        for (r, &qi) in q.iter().enumerate() {
            for c in 0..d {
                cov[(qi, c)] = new_rows[(r, c)];
            }
        }
        let cols = cov.select_columns(q.iter());
        let new_cols = cols * s.transpose();
        for (c, &qi) in q.iter().enumerate() {
            for r in 0..d {
                cov[(r, qi)] = new_cols[(r, c)];
            }
        }
        for &qi in &q {
            for r in 0..d {
                let avg = 0.5 * (cov[(r, qi)] + cov[(qi, r)]);
                cov[(r, qi)] = avg;
                cov[(qi, r)] = avg;
            }
        }
    }
    let sub_mean = state.mean().select_rows(q.iter());
    let new_mean = s * sub_mean;
    for (r, &qi) in q.iter().enumerate() {
        state.mean_mut()[qi] = new_mean[r];
    }
    Ok(())
}

fn beamsplitter_matrix(t: f64) -> DMatrix<f64> {
    let (c, s) = (t.sqrt(), (1.0 - t).sqrt());
    let mut m = DMatrix::zeros(4, 4);
    for k in 0..2 {
        m[(k, k)] = c;
        m[(k, k + 2)] = s;
        m[(k + 2, k)] = -s;
        m[(k + 2, k + 2)] = c;
    }
    m
}

pub(crate) fn beamsplitter_in_place(state: &mut GaussianState, mode_a: usize, mode_b: usize, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("beam-splitter transmittance {t} outside [0, 1]")));
    }
    if mode_a == mode_b {
        return Err(Error::Input("beam splitter needs two distinct modes".into()));
    }
    local_symplectic_in_place(state, &[mode_a, mode_b], &beamsplitter_matrix(t))
}

/// Beam splitter `[[sqrt(T) I, sqrt(1-T) I], [-sqrt(1-T) I, sqrt(T) I]]` on modes `(a, b)`.
pub fn apply_beamsplitter(state: &GaussianState, mode_a: usize, mode_b: usize, t: f64) -> Result<GaussianState> {
    let mut out = state.clone();
    beamsplitter_in_place(&mut out, mode_a, mode_b, t)?;
    Ok(out)
}

/// Rotation by `theta`, mapping the complex amplitude `x + jp` to `(x + jp) e^{-j theta}`.
pub fn apply_phase_rotation(state: &GaussianState, mode: usize, theta: f64) -> Result<GaussianState> {
    let (s, c) = theta.sin_cos();
    let m = DMatrix::from_row_slice(2, 2, &[c, s, -s, c]);
    apply_local_symplectic(state, &[mode], &m)
}

/// Lossy channel with Alice-referred excess noise.
///
/// The mode variance maps to `T V + 1 - T + T Q eps` and every cross term is scaled by `sqrt(T)`.
pub fn apply_loss_excess(state: &GaussianState, mode: usize, t: f64, epsilon: f64, q: f64) -> Result<GaussianState> {
    check_mode(state, mode)?;
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("channel transmittance {t} outside [0, 1]")));
    }
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("excess noise {epsilon} must be non-negative")));
    }
    if !(q >= 0.0) {
        return Err(Error::Domain(format!("signal-power factor {q} must be non-negative")));
    }
    let mut out = state.clone();
    let st = t.sqrt();
    let d = state.cov().nrows();
    let add = 1.0 - t + t * q * epsilon;
    {
        let cov = out.cov_mut();
        for qi in [2 * mode, 2 * mode + 1] {
            for c in 0..d {
                cov[(qi, c)] *= st;
            }
            for r in 0..d {
                cov[(r, qi)] *= st;
            }
        }
        cov[(2 * mode, 2 * mode)] += add;
        cov[(2 * mode + 1, 2 * mode + 1)] += add;
    }
    out.mean_mut()[2 * mode] *= st;
    out.mean_mut()[2 * mode + 1] *= st;
    Ok(out)
}

/// Passive interferometer `O (x) I2` over the listed modes; `O` must be real orthogonal.
pub fn apply_passive(state: &GaussianState, modes: &[usize], o: &DMatrix<f64>) -> Result<GaussianState> {
    let m = modes.len();
    if o.nrows() != m || o.ncols() != m {
        return Err(Error::Input(format!("interferometer is {}x{}, expected {m}", o.nrows(), o.ncols())));
    }
    let tol = NumericPolicy::default().orthogonality;
    let err = (o * o.transpose() - DMatrix::identity(m, m)).amax();
    if err > tol {
        return Err(Error::Input(format!("interferometer not orthogonal: deviation {err:e}")));
    }
    let mut s = DMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        for j in 0..m {
            s[(2 * i, 2 * j)] = o[(i, j)];
            s[(2 * i + 1, 2 * j + 1)] = o[(i, j)];
        }
    }
    apply_local_symplectic(state, modes, &s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{symplectic_eigenvalues, two_mode_squeezed_cov};

    fn thermal_and_vacuum() -> GaussianState {
        GaussianState::direct_sum(&[&GaussianState::thermal(3.0).unwrap(), &GaussianState::vacuum(1)]).unwrap()
    }

    #[test]
    fn unit_beamsplitter_is_identity() {
        let s = thermal_and_vacuum();
        assert_eq!(apply_beamsplitter(&s, 0, 1, 1.0).unwrap(), s);
    }

    #[test]
    fn balanced_beamsplitter_on_vacua() {
        let s = GaussianState::vacuum(2);
        let out = apply_beamsplitter(&s, 0, 1, 0.5).unwrap();
        assert!((out.cov() - s.cov()).amax() < 1e-15);
    }

    #[test]
    fn balanced_beamsplitter_thermal_input() {
        let out = apply_beamsplitter(&thermal_and_vacuum(), 0, 1, 0.5).unwrap();
        let want = DMatrix::from_row_slice(
            4,
            4,
            &[2.0, 0.0, -1.0, 0.0, 0.0, 2.0, 0.0, -1.0, -1.0, 0.0, 2.0, 0.0, 0.0, -1.0, 0.0, 2.0],
        );
        assert!((out.cov() - want).amax() < 1e-14);
    }

    #[test]
    fn beamsplitter_rejects_bad_transmittance() {
        assert!(matches!(apply_beamsplitter(&thermal_and_vacuum(), 0, 1, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn rotation_full_turn_is_identity() {
        let s = two_mode_squeezed_cov(5.47).unwrap();
        assert_eq!(apply_phase_rotation(&s, 1, 0.0).unwrap(), s);
        let r = apply_phase_rotation(&s, 1, 2.0 * core::f64::consts::PI).unwrap();
        assert!((r.cov() - s.cov()).amax() < 1e-12);
    }

    #[test]
    fn quarter_turn_swaps_squeezed_quadratures() {
        let s = GaussianState::from_cov(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![0.5, 2.0])))
            .unwrap();
        let r = apply_phase_rotation(&s, 0, core::f64::consts::FRAC_PI_2).unwrap();
        assert!((r.cov()[(0, 0)] - 2.0).abs() < 1e-15);
        assert!((r.cov()[(1, 1)] - 0.5).abs() < 1e-15);
        assert!(r.cov()[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn loss_limits() {
        let s = two_mode_squeezed_cov(5.47).unwrap();
        assert_eq!(apply_loss_excess(&s, 1, 1.0, 0.0, 1.0).unwrap(), s);
        let dark = apply_loss_excess(&s, 1, 0.0, 0.3, 1.0).unwrap();
        assert_eq!(dark.block(1, 1), DMatrix::<f64>::identity(2, 2));
        assert_eq!(dark.block(0, 1), DMatrix::<f64>::zeros(2, 2));
        assert!(matches!(apply_loss_excess(&s, 1, 0.5, -0.1, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn loss_at_five_km() {
        let t = 10f64.powf(-0.17 * 5.0 / 10.0);
        let s = two_mode_squeezed_cov(5.47).unwrap();
        let out = apply_loss_excess(&s, 1, t, 0.07, 1.0).unwrap();
        assert!((out.cov()[(2, 2)] - 4.732_981_630_759_703).abs() < 1e-12);
        assert!((out.cov()[(2, 2)] - (t * 5.47 + 1.0 - t + t * 0.07)).abs() < 1e-14);
    }

    #[test]
    fn passive_rejects_non_orthogonal() {
        let s = GaussianState::vacuum(2);
        let o = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(apply_passive(&s, &[0, 1], &o).is_err());
    }

    #[test]
    fn passive_preserves_spectrum() {
        let s =
            GaussianState::direct_sum(&[&two_mode_squeezed_cov(3.0).unwrap(), &GaussianState::thermal(2.0).unwrap()])
                .unwrap();
        let (c, sn) = (0.3f64.cos(), 0.3f64.sin());
        let o = DMatrix::from_row_slice(2, 2, &[c, sn, -sn, c]);
        let out = apply_passive(&s, &[1, 2], &o).unwrap();
        let a = symplectic_eigenvalues(&s).unwrap();
        let b = symplectic_eigenvalues(&out).unwrap();
        for (x, y) in a.iter().zip(b.iter()) {
            assert!((x - y).abs() < 1e-9);
        }
    }
}
