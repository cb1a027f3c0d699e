use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
#[allow(unused_imports)]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::NumericPolicy;

/// Direct sum of `n_modes` blocks `[[0, 1], [-1, 0]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticForm {
    pub n_modes: usize,
}

impl SymplecticForm {
    pub fn new(n_modes: usize) -> Self {
        Self { n_modes }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let d = 2 * self.n_modes;
        let mut m = DMatrix::zeros(d, d);
        for k in 0..self.n_modes {
            m[(2 * k, 2 * k + 1)] = 1.0;
            m[(2 * k + 1, 2 * k)] = -1.0;
        }
        m
    }

    /// Computes `Omega * m` by swapping row pairs.
    pub fn left_mul(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let mut out = m.clone();
        for k in 0..self.n_modes {
            for c in 0..m.ncols() {
                out[(2 * k, c)] = m[(2 * k + 1, c)];
                out[(2 * k + 1, c)] = -m[(2 * k, c)];
            }
        }
        out
    }
}

/// Ordered set of distinct mode indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeSelection {
    indices: Vec<usize>,
}

impl ModeSelection {
    pub fn new(indices: Vec<usize>, n_modes: usize) -> Result<Self> {
        for (pos, &i) in indices.iter().enumerate() {
            if i >= n_modes {
                return Err(Error::Input(format!("mode {i} out of range for {n_modes} modes")));
            }
            if indices[..pos].contains(&i) {
                return Err(Error::Input(format!("mode {i} selected twice")));
            }
        }
        Ok(Self { indices })
    }

    pub fn single(index: usize, n_modes: usize) -> Result<Self> {
        Self::new(alloc::vec![index], n_modes)
    }

    pub fn all(n_modes: usize) -> Self {
        Self { indices: (0..n_modes).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, mode: usize) -> bool {
        self.indices.contains(&mode)
    }

    /// Modes not selected, in ascending order.
    pub fn complement(&self, n_modes: usize) -> Self {
        Self { indices: (0..n_modes).filter(|m| !self.indices.contains(m)).collect() }
    }

    /// Quadrature row indices of the selected modes.
    pub fn quadratures(&self) -> Vec<usize> {
        quadrature_indices(&self.indices)
    }
}

pub(crate) fn quadrature_indices(modes: &[usize]) -> Vec<usize> {
    modes.iter().flat_map(|&m| [2 * m, 2 * m + 1]).collect()
}

/// Mean vector and covariance matrix of an `n`-mode Gaussian state.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianState {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        Self::new_with(mean, cov, &NumericPolicy::default())
    }

    pub fn new_with(mean: DVector<f64>, cov: DMatrix<f64>, policy: &NumericPolicy) -> Result<Self> {
        if cov.nrows() == 0 || cov.nrows() % 2 != 0 || !cov.is_square() {
            return Err(Error::Input(format!(
                "covariance must be square with even dimension, got {}x{}",
                cov.nrows(),
                cov.ncols()
            )));
        }
        if mean.len() != cov.nrows() {
            return Err(Error::Input(format!(
                "mean length {} does not match covariance dimension {}",
                mean.len(),
                cov.nrows()
            )));
        }
        if cov.iter().any(|v| !v.is_finite()) || mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite entry in Gaussian state".into()));
        }
        check_symmetric(&cov, policy)?;
        Ok(Self { mean, cov })
    }

    /// Zero-mean state with the given covariance.
    pub fn from_cov(cov: DMatrix<f64>) -> Result<Self> {
        let d = cov.nrows();
        Self::new(DVector::zeros(d), cov)
    }

    pub(crate) fn from_parts_unchecked(mean: DVector<f64>, cov: DMatrix<f64>) -> Self {
        Self { mean, cov }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        let d = 2 * n_modes;
        Self { mean: DVector::zeros(d), cov: DMatrix::identity(d, d) }
    }

    /// Single-mode thermal state with covariance `nu * I`.
    pub fn thermal(nu: f64) -> Result<Self> {
        if !(nu >= 1.0) {
            return Err(Error::Domain(format!("thermal variance {nu} below vacuum")));
        }
        Ok(Self { mean: DVector::zeros(2), cov: DMatrix::identity(2, 2) * nu })
    }

    pub fn n_modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub(crate) fn cov_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.cov
    }

    pub(crate) fn mean_mut(&mut self) -> &mut DVector<f64> {
        &mut self.mean
    }

    pub fn into_cov(self) -> DMatrix<f64> {
        self.cov
    }

    /// 2x2 covariance block between modes `a` and `b`.
    pub fn block(&self, a: usize, b: usize) -> DMatrix<f64> {
        self.cov.view((2 * a, 2 * b), (2, 2)).into_owned()
    }

    /// Rejects the state if any symplectic eigenvalue is below `1 - slack`.
    pub fn check_physical(&self, policy: &NumericPolicy) -> Result<()> {
        let nus = super::spectrum::symplectic_eigenvalues_with(self, policy)?;
        if let Some((index, &value)) = nus.iter().enumerate().find(|(_, &v)| v < 1.0 - policy.physicality_slack) {
            return Err(Error::Physicality { index, value });
        }
        Ok(())
    }

    /// Reduced state on the kept modes, in the order given.
    pub fn partial_trace(&self, keep: &ModeSelection) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Input("partial trace must keep at least one mode".into()));
        }
        if let Some(&m) = keep.indices().iter().find(|&&m| m >= self.n_modes()) {
            return Err(Error::Input(format!("mode {m} out of range")));
        }
        let q = keep.quadratures();
        Ok(Self { mean: self.mean.select_rows(q.iter()), cov: self.cov.select_rows(q.iter()).select_columns(q.iter()) })
    }

    /// Tensor product of states with modes concatenated in order.
    pub fn direct_sum(parts: &[&GaussianState]) -> Result<Self> {
        if parts.is_empty() {
            return Err(Error::Input("direct sum of zero states".into()));
        }
        let d: usize = parts.iter().map(|s| s.cov.nrows()).sum();
        let mut cov = DMatrix::zeros(d, d);
        let mut mean = DVector::zeros(d);
        let mut off = 0;
        for s in parts {
            let n = s.cov.nrows();
            cov.view_mut((off, off), (n, n)).copy_from(&s.cov);
            mean.rows_mut(off, n).copy_from(&s.mean);
            off += n;
        }
        Ok(Self { mean, cov })
    }
}

fn check_symmetric(cov: &DMatrix<f64>, policy: &NumericPolicy) -> Result<()> {
    let scale = cov.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let d = cov.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            let diff = (cov[(i, j)] - cov[(j, i)]).abs();
            if diff > policy.symmetry_rel * scale {
                return Err(Error::Input(format!("covariance not symmetric at ({i}, {j}): difference {diff:e}")));
            }
        }
    }
    Ok(())
}

/// Two-mode squeezed vacuum `[[V I, C Z], [C Z, V I]]` with `C = sqrt(V^2 - 1)`.
pub fn two_mode_squeezed_cov(v: f64) -> Result<GaussianState> {
    if !(v >= 1.0) || !v.is_finite() {
        return Err(Error::Domain(format!("EPR variance {v} must be finite and at least 1")));
    }
    let c = (v * v - 1.0).sqrt();
    let mut cov = DMatrix::identity(4, 4) * v;
    cov[(0, 2)] = c;
    cov[(2, 0)] = c;
    cov[(1, 3)] = -c;
    cov[(3, 1)] = -c;
    Ok(GaussianState { mean: DVector::zeros(4), cov })
}
