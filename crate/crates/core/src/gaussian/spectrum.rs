use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::state::{quadrature_indices, GaussianState, SymplecticForm};
use crate::error::{Error, Result};
use crate::numeric::NumericPolicy;

/// Symplectic eigenvalues with the default numeric policy.
pub fn symplectic_eigenvalues(state: &GaussianState) -> Result<Vec<f64>> {
    symplectic_eigenvalues_with(state, &NumericPolicy::default())
}

/// Symplectic eigenvalues, sorted descending.
///
/// Values within `physicality_slack` below 1 are clamped to 1. The state is split into
/// decoupled mode groups first, and each group is diagonalized through its Cholesky
/// factor `L`: the spectrum of `(L^T Omega L)^T (L^T Omega L)` is `nu^2`, each twice.
pub fn symplectic_eigenvalues_with(state: &GaussianState, policy: &NumericPolicy) -> Result<Vec<f64>> {
    let cov = state.cov();
    let scale = cov.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let d = cov.nrows();
    for i in 0..d {
        for j in (i + 1)..d {
            if (cov[(i, j)] - cov[(j, i)]).abs() > policy.symmetry_rel * scale {
                return Err(Error::Input(format!("covariance not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut nus = Vec::with_capacity(state.n_modes());
    for group in coupled_groups(cov) {
        let q = quadrature_indices(&group);
        let sub = cov.select_rows(q.iter()).select_columns(q.iter());
        nus.extend(group_spectrum(&sub)?);
    }
    nus.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    for v in nus.iter_mut() {
        if *v < 1.0 && *v >= 1.0 - policy.physicality_slack {
            *v = 1.0;
        }
    }
    Ok(nus)
}

/// Partition of modes into groups with no covariance between groups.
pub(crate) fn coupled_groups(cov: &DMatrix<f64>) -> Vec<Vec<usize>> {
    let n = cov.nrows() / 2;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for a in 0..n {
        for b in (a + 1)..n {
            let coupled = (0..2).any(|r| (0..2).any(|c| cov[(2 * a + r, 2 * b + c)] != 0.0));
            if coupled {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra != rb {
                    parent[rb] = ra;
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut root_slot = vec![usize::MAX; n];
    for m in 0..n {
        let r = find(&mut parent, m);
        if root_slot[r] == usize::MAX {
            root_slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[root_slot[r]].push(m);
    }
    groups
}

fn group_spectrum(sub: &DMatrix<f64>) -> Result<Vec<f64>> {
    let n = sub.nrows() / 2;
    if n == 1 {
        let det = sub[(0, 0)] * sub[(1, 1)] - sub[(0, 1)] * sub[(1, 0)];
        return Ok(vec![det.max(0.0).sqrt()]);
    }
    let omega = SymplecticForm::new(n);
    let mut vals: Vec<f64> = match sub.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            let a = l.transpose() * omega.left_mul(&l);
            let m = a.transpose() * &a;
            let m = (&m + m.transpose()) * 0.5;
            m.symmetric_eigenvalues().iter().map(|&x| x.max(0.0).sqrt()).collect()
        }
        None => {
            let w = omega.matrix() * sub;
            w.complex_eigenvalues().iter().map(|z| z.re.hypot(z.im)).collect()
        }
    };
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite symplectic eigenvalue".into()));
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    Ok(vals.into_iter().step_by(2).collect())
}

/// Entropy function `g(nu)` in bits, with `g(1) = 0`.
pub fn entropy_g(nu: f64, policy: &NumericPolicy) -> f64 {
    let x = nu - 1.0;
    if x <= 0.0 {
        return 0.0;
    }
    let y = 0.5 * x;
    if x < policy.series_threshold {
        return (y - y * y.ln() + 0.5 * y * y) / core::f64::consts::LN_2;
    }
    let a = 0.5 * (nu + 1.0);
    a * a.log2() - y * y.log2()
}

/// Von Neumann entropy in bits with the default numeric policy.
pub fn von_neumann_entropy(state: &GaussianState) -> Result<f64> {
    von_neumann_entropy_with(state, &NumericPolicy::default())
}

pub fn von_neumann_entropy_with(state: &GaussianState, policy: &NumericPolicy) -> Result<f64> {
    let nus = symplectic_eigenvalues_with(state, policy)?;
    let mut s = 0.0;
    for (index, &value) in nus.iter().enumerate() {
        if value < 1.0 - policy.physicality_slack {
            return Err(Error::Physicality { index, value });
        }
        s += entropy_g(value, policy);
    }
    Ok(s)
}
