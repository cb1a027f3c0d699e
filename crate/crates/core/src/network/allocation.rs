use alloc::format;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// `|D D^T - I|` in the max-entry norm.
pub fn orthogonality_error(d: &DMatrix<f64>) -> f64 {
    let n = d.nrows();
    (d * d.transpose() - DMatrix::identity(n, n)).amax()
}

/// Banded frequency-allocation matrix for the given adjacent-mode isolation.
///
/// Mode `k` couples to `k + 1` with amplitude `+a` and to `k - 1` with `-a`, where
/// `a = 10^(-isolation/20)`. Rows are normalized and the result is replaced by its
/// nearest orthogonal matrix (polar factor `U V^T` of the SVD). The antisymmetric coupling
/// keeps the leakage after projection; a symmetric band would project back onto `I`.
pub fn build_frequency_allocation(n_w: usize, isolation_db: f64) -> Result<DMatrix<f64>> {
    if n_w == 0 {
        return Err(Error::Domain("at least one frequency mode is required".into()));
    }
    if !(isolation_db > 0.0) {
        return Err(Error::Domain(format!("isolation {isolation_db} dB must be positive")));
    }
    if n_w == 1 || isolation_db.is_infinite() {
        return Ok(DMatrix::identity(n_w, n_w));
    }
    let a = 10f64.powf(-isolation_db / 20.0);
    let mut m = DMatrix::identity(n_w, n_w);
    for k in 0..n_w - 1 {
        m[(k, k + 1)] = a;
        m[(k + 1, k)] = -a;
    }
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        row /= norm;
    }
    let svd = m.svd(true, true);
    let (u, v_t) = (svd.u.expect("requested"), svd.v_t.expect("requested"));
    Ok(u * v_t)
}
