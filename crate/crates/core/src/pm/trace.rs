use alloc::vec::Vec;

use nalgebra::DMatrix;
#[allow(unused_imports)]
use num_traits::Float;

use super::{Amplitude, Stage};
use crate::error::{Error, Result};

/// SNU quadratures `(x, p) = √2 (Re γ, Im γ)` of an amplitude.
pub fn quadrature(z: Amplitude) -> (f64, f64) {
    let s = core::f64::consts::SQRT_2;
    (s * z.re, s * z.im)
}

/// Samples of one stage for one mode or user.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureTrace {
    pub stage: Stage,
    /// Frequency-mode index (0-based) for sender stages, user slot for receiver stages.
    pub index: usize,
    /// Master seed whose substreams produced the trace.
    pub seed: u64,
    pub samples: Vec<Amplitude>,
}

impl QuadratureTrace {
    pub fn new(stage: Stage, index: usize, seed: u64, samples: Vec<Amplitude>) -> Result<Self> {
        if let Some(j) = samples.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical(alloc::format!(
                "non-finite amplitude at symbol {j} of {} trace",
                stage.name()
            )));
        }
        Ok(Self { stage, index, seed, samples })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Rows `(symbol, x, p)` in SNU.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.samples.iter().enumerate().map(|(j, &z)| {
            let (x, p) = quadrature(z);
            (j, x, p)
        })
    }
}

/// Sample covariance of stacked SNU quadratures with Gaussian standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCovariance {
    pub cov: DMatrix<f64>,
    /// Standard error `√((S_ii S_jj + S_ij²) / n)` of each entry.
    pub standard_error: DMatrix<f64>,
    pub samples: usize,
}

/// Covariance of the quadratures `x₁, p₁, x₂, p₂, ...` of the given aligned streams.
pub fn empirical_covariance(streams: &[&[Amplitude]]) -> Result<EmpiricalCovariance> {
    let n = streams.first().map_or(0, |s| s.len());
    if streams.iter().any(|s| s.len() != n) {
        return Err(Error::Input("streams have different lengths".into()));
    }
    if n < 2 {
        return Err(Error::InsufficientSamples { required: 2, got: n });
    }
    let d = 2 * streams.len();
    let mut means = alloc::vec![0.0; d];
    for (m, s) in streams.iter().enumerate() {
        for &z in s.iter() {
            let (x, p) = quadrature(z);
            means[2 * m] += x;
            means[2 * m + 1] += p;
        }
    }
    for v in &mut means {
        *v /= n as f64;
    }
    let mut acc = alloc::vec![0.0; d * d];
    let mut row = alloc::vec![0.0; d];
    for j in 0..n {
        for (m, s) in streams.iter().enumerate() {
            let (x, p) = quadrature(s[j]);
            row[2 * m] = x - means[2 * m];
            row[2 * m + 1] = p - means[2 * m + 1];
        }
        for a in 0..d {
            let ra = row[a];
            for b in a..d {
                acc[a * d + b] += ra * row[b];
            }
        }
    }
    let norm = (n - 1) as f64;
    let cov = DMatrix::from_fn(d, d, |a, b| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        acc[lo * d + hi] / norm
    });
    let standard_error =
        DMatrix::from_fn(d, d, |a, b| ((cov[(a, a)] * cov[(b, b)] + cov[(a, b)].powi(2)) / n as f64).sqrt());
    Ok(EmpiricalCovariance { cov, standard_error, samples: n })
}
