use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

/// Largest value reported by [`plob_bound`]; reached when `1 - T < 2^-40`.
pub const PLOB_CAP_BITS: f64 = 40.0;

/// Repeaterless bound `-log2(1 - T)` in bits per use, with a capped flag.
///
/// `T <= 0` gives 0 and values near `T = 1` are capped at [`PLOB_CAP_BITS`].
pub fn plob_bound(t: f64) -> (f64, bool) {
    if !(t > 0.0) {
        return (0.0, false);
    }
    let b = -(1.0 - t.min(1.0)).log2();
    if b >= PLOB_CAP_BITS {
        (PLOB_CAP_BITS, true)
    } else {
        (b, false)
    }
}

/// Network bound as the sum of per-user repeaterless bounds.
pub fn plob_n_bound(transmittances: &[f64]) -> (f64, bool) {
    let parts: Vec<(f64, bool)> = transmittances.iter().map(|&t| plob_bound(t)).collect();
    (parts.iter().map(|p| p.0).sum(), parts.iter().any(|p| p.1))
}
