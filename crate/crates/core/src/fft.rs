//! Thin FFT helpers over `rustfft` shared by the Toeplitz kernels.
//!
//! Transforms are unnormalized in both directions; callers divide by the
//! transform length where needed.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Smallest power of two that is `>= n` (and at least 1).
pub(crate) fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

/// Transform length used for all circulant embeddings of `N x N` Toeplitz
/// matrices: the smallest power of two `>= 2N - 1`.
pub(crate) fn embedding_len(n: usize) -> usize {
    next_pow2(2 * n - 1)
}

/// A forward/inverse transform pair of a fixed length.
#[derive(Clone)]
pub(crate) struct FftPair {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl FftPair {
    pub(crate) fn new(len: usize) -> Self {
        PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            FftPair {
                len,
                forward: p.plan_fft_forward(len),
                inverse: p.plan_fft_inverse(len),
            }
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn forward_in_place(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.forward.process(buf);
    }

    pub(crate) fn inverse_in_place(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.len);
        self.inverse.process(buf);
    }

    /// Forward transform of `x` zero-padded to the transform length.
    pub(crate) fn forward_padded(&self, x: &[C64]) -> Vec<C64> {
        let mut buf = vec![C64::new(0.0, 0.0); self.len];
        buf[..x.len()].copy_from_slice(x);
        self.forward.process(&mut buf);
        buf
    }
}

/// Lagged inner products `c[n] = sum_k conj(a[k]) * b[k + n]` for
/// `n = 0..len`, with both sequences treated as zero outside their support.
pub(crate) fn lagged_products(fft: &FftPair, a: &[C64], b: &[C64], len: usize) -> Vec<C64> {
    debug_assert!(a.len() + len <= fft.len() + 1 && b.len() <= fft.len());
    let fa = fft.forward_padded(a);
    let mut fb = fft.forward_padded(b);
    for (x, y) in fb.iter_mut().zip(&fa) {
        *x *= y.conj();
    }
    fft.inverse_in_place(&mut fb);
    let scale = 1.0 / fft.len() as f64;
    fb.truncate(len);
    fb.iter_mut().for_each(|c| *c *= scale);
    fb
}
