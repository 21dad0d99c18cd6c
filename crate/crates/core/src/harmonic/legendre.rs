//! Orthonormalised associated Legendre functions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use super::half_index;

/// `λ_lm(θ)` with `Y_lm(θ, φ) = λ_lm(θ) e^{imφ}` (Condon-Shortley phase),
/// tabulated for `0 ≤ m ≤ l < L` at a fixed set of colatitudes.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    bandlimit: usize,
    stride: usize,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(bandlimit: usize, thetas: &[f64]) -> Self {
        let stride = bandlimit * (bandlimit + 1) / 2;
        let mut values = vec![0.0; stride * thetas.len()];
        for (chunk, &theta) in values.chunks_mut(stride.max(1)).zip(thetas) {
            fill(bandlimit, theta, chunk);
        }
        Self {
            bandlimit,
            stride,
            values,
        }
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    /// All `λ_lm` at ring `t`, in half-index order.
    #[inline]
    pub fn ring(&self, t: usize) -> &[f64] {
        &self.values[t * self.stride..(t + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, t: usize, l: usize, m: usize) -> f64 {
        self.ring(t)[half_index(l, m)]
    }
}

fn fill(bandlimit: usize, theta: f64, out: &mut [f64]) {
    if bandlimit == 0 {
        return;
    }
    let (s, c) = (libm::sin(theta), libm::cos(theta));
    let mut diag = 1.0 / libm::sqrt(4.0 * PI);
    for m in 0..bandlimit {
        if m > 0 {
            diag *= -libm::sqrt((2 * m + 1) as f64 / (2 * m) as f64) * s;
        }
        out[half_index(m, m)] = diag;
        if m + 1 >= bandlimit {
            continue;
        }
        let mf = m as f64;
        out[half_index(m + 1, m)] = libm::sqrt(2.0 * mf + 3.0) * c * diag;
        let a = |l: usize| {
            let lf = l as f64;
            libm::sqrt((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf))
        };
        for l in m + 2..bandlimit {
            let v = a(l) * (c * out[half_index(l - 1, m)] - out[half_index(l - 2, m)] / a(l - 1));
            out[half_index(l, m)] = v;
        }
    }
}
