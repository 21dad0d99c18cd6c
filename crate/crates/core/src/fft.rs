//! One-dimensional DFT abstraction used by the transform stages.
//!
//! Both directions are unnormalised; the transforms apply their own `1/n`
//! factors.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

pub trait Fft: Send + Sync {
    fn len(&self) -> usize;

    /// `X_k = Σ_j x_j exp(-2πi jk/n)`, in place.
    fn forward(&self, buf: &mut [Complex64]);

    /// `x_j = Σ_k X_k exp(+2πi jk/n)`, in place.
    fn backward(&self, buf: &mut [Complex64]);
}

/// Builds FFT plans for a given length.
pub trait FftPlanner: Send + Sync {
    fn plan(&self, len: usize) -> alloc::boxed::Box<dyn Fft>;
}

/// Direct O(n²) DFT with a precomputed twiddle table.
#[derive(Debug, Clone)]
pub struct DirectDft {
    twiddles: Vec<Complex64>,
}

impl DirectDft {
    pub fn new(len: usize) -> Self {
        let twiddles = (0..len)
            .map(|k| {
                let angle = -2.0 * PI * k as f64 / len as f64;
                Complex64::new(libm::cos(angle), libm::sin(angle))
            })
            .collect();
        Self { twiddles }
    }

    fn apply(&self, buf: &mut [Complex64], conjugate: bool) {
        let n = self.twiddles.len();
        assert_eq!(buf.len(), n, "buffer length does not match DFT plan");
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (k, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for x in buf.iter() {
                let w = self.twiddles[idx];
                acc += if conjugate { x * w.conj() } else { x * w };
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            *slot = acc;
        }
        buf.copy_from_slice(&out);
    }
}

impl Fft for DirectDft {
    fn len(&self) -> usize {
        self.twiddles.len()
    }

    fn forward(&self, buf: &mut [Complex64]) {
        self.apply(buf, false);
    }

    fn backward(&self, buf: &mut [Complex64]) {
        self.apply(buf, true);
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DirectPlanner;

impl FftPlanner for DirectPlanner {
    fn plan(&self, len: usize) -> alloc::boxed::Box<dyn Fft> {
        alloc::boxed::Box::new(DirectDft::new(len))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_then_backward_scales_by_len() {
        let n = 7;
        let dft = DirectDft::new(n);
        let orig: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(j as f64 * 0.3 - 1.0, (j * j) as f64 * 0.1))
            .collect();
        let mut buf = orig.clone();
        dft.forward(&mut buf);
        dft.backward(&mut buf);
        for (a, b) in buf.iter().zip(&orig) {
            assert!((a / n as f64 - b).norm() < 1e-13);
        }
    }

    #[test]
    fn delta_transforms_to_constant() {
        let dft = DirectDft::new(5);
        let mut buf = vec![Complex64::new(0.0, 0.0); 5];
        buf[0] = Complex64::new(1.0, 0.0);
        dft.forward(&mut buf);
        assert!(buf
            .iter()
            .all(|z| (z - Complex64::new(1.0, 0.0)).norm() < 1e-15));
    }
}
