//! rustfft-backed plans for the core transforms.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use spheretv_core::fft::{Fft, FftPlanner};

pub struct RustFft {
    forward: Arc<dyn rustfft::Fft<f64>>,
    backward: Arc<dyn rustfft::Fft<f64>>,
}

impl Fft for RustFft {
    fn len(&self) -> usize {
        self.forward.len()
    }

    fn forward(&self, buf: &mut [Complex64]) {
        self.forward.process(buf);
    }

    fn backward(&self, buf: &mut [Complex64]) {
        self.backward.process(buf);
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RustFftPlanner;

impl FftPlanner for RustFftPlanner {
    fn plan(&self, len: usize) -> Box<dyn Fft> {
        let mut planner = rustfft::FftPlanner::<f64>::new();
        Box::new(RustFft {
            forward: planner.plan_fft_forward(len),
            backward: planner.plan_fft_inverse(len),
        })
    }
}
