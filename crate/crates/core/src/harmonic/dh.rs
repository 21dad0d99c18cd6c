//! Driscoll-Healy transforms evaluated directly from tabulated Legendre
//! functions, with a DFT in φ on each ring.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{half_index, parity, HarmonicCoeffs, HarmonicTransform, LegendreTable};
use crate::error::Result;
use crate::fft::{DirectPlanner, Fft, FftPlanner};
use crate::grid::{QuadratureWeights, SamplingScheme, SphereGrid, SphereImage};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub struct DhTransform {
    grid: SphereGrid,
    weights: QuadratureWeights,
    legendre: LegendreTable,
    fft: Box<dyn Fft>,
}

impl core::fmt::Debug for DhTransform {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("DhTransform")
            .field("bandlimit", &self.grid.bandlimit())
            .finish()
    }
}

impl DhTransform {
    pub fn new(bandlimit: usize) -> Result<Self> {
        Self::with_planner(bandlimit, &DirectPlanner)
    }

    pub fn with_planner(bandlimit: usize, planner: &dyn FftPlanner) -> Result<Self> {
        let grid = SphereGrid::new(SamplingScheme::Dh, bandlimit)?;
        let weights = QuadratureWeights::new(&grid);
        let legendre = LegendreTable::new(bandlimit, grid.thetas());
        let fft = planner.plan(grid.n_phi());
        Ok(Self {
            grid,
            weights,
            legendre,
            fft,
        })
    }

    pub fn weights(&self) -> &QuadratureWeights {
        &self.weights
    }

    /// Per-ring synthesis `F_m(θ_t) = Σ_l f_lm λ_lm(θ_t)` followed by a
    /// backward DFT, each ring scaled by `scale(t)`.
    fn synthesise(
        &self,
        coeffs: &HarmonicCoeffs,
        scale: impl Fn(usize) -> f64,
    ) -> Result<SphereImage<Complex64>> {
        self.check_coeffs(coeffs)?;
        let bandlimit = self.grid.bandlimit();
        let n = self.grid.n_phi();
        let mut samples = vec![ZERO; self.grid.n_samples()];
        for (t, ring) in samples.chunks_mut(n).enumerate() {
            let lam = self.legendre.ring(t);
            let s = scale(t);
            for m in 0..bandlimit {
                let mi = m as i64;
                let sign = parity(mi);
                let mut pos = ZERO;
                let mut neg = ZERO;
                for l in m..bandlimit {
                    let v = lam[half_index(l, m)];
                    pos += coeffs.get(l, mi) * v;
                    if m > 0 {
                        neg += coeffs.get(l, -mi) * v;
                    }
                }
                ring[m] = pos * s;
                if m > 0 {
                    ring[n - m] = neg * (sign * s);
                }
            }
            self.fft.backward(ring);
        }
        SphereImage::from_samples(&self.grid, samples)
    }

    /// `f_lm = Σ_t scale(t) λ_lm(θ_t) Σ_p f_tp e^{-imφ_p}`.
    fn analyse(
        &self,
        image: &SphereImage<Complex64>,
        scale: impl Fn(usize) -> f64,
    ) -> Result<HarmonicCoeffs> {
        image.check_grid(&self.grid)?;
        let bandlimit = self.grid.bandlimit();
        let n = self.grid.n_phi();
        let mut coeffs = HarmonicCoeffs::zeros(bandlimit);
        let mut buf: Vec<Complex64> = vec![ZERO; n];
        for (t, ring) in image.samples().chunks(n).enumerate() {
            buf.copy_from_slice(ring);
            self.fft.forward(&mut buf);
            let lam = self.legendre.ring(t);
            let s = scale(t);
            for m in 0..bandlimit {
                let mi = m as i64;
                let pos = buf[m] * s;
                let neg = buf[(n - m) % n] * (parity(mi) * s);
                for l in m..bandlimit {
                    let v = lam[half_index(l, m)];
                    let values = coeffs.values_mut();
                    values[super::flat_index(l, mi)] += pos * v;
                    if m > 0 {
                        values[super::flat_index(l, -mi)] += neg * v;
                    }
                }
            }
        }
        Ok(coeffs)
    }
}

impl HarmonicTransform for DhTransform {
    fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    fn inverse(&self, coeffs: &HarmonicCoeffs) -> Result<SphereImage<Complex64>> {
        self.synthesise(coeffs, |_| 1.0)
    }

    fn forward(&self, image: &SphereImage<Complex64>) -> Result<HarmonicCoeffs> {
        self.analyse(image, |t| self.weights.ring(t))
    }

    fn inverse_adjoint(&self, image: &SphereImage<Complex64>) -> Result<HarmonicCoeffs> {
        self.analyse(image, |_| 1.0)
    }

    fn forward_adjoint(&self, coeffs: &HarmonicCoeffs) -> Result<SphereImage<Complex64>> {
        self.synthesise(coeffs, |t| self.weights.ring(t))
    }
}
