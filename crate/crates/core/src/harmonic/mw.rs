//! Fast MW transforms by separation of variables.
//!
//! Harmonic coefficients are mapped to a Fourier series on the torus
//! `(θ, φ) ∈ [0, 2π)²` through the Wigner Δ factorisation; sampling then
//! reduces to one-dimensional DFTs. `mm` arrays are `n × n` with `n = 2L-1`,
//! indexed by `(m + L - 1, m' + L - 1)`.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{i_pow, parity, HarmonicCoeffs, HarmonicTransform};
use crate::error::Result;
use crate::fft::{DirectPlanner, Fft, FftPlanner};
use crate::grid::{sin_kernel, SamplingScheme, SphereGrid, SphereImage};
use crate::wigner::DeltaTable;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub struct MwTransform {
    grid: SphereGrid,
    delta: DeltaTable,
    fft: Box<dyn Fft>,
    /// `√((2l+1)/4π)`.
    norms: Vec<f64>,
    /// `e^{i m π / n}` for `m ∈ [-(L-1), L-1]`.
    shifts: Vec<Complex64>,
    /// `2π w(p)` for `p ∈ [-2(L-1), 2(L-1)]`.
    kernel: Vec<Complex64>,
}

impl core::fmt::Debug for MwTransform {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MwTransform")
            .field("bandlimit", &self.grid.bandlimit())
            .finish()
    }
}

impl MwTransform {
    pub fn new(bandlimit: usize) -> Result<Self> {
        Self::with_planner(bandlimit, &DirectPlanner)
    }

    pub fn with_planner(bandlimit: usize, planner: &dyn FftPlanner) -> Result<Self> {
        let grid = SphereGrid::new(SamplingScheme::Mw, bandlimit)?;
        let delta = DeltaTable::new(bandlimit)?;
        let n = grid.n_phi();
        let lm1 = bandlimit as i64 - 1;
        let norms = (0..bandlimit)
            .map(|l| libm::sqrt((2 * l + 1) as f64 / (4.0 * PI)))
            .collect();
        let shifts = (-lm1..=lm1)
            .map(|m| {
                let a = m as f64 * PI / n as f64;
                Complex64::new(libm::cos(a), libm::sin(a))
            })
            .collect();
        let kernel = (-2 * lm1..=2 * lm1)
            .map(|p| sin_kernel(p) * (2.0 * PI))
            .collect();
        Ok(Self {
            grid,
            delta,
            fft: planner.plan(n),
            norms,
            shifts,
            kernel,
        })
    }

    fn n(&self) -> usize {
        self.grid.n_phi()
    }

    fn lm1(&self) -> i64 {
        self.grid.bandlimit() as i64 - 1
    }

    #[inline]
    fn shift(&self, m: i64) -> Complex64 {
        self.shifts[(m + self.lm1()) as usize]
    }

    /// Buffer slot of frequency `m` in a length-`n` DFT.
    #[inline]
    fn slot(&self, m: i64) -> usize {
        m.rem_euclid(self.n() as i64) as usize
    }

    /// `F_{m,m'} = i^{-m} Σ_l √((2l+1)/4π) Δ_{m'm} Δ_{m'0} f_lm`.
    fn coeffs_to_mm(&self, coeffs: &HarmonicCoeffs) -> Vec<Complex64> {
        let bandlimit = self.grid.bandlimit();
        let n = self.n();
        let lm1 = self.lm1();
        let mut mm = vec![ZERO; n * n];
        for l in 0..bandlimit {
            let li = l as i64;
            let base = l * l + l;
            for mp in 0..=l {
                let row = self.delta.row(l, mp);
                let d0 = row[l] * self.norms[l];
                if d0 == 0.0 {
                    continue;
                }
                let col = mp + lm1 as usize;
                for m in -li..=li {
                    let f = coeffs.values()[(base as i64 + m) as usize];
                    mm[(m + lm1) as usize * n + col] += f * (row[(m + li) as usize] * d0);
                }
            }
        }
        for m in -lm1..=lm1 {
            let phase = i_pow(-m);
            let sign = parity(m);
            let r = (m + lm1) as usize * n;
            for mp in 0..=lm1 {
                let v = mm[r + (mp + lm1) as usize] * phase;
                mm[r + (mp + lm1) as usize] = v;
                mm[r + (lm1 - mp) as usize] = v * sign;
            }
        }
        mm
    }

    /// `f_lm = i^m √((2l+1)/4π) Σ_{m'} Δ_{m'm} Δ_{m'0} G_{m,m'}`; the adjoint
    /// of [`MwTransform::coeffs_to_mm`].
    fn mm_to_coeffs(&self, mm: &[Complex64]) -> HarmonicCoeffs {
        let bandlimit = self.grid.bandlimit();
        let n = self.n();
        let lm1 = self.lm1();
        // Fold m' < 0 onto m' > 0 using the parity of Δ_{-m',m} Δ_{-m',0}.
        let mut folded = vec![ZERO; n * bandlimit];
        for m in -lm1..=lm1 {
            let sign = parity(m);
            let r = (m + lm1) as usize;
            folded[r * bandlimit] = mm[r * n + lm1 as usize];
            for mp in 1..=lm1 {
                folded[r * bandlimit + mp as usize] =
                    mm[r * n + (mp + lm1) as usize] + mm[r * n + (lm1 - mp) as usize] * sign;
            }
        }
        let mut coeffs = HarmonicCoeffs::zeros(bandlimit);
        let values = coeffs.values_mut();
        for l in 0..bandlimit {
            let li = l as i64;
            let base = l * l + l;
            for mp in 0..=l {
                let row = self.delta.row(l, mp);
                let d0 = row[l] * self.norms[l];
                if d0 == 0.0 {
                    continue;
                }
                for m in -li..=li {
                    let g = folded[(m + lm1) as usize * bandlimit + mp];
                    values[(base as i64 + m) as usize] += g * (row[(m + li) as usize] * d0);
                }
            }
            for m in -li..=li {
                values[(base as i64 + m) as usize] *= i_pow(m);
            }
        }
        coeffs
    }

    /// `G_{m,m'} = Σ_{m''} F_{m,m''} 2π w(m'' - m')`. The kernel satisfies
    /// `w(-p) = conj(w(p))`, so this map is self-adjoint.
    fn convolve(&self, mm: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let centre = 2 * self.lm1();
        let mut out = vec![ZERO; n * n];
        for (src, dst) in mm.chunks(n).zip(out.chunks_mut(n)) {
            for (a, d) in dst.iter_mut().enumerate() {
                let mut acc = ZERO;
                for (b, &f) in src.iter().enumerate() {
                    acc += f * self.kernel[(b as i64 - a as i64 + centre) as usize];
                }
                *d = acc;
            }
        }
        out
    }

    /// Fourier series in φ of each ring, `F_m(θ_t) = Σ_p f_{tp} e^{-imφ_p}`,
    /// stored as `n_theta × n` with column `m + L - 1`.
    fn rings_forward(&self, samples: &[Complex64], scale: f64) -> Vec<Complex64> {
        let n = self.n();
        let lm1 = self.lm1();
        let mut out = vec![ZERO; samples.len()];
        let mut buf = vec![ZERO; n];
        for (ring, dst) in samples.chunks(n).zip(out.chunks_mut(n)) {
            buf.copy_from_slice(ring);
            self.fft.forward(&mut buf);
            for m in -lm1..=lm1 {
                dst[(m + lm1) as usize] = buf[self.slot(m)] * scale;
            }
        }
        out
    }

    /// Inverse of [`MwTransform::rings_forward`] up to scale.
    fn rings_backward(&self, fm: &[Complex64], scale: f64) -> Vec<Complex64> {
        let n = self.n();
        let lm1 = self.lm1();
        let mut out = vec![ZERO; fm.len()];
        for (src, ring) in fm.chunks(n).zip(out.chunks_mut(n)) {
            for m in -lm1..=lm1 {
                ring[self.slot(m)] = src[(m + lm1) as usize] * scale;
            }
            self.fft.backward(ring);
        }
        out
    }

    /// `f_m(θ_t) = Σ_{m'} F_{m,m'} e^{im'θ_t}` for `t < rows`, returned as
    /// `rows × n` ring-major with column `m + L - 1`.
    fn theta_synthesis(&self, mm: &[Complex64], rows: usize, scale: f64) -> Vec<Complex64> {
        let n = self.n();
        let lm1 = self.lm1();
        let mut out = vec![ZERO; rows * n];
        let mut buf = vec![ZERO; n];
        for m in -lm1..=lm1 {
            let col = (m + lm1) as usize;
            let src = &mm[col * n..(col + 1) * n];
            for mp in -lm1..=lm1 {
                buf[self.slot(mp)] = src[(mp + lm1) as usize] * self.shift(mp) * scale;
            }
            self.fft.backward(&mut buf);
            for t in 0..rows {
                out[t * n + col] = buf[t];
            }
        }
        out
    }

    /// `F_{m,m'} = Σ_t f_m(θ_t) e^{-im'θ_t}` over `t < n`; missing rows of
    /// `fm` are zero.
    fn theta_analysis(&self, fm: &[Complex64], scale: f64) -> Vec<Complex64> {
        let n = self.n();
        let lm1 = self.lm1();
        let rows = fm.len() / n;
        let mut mm = vec![ZERO; n * n];
        let mut buf = vec![ZERO; n];
        for m in -lm1..=lm1 {
            let col = (m + lm1) as usize;
            buf.iter_mut().for_each(|z| *z = ZERO);
            for t in 0..rows {
                buf[t] = fm[t * n + col];
            }
            self.fft.forward(&mut buf);
            let dst = &mut mm[col * n..(col + 1) * n];
            for mp in -lm1..=lm1 {
                dst[(mp + lm1) as usize] = buf[self.slot(mp)] * self.shift(mp).conj() * scale;
            }
        }
        mm
    }

    /// Extend rings `t < L` to the full `2L-1` periodic θ circle using
    /// `F_m(2π - θ) = (-1)^m F_m(θ)`.
    fn extend_theta(&self, fm: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let lm1 = self.lm1();
        let bandlimit = self.grid.bandlimit();
        let mut ext = vec![ZERO; n * n];
        ext[..bandlimit * n].copy_from_slice(fm);
        for t in bandlimit..n {
            let src = 2 * bandlimit - 2 - t;
            for m in -lm1..=lm1 {
                let c = (m + lm1) as usize;
                ext[t * n + c] = fm[src * n + c] * parity(m);
            }
        }
        ext
    }

    /// Adjoint of [`MwTransform::extend_theta`].
    fn fold_theta(&self, ext: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        let lm1 = self.lm1();
        let bandlimit = self.grid.bandlimit();
        let mut fm = ext[..bandlimit * n].to_vec();
        for t in 0..bandlimit - 1 {
            let src = 2 * bandlimit - 2 - t;
            for m in -lm1..=lm1 {
                let c = (m + lm1) as usize;
                fm[t * n + c] += ext[src * n + c] * parity(m);
            }
        }
        fm
    }

    fn check_image(&self, image: &SphereImage<Complex64>) -> Result<()> {
        image.check_grid(&self.grid)
    }
}

impl HarmonicTransform for MwTransform {
    fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    fn inverse(&self, coeffs: &HarmonicCoeffs) -> Result<SphereImage<Complex64>> {
        self.check_coeffs(coeffs)?;
        let mm = self.coeffs_to_mm(coeffs);
        let fm = self.theta_synthesis(&mm, self.grid.bandlimit(), 1.0);
        SphereImage::from_samples(&self.grid, self.rings_backward(&fm, 1.0))
    }

    fn forward(&self, image: &SphereImage<Complex64>) -> Result<HarmonicCoeffs> {
        self.check_image(image)?;
        let inv_n = 1.0 / self.n() as f64;
        let fm = self.rings_forward(image.samples(), inv_n);
        let ext = self.extend_theta(&fm);
        let mm = self.theta_analysis(&ext, inv_n);
        Ok(self.mm_to_coeffs(&self.convolve(&mm)))
    }

    fn inverse_adjoint(&self, image: &SphereImage<Complex64>) -> Result<HarmonicCoeffs> {
        self.check_image(image)?;
        let fm = self.rings_forward(image.samples(), 1.0);
        let mm = self.theta_analysis(&fm, 1.0);
        Ok(self.mm_to_coeffs(&mm))
    }

    fn forward_adjoint(&self, coeffs: &HarmonicCoeffs) -> Result<SphereImage<Complex64>> {
        self.check_coeffs(coeffs)?;
        let inv_n = 1.0 / self.n() as f64;
        let mm = self.convolve(&self.coeffs_to_mm(coeffs));
        let ext = self.theta_synthesis(&mm, self.n(), inv_n);
        let fm = self.fold_theta(&ext);
        SphereImage::from_samples(&self.grid, self.rings_backward(&fm, inv_n))
    }
}
