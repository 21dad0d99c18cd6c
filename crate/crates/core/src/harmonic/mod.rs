//! Spherical harmonic coefficients and transforms.
//!
//! Coefficients use the flat index `i = l² + l + m`. Half-coefficient
//! vectors (m ≥ 0 only) use `l(l+1)/2 + m`.
//!
//! Each transform exposes the forward operator Γ (samples → coefficients),
//! the inverse Λ (coefficients → samples) and the two matrix adjoints Γ†
//! and Λ†. Λ and Λ† are what the inpainting solvers iterate on.

mod dh;
mod legendre;
mod mw;

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{SphereGrid, SphereImage};

pub use dh::DhTransform;
pub use legendre::LegendreTable;
pub use mw::MwTransform;

#[inline]
pub fn flat_index(l: usize, m: i64) -> usize {
    ((l * l + l) as i64 + m) as usize
}

#[inline]
pub fn half_index(l: usize, m: usize) -> usize {
    l * (l + 1) / 2 + m
}

/// `(-1)^k`.
#[inline]
pub(crate) fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `i^k`.
#[inline]
pub(crate) fn i_pow(k: i64) -> Complex64 {
    match k.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCoeffs {
    bandlimit: usize,
    values: Vec<Complex64>,
}

impl HarmonicCoeffs {
    pub fn zeros(bandlimit: usize) -> Self {
        Self {
            bandlimit,
            values: vec![Complex64::new(0.0, 0.0); bandlimit * bandlimit],
        }
    }

    pub fn from_values(bandlimit: usize, values: Vec<Complex64>) -> Result<Self> {
        if bandlimit == 0 {
            return Err(Error::ZeroBandlimit);
        }
        if values.len() != bandlimit * bandlimit {
            return Err(Error::DimensionMismatch {
                expected: bandlimit * bandlimit,
                found: values.len(),
            });
        }
        Ok(Self { bandlimit, values })
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        self.values[flat_index(l, m)]
    }

    #[inline]
    pub fn set(&mut self, l: usize, m: i64, v: Complex64) {
        self.values[flat_index(l, m)] = v;
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm_c(&self.values)
    }

    /// Largest violation of `x_{l,-m} = (-1)^m conj(x_{l,m})`.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for l in 0..self.bandlimit {
            for m in 0..=l as i64 {
                let expect = self.get(l, m).conj() * parity(m);
                worst = worst.max((self.get(l, -m) - expect).norm());
            }
        }
        worst
    }
}

impl core::ops::Index<usize> for HarmonicCoeffs {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.values[i]
    }
}

/// Coefficients for `m ≥ 0` of a real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfCoeffs {
    bandlimit: usize,
    values: Vec<Complex64>,
}

impl HalfCoeffs {
    pub fn len_for(bandlimit: usize) -> usize {
        bandlimit * (bandlimit + 1) / 2
    }

    pub fn zeros(bandlimit: usize) -> Self {
        Self {
            bandlimit,
            values: vec![Complex64::new(0.0, 0.0); Self::len_for(bandlimit)],
        }
    }

    pub fn from_values(bandlimit: usize, values: Vec<Complex64>) -> Result<Self> {
        if bandlimit == 0 {
            return Err(Error::ZeroBandlimit);
        }
        if values.len() != Self::len_for(bandlimit) {
            return Err(Error::DimensionMismatch {
                expected: Self::len_for(bandlimit),
                found: values.len(),
            });
        }
        Ok(Self { bandlimit, values })
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    #[inline]
    pub fn get(&self, l: usize, m: usize) -> Complex64 {
        self.values[half_index(l, m)]
    }

    /// Interleaved `(re, im)` pairs; the real-vector view used by the solvers.
    pub fn to_real_vec(&self) -> Vec<f64> {
        self.values.iter().flat_map(|z| [z.re, z.im]).collect()
    }

    /// Inverse of [`HalfCoeffs::to_real_vec`]; imaginary parts at `m = 0`
    /// are dropped.
    pub fn from_real_vec(bandlimit: usize, v: &[f64]) -> Result<Self> {
        let n = Self::len_for(bandlimit);
        if v.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: v.len(),
            });
        }
        let mut values: Vec<Complex64> = v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect();
        for l in 0..bandlimit {
            values[half_index(l, 0)].im = 0.0;
        }
        Ok(Self { bandlimit, values })
    }
}

const ZONAL_IMAG_TOLERANCE: f64 = 1e-12;

/// Π: fill `m < 0` from `x_{l,-m} = (-1)^m conj(x_{l,m})`.
pub fn conj_sym_extend(half: &HalfCoeffs) -> Result<HarmonicCoeffs> {
    for l in 0..half.bandlimit() {
        let imag = half.get(l, 0).im;
        if imag.abs() > ZONAL_IMAG_TOLERANCE {
            return Err(Error::NonRealZonal { l, imag });
        }
    }
    Ok(extend_unchecked(half))
}

pub(crate) fn extend_unchecked(half: &HalfCoeffs) -> HarmonicCoeffs {
    let bandlimit = half.bandlimit();
    let mut full = HarmonicCoeffs::zeros(bandlimit);
    for l in 0..bandlimit {
        full.set(l, 0, Complex64::new(half.get(l, 0).re, 0.0));
        for m in 1..=l {
            let v = half.get(l, m);
            full.set(l, m as i64, v);
            full.set(l, -(m as i64), v.conj() * parity(m as i64));
        }
    }
    full
}

/// Π†, the adjoint of [`conj_sym_extend`] under the real inner product
/// `Re⟨a, b⟩`: negative orders fold back with the same phase, the zonal row
/// keeps unit weight (real part, since `m = 0` entries are real).
pub fn conj_sym_restrict(full: &HarmonicCoeffs) -> HalfCoeffs {
    let bandlimit = full.bandlimit();
    let mut half = HalfCoeffs::zeros(bandlimit);
    for l in 0..bandlimit {
        half.values[half_index(l, 0)] = Complex64::new(full.get(l, 0).re, 0.0);
        for m in 1..=l {
            let mi = m as i64;
            half.values[half_index(l, m)] = full.get(l, mi) + full.get(l, -mi).conj() * parity(mi);
        }
    }
    half
}

/// A sampling theorem's forward/inverse transforms and their adjoints.
pub trait HarmonicTransform: Send + Sync {
    fn grid(&self) -> &SphereGrid;

    fn bandlimit(&self) -> usize {
        self.grid().bandlimit()
    }

    /// Λ: synthesis on the grid.
    fn inverse(&self, coeffs: &HarmonicCoeffs) -> Result<SphereImage<Complex64>>;

    /// Γ: analysis from grid samples.
    fn forward(&self, image: &SphereImage<Complex64>) -> Result<HarmonicCoeffs>;

    /// Λ†.
    fn inverse_adjoint(&self, image: &SphereImage<Complex64>) -> Result<HarmonicCoeffs>;

    /// Γ†.
    fn forward_adjoint(&self, coeffs: &HarmonicCoeffs) -> Result<SphereImage<Complex64>>;

    fn forward_real(&self, image: &SphereImage<f64>) -> Result<HarmonicCoeffs> {
        self.forward(&image.to_complex())
    }

    /// Υ = ΛΓ, projecting a real sample vector onto band-limited signals.
    fn band_limit(&self, image: &SphereImage<f64>) -> Result<SphereImage<f64>> {
        let coeffs = self.forward_real(image)?;
        Ok(self.inverse(&coeffs)?.re())
    }

    fn check_coeffs(&self, coeffs: &HarmonicCoeffs) -> Result<()> {
        if coeffs.bandlimit() != self.bandlimit() {
            return Err(Error::DimensionMismatch {
                expected: self.bandlimit() * self.bandlimit(),
                found: coeffs.values().len(),
            });
        }
        Ok(())
    }
}

/// Coefficients of the unit-norm band-limited Dirac delta on the South pole,
/// `κ (-1)^l √((2l+1)/4π) δ_{m0}`.
pub fn south_pole_dirac(bandlimit: usize) -> HarmonicCoeffs {
    use core::f64::consts::PI;
    let mut coeffs = HarmonicCoeffs::zeros(bandlimit);
    for l in 0..bandlimit {
        let v = parity(l as i64) * libm::sqrt((2 * l + 1) as f64 / (4.0 * PI));
        coeffs.set(l, 0, Complex64::new(v, 0.0));
    }
    let kappa = 1.0 / coeffs.norm();
    coeffs.values_mut().iter_mut().for_each(|z| *z *= kappa);
    coeffs
}
