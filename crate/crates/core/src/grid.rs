//! Equiangular sampling grids (MW and DH) and their quadrature rules.
//!
//! Samples are stored row-major by `(t, p)`, ring `t` at colatitude
//! `thetas[t]`, longitude index `p` at `phis[p]`. The MW lattice keeps all
//! `2L-1` copies of the South-pole ring; the number of distinct points is
//! tracked separately.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SamplingScheme {
    /// McEwen & Wiaux: `L` rings, the last one on the South pole.
    Mw,
    /// Driscoll & Healy: `2L` rings, no pole samples.
    Dh,
}

impl SamplingScheme {
    pub fn name(self) -> &'static str {
        match self {
            SamplingScheme::Mw => "mw",
            SamplingScheme::Dh => "dh",
        }
    }

    pub fn n_theta(self, bandlimit: usize) -> usize {
        match self {
            SamplingScheme::Mw => bandlimit,
            SamplingScheme::Dh => 2 * bandlimit,
        }
    }

    pub fn n_phi(self, bandlimit: usize) -> usize {
        2 * bandlimit - 1
    }

    /// Number of distinct points on the sphere represented by the grid.
    pub fn distinct_count(self, bandlimit: usize) -> usize {
        match self {
            SamplingScheme::Mw => (bandlimit - 1) * (2 * bandlimit - 1) + 1,
            SamplingScheme::Dh => 2 * bandlimit * (2 * bandlimit - 1),
        }
    }
}

impl core::fmt::Display for SamplingScheme {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.name())
    }
}

impl core::str::FromStr for SamplingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mw" => Ok(SamplingScheme::Mw),
            "dh" => Ok(SamplingScheme::Dh),
            other => Err(Error::InvalidParameter(format!(
                "unknown sampling scheme `{other}`"
            ))),
        }
    }
}

const POLE_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereGrid {
    scheme: SamplingScheme,
    bandlimit: usize,
    thetas: Vec<f64>,
    phis: Vec<f64>,
}

impl SphereGrid {
    pub fn new(scheme: SamplingScheme, bandlimit: usize) -> Result<Self> {
        if bandlimit == 0 {
            return Err(Error::ZeroBandlimit);
        }
        let n_theta = scheme.n_theta(bandlimit);
        let n_phi = scheme.n_phi(bandlimit);
        let thetas = (0..n_theta)
            .map(|t| match scheme {
                SamplingScheme::Mw => PI * ((2 * t + 1) as f64 / (2 * bandlimit - 1) as f64),
                SamplingScheme::Dh => PI * ((2 * t + 1) as f64 / (4 * bandlimit) as f64),
            })
            .collect();
        let phis = (0..n_phi)
            .map(|p| 2.0 * PI * p as f64 / n_phi as f64)
            .collect();
        Ok(Self {
            scheme,
            bandlimit,
            thetas,
            phis,
        })
    }

    pub fn scheme(&self) -> SamplingScheme {
        self.scheme
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn n_theta(&self) -> usize {
        self.thetas.len()
    }

    pub fn n_phi(&self) -> usize {
        self.phis.len()
    }

    /// Stored sample count, `n_theta * n_phi`.
    pub fn n_samples(&self) -> usize {
        self.n_theta() * self.n_phi()
    }

    pub fn distinct_count(&self) -> usize {
        self.scheme.distinct_count(self.bandlimit)
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    #[inline]
    pub fn index(&self, t: usize, p: usize) -> usize {
        t * self.n_phi() + p
    }

    pub fn is_pole_ring(&self, t: usize) -> bool {
        (self.thetas[t] - PI).abs() <= POLE_TOLERANCE
    }

    /// Ring sitting on θ = π, if any (MW only).
    pub fn south_pole_ring(&self) -> Option<usize> {
        (0..self.n_theta()).find(|&t| self.is_pole_ring(t))
    }

    /// Flat lattice indices of the distinct sample points, in lattice order.
    /// On MW only the first sample of the South-pole ring is kept.
    pub fn distinct_indices(&self) -> Vec<usize> {
        let pole = self.south_pole_ring();
        (0..self.n_samples())
            .filter(|&i| match pole {
                Some(t) => i / self.n_phi() != t || i % self.n_phi() == 0,
                None => true,
            })
            .collect()
    }

    pub(crate) fn describe(&self) -> alloc::string::String {
        format!("{}(L={})", self.scheme, self.bandlimit)
    }
}

/// MW grid at band-limit `2L-1`, fine enough to integrate squares of
/// band-limit `L` signals exactly.
pub fn upsampled_grid(bandlimit: usize) -> Result<SphereGrid> {
    if bandlimit == 0 {
        return Err(Error::ZeroBandlimit);
    }
    SphereGrid::new(SamplingScheme::Mw, 2 * bandlimit - 1)
}

/// `∫₀^π sinθ e^{ipθ} dθ`.
pub fn sin_kernel(p: i64) -> Complex64 {
    match p {
        0 => Complex64::new(2.0, 0.0),
        1 => Complex64::new(0.0, PI / 2.0),
        -1 => Complex64::new(0.0, -PI / 2.0),
        p if p % 2 == 0 => Complex64::new(2.0 / (1.0 - (p * p) as f64), 0.0),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// Per-ring quadrature weights, each already multiplied by `2π / n_phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureWeights {
    scheme: SamplingScheme,
    bandlimit: usize,
    per_ring: Vec<f64>,
}

impl QuadratureWeights {
    pub fn new(grid: &SphereGrid) -> Self {
        let per_ring = match grid.scheme() {
            SamplingScheme::Mw => mw_weights(grid),
            SamplingScheme::Dh => dh_weights(grid),
        };
        Self {
            scheme: grid.scheme(),
            bandlimit: grid.bandlimit(),
            per_ring,
        }
    }

    pub fn scheme(&self) -> SamplingScheme {
        self.scheme
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn per_ring(&self) -> &[f64] {
        &self.per_ring
    }

    #[inline]
    pub fn ring(&self, t: usize) -> f64 {
        self.per_ring[t]
    }

    pub fn n_phi(&self) -> usize {
        self.scheme.n_phi(self.bandlimit)
    }

    pub fn total(&self) -> f64 {
        self.per_ring.iter().sum::<f64>() * self.n_phi() as f64
    }

    pub(crate) fn check_grid(&self, scheme: SamplingScheme, bandlimit: usize) -> Result<()> {
        if self.scheme != scheme || self.bandlimit != bandlimit {
            return Err(Error::GridMismatch {
                expected: format!("{}(L={})", self.scheme, self.bandlimit),
                found: format!("{}(L={})", scheme, bandlimit),
            });
        }
        Ok(())
    }
}

pub fn quadrature_weights(grid: &SphereGrid) -> QuadratureWeights {
    QuadratureWeights::new(grid)
}

// Fourier construction: the sinθ kernel restricted to |m| < L, evaluated on
// the extended θ lattice and folded back onto θ ∈ (0, π].
fn mw_weights(grid: &SphereGrid) -> Vec<f64> {
    let l = grid.bandlimit() as i64;
    let n = (2 * l - 1) as f64;
    let scale = (2.0 * PI / n) / n;
    let eval = |theta: f64| -> Complex64 {
        (-(l - 1)..l)
            .map(|m| {
                let a = -(m as f64) * theta;
                sin_kernel(m) * Complex64::new(libm::cos(a), libm::sin(a))
            })
            .sum()
    };
    let last = grid.n_theta() - 1;
    (0..grid.n_theta())
        .map(|t| {
            let theta = grid.thetas()[t];
            let mut acc = eval(theta);
            if t < last {
                acc += eval(2.0 * PI - theta);
            }
            acc.re * scale
        })
        .collect()
}

fn dh_weights(grid: &SphereGrid) -> Vec<f64> {
    let l = grid.bandlimit();
    let raw: Vec<f64> = grid
        .thetas()
        .iter()
        .map(|&theta| {
            let series: f64 = (0..l)
                .map(|k| {
                    let odd = (2 * k + 1) as f64;
                    libm::sin(odd * theta) / odd
                })
                .sum();
            libm::sin(theta) * series
        })
        .collect();
    let total: f64 = raw.iter().sum::<f64>() * grid.n_phi() as f64;
    let norm = 4.0 * PI / total;
    raw.into_iter().map(|w| w * norm).collect()
}

/// Samples on a grid, row-major by ring.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereImage<T = f64> {
    scheme: SamplingScheme,
    bandlimit: usize,
    samples: Vec<T>,
}

impl<T: Copy + Default> SphereImage<T> {
    pub fn zeros(grid: &SphereGrid) -> Self {
        Self {
            scheme: grid.scheme(),
            bandlimit: grid.bandlimit(),
            samples: vec![T::default(); grid.n_samples()],
        }
    }
}

impl<T> SphereImage<T> {
    pub fn from_samples(grid: &SphereGrid, samples: Vec<T>) -> Result<Self> {
        if samples.len() != grid.n_samples() {
            return Err(Error::DimensionMismatch {
                expected: grid.n_samples(),
                found: samples.len(),
            });
        }
        Ok(Self {
            scheme: grid.scheme(),
            bandlimit: grid.bandlimit(),
            samples,
        })
    }

    pub fn scheme(&self) -> SamplingScheme {
        self.scheme
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    pub fn n_theta(&self) -> usize {
        self.scheme.n_theta(self.bandlimit)
    }

    pub fn n_phi(&self) -> usize {
        self.scheme.n_phi(self.bandlimit)
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [T] {
        &mut self.samples
    }

    pub fn into_samples(self) -> Vec<T> {
        self.samples
    }

    #[inline]
    pub fn get(&self, t: usize, p: usize) -> &T {
        &self.samples[t * self.n_phi() + p]
    }

    pub fn grid(&self) -> SphereGrid {
        SphereGrid::new(self.scheme, self.bandlimit).expect("image carries a valid band-limit")
    }

    pub fn check_grid(&self, grid: &SphereGrid) -> Result<()> {
        if self.scheme != grid.scheme() || self.bandlimit != grid.bandlimit() {
            return Err(Error::GridMismatch {
                expected: grid.describe(),
                found: format!("{}(L={})", self.scheme, self.bandlimit),
            });
        }
        Ok(())
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> SphereImage<U> {
        SphereImage {
            scheme: self.scheme,
            bandlimit: self.bandlimit,
            samples: self.samples.iter().map(f).collect(),
        }
    }
}

impl SphereImage<f64> {
    pub fn to_complex(&self) -> SphereImage<Complex64> {
        self.map(|&x| Complex64::new(x, 0.0))
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|x| x.is_finite())
    }
}

impl SphereImage<Complex64> {
    pub fn re(&self) -> SphereImage<f64> {
        self.map(|z| z.re)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, z| m.max(z.im.abs()))
    }
}

/// `Σ_{t,p} q(θ_t) x_{t,p}`.
pub fn integrate(x: &SphereImage<f64>, weights: &QuadratureWeights) -> Result<f64> {
    weights.check_grid(x.scheme(), x.bandlimit())?;
    let n_phi = x.n_phi();
    Ok(x.samples()
        .chunks(n_phi)
        .zip(weights.per_ring())
        .map(|(ring, q)| q * ring.iter().sum::<f64>())
        .sum())
}
