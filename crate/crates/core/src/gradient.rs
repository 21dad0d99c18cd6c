//! Finite differences, the weighted gradient and the discrete TV norm.
//!
//! Images are row-major `(t, p)` arrays. The θ difference is a forward
//! difference with a zero last ring; the φ difference wraps around.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{QuadratureWeights, SphereGrid, SphereImage};

fn check_len(len: usize, n_theta: usize, n_phi: usize) -> Result<()> {
    if len != n_theta * n_phi {
        return Err(Error::DimensionMismatch {
            expected: n_theta * n_phi,
            found: len,
        });
    }
    Ok(())
}

/// `u_{t,p} = x_{t+1,p} - x_{t,p}`, zero on the last ring.
pub fn delta_theta_raw(x: &[f64], n_theta: usize, n_phi: usize) -> Result<Vec<f64>> {
    check_len(x.len(), n_theta, n_phi)?;
    let mut u = vec![0.0; x.len()];
    for t in 0..n_theta.saturating_sub(1) {
        for p in 0..n_phi {
            u[t * n_phi + p] = x[(t + 1) * n_phi + p] - x[t * n_phi + p];
        }
    }
    Ok(u)
}

pub fn delta_theta_adjoint_raw(u: &[f64], n_theta: usize, n_phi: usize) -> Result<Vec<f64>> {
    check_len(u.len(), n_theta, n_phi)?;
    let mut x = vec![0.0; u.len()];
    for t in 0..n_theta {
        for p in 0..n_phi {
            let i = t * n_phi + p;
            let prev = if t > 0 { u[i - n_phi] } else { 0.0 };
            let here = if t + 1 < n_theta { u[i] } else { 0.0 };
            x[i] = prev - here;
        }
    }
    Ok(x)
}

/// `v_{t,p} = x_{t,p+1} - x_{t,p}`, periodic in `p`.
pub fn delta_phi_raw(x: &[f64], n_theta: usize, n_phi: usize) -> Result<Vec<f64>> {
    check_len(x.len(), n_theta, n_phi)?;
    let mut v = vec![0.0; x.len()];
    for (ring, out) in x.chunks(n_phi).zip(v.chunks_mut(n_phi)) {
        for p in 0..n_phi {
            out[p] = ring[(p + 1) % n_phi] - ring[p];
        }
    }
    Ok(v)
}

pub fn delta_phi_adjoint_raw(v: &[f64], n_theta: usize, n_phi: usize) -> Result<Vec<f64>> {
    check_len(v.len(), n_theta, n_phi)?;
    let mut x = vec![0.0; v.len()];
    for (ring, out) in v.chunks(n_phi).zip(x.chunks_mut(n_phi)) {
        for p in 0..n_phi {
            out[p] = ring[(p + n_phi - 1) % n_phi] - ring[p];
        }
    }
    Ok(x)
}

pub fn delta_theta(x: &SphereImage) -> Vec<f64> {
    delta_theta_raw(x.samples(), x.n_theta(), x.n_phi()).expect("image shape is consistent")
}

pub fn delta_theta_adjoint(u: &[f64], grid: &SphereGrid) -> Result<SphereImage> {
    SphereImage::from_samples(
        grid,
        delta_theta_adjoint_raw(u, grid.n_theta(), grid.n_phi())?,
    )
}

pub fn delta_phi(x: &SphereImage) -> Vec<f64> {
    delta_phi_raw(x.samples(), x.n_theta(), x.n_phi()).expect("image shape is consistent")
}

pub fn delta_phi_adjoint(v: &[f64], grid: &SphereGrid) -> Result<SphereImage> {
    SphereImage::from_samples(
        grid,
        delta_phi_adjoint_raw(v, grid.n_theta(), grid.n_phi())?,
    )
}

/// Weighted gradient components `(ũ, ṽ)` on the full sample lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientField {
    pub n_theta: usize,
    pub n_phi: usize,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl GradientField {
    pub fn zeros(n_theta: usize, n_phi: usize) -> Self {
        let n = n_theta * n_phi;
        Self {
            n_theta,
            n_phi,
            u: vec![0.0; n],
            v: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    /// `|(∇̃x)_{t,p}|` per sample.
    pub fn magnitude(&self) -> Vec<f64> {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(a, b)| libm::hypot(*a, *b))
            .collect()
    }

    /// `Σ |(∇̃x)_{t,p}|`.
    pub fn l1_norm(&self) -> f64 {
        self.u
            .iter()
            .zip(&self.v)
            .map(|(a, b)| libm::hypot(*a, *b))
            .sum()
    }

    /// Per-sample projection onto the unit disc.
    pub fn project_unit_disc(&mut self) {
        for (a, b) in self.u.iter_mut().zip(self.v.iter_mut()) {
            let r = libm::hypot(*a, *b);
            if r > 1.0 {
                *a /= r;
                *b /= r;
            }
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        crate::linalg::dot(&self.u, &other.u) + crate::linalg::dot(&self.v, &other.v)
    }

    pub fn to_vec(&self) -> Vec<f64> {
        self.u.iter().chain(&self.v).copied().collect()
    }

    pub fn from_vec(n_theta: usize, n_phi: usize, data: &[f64]) -> Result<Self> {
        let n = n_theta * n_phi;
        if data.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                found: data.len(),
            });
        }
        Ok(Self {
            n_theta,
            n_phi,
            u: data[..n].to_vec(),
            v: data[n..].to_vec(),
        })
    }
}

/// The operator ∇̃ for one grid, with its per-ring factors precomputed.
#[derive(Debug, Clone)]
pub struct WeightedGradient {
    grid: SphereGrid,
    theta_factor: Vec<f64>,
    phi_factor: Vec<f64>,
}

impl WeightedGradient {
    pub fn new(grid: &SphereGrid, weights: &QuadratureWeights) -> Result<Self> {
        weights.check_grid(grid.scheme(), grid.bandlimit())?;
        let theta_factor = weights.per_ring().to_vec();
        let phi_factor = (0..grid.n_theta())
            .map(|t| {
                if grid.is_pole_ring(t) {
                    0.0
                } else {
                    weights.ring(t) / libm::sin(grid.thetas()[t])
                }
            })
            .collect();
        Ok(Self {
            grid: grid.clone(),
            theta_factor,
            phi_factor,
        })
    }

    pub fn grid(&self) -> &SphereGrid {
        &self.grid
    }

    /// `q(θ_t) / sin θ_t`, zero on a pole ring.
    pub fn phi_factors(&self) -> &[f64] {
        &self.phi_factor
    }

    pub fn apply(&self, x: &[f64]) -> Result<GradientField> {
        let (nt, np) = (self.grid.n_theta(), self.grid.n_phi());
        let mut u = delta_theta_raw(x, nt, np)?;
        let mut v = delta_phi_raw(x, nt, np)?;
        for t in 0..nt {
            u[t * np..(t + 1) * np]
                .iter_mut()
                .for_each(|a| *a *= self.theta_factor[t]);
            v[t * np..(t + 1) * np]
                .iter_mut()
                .for_each(|b| *b *= self.phi_factor[t]);
        }
        Ok(GradientField {
            n_theta: nt,
            n_phi: np,
            u,
            v,
        })
    }

    pub fn adjoint(&self, g: &GradientField) -> Result<Vec<f64>> {
        let (nt, np) = (self.grid.n_theta(), self.grid.n_phi());
        if g.n_theta != nt || g.n_phi != np {
            return Err(Error::DimensionMismatch {
                expected: nt * np,
                found: g.n_theta * g.n_phi,
            });
        }
        let mut u = g.u.clone();
        let mut v = g.v.clone();
        for t in 0..nt {
            u[t * np..(t + 1) * np]
                .iter_mut()
                .for_each(|a| *a *= self.theta_factor[t]);
            v[t * np..(t + 1) * np]
                .iter_mut()
                .for_each(|b| *b *= self.phi_factor[t]);
        }
        let mut x = delta_theta_adjoint_raw(&u, nt, np)?;
        crate::linalg::axpy(1.0, &delta_phi_adjoint_raw(&v, nt, np)?, &mut x);
        Ok(x)
    }

    pub fn tv_norm(&self, x: &[f64]) -> Result<f64> {
        Ok(self.apply(x)?.l1_norm())
    }
}

pub fn weighted_gradient(x: &SphereImage, w: &QuadratureWeights) -> Result<GradientField> {
    WeightedGradient::new(&x.grid(), w)?.apply(x.samples())
}

pub fn weighted_gradient_adjoint(g: &GradientField, w: &QuadratureWeights) -> Result<SphereImage> {
    let grid = SphereGrid::new(w.scheme(), w.bandlimit())?;
    let x = WeightedGradient::new(&grid, w)?.adjoint(g)?;
    SphereImage::from_samples(&grid, x)
}

/// `Σ_{t,p} |(∇̃x)_{t,p}|`.
pub fn tv_norm(x: &SphereImage, w: &QuadratureWeights) -> Result<f64> {
    Ok(weighted_gradient(x, w)?.l1_norm())
}
