#![allow(dead_code)]

use std::f64::consts::PI;

use spheretv_core::harmonic::{conj_sym_extend, half_index};
use spheretv_core::rng::SeededRng;
use spheretv_core::{Complex64, HalfCoeffs, HarmonicCoeffs};

pub fn random_coeffs(bandlimit: usize, rng: &mut SeededRng) -> HarmonicCoeffs {
    let values = (0..bandlimit * bandlimit)
        .map(|_| Complex64::new(rng.normal(), rng.normal()))
        .collect();
    HarmonicCoeffs::from_values(bandlimit, values).unwrap()
}

pub fn random_half(bandlimit: usize, rng: &mut SeededRng) -> HalfCoeffs {
    let mut v = vec![Complex64::new(0.0, 0.0); HalfCoeffs::len_for(bandlimit)];
    for l in 0..bandlimit {
        for m in 0..=l {
            let im = if m == 0 { 0.0 } else { rng.normal() };
            v[half_index(l, m)] = Complex64::new(rng.normal(), im);
        }
    }
    HalfCoeffs::from_values(bandlimit, v).unwrap()
}

pub fn random_real_coeffs(bandlimit: usize, rng: &mut SeededRng) -> HarmonicCoeffs {
    conj_sym_extend(&random_half(bandlimit, rng)).unwrap()
}

pub fn random_vec(n: usize, rng: &mut SeededRng) -> Vec<f64> {
    (0..n).map(|_| rng.normal()).collect()
}

pub fn random_cvec(n: usize, rng: &mut SeededRng) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.normal(), rng.normal()))
        .collect()
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Wigner `d^l_{m'm}(β)` from the explicit factorial sum.
pub fn wigner_d(l: i64, mp: i64, m: i64, beta: f64) -> f64 {
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let pre = (factorial(l + mp) * factorial(l - mp) * factorial(l + m) * factorial(l - m)).sqrt();
    let mut sum = 0.0;
    for k in 0..=(2 * l) {
        let a = l + m - k;
        let b = l - k - mp;
        let d = k - m + mp;
        if a < 0 || b < 0 || d < 0 {
            continue;
        }
        let sign = if (k - m + mp).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        sum += sign / (factorial(a) * factorial(k) * factorial(b) * factorial(d))
            * c.powi((2 * l + m - mp - 2 * k) as i32)
            * s.powi((2 * k - m + mp) as i32);
    }
    pre * sum
}

/// `Y_lm(θ, φ)` through the factorial-sum `d^l_{m0}`.
pub fn ylm(l: usize, m: i64, theta: f64, phi: f64) -> Complex64 {
    let norm = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
    Complex64::from_polar(norm * wigner_d(l as i64, m, 0, theta), m as f64 * phi)
}

pub fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn cdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn cnorm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}
