//! Regularised incomplete gamma function and the χ² quantile.

use crate::error::{Error, Result};

const EPS: f64 = 1e-15;
const MAX_TERMS: usize = 10_000;

/// Regularised lower incomplete gamma `P(a, x)`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x < a + 1.0 {
        series(a, x)
    } else {
        1.0 - continued_fraction(a, x)
    }
}

fn prefactor(a: f64, x: f64) -> f64 {
    libm::exp(a * libm::log(x) - x - libm::lgamma(a))
}

fn series(a: f64, x: f64) -> f64 {
    let mut term = 1.0 / a;
    let mut sum = term;
    let mut ap = a;
    for _ in 0..MAX_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * prefactor(a, x)
}

/// `Q(a, x)` by Lentz's continued fraction.
fn continued_fraction(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    h * prefactor(a, x)
}

/// CDF of χ²(k).
pub fn chi2_cdf(k: f64, x: f64) -> f64 {
    gamma_p(k / 2.0, x / 2.0)
}

/// Quantile of χ²(k) at probability `alpha`.
pub fn chi2_inv_cdf(k: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParameter(
            "chi-squared needs at least one degree of freedom".into(),
        ));
    }
    let kf = k as f64;
    let half = kf / 2.0;
    let log_norm = -half * core::f64::consts::LN_2 - libm::lgamma(half);
    let pdf = |x: f64| libm::exp(log_norm + (half - 1.0) * libm::log(x) - x / 2.0);

    let (mut lo, mut hi) = (0.0, kf.max(1.0));
    while chi2_cdf(kf, hi) < alpha {
        lo = hi;
        hi *= 2.0;
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = chi2_cdf(kf, x) - alpha;
        if f.abs() < 1e-14 {
            break;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let newton = x - f / d;
        x = if d > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    Ok(x)
}

/// Radius of the data-fidelity ball, `σ √(F⁻¹_{χ²(M)}(α))`.
pub fn chi2_epsilon(sigma_n: f64, m: usize, alpha: f64) -> Result<f64> {
    if !(sigma_n >= 0.0) || !sigma_n.is_finite() {
        return Err(Error::InvalidParameter(alloc::format!(
            "noise level must be non-negative, got {sigma_n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if sigma_n == 0.0 || m == 0 {
        return Ok(0.0);
    }
    Ok(sigma_n * libm::sqrt(chi2_inv_cdf(m, alpha)?))
}
