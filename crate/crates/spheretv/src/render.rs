//! Mollweide rendering of sphere images to PNG.

use std::f64::consts::{PI, SQRT_2};
use std::path::Path;

use spheretv_core::SphereImage;

use crate::container::write_atomic;
use crate::error::Result;

pub const WHITE: [u8; 3] = [255, 255, 255];

/// Auxiliary angle `ψ` with `2ψ + sin 2ψ = π sin(lat)`, by Newton iteration.
pub fn auxiliary_angle(lat: f64) -> f64 {
    if (lat.abs() - PI / 2.0).abs() < 1e-12 {
        return lat;
    }
    let target = PI * lat.sin();
    let mut psi = lat;
    for _ in 0..100 {
        let f = 2.0 * psi + (2.0 * psi).sin() - target;
        let df = 2.0 + 2.0 * (2.0 * psi).cos();
        if df.abs() < 1e-300 {
            break;
        }
        let step = f / df;
        psi -= step;
        if step.abs() < 1e-10 {
            break;
        }
    }
    psi
}

/// `(lat, lon)` in radians to Mollweide `(x, y)`, `x ∈ [−2√2, 2√2]`.
pub fn project(lat: f64, lon: f64) -> (f64, f64) {
    let psi = auxiliary_angle(lat);
    (2.0 * SQRT_2 / PI * lon * psi.cos(), SQRT_2 * psi.sin())
}

/// Inverse of [`project`]; `None` outside the ellipse.
pub fn unproject(x: f64, y: f64) -> Option<(f64, f64)> {
    if (x * x) / 8.0 + (y * y) / 2.0 > 1.0 {
        return None;
    }
    let psi = (y / SQRT_2).clamp(-1.0, 1.0).asin();
    let lat = ((2.0 * psi + (2.0 * psi).sin()) / PI)
        .clamp(-1.0, 1.0)
        .asin();
    let c = psi.cos();
    let lon = if c.abs() < 1e-15 {
        0.0
    } else {
        PI * x / (2.0 * SQRT_2 * c)
    };
    if lon.abs() > PI + 1e-12 {
        return None;
    }
    Some((lat, lon))
}

/// Black at `lo`, yellow at `hi`, linear in between and clamped.
pub fn colour(v: f64, lo: f64, hi: f64) -> [u8; 3] {
    let t = if hi > lo {
        ((v - lo) / (hi - lo)).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let c = (255.0 * t).round() as u8;
    [c, c, 0]
}

/// Nearest stored sample to colatitude `theta` and longitude `phi`.
pub fn nearest_sample(image: &SphereImage, theta: f64, phi: f64) -> f64 {
    let grid = image.grid();
    let thetas = grid.thetas();
    let t = thetas
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - theta).abs().total_cmp(&(b.1 - theta).abs()))
        .map(|(t, _)| t)
        .expect("grid has at least one ring");
    let n_phi = grid.n_phi();
    let p = (phi.rem_euclid(2.0 * PI) / (2.0 * PI) * n_phi as f64).round() as usize % n_phi;
    *image.get(t, p)
}

/// RGB raster of `width × width/2` pixels.
pub fn rasterize(image: &SphereImage, width: usize, lo: f64, hi: f64) -> (usize, usize, Vec<u8>) {
    let width = width.max(2);
    let height = width / 2;
    let mut rgb = Vec::with_capacity(width * height * 3);
    for j in 0..height {
        let y = SQRT_2 * (1.0 - 2.0 * (j as f64 + 0.5) / height as f64);
        for i in 0..width {
            let x = 2.0 * SQRT_2 * (2.0 * (i as f64 + 0.5) / width as f64 - 1.0);
            let px = match unproject(x, y) {
                Some((lat, lon)) => colour(nearest_sample(image, PI / 2.0 - lat, lon), lo, hi),
                None => WHITE,
            };
            rgb.extend_from_slice(&px);
        }
    }
    (width, height, rgb)
}

pub fn encode_png(width: usize, height: usize, rgb: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(png::ColorType::Rgb);
        enc.set_depth(png::BitDepth::Eight);
        let mut w = enc.write_header()?;
        w.write_image_data(rgb)?;
    }
    Ok(out)
}

pub fn render_png(image: &SphereImage, path: &Path, width: usize, lo: f64, hi: f64) -> Result<()> {
    let (w, h, rgb) = rasterize(image, width, lo, hi);
    write_atomic(path, &encode_png(w, h, &rgb)?)
}
