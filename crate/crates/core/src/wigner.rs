//! Wigner small-d matrices at β = π/2.
//!
//! For each degree `l` the table stores `Δ^l_{m'm} = d^l_{m'm}(π/2)` for
//! `m' ≥ 0` and all `m`; rows with `m' < 0` follow from
//! `Δ^l_{m'm} = (-1)^{m'-m} Δ^l_{-m',-m}`.
//!
//! Each degree is seeded from the previous one along the `m = l` column and
//! completed with the three-term recursion in `m`, which at π/2 reads
//!
//! ```text
//! √((l+m)(l-m+1)) Δ_{m',m-1} = -2m' Δ_{m'm} - √((l-m)(l+m+1)) Δ_{m',m+1}
//! ```
//!
//! The recursion only runs over the stable octant `0 ≤ m' ≤ m ≤ l`; the rest
//! is filled from `Δ_{m'm} = (-1)^{m'-m} Δ_{mm'}` and
//! `Δ_{m',-m} = (-1)^{l+m'} Δ_{m'm}`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct DeltaTable {
    bandlimit: usize,
    offsets: Vec<usize>,
    values: Vec<f64>,
}

#[inline]
fn sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

impl DeltaTable {
    pub fn new(bandlimit: usize) -> Result<Self> {
        if bandlimit == 0 {
            return Err(Error::ZeroBandlimit);
        }
        let mut offsets = Vec::with_capacity(bandlimit + 1);
        let mut total = 0;
        for l in 0..bandlimit {
            offsets.push(total);
            total += (l + 1) * (2 * l + 1);
        }
        offsets.push(total);
        let mut table = Self {
            bandlimit,
            offsets,
            values: vec![0.0; total],
        };
        table.values[0] = 1.0;
        for l in 1..bandlimit {
            table.fill_degree(l);
        }
        Ok(table)
    }

    pub fn bandlimit(&self) -> usize {
        self.bandlimit
    }

    #[inline]
    fn slot(&self, l: usize, mp: usize, m: i64) -> usize {
        self.offsets[l] + mp * (2 * l + 1) + (m + l as i64) as usize
    }

    /// Row `m' ≥ 0` of degree `l`, indexed by `m + l`.
    #[inline]
    pub fn row(&self, l: usize, mp: usize) -> &[f64] {
        let start = self.slot(l, mp, -(l as i64));
        &self.values[start..start + 2 * l + 1]
    }

    /// `Δ^l_{m'm}` for any `|m'|, |m| ≤ l`.
    pub fn get(&self, l: usize, mp: i64, m: i64) -> f64 {
        let li = l as i64;
        assert!(
            l < self.bandlimit && mp.abs() <= li && m.abs() <= li,
            "index out of range"
        );
        if mp >= 0 {
            self.values[self.slot(l, mp as usize, m)]
        } else {
            sign(mp - m) * self.values[self.slot(l, (-mp) as usize, -m)]
        }
    }

    fn fill_degree(&mut self, l: usize) {
        let li = l as i64;
        let lf = l as f64;
        // Edge column m = l from degree l-1.
        let prev_edge = |table: &Self, mp: usize| table.values[table.slot(l - 1, mp, li - 1)];
        let zero = libm::sqrt((2.0 * lf - 1.0) / (2.0 * lf)) * prev_edge(self, 0);
        let s = self.slot(l, 0, li);
        self.values[s] = zero;
        for mp in 1..=l {
            let mpf = mp as f64;
            let c = libm::sqrt(lf * (2.0 * lf - 1.0) / (2.0 * (lf + mpf) * (lf + mpf - 1.0)));
            let v = c * prev_edge(self, mp - 1);
            let s = self.slot(l, mp, li);
            self.values[s] = v;
        }

        // Recurse downwards in m over the octant m' <= m <= l.
        for mp in 0..=l {
            let two_mp = 2.0 * mp as f64;
            let mut m = li;
            while m > mp as i64 {
                let mf = m as f64;
                let cur = self.values[self.slot(l, mp, m)];
                let next = if m < li {
                    self.values[self.slot(l, mp, m + 1)]
                } else {
                    0.0
                };
                let a = libm::sqrt((lf + mf) * (lf - mf + 1.0));
                let b = libm::sqrt((lf - mf) * (lf + mf + 1.0));
                let v = (-two_mp * cur - b * next) / a;
                let s = self.slot(l, mp, m - 1);
                self.values[s] = v;
                m -= 1;
            }
        }

        // Lower part of the m >= 0 block via transposition.
        for mp in 1..=l {
            for m in 0..mp {
                let v = sign(mp as i64 - m as i64) * self.values[self.slot(l, m, mp as i64)];
                let s = self.slot(l, mp, m as i64);
                self.values[s] = v;
            }
        }

        // Negative m.
        for mp in 0..=l {
            let parity = sign(li + mp as i64);
            for m in 1..=li {
                let v = parity * self.values[self.slot(l, mp, m)];
                let s = self.slot(l, mp, -m);
                self.values[s] = v;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_and_one() {
        let d = DeltaTable::new(2).unwrap();
        assert_eq!(d.get(0, 0, 0), 1.0);
        let r2 = core::f64::consts::FRAC_1_SQRT_2;
        assert!(d.get(1, 0, 0).abs() < 1e-15);
        assert!((d.get(1, 1, 1) - 0.5).abs() < 1e-15);
        assert!((d.get(1, 1, 0) + r2).abs() < 1e-15);
        assert!((d.get(1, 1, -1) - 0.5).abs() < 1e-15);
        assert!((d.get(1, -1, 0) - r2).abs() < 1e-15);
    }

    #[test]
    fn zero_bandlimit_rejected() {
        assert!(matches!(DeltaTable::new(0), Err(Error::ZeroBandlimit)));
    }

    #[test]
    fn rows_are_orthonormal() {
        let bandlimit = 128;
        let d = DeltaTable::new(bandlimit).unwrap();
        let mut worst: f64 = 0.0;
        for l in (0..bandlimit).step_by(9).chain([bandlimit - 1]) {
            let li = l as i64;
            for a in -li..=li {
                for b in a..=li {
                    let dot: f64 = (-li..=li).map(|mp| d.get(l, mp, a) * d.get(l, mp, b)).sum();
                    let expect = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((dot - expect).abs());
                }
            }
        }
        assert!(worst < 1e-10, "orthonormality residual {worst:e}");
    }

    #[test]
    fn symmetries_hold() {
        let d = DeltaTable::new(12).unwrap();
        for l in 0..12usize {
            let li = l as i64;
            for mp in -li..=li {
                for m in -li..=li {
                    let v = d.get(l, mp, m);
                    assert!((v - sign(mp - m) * d.get(l, m, mp)).abs() < 1e-14);
                    assert!((v - sign(mp - m) * d.get(l, -mp, -m)).abs() < 1e-14);
                }
            }
        }
    }
}
