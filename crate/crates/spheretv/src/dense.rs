//! Dense matrices of transform operators, for small-L checks.

use spheretv_core::{Complex64, HarmonicCoeffs, HarmonicTransform, SphereImage};

use crate::error::Result;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    /// `max |self − otherᴴ|`.
    pub fn adjoint_gap(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.cols, other.rows));
        let mut gap = 0.0f64;
        for r in 0..self.rows {
            for c in 0..self.cols {
                gap = gap.max((self.get(r, c) - other.get(c, r).conj()).norm());
            }
        }
        gap
    }

    fn from_columns(rows: usize, columns: Vec<Vec<Complex64>>) -> Self {
        let cols = columns.len();
        let mut data = vec![Complex64::new(0.0, 0.0); rows * cols];
        for (c, col) in columns.iter().enumerate() {
            for (r, v) in col.iter().enumerate() {
                data[r * cols + c] = *v;
            }
        }
        Self { rows, cols, data }
    }
}

fn coeff_basis(bandlimit: usize, i: usize) -> HarmonicCoeffs {
    let mut c = HarmonicCoeffs::zeros(bandlimit);
    c.values_mut()[i] = Complex64::new(1.0, 0.0);
    c
}

fn image_basis(t: &dyn HarmonicTransform, i: usize) -> Result<SphereImage<Complex64>> {
    let mut img = SphereImage::<Complex64>::zeros(t.grid());
    img.samples_mut()[i] = Complex64::new(1.0, 0.0);
    Ok(img)
}

/// Columns are images of the unit coefficient vectors.
pub fn densify_synthesis(
    t: &dyn HarmonicTransform,
    op: impl Fn(&HarmonicCoeffs) -> spheretv_core::Result<SphereImage<Complex64>>,
) -> Result<DenseMatrix> {
    let l = t.bandlimit();
    let cols = (0..l * l)
        .map(|i| Ok(op(&coeff_basis(l, i))?.into_samples()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseMatrix::from_columns(t.grid().n_samples(), cols))
}

/// Columns are coefficients of the unit sample images.
pub fn densify_analysis(
    t: &dyn HarmonicTransform,
    op: impl Fn(&SphereImage<Complex64>) -> spheretv_core::Result<HarmonicCoeffs>,
) -> Result<DenseMatrix> {
    let l = t.bandlimit();
    let cols = (0..t.grid().n_samples())
        .map(|i| Ok(op(&image_basis(t, i)?)?.into_values()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DenseMatrix::from_columns(l * l, cols))
}
