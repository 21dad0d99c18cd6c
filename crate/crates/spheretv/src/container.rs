//! The `SPH1` signal container.
//!
//! Layout: the four bytes `SPH1`, a little-endian `u32` header length, a
//! UTF-8 JSON header, then `payload_len` little-endian `f64` values.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use spheretv_core::{
    Complex64, HalfCoeffs, HarmonicCoeffs, SamplingScheme, SphereGrid, SphereImage,
};

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SPH1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Image,
    Coeffs,
    HalfCoeffs,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Image => "image",
            Kind::Coeffs => "coeffs",
            Kind::HalfCoeffs => "half-coeffs",
        }
    }

    /// Number of `f64` values in the payload.
    pub fn payload_len(self, scheme: SamplingScheme, bandlimit: usize) -> usize {
        match self {
            Kind::Image => scheme.n_theta(bandlimit) * scheme.n_phi(bandlimit),
            Kind::Coeffs => 2 * bandlimit * bandlimit,
            Kind::HalfCoeffs => 2 * HalfCoeffs::len_for(bandlimit),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub scheme: SamplingScheme,
    #[serde(rename = "L")]
    pub bandlimit: usize,
    pub kind: Kind,
    pub payload_len: usize,
    pub endianness: String,
    pub dtype: String,
}

/// A decoded container: header plus raw payload.
#[derive(Debug, Clone, PartialEq)]
pub struct Container {
    pub header: Header,
    pub payload: Vec<f64>,
}

fn interleave(values: &[Complex64]) -> Vec<f64> {
    values.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn deinterleave(values: &[f64]) -> Vec<Complex64> {
    values
        .chunks_exact(2)
        .map(|p| Complex64::new(p[0], p[1]))
        .collect()
}

impl Container {
    pub fn new(
        scheme: SamplingScheme,
        bandlimit: usize,
        kind: Kind,
        payload: Vec<f64>,
    ) -> Result<Self> {
        if bandlimit == 0 {
            return Err(Error::Malformed("band-limit must be positive".into()));
        }
        let expected = kind.payload_len(scheme, bandlimit);
        if payload.len() != expected {
            return Err(Error::Malformed(format!(
                "{} at L={bandlimit} needs {expected} values, found {}",
                kind.name(),
                payload.len()
            )));
        }
        let header = Header {
            scheme,
            bandlimit,
            kind,
            payload_len: payload.len(),
            endianness: "little".into(),
            dtype: "f64".into(),
        };
        Ok(Self { header, payload })
    }

    pub fn from_image(image: &SphereImage) -> Self {
        Self::new(
            image.scheme(),
            image.bandlimit(),
            Kind::Image,
            image.samples().to_vec(),
        )
        .expect("image length matches its grid")
    }

    pub fn from_coeffs(scheme: SamplingScheme, coeffs: &HarmonicCoeffs) -> Self {
        Self::new(
            scheme,
            coeffs.bandlimit(),
            Kind::Coeffs,
            interleave(coeffs.values()),
        )
        .expect("coefficient length matches band-limit")
    }

    pub fn from_half(scheme: SamplingScheme, half: &HalfCoeffs) -> Self {
        Self::new(
            scheme,
            half.bandlimit(),
            Kind::HalfCoeffs,
            interleave(half.values()),
        )
        .expect("coefficient length matches band-limit")
    }

    pub fn kind(&self) -> Kind {
        self.header.kind
    }

    fn expect_kind(&self, kind: Kind) -> Result<()> {
        if self.header.kind != kind {
            return Err(Error::KindMismatch {
                expected: kind.name().into(),
                found: self.header.kind.name().into(),
            });
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<SphereGrid> {
        Ok(SphereGrid::new(self.header.scheme, self.header.bandlimit)?)
    }

    pub fn to_image(&self) -> Result<SphereImage> {
        self.expect_kind(Kind::Image)?;
        Ok(SphereImage::from_samples(
            &self.grid()?,
            self.payload.clone(),
        )?)
    }

    pub fn to_coeffs(&self) -> Result<HarmonicCoeffs> {
        self.expect_kind(Kind::Coeffs)?;
        Ok(HarmonicCoeffs::from_values(
            self.header.bandlimit,
            deinterleave(&self.payload),
        )?)
    }

    pub fn to_half(&self) -> Result<HalfCoeffs> {
        self.expect_kind(Kind::HalfCoeffs)?;
        Ok(HalfCoeffs::from_values(
            self.header.bandlimit,
            deinterleave(&self.payload),
        )?)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let header = serde_json::to_vec(&self.header).expect("header serializes");
        let mut out = Vec::with_capacity(8 + header.len() + 8 * self.payload.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&(header.len() as u32).to_le_bytes());
        out.extend_from_slice(&header);
        for v in &self.payload {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 8 || &bytes[..4] != MAGIC {
            return Err(Error::Malformed("missing SPH1 magic".into()));
        }
        let header_len = u32::from_le_bytes(bytes[4..8].try_into().expect("four bytes")) as usize;
        let body = &bytes[8..];
        if body.len() < header_len {
            return Err(Error::Malformed("truncated header".into()));
        }
        let header: Header = serde_json::from_slice(&body[..header_len])
            .map_err(|e| Error::Malformed(format!("header: {e}")))?;
        if header.endianness != "little" || header.dtype != "f64" {
            return Err(Error::Malformed(format!(
                "unsupported encoding {} {}",
                header.endianness, header.dtype
            )));
        }
        let data = &body[header_len..];
        if data.len() != 8 * header.payload_len {
            return Err(Error::Malformed(format!(
                "header declares {} values, payload has {} bytes",
                header.payload_len,
                data.len()
            )));
        }
        let payload = data
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes")))
            .collect();
        let c = Self::new(header.scheme, header.bandlimit, header.kind, payload)?;
        if c.header != header {
            return Err(Error::Malformed("inconsistent header".into()));
        }
        Ok(c)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_bytes())
    }
}

/// Writes to a sibling temporary file, then renames over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}
