//! File formats.
//!
//! * Sinograms: `TOMO1` magic, little-endian u32 geometry tag (0 parallel,
//!   1 fan), u32 counts, f64 parameters, then the row-major f64 payload.
//!   Parallel header: `M N d r`. Fan header: `p q D φ r`.
//! * Images: raw `.img` (u64 rows, u64 cols, row-major f64) and PGM (P2/P5).
//! * Sinogram CSV: one line per offset, one column per angle.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::{FanGeometry, ParallelGeometry};
use crate::projector::{FanSinogram, Grid, Image, Sinogram};

const MAGIC: &[u8; 5] = b"TOMO1";

/// Either kind of projection data.
#[derive(Debug, Clone, PartialEq)]
pub enum SinogramData {
    Parallel(Sinogram),
    Fan(FanSinogram),
}

impl SinogramData {
    pub fn values(&self) -> &[f64] {
        match self {
            Self::Parallel(s) => s.values(),
            Self::Fan(s) => s.values(),
        }
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            Self::Parallel(s) => (s.rows(), s.cols()),
            Self::Fan(s) => (s.rows(), s.cols()),
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::Format(format!("truncated data at byte {}", self.pos)));
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn payload(&mut self, count: usize) -> Result<Vec<f64>> {
        let bytes = count.checked_mul(8).ok_or_else(|| Error::Format("payload size overflows".into()))?;
        let raw = self.take(bytes)?;
        let values = raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        if self.pos != self.bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", self.bytes.len() - self.pos)));
        }
        Ok(values)
    }
}

fn push_payload(out: &mut Vec<u8>, values: &[f64]) {
    out.reserve(values.len() * 8);
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn count_u32(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::Format(format!("{what} = {n} does not fit the header")))
}

pub fn encode_sinogram(data: &SinogramData) -> Result<Vec<u8>> {
    let mut out = MAGIC.to_vec();
    match data {
        SinogramData::Parallel(s) => {
            let g = s.geometry();
            out.extend_from_slice(&0u32.to_le_bytes());
            out.extend_from_slice(&count_u32(g.half_count(), "M")?.to_le_bytes());
            out.extend_from_slice(&count_u32(g.angle_count(), "N")?.to_le_bytes());
            out.extend_from_slice(&g.spacing().to_le_bytes());
            out.extend_from_slice(&g.radius().to_le_bytes());
            push_payload(&mut out, s.values());
        }
        SinogramData::Fan(s) => {
            let g = s.geometry();
            out.extend_from_slice(&1u32.to_le_bytes());
            out.extend_from_slice(&count_u32(g.source_count(), "p")?.to_le_bytes());
            out.extend_from_slice(&count_u32(g.half_rays(), "q")?.to_le_bytes());
            out.extend_from_slice(&g.source_radius().to_le_bytes());
            out.extend_from_slice(&g.opening().to_le_bytes());
            out.extend_from_slice(&g.radius().to_le_bytes());
            push_payload(&mut out, s.values());
        }
    }
    Ok(out)
}

pub fn decode_sinogram(bytes: &[u8]) -> Result<SinogramData> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(5).map_err(|_| Error::Format("missing TOMO1 header".into()))? != MAGIC {
        return Err(Error::Format("bad magic, expected TOMO1".into()));
    }
    match r.u32()? {
        0 => {
            let m = r.u32()? as usize;
            let n = r.u32()? as usize;
            let d = r.f64()?;
            let radius = r.f64()?;
            let g = ParallelGeometry::new(d, m, n, radius)?;
            let values = r.payload(g.offset_count() * n)?;
            Ok(SinogramData::Parallel(Sinogram::from_values(g, values)?))
        }
        1 => {
            let p = r.u32()? as usize;
            let q = r.u32()? as usize;
            let big_d = r.f64()?;
            let opening = r.f64()?;
            let radius = r.f64()?;
            let g = FanGeometry::new(big_d, opening, p, q, radius)?;
            let values = r.payload(g.ray_count() * p)?;
            Ok(SinogramData::Fan(FanSinogram::from_values(g, values)?))
        }
        tag => Err(Error::Format(format!("unknown geometry tag {tag}"))),
    }
}

pub fn write_sinogram(path: &Path, data: &SinogramData) -> Result<()> {
    fs::write(path, encode_sinogram(data)?)?;
    Ok(())
}

pub fn read_sinogram(path: &Path) -> Result<SinogramData> {
    decode_sinogram(&fs::read(path)?)
}

/// CSV text of a `rows × cols` row-major matrix: a comment header, then one
/// line per offset index with one value per angle index.
pub fn sinogram_csv(data: &SinogramData) -> String {
    let (rows, cols) = data.shape();
    let values = data.values();
    let mut out = String::from("# rows: t-index, columns: angle-index, entries: value\n");
    for r in 0..rows {
        for c in 0..cols {
            if c > 0 {
                out.push(',');
            }
            write!(out, "{:e}", values[r * cols + c]).unwrap();
        }
        out.push('\n');
    }
    out
}

/// Raw image bytes: u64 rows, u64 cols, then row-major f64 values.
pub fn encode_image(image: &Image) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + 8 * image.values().len());
    out.extend_from_slice(&(image.rows() as u64).to_le_bytes());
    out.extend_from_slice(&(image.cols() as u64).to_le_bytes());
    push_payload(&mut out, image.values());
    out
}

/// Inverse of [`encode_image`]; the header carries no extent, so it is given.
pub fn decode_image(bytes: &[u8], extent: f64) -> Result<Image> {
    let mut r = Reader { bytes, pos: 0 };
    let rows = usize::try_from(r.u64()?).map_err(|_| Error::Format("row count too large".into()))?;
    let cols = usize::try_from(r.u64()?).map_err(|_| Error::Format("column count too large".into()))?;
    let count = rows.checked_mul(cols).ok_or_else(|| Error::Format("image size overflows".into()))?;
    let values = r.payload(count)?;
    Image::from_values(Grid { rows, cols, extent }, values)
}

pub fn write_image(path: &Path, image: &Image) -> Result<()> {
    fs::write(path, encode_image(image))?;
    Ok(())
}

pub fn read_image(path: &Path, extent: f64) -> Result<Image> {
    decode_image(&fs::read(path)?, extent)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmEncoding {
    /// `P2`
    Ascii,
    /// `P5`
    Binary,
}

/// 8-bit PGM. Values are mapped linearly from `window` (default: the image
/// min and max) to 0..=255 and clamped; a flat window maps to 0.
pub fn encode_pgm(image: &Image, encoding: PgmEncoding, window: Option<(f64, f64)>) -> Vec<u8> {
    let (lo, hi) = window.unwrap_or_else(|| {
        image.values().iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    });
    let gray = |v: f64| -> u8 {
        if hi > lo {
            ((v - lo) / (hi - lo) * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    };
    let (rows, cols) = (image.rows(), image.cols());
    match encoding {
        PgmEncoding::Binary => {
            let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
            out.extend(image.values().iter().map(|&v| gray(v)));
            out
        }
        PgmEncoding::Ascii => {
            let mut out = format!("P2\n{cols} {rows}\n255\n");
            for r in 0..rows {
                let line: Vec<String> = (0..cols).map(|c| gray(image.get(r, c)).to_string()).collect();
                out.push_str(&line.join(" "));
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

pub fn write_pgm(path: &Path, image: &Image, encoding: PgmEncoding, window: Option<(f64, f64)>) -> Result<()> {
    fs::write(path, encode_pgm(image, encoding, window))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn parallel() -> Sinogram {
        let g = ParallelGeometry::new(0.5, 1, 2, 0.5).unwrap();
        Sinogram::from_values(g, vec![1.0, -2.5, 3.25, f64::MIN_POSITIVE, 1e300, 0.1]).unwrap()
    }

    #[test]
    fn parallel_round_trip() {
        let data = SinogramData::Parallel(parallel());
        let back = decode_sinogram(&encode_sinogram(&data).unwrap()).unwrap();
        assert_eq!(back, data);
    }

    #[test]
    fn fan_round_trip() {
        let g = FanGeometry::new(3.0, PI / 3.0, 4, 2, 1.0).unwrap();
        let values: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let data = SinogramData::Fan(FanSinogram::from_values(g, values).unwrap());
        let bytes = encode_sinogram(&data).unwrap();
        let back = decode_sinogram(&bytes).unwrap();
        assert_eq!(encode_sinogram(&back).unwrap(), bytes);
    }

    #[test]
    fn malformed_inputs() {
        let bytes = encode_sinogram(&SinogramData::Parallel(parallel())).unwrap();
        assert!(matches!(decode_sinogram(&bytes[..bytes.len() - 3]), Err(Error::Format(_))));
        assert!(matches!(decode_sinogram(b"TOMO2xxxx"), Err(Error::Format(_))));
        assert!(decode_sinogram(b"TO").is_err());
        let mut tagged = bytes.clone();
        tagged[5] = 7;
        assert!(matches!(decode_sinogram(&tagged), Err(Error::Format(_))));
        let mut long = bytes;
        long.push(0);
        assert!(decode_sinogram(&long).is_err());
    }

    #[test]
    fn csv_shape() {
        let csv = sinogram_csv(&SinogramData::Parallel(parallel()));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[0].starts_with('#'));
        assert!(lines[1..].iter().all(|l| l.split(',').count() == 2));
        assert_eq!(lines[1].split(',').next().unwrap().parse::<f64>().unwrap(), 1.0);
    }

    #[test]
    fn image_round_trip() {
        let img = Image::from_fn(Grid::square(5, 2.0), |x, y| x * 3.0 - y);
        let back = decode_image(&encode_image(&img), 2.0).unwrap();
        assert_eq!(back, img);
        assert!(decode_image(&encode_image(&img)[..40], 2.0).is_err());
    }

    #[test]
    fn pgm_levels() {
        let flat = Image::from_fn(Grid::square(3, 1.0), |_, _| 4.0);
        let p5 = encode_pgm(&flat, PgmEncoding::Binary, None);
        assert!(p5.starts_with(b"P5\n3 3\n255\n"));
        let body = &p5[p5.len() - 9..];
        assert!(body.iter().all(|&b| b == body[0]));
        let p2 = String::from_utf8(encode_pgm(&flat, PgmEncoding::Ascii, Some((0.0, 8.0)))).unwrap();
        assert!(p2.lines().skip(3).all(|l| l == "128 128 128"));

        let ramp = Image::from_values(Grid { rows: 1, cols: 3, extent: 1.0 }, vec![-1.0, 0.0, 1.0]).unwrap();
        let p2 = String::from_utf8(encode_pgm(&ramp, PgmEncoding::Ascii, None)).unwrap();
        assert_eq!(p2.lines().nth(3).unwrap(), "0 128 255");
    }
}
