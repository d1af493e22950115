//! Bit-exact file I/O and visual renderings.
//!
//! Label maps travel as binary 16-bit PGM (P5, maxval 65535, big-endian
//! samples per the portable-graymap convention). Direction fields use the
//! "BPDF" container: magic `BPD1`, little-endian u32 width and height, then
//! row-major little-endian f32 pairs `(d_row, d_col)`. Visualizations are
//! written as binary 8-bit PPM (P6).

use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{DirectionField, LabelMap};

/// 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: u32,
    pub height: u32,
    /// `3 * width * height` bytes.
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn blank(width: u32, height: u32, fill: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(3 * (width as usize) * (height as usize));
        for _ in 0..(width as usize) * (height as usize) {
            data.extend_from_slice(&fill);
        }
        Self { width, height, data }
    }

    #[inline]
    pub fn pixel(&self, row: u32, col: u32) -> [u8; 3] {
        let i = 3 * (row as usize * self.width as usize + col as usize);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    fn set(&mut self, row: u32, col: u32, color: [u8; 3]) {
        let i = 3 * (row as usize * self.width as usize + col as usize);
        self.data[i..i + 3].copy_from_slice(&color);
    }
}

// --- PGM (P5, 16-bit) ------------------------------------------------------

/// Skip whitespace and `#` comments, then read one ASCII integer token.
fn next_pnm_int(data: &[u8], pos: &mut usize) -> Result<u64> {
    loop {
        while *pos < data.len() && data[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < data.len() && data[*pos] == b'#' {
            while *pos < data.len() && data[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < data.len() && data[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::Format("expected integer in PNM header".into()));
    }
    std::str::from_utf8(&data[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::Format("malformed integer in PNM header".into()))
}

/// Encode a label map as binary 16-bit PGM. Labels above 65535 are rejected.
pub fn encode_labels(map: &LabelMap) -> Result<Vec<u8>> {
    if let Some(&l) = map.labels.iter().find(|&&l| l > u16::MAX as u32) {
        return Err(Error::Format(format!(
            "label {l} exceeds the 16-bit PGM range"
        )));
    }
    let mut out = format!("P5\n{} {}\n65535\n", map.width, map.height).into_bytes();
    out.reserve(map.labels.len() * 2);
    for &l in &map.labels {
        out.extend_from_slice(&(l as u16).to_be_bytes());
    }
    Ok(out)
}

pub fn decode_labels(data: &[u8]) -> Result<LabelMap> {
    if data.len() < 2 || &data[..2] != b"P5" {
        return Err(Error::Format("not a binary PGM (missing P5 magic)".into()));
    }
    let mut pos = 2;
    let width = next_pnm_int(data, &mut pos)?;
    let height = next_pnm_int(data, &mut pos)?;
    let maxval = next_pnm_int(data, &mut pos)?;
    if maxval != 65535 {
        return Err(Error::Format(format!(
            "unsupported PGM maxval {maxval}, expected 65535"
        )));
    }
    if width == 0 || height == 0 || width > u32::MAX as u64 || height > u32::MAX as u64 {
        return Err(Error::Format(format!("bad PGM dimensions {width}x{height}")));
    }
    // Exactly one whitespace byte separates the header from the payload.
    if pos >= data.len() || !data[pos].is_ascii_whitespace() {
        return Err(Error::Format("missing separator after PGM maxval".into()));
    }
    pos += 1;
    let expected = width.checked_mul(height).and_then(|n| n.checked_mul(2));
    let payload = &data[pos..];
    if expected != Some(payload.len() as u64) {
        return Err(Error::Format(format!(
            "truncated PGM payload: have {} bytes, need {} for {}x{}",
            payload.len(),
            expected.unwrap_or(u64::MAX),
            width,
            height
        )));
    }
    let labels = payload
        .chunks_exact(2)
        .map(|b| u16::from_be_bytes([b[0], b[1]]) as u32)
        .collect();
    LabelMap::new(width as u32, height as u32, labels)
}

pub fn write_labels(map: &LabelMap, path: &Path) -> Result<()> {
    std::fs::write(path, encode_labels(map)?)?;
    Ok(())
}

pub fn read_labels(path: &Path) -> Result<LabelMap> {
    decode_labels(&std::fs::read(path)?)
}

// --- BPDF (direction fields) ------------------------------------------------

const FIELD_MAGIC: &[u8; 4] = b"BPD1";

pub fn encode_field(field: &DirectionField) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + field.vectors.len() * 8);
    out.extend_from_slice(FIELD_MAGIC);
    out.extend_from_slice(&field.width.to_le_bytes());
    out.extend_from_slice(&field.height.to_le_bytes());
    for v in &field.vectors {
        out.extend_from_slice(&v[0].to_le_bytes());
        out.extend_from_slice(&v[1].to_le_bytes());
    }
    out
}

pub fn decode_field(data: &[u8]) -> Result<DirectionField> {
    if data.len() < 12 {
        return Err(Error::Format("field file shorter than its header".into()));
    }
    if &data[..4] != FIELD_MAGIC {
        if &data[..3] == b"BPD" {
            return Err(Error::Format(format!(
                "unsupported version {:?}, expected BPD1",
                String::from_utf8_lossy(&data[..4])
            )));
        }
        return Err(Error::Format("bad magic, not a BPDF field file".into()));
    }
    let width = u32::from_le_bytes(data[4..8].try_into().unwrap());
    let height = u32::from_le_bytes(data[8..12].try_into().unwrap());
    if width == 0 || height == 0 {
        return Err(Error::Format(format!("bad field dimensions {width}x{height}")));
    }
    let expected = (width as u64).checked_mul(height as u64).and_then(|n| n.checked_mul(8));
    let payload = &data[12..];
    if expected != Some(payload.len() as u64) {
        return Err(Error::Format(format!(
            "truncated field payload: have {} bytes, need {} for {}x{}",
            payload.len(),
            expected.unwrap_or(u64::MAX),
            width,
            height
        )));
    }
    let vectors: Vec<[f32; 2]> = payload
        .chunks_exact(8)
        .map(|b| {
            [
                f32::from_le_bytes(b[0..4].try_into().unwrap()),
                f32::from_le_bytes(b[4..8].try_into().unwrap()),
            ]
        })
        .collect();
    // DirectionField::new re-validates unit norms (1e-3 on the squared norm
    // scale), which is what rejects corrupt or non-unit payloads.
    DirectionField::new(width, height, vectors)
}

pub fn write_field(field: &DirectionField, path: &Path) -> Result<()> {
    std::fs::write(path, encode_field(field))?;
    Ok(())
}

pub fn read_field(path: &Path) -> Result<DirectionField> {
    decode_field(&std::fs::read(path)?)
}

// --- PPM (P6) ----------------------------------------------------------------

pub fn encode_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn write_ppm(img: &RgbImage, path: &Path) -> Result<()> {
    std::fs::write(path, encode_ppm(img))?;
    Ok(())
}

// --- Visualizations -----------------------------------------------------------

fn hue_to_rgb(hue_deg: f64) -> [u8; 3] {
    let x = 1.0 - ((hue_deg / 60.0) % 2.0 - 1.0).abs();
    let (r, g, b) = match (hue_deg / 60.0) as u32 % 6 {
        0 => (1.0, x, 0.0),
        1 => (x, 1.0, 0.0),
        2 => (0.0, 1.0, x),
        3 => (0.0, x, 1.0),
        4 => (x, 0.0, 1.0),
        _ => (1.0, 0.0, x),
    };
    [
        (r * 255.0).round() as u8,
        (g * 255.0).round() as u8,
        (b * 255.0).round() as u8,
    ]
}

/// Color-code a direction field: hue is the vector angle
/// `atan2(d_row, d_col)` mapped onto `[0, 360)` degrees at full saturation
/// and value, so due east is red and opposite directions get complementary
/// hues.
pub fn viz_field(field: &DirectionField) -> RgbImage {
    let mut data = Vec::with_capacity(field.vectors.len() * 3);
    for v in &field.vectors {
        let mut deg = (v[0] as f64).atan2(v[1] as f64).to_degrees();
        if deg < 0.0 {
            deg += 360.0;
        }
        if deg >= 360.0 {
            deg -= 360.0;
        }
        data.extend_from_slice(&hue_to_rgb(deg));
    }
    RgbImage { width: field.width, height: field.height, data }
}

/// Paint every pixel that has a 4-neighbor with a different label. With no
/// base image the boundaries are drawn on a white canvas.
pub fn viz_boundaries(
    base: Option<&RgbImage>,
    labels: &LabelMap,
    color: [u8; 3],
) -> Result<RgbImage> {
    let mut img = match base {
        Some(b) => {
            if b.width != labels.width || b.height != labels.height {
                return Err(Error::DimensionMismatch(
                    b.width,
                    b.height,
                    labels.width,
                    labels.height,
                ));
            }
            b.clone()
        }
        None => RgbImage::blank(labels.width, labels.height, [255, 255, 255]),
    };
    let (w, h) = (labels.width, labels.height);
    for r in 0..h {
        for c in 0..w {
            let l = labels.label(r, c);
            let boundary = (r > 0 && labels.label(r - 1, c) != l)
                || (r + 1 < h && labels.label(r + 1, c) != l)
                || (c > 0 && labels.label(r, c - 1) != l)
                || (c + 1 < w && labels.label(r, c + 1) != l);
            if boundary {
                img.set(r, c, color);
            }
        }
    }
    Ok(img)
}
