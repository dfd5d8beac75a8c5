//! Rectangular rasters of per-pixel dynamical data and their binary encoding.
//!
//! Pixel `(i, j)` samples `re_min + (i + 0.5) dx + i (im_min + (j + 0.5) dy)`,
//! so row 0 is the bottom edge of the region.
//!
//! Binary layout (all little-endian): magic `MCMG`, `u32` version, `u32`
//! width, `u32` height, four `f64` bounds `re_min re_max im_min im_max`,
//! `u8` payload kind, then `width * height` `i32` values row by row.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::dynamics::MapParams;

pub const MAGIC: &[u8; 4] = b"MCMG";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 4 * 8 + 1;
/// Largest pixel count accepted before any allocation.
pub const MAX_PIXELS: usize = 1 << 26;
/// Payload value for bounded orbits and undefined pixels.
pub const BOUNDED: i32 = -1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("grid dimensions must be at least 1x1 (got {width}x{height})")]
    EmptyGrid { width: usize, height: usize },
    #[error("grid of {pixels} pixels exceeds the memory budget of {limit}")]
    TooLarge { pixels: usize, limit: usize },
    #[error("bounds must be finite with re_min < re_max and im_min < im_max")]
    DegenerateBounds,
    #[error("payload length {got} does not match {expected}")]
    PayloadLength { expected: usize, got: usize },
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),
    #[error("unknown payload kind {0}")]
    UnknownPayloadKind(u8),
    #[error("truncated grid data: need {needed} bytes, have {available}")]
    Truncated { needed: usize, available: usize },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Bounds {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self, GridError> {
        let b = Bounds { re_min, re_max, im_min, im_max };
        b.validate()?;
        Ok(b)
    }

    /// Square `[-h, h]^2` around `center`.
    pub fn centered(center: Complex64, half: f64) -> Result<Self, GridError> {
        Bounds::new(center.re - half, center.re + half, center.im - half, center.im + half)
    }

    pub fn validate(&self) -> Result<(), GridError> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if finite && self.re_min < self.re_max && self.im_min < self.im_max {
            Ok(())
        } else {
            Err(GridError::DegenerateBounds)
        }
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn pixel_center(&self, i: usize, j: usize, width: usize, height: usize) -> Complex64 {
        let dx = self.width() / width as f64;
        let dy = self.height() / height as f64;
        Complex64::new(self.re_min + (i as f64 + 0.5) * dx, self.im_min + (j as f64 + 0.5) * dy)
    }

    /// Continuous pixel coordinates of `z`: pixel centers sit at half-integers.
    pub fn to_pixel(&self, z: Complex64, width: usize, height: usize) -> (f64, f64) {
        (
            (z.re - self.re_min) / self.width() * width as f64,
            (z.im - self.im_min) / self.height() * height as f64,
        )
    }

    /// Inverse of [`Bounds::to_pixel`].
    pub fn from_pixel(&self, x: f64, y: f64, width: usize, height: usize) -> Complex64 {
        Complex64::new(
            self.re_min + x / width as f64 * self.width(),
            self.im_min + y / height as f64 * self.height(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PayloadKind {
    EscapeDepth = 0,
    VerdictCode = 1,
}

impl PayloadKind {
    pub fn from_byte(b: u8) -> Result<Self, GridError> {
        match b {
            0 => Ok(PayloadKind::EscapeDepth),
            1 => Ok(PayloadKind::VerdictCode),
            other => Err(GridError::UnknownPayloadKind(other)),
        }
    }
}

/// Checks dimensions against [`MAX_PIXELS`] and returns the pixel count.
pub fn check_dimensions(width: usize, height: usize) -> Result<usize, GridError> {
    if width == 0 || height == 0 {
        return Err(GridError::EmptyGrid { width, height });
    }
    match width.checked_mul(height) {
        Some(n) if n <= MAX_PIXELS && width <= u32::MAX as usize && height <= u32::MAX as usize => Ok(n),
        Some(n) => Err(GridError::TooLarge { pixels: n, limit: MAX_PIXELS }),
        None => Err(GridError::TooLarge { pixels: usize::MAX, limit: MAX_PIXELS }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    width: usize,
    height: usize,
    bounds: Bounds,
    kind: PayloadKind,
    data: Vec<i32>,
}

impl FieldGrid {
    pub fn new(width: usize, height: usize, bounds: Bounds, kind: PayloadKind, data: Vec<i32>) -> Result<Self, GridError> {
        let n = check_dimensions(width, height)?;
        bounds.validate()?;
        if data.len() != n {
            return Err(GridError::PayloadLength { expected: n, got: data.len() });
        }
        Ok(FieldGrid { width, height, bounds, kind, data })
    }

    pub fn zeroed(width: usize, height: usize, bounds: Bounds, kind: PayloadKind) -> Result<Self, GridError> {
        let n = check_dimensions(width, height)?;
        bounds.validate()?;
        Ok(FieldGrid { width, height, bounds, kind, data: vec![0; n] })
    }

    /// Serial fill from a per-pixel function of the pixel center.
    pub fn from_fn(
        width: usize,
        height: usize,
        bounds: Bounds,
        kind: PayloadKind,
        f: impl Fn(Complex64) -> i32,
    ) -> Result<Self, GridError> {
        let mut g = FieldGrid::zeroed(width, height, bounds, kind)?;
        for j in 0..height {
            for i in 0..width {
                g.data[j * width + i] = f(bounds.pixel_center(i, j, width, height));
            }
        }
        Ok(g)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bounds(&self) -> Bounds {
        self.bounds
    }

    pub fn kind(&self) -> PayloadKind {
        self.kind
    }

    pub fn data(&self) -> &[i32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [i32] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<i32> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize) -> i32 {
        self.data[j * self.width + i]
    }

    pub fn row(&self, j: usize) -> &[i32] {
        &self.data[j * self.width..(j + 1) * self.width]
    }

    pub fn row_mut(&mut self, j: usize) -> &mut [i32] {
        &mut self.data[j * self.width..(j + 1) * self.width]
    }

    pub fn pixel_center(&self, i: usize, j: usize) -> Complex64 {
        self.bounds.pixel_center(i, j, self.width, self.height)
    }

    /// Physical size of one pixel `(dx, dy)`.
    pub fn pixel_size(&self) -> (f64, f64) {
        (self.bounds.width() / self.width as f64, self.bounds.height() / self.height as f64)
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.data.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        for v in [self.bounds.re_min, self.bounds.re_max, self.bounds.im_min, self.bounds.im_max] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.push(self.kind as u8);
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, GridError> {
        let need = |n: usize| {
            if bytes.len() < n {
                Err(GridError::Truncated { needed: n, available: bytes.len() })
            } else {
                Ok(())
            }
        };
        need(4)?;
        if &bytes[..4] != MAGIC {
            return Err(GridError::BadMagic);
        }
        need(8)?;
        let version = read_u32(bytes, 4);
        if version != FORMAT_VERSION {
            return Err(GridError::UnsupportedVersion(version));
        }
        need(HEADER_LEN)?;
        let width = read_u32(bytes, 8) as usize;
        let height = read_u32(bytes, 12) as usize;
        let f = |k: usize| f64::from_le_bytes(bytes[16 + 8 * k..24 + 8 * k].try_into().unwrap());
        let bounds = Bounds::new(f(0), f(1), f(2), f(3))?;
        let kind = PayloadKind::from_byte(bytes[HEADER_LEN - 1])?;
        let n = check_dimensions(width, height)?;
        let total = HEADER_LEN + 4 * n;
        need(total)?;
        if bytes.len() > total {
            return Err(GridError::TrailingBytes(bytes.len() - total));
        }
        let data = bytes[HEADER_LEN..total]
            .chunks_exact(4)
            .map(|c| i32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        FieldGrid::new(width, height, bounds, kind, data)
    }
}

fn read_u32(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes(b[at..at + 4].try_into().unwrap())
}

/// Number of steps until the orbit of `z` leaves the escape disk, or
/// [`BOUNDED`] if it stays within `max_iter` steps. `z = 0` lands on the pole
/// and escapes at step 1.
#[inline]
pub fn escape_depth(map: &MapParams, z: Complex64, max_iter: usize) -> i32 {
    let r2 = map.escape_radius() * map.escape_radius();
    let mut w = z;
    for k in 0..=max_iter {
        let a = w.norm_sqr();
        if !(a <= r2) {
            return k as i32;
        }
        if a == 0.0 {
            return (k + 1) as i32;
        }
        if k < max_iter {
            w = map.eval_finite(w);
        }
    }
    BOUNDED
}

/// Fill one row of escape depths for the dynamical plane.
pub fn julia_row(map: &MapParams, bounds: &Bounds, width: usize, height: usize, row: usize, max_iter: usize, out: &mut [i32]) {
    for (i, slot) in out.iter_mut().enumerate().take(width) {
        *slot = escape_depth(map, bounds.pixel_center(i, row, width, height), max_iter);
    }
}

/// Serial escape-depth rendering of the dynamical plane.
pub fn render_julia(map: &MapParams, bounds: Bounds, width: usize, height: usize, max_iter: usize) -> Result<FieldGrid, GridError> {
    let mut g = FieldGrid::zeroed(width, height, bounds, PayloadKind::EscapeDepth)?;
    for j in 0..height {
        julia_row(map, &bounds, width, height, j, max_iter, g.row_mut(j));
    }
    Ok(g)
}
