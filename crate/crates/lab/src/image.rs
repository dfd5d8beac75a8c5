//! PNG output. Grid row 0 is the bottom edge, so rows are written in reverse
//! and the top image row is `im_max`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use mcmullen_core::grid::BOUNDED;
use mcmullen_core::trichotomy::CODE_UNDEFINED;
use mcmullen_core::{FieldGrid, PayloadKind, VerdictClass};

use crate::LabError;

pub type Rgb = [u8; 3];

/// Color ramp for escape depths without an explicit palette entry. Depth `v`
/// maps to `low + (high - low) t^gamma` with `t = ln(1 + v) / ln(1 + vmax)`.
/// The log scaling is cosmetic only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shading {
    pub gamma: f64,
    pub low: Rgb,
    pub high: Rgb,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImageSpec {
    /// Exact payload values; these win over the shading ramp.
    pub palette: BTreeMap<i32, Rgb>,
    /// Only consulted for non-negative escape depths.
    pub shading: Option<Shading>,
}

pub const VERDICT_COLORS: [(i32, Rgb); 6] = [
    (CODE_UNDEFINED, [128, 128, 128]),
    (1, [70, 130, 200]),
    (2, [240, 150, 40]),
    (3, [60, 170, 90]),
    (4, [0, 0, 0]),
    (5, [220, 30, 30]),
];

impl ImageSpec {
    pub fn verdict() -> Self {
        ImageSpec { palette: VERDICT_COLORS.into_iter().collect(), shading: None }
    }

    pub fn escape(gamma: f64) -> Self {
        ImageSpec {
            palette: [(BOUNDED, [0, 0, 0])].into_iter().collect(),
            shading: Some(Shading { gamma, low: [255, 255, 255], high: [20, 40, 120] }),
        }
    }

    /// Default spec for the grid's payload kind.
    pub fn for_kind(kind: PayloadKind, gamma: f64) -> Self {
        match kind {
            PayloadKind::VerdictCode => ImageSpec::verdict(),
            PayloadKind::EscapeDepth => ImageSpec::escape(gamma),
        }
    }

    /// Overrides palette entries.
    pub fn with_entries(mut self, entries: &BTreeMap<i32, Rgb>) -> Self {
        self.palette.extend(entries.iter().map(|(&k, &v)| (k, v)));
        self
    }

    fn check(&self, kind: PayloadKind) -> Result<(), LabError> {
        if let Some(s) = self.shading {
            if !(s.gamma > 0.0 && s.gamma.is_finite()) {
                return Err(LabError::Usage(format!("gamma must be positive, got {}", s.gamma)));
            }
        }
        if kind == PayloadKind::VerdictCode {
            let codes = std::iter::once(CODE_UNDEFINED).chain(VerdictClass::ALL.iter().map(|c| c.code()));
            if let Some(c) = codes.into_iter().find(|c| !self.palette.contains_key(c)) {
                return Err(LabError::IncompletePalette(c));
            }
        }
        Ok(())
    }

    /// RGB bytes, top image row first.
    pub fn colorize(&self, grid: &FieldGrid) -> Result<Vec<u8>, LabError> {
        self.check(grid.kind())?;
        let shading = self.shading.filter(|_| grid.kind() == PayloadKind::EscapeDepth);
        let vmax = grid.data().iter().copied().max().unwrap_or(0).max(1);
        let scale = (1.0 + f64::from(vmax)).ln();
        let color = |v: i32| -> Result<Rgb, LabError> {
            if let Some(&c) = self.palette.get(&v) {
                return Ok(c);
            }
            match shading {
                Some(s) if v >= 0 => {
                    let t = ((1.0 + f64::from(v)).ln() / scale).powf(s.gamma);
                    Ok(std::array::from_fn(|k| {
                        let (a, b) = (f64::from(s.low[k]), f64::from(s.high[k]));
                        (a + (b - a) * t).round().clamp(0.0, 255.0) as u8
                    }))
                }
                _ => Err(LabError::Unmapped(v)),
            }
        };
        let mut out = Vec::with_capacity(3 * grid.data().len());
        for j in (0..grid.height()).rev() {
            for &v in grid.row(j) {
                out.extend_from_slice(&color(v)?);
            }
        }
        Ok(out)
    }
}

pub fn write_png(grid: &FieldGrid, spec: &ImageSpec, out: impl Write) -> Result<(), LabError> {
    let rgb = spec.colorize(grid)?;
    let mut enc = png::Encoder::new(out, grid.width() as u32, grid.height() as u32);
    enc.set_color(png::ColorType::Rgb);
    enc.set_depth(png::BitDepth::Eight);
    let mut w = enc.write_header()?;
    w.write_image_data(&rgb)?;
    w.finish()?;
    Ok(())
}

pub fn encode_png(grid: &FieldGrid, spec: &ImageSpec, path: &Path) -> Result<(), LabError> {
    // Palette problems surface before the file is created.
    spec.colorize(grid)?;
    let file = File::create(path).map_err(|e| LabError::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_png(grid, spec, &mut out)?;
    out.flush().map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcmullen_core::Bounds;

    fn grid(kind: PayloadKind, w: usize, h: usize, data: Vec<i32>) -> FieldGrid {
        FieldGrid::new(w, h, Bounds::new(0.0, 1.0, 0.0, 1.0).unwrap(), kind, data).unwrap()
    }

    fn decode(bytes: &[u8]) -> (png::OutputInfo, Vec<u8>) {
        let mut r = png::Decoder::new(std::io::Cursor::new(bytes)).read_info().unwrap();
        let mut buf = vec![0; r.output_buffer_size().unwrap()];
        let info = r.next_frame(&mut buf).unwrap();
        buf.truncate(info.buffer_size());
        (info, buf)
    }

    fn png_of(g: &FieldGrid, spec: &ImageSpec) -> Vec<u8> {
        let mut out = Vec::new();
        write_png(g, spec, &mut out).unwrap();
        out
    }

    #[test]
    fn verdict_grid_uses_six_colors() {
        let g = grid(PayloadKind::VerdictCode, 6, 1, vec![0, 1, 2, 3, 4, 5]);
        let (info, px) = decode(&png_of(&g, &ImageSpec::verdict()));
        assert_eq!((info.width, info.height, info.color_type, info.bit_depth), (6, 1, png::ColorType::Rgb, png::BitDepth::Eight));
        let colors: std::collections::BTreeSet<&[u8]> = px.chunks(3).collect();
        assert_eq!(colors.len(), 6);
    }

    #[test]
    fn single_pixel() {
        let g = grid(PayloadKind::EscapeDepth, 1, 1, vec![-1]);
        let (info, px) = decode(&png_of(&g, &ImageSpec::escape(1.0)));
        assert_eq!((info.width, info.height), (1, 1));
        assert_eq!(px, [0, 0, 0]);
    }

    #[test]
    fn top_row_is_im_max() {
        // Row 0 (bottom) undefined, row 1 (top) non-escaping.
        let g = grid(PayloadKind::VerdictCode, 1, 2, vec![0, 4]);
        let (_, px) = decode(&png_of(&g, &ImageSpec::verdict()));
        assert_eq!(px, [0, 0, 0, 128, 128, 128]);
    }

    #[test]
    fn unmapped_value_is_reported() {
        let g = grid(PayloadKind::VerdictCode, 2, 1, vec![1, 9]);
        let err = ImageSpec::verdict().colorize(&g).unwrap_err();
        assert!(matches!(err, LabError::Unmapped(9)));
        assert!(err.to_string().contains('9'));
        let g = grid(PayloadKind::EscapeDepth, 2, 1, vec![1, -7]);
        assert!(matches!(ImageSpec::escape(1.0).colorize(&g), Err(LabError::Unmapped(-7))));
    }

    #[test]
    fn verdict_palette_must_cover_all_codes() {
        let mut spec = ImageSpec::verdict();
        spec.palette.remove(&3);
        let g = grid(PayloadKind::VerdictCode, 1, 1, vec![1]);
        assert!(matches!(spec.colorize(&g), Err(LabError::IncompletePalette(3))));
    }

    #[test]
    fn gamma_changes_colors_not_geometry() {
        let data: Vec<i32> = (0..64).map(|k| if k % 7 == 0 { -1 } else { k % 11 }).collect();
        let g = grid(PayloadKind::EscapeDepth, 8, 8, data.clone());
        let a = ImageSpec::escape(1.0).colorize(&g).unwrap();
        let b = ImageSpec::escape(2.0).colorize(&g).unwrap();
        assert_ne!(a, b);
        // Pixels share a color under one gamma exactly when they share it
        // under the other, and both track equal payload values.
        let (pa, pb): (Vec<&[u8]>, Vec<&[u8]>) = (a.chunks(3).collect(), b.chunks(3).collect());
        let flipped: Vec<i32> = (0..8).rev().flat_map(|j| data[8 * j..8 * j + 8].to_vec()).collect();
        for i in 0..64 {
            for k in 0..64 {
                assert_eq!(pa[i] == pa[k], pb[i] == pb[k]);
                assert_eq!(pa[i] == pa[k], flipped[i] == flipped[k]);
            }
        }
    }

    #[test]
    fn bad_gamma_rejected() {
        let g = grid(PayloadKind::EscapeDepth, 1, 1, vec![3]);
        assert!(matches!(ImageSpec::escape(0.0).colorize(&g), Err(LabError::Usage(_))));
    }
}
