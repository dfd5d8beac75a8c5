//! `key = value` configuration files.
//!
//! Recognized keys, all optional:
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `l`, `m` | exponents | 3, 3 |
//! | `lambda_re`, `lambda_im` | parameter | required by `classify` and `render-julia` |
//! | `max_iter` | iteration cap | 10000 for classification, 500 for dynamical-plane renders |
//! | `ambiguity_band` | classifier band | 0.05 |
//! | `r0` | surgery radius | 0.5 |
//! | `resolution` | grid side in pixels | 512 |
//! | `bounds` | `re_min,re_max,im_min,im_max` | per subcommand |
//! | `gamma` | escape-depth shading exponent | 1.0 |
//! | `palette.<value>` | color `r,g,b` or `#rrggbb` for a payload value | built in |
//!
//! A `#` at the start of a line, or with whitespace on both sides, starts a
//! comment (so `#rrggbb` colors survive). Unknown and repeated keys are errors. Explicit
//! command-line flags take precedence over file values.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use mcmullen_core::{Bounds, Complex64};

use crate::image::Rgb;
use crate::LabError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub l: Option<u32>,
    pub m: Option<u32>,
    pub lambda_re: Option<f64>,
    pub lambda_im: Option<f64>,
    pub max_iter: Option<usize>,
    pub ambiguity_band: Option<f64>,
    pub r0: Option<f64>,
    pub resolution: Option<usize>,
    pub bounds: Option<Bounds>,
    pub gamma: Option<f64>,
    pub palette: BTreeMap<i32, Rgb>,
}

fn set<T: FromStr>(slot: &mut Option<T>, value: &str) -> Result<(), String> {
    if slot.is_some() {
        return Err("duplicate key".into());
    }
    *slot = Some(value.parse().map_err(|_| format!("cannot parse {value:?}"))?);
    Ok(())
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, LabError> {
        let mut cfg = Config::default();
        for (k, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| LabError::Config { line: k + 1, msg };
            let (key, value) = line.split_once('=').ok_or_else(|| err("expected `key = value`".into()))?;
            let (key, value) = (key.trim(), value.trim());
            cfg.apply(key, value).map_err(|msg| err(format!("{key}: {msg}")))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Config::parse(&text)
    }

    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "l" => set(&mut self.l, value),
            "m" => set(&mut self.m, value),
            "lambda_re" => set(&mut self.lambda_re, value),
            "lambda_im" => set(&mut self.lambda_im, value),
            "max_iter" => set(&mut self.max_iter, value),
            "ambiguity_band" => set(&mut self.ambiguity_band, value),
            "r0" => set(&mut self.r0, value),
            "resolution" => set(&mut self.resolution, value),
            "gamma" => set(&mut self.gamma, value),
            "bounds" => {
                if self.bounds.is_some() {
                    return Err("duplicate key".into());
                }
                self.bounds = Some(parse_bounds(value)?);
                Ok(())
            }
            _ => match key.strip_prefix("palette.") {
                Some(v) => {
                    let v: i32 = v.parse().map_err(|_| format!("palette key needs an integer payload value, got {v:?}"))?;
                    if self.palette.insert(v, parse_rgb(value)?).is_some() {
                        return Err("duplicate key".into());
                    }
                    Ok(())
                }
                None => Err("unknown key".into()),
            },
        }
    }

    /// `lambda_re + i lambda_im` when either part is set.
    pub fn lambda(&self) -> Option<Complex64> {
        match (self.lambda_re, self.lambda_im) {
            (None, None) => None,
            (re, im) => Some(Complex64::new(re.unwrap_or(0.0), im.unwrap_or(0.0))),
        }
    }
}

fn strip_comment(line: &str) -> &str {
    let b = line.as_bytes();
    let ws = |k: usize| b.get(k).is_none_or(|c| c.is_ascii_whitespace());
    for (k, &c) in b.iter().enumerate() {
        let starts = line[..k].trim().is_empty() || (k > 0 && ws(k - 1) && ws(k + 1));
        if c == b'#' && starts {
            return &line[..k];
        }
    }
    line
}

/// `re_min,re_max,im_min,im_max`.
pub fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| format!("bad number {p:?} in bounds")))
        .collect::<Result<_, _>>()?;
    if v.len() != 4 {
        return Err(format!("bounds need 4 numbers, got {}", v.len()));
    }
    Bounds::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

/// `r,g,b` with components in 0..=255, or `#rrggbb`.
pub fn parse_rgb(s: &str) -> Result<Rgb, String> {
    if let Some(hex) = s.strip_prefix('#') {
        if hex.len() == 6 {
            if let Ok(v) = u32::from_str_radix(hex, 16) {
                return Ok([(v >> 16) as u8, (v >> 8) as u8, v as u8]);
            }
        }
        return Err(format!("bad hex color {s:?}"));
    }
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [r, g, b] => {
            let c = |p: &str| p.parse::<u8>().map_err(|_| format!("bad color component {p:?}"));
            Ok([c(r)?, c(g)?, c(b)?])
        }
        _ => Err(format!("color needs 3 components, got {s:?}")),
    }
}

/// Complex numbers as `a`, `bi`, `a+bi`, `a-bi` or `a,b`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let bad = || format!("cannot parse complex number {s:?}");
    if let Some((re, im)) = s.split_once(',') {
        let re = re.trim().parse().map_err(|_| bad())?;
        let im = im.trim().parse().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // Split at the last sign that is not part of an exponent.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let im_part = |t: &str| match t {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        t => t.parse::<f64>().map_err(|_| bad()),
    };
    match split {
        Some(k) => Ok(Complex64::new(body[..k].parse().map_err(|_| bad())?, im_part(&body[k..])?)),
        None => Ok(Complex64::new(0.0, im_part(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_keys() {
        let cfg = Config::parse(
            "# run settings\nl = 2\nm=3\nlambda_re = 0.1 # trailing\nlambda_im = -0.2\nmax_iter = 300\n\
             ambiguity_band = 0.1\nr0 = 0.4\nresolution = 64\nbounds = -1, 1, -0.5, 0.5\ngamma = 2\n\
             palette.3 = 1,2,3\npalette.-1 = #ff0080\npalette.2 = #00ff00 # green\n",
        )
        .unwrap();
        assert_eq!((cfg.l, cfg.m, cfg.max_iter, cfg.resolution), (Some(2), Some(3), Some(300), Some(64)));
        assert_eq!(cfg.lambda(), Some(Complex64::new(0.1, -0.2)));
        assert_eq!(cfg.bounds, Some(Bounds::new(-1.0, 1.0, -0.5, 0.5).unwrap()));
        assert_eq!(cfg.palette[&3], [1, 2, 3]);
        assert_eq!(cfg.palette[&-1], [255, 0, 128]);
        assert_eq!(cfg.palette[&2], [0, 255, 0]);
        assert_eq!((cfg.r0, cfg.gamma, cfg.ambiguity_band), (Some(0.4), Some(2.0), Some(0.1)));
    }

    #[test]
    fn rejects_bad_lines() {
        for (text, line) in [
            ("l = 3\nfoo = 1\n", 2),
            ("l = 3\nl = 4\n", 2),
            ("max_iter\n", 1),
            ("\n\nm = three\n", 3),
            ("bounds = 1,0,0,1\n", 1),
            ("palette.x = 1,2,3\n", 1),
            ("palette.1 = 1,2\n", 1),
        ] {
            match Config::parse(text) {
                Err(LabError::Config { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
        assert!(Config::parse("foo = 1").unwrap_err().to_string().contains("unknown key"));
    }

    #[test]
    fn complex_forms() {
        let c = |s| parse_complex(s).unwrap();
        assert_eq!(c("100"), Complex64::new(100.0, 0.0));
        assert_eq!(c("-0.3"), Complex64::new(-0.3, 0.0));
        assert_eq!(c("0.2i"), Complex64::new(0.0, 0.2));
        assert_eq!(c("-i"), Complex64::new(0.0, -1.0));
        assert_eq!(c("0.1+0.1i"), Complex64::new(0.1, 0.1));
        assert_eq!(c("1e-5-2e-3i"), Complex64::new(1e-5, -2e-3));
        assert_eq!(c("2.5e+1i"), Complex64::new(0.0, 25.0));
        assert_eq!(c("0.1, -0.2"), Complex64::new(0.1, -0.2));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
    }
}
