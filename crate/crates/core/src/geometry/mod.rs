//! Curve geometry on the Riemann sphere in the chordal metric: diameters,
//! bounded-turning constants, relative separation, and extraction of
//! peripheral curves from escape-depth grids.

mod extract;
mod kdtree;
mod separation;
mod turning;

use alloc::vec::Vec;

use thiserror::Error;

use crate::cmath::ExtComplex;

pub use extract::{extract_peripheral, extract_peripheral_with, ExtractOptions, Extraction, DEFAULT_FILL_MARGIN};
pub use kdtree::KdTree;
pub use separation::{curve_distance, separation, SeparationReport};
pub use turning::{turning_constant, turning_constant_brute_force, TurningReport, MIN_PAIR_BUDGET};

/// A point of the Riemann sphere.
pub type SpherePoint = ExtComplex;

/// Fewest vertices accepted for a [`Curve`].
pub const MIN_CURVE_VERTICES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("a curve needs at least {MIN_CURVE_VERTICES} vertices (got {0})")]
    TooFewVertices(usize),
    #[error("pair budget must be at least {MIN_PAIR_BUDGET} (got {0})")]
    PairBudget(usize),
    #[error("separation needs at least two curves")]
    TooFewCurves,
    #[error("curves {0} and {1} intersect")]
    Intersecting(usize, usize),
    #[error("grid carries verdict codes, not escape depths")]
    WrongPayload,
    #[error("empty curve family")]
    EmptyFamily,
}

/// Chordal distance `2|x - y| / sqrt((1 + |x|^2)(1 + |y|^2))`, with
/// `2 / sqrt(1 + |y|^2)` against the point at infinity.
pub fn chordal(x: SpherePoint, y: SpherePoint) -> f64 {
    match (x, y) {
        (ExtComplex::Infinity, ExtComplex::Infinity) => 0.0,
        (ExtComplex::Infinity, ExtComplex::Finite(w)) | (ExtComplex::Finite(w), ExtComplex::Infinity) => {
            2.0 / libm::sqrt(1.0 + w.norm_sqr())
        }
        (ExtComplex::Finite(a), ExtComplex::Finite(b)) => {
            let d = (a - b).norm_sqr();
            2.0 * libm::sqrt(d / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())))
        }
    }
}

/// Inverse stereographic projection onto the unit sphere; Euclidean distance
/// between images equals the chordal distance.
pub fn to_sphere(z: SpherePoint) -> [f64; 3] {
    match z {
        ExtComplex::Infinity => [0.0, 0.0, 1.0],
        ExtComplex::Finite(w) => {
            let s = w.norm_sqr();
            let k = 1.0 / (1.0 + s);
            [2.0 * w.re * k, 2.0 * w.im * k, (s - 1.0) * k]
        }
    }
}

pub(crate) fn dist3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let (x, y, z) = (a[0] - b[0], a[1] - b[1], a[2] - b[2]);
    libm::sqrt(x * x + y * y + z * z)
}

/// A closed polyline on the sphere. The closing edge from the last vertex
/// back to the first is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    vertices: Vec<SpherePoint>,
    source_depth: Option<u32>,
}

impl Curve {
    /// A repeated closing vertex at the end is dropped.
    pub fn new(mut vertices: Vec<SpherePoint>) -> Result<Self, GeometryError> {
        if vertices.len() > 1 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < MIN_CURVE_VERTICES {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        Ok(Curve { vertices, source_depth: None })
    }

    pub fn from_finite(points: impl IntoIterator<Item = num_complex::Complex64>) -> Result<Self, GeometryError> {
        Curve::new(points.into_iter().map(ExtComplex::from).collect())
    }

    pub fn with_depth(mut self, depth: u32) -> Self {
        self.source_depth = Some(depth);
        self
    }

    pub fn vertices(&self) -> &[SpherePoint] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn source_depth(&self) -> Option<u32> {
        self.source_depth
    }

    pub fn sphere_points(&self) -> Vec<[f64; 3]> {
        self.vertices.iter().map(|&z| to_sphere(z)).collect()
    }

    /// Longest edge in the chordal metric, closing edge included.
    pub fn max_edge(&self) -> f64 {
        let n = self.vertices.len();
        (0..n).map(|i| chordal(self.vertices[i], self.vertices[(i + 1) % n])).fold(0.0, f64::max)
    }
}

/// Largest chordal distance between two vertices.
pub fn diameter(c: &Curve) -> f64 {
    diameter_of_points(&c.sphere_points()).0
}

/// Exact farthest pair of a point set on the sphere, `(distance, i, j)`.
pub(crate) fn diameter_of_points(pts: &[[f64; 3]]) -> (f64, usize, usize) {
    if pts.len() < 2 {
        return (0.0, 0, 0);
    }
    let tree = KdTree::new(pts);
    let mut best = (0.0, 0, 0);
    for (i, p) in pts.iter().enumerate() {
        if let Some((d, j)) = tree.farthest_above(p, best.0) {
            best = (d, i, j);
        }
    }
    best
}

/// Maximum turning constant over a family, per-depth maxima, and the family
/// separation (absent for a single curve).
#[derive(Debug, Clone, PartialEq)]
pub struct CarpetReport {
    pub max_turning: TurningReport,
    /// Index into the family of the curve attaining `max_turning`.
    pub max_turning_curve: usize,
    /// `(depth, curve count, max kEstimate)`; curves without a depth are
    /// listed under `None`.
    pub per_depth: Vec<(Option<u32>, usize, f64)>,
    pub per_curve: Vec<TurningReport>,
    pub separation: Option<SeparationReport>,
}

/// Bonk-hypothesis proxy over a finite family. The constants are finite-scale
/// estimates; they say nothing about uniformity over deeper levels.
pub fn carpet_report(family: &[Curve], pair_budget: usize) -> Result<CarpetReport, GeometryError> {
    if family.is_empty() {
        return Err(GeometryError::EmptyFamily);
    }
    let per_curve = family
        .iter()
        .map(|c| turning_constant(c, pair_budget))
        .collect::<Result<Vec<_>, _>>()?;
    let (max_turning_curve, max_turning) = per_curve
        .iter()
        .enumerate()
        .fold((0, per_curve[0]), |acc, (i, r)| if r.k_estimate > acc.1.k_estimate { (i, *r) } else { acc });
    let mut per_depth: Vec<(Option<u32>, usize, f64)> = Vec::new();
    for (c, r) in family.iter().zip(&per_curve) {
        match per_depth.iter_mut().find(|e| e.0 == c.source_depth()) {
            Some(e) => {
                e.1 += 1;
                e.2 = e.2.max(r.k_estimate);
            }
            None => per_depth.push((c.source_depth(), 1, r.k_estimate)),
        }
    }
    per_depth.sort_by_key(|e| e.0);
    let separation = if family.len() >= 2 { Some(separation(family)?) } else { None };
    Ok(CarpetReport { max_turning, max_turning_curve, per_depth, per_curve, separation })
}

/// Regular `n`-gon inscribed in the circle `|z - center| = r`.
pub fn circle_polyline(center: num_complex::Complex64, r: f64, n: usize) -> Curve {
    let pts = (0..n).map(|k| center + crate::cmath::from_polar(r, core::f64::consts::TAU * k as f64 / n as f64));
    Curve::from_finite(pts).expect("circle polyline needs n >= 8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> SpherePoint {
        ExtComplex::new(re, im)
    }

    #[test]
    fn chordal_examples() {
        assert_eq!(chordal(c(0.0, 0.0), ExtComplex::Infinity), 2.0);
        assert!((chordal(c(0.0, 0.0), c(1.0, 0.0)) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(chordal(ExtComplex::Infinity, ExtComplex::Infinity), 0.0);
        let (x, y) = (c(0.3, -2.0), c(-1.5, 0.25));
        assert!((chordal(x, y) - dist3(&to_sphere(x), &to_sphere(y))).abs() < 1e-14);
    }

    #[test]
    fn circle_diameter() {
        let k = circle_polyline(Complex64::new(0.0, 0.0), 0.1, 360);
        assert!((diameter(&k) - 0.4 / 1.01).abs() < 1e-12);
    }

    #[test]
    fn repeated_vertex_has_zero_diameter() {
        let k = Curve::from_finite(core::iter::repeat_n(Complex64::new(0.2, 0.1), 9)).unwrap();
        assert_eq!(diameter(&k), 0.0);
    }

    #[test]
    fn curve_requires_vertices() {
        let pts = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        assert_eq!(Curve::from_finite(pts), Err(GeometryError::TooFewVertices(3)));
    }
}
