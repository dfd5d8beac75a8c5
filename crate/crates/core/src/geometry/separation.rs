//! Relative separation `dist(a, b) / min(diam a, diam b)` over a curve family.
//!
//! Curve pairs are visited in increasing order of a lower bound from their
//! bounding spheres and the scan stops once no remaining pair can beat the
//! current minimum. Pairs whose bounding spheres overlap are always checked
//! for intersection.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::Complex64;

use super::{diameter_of_points, dist3, Curve, GeometryError, KdTree};
use crate::cmath::ExtComplex;

/// Vertices closer than this chordal distance count as shared.
pub const COINCIDENT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeparationReport {
    pub s_minimum: f64,
    pub witness_curves: (usize, usize),
    /// Unordered pairs in the family.
    pub pair_count: usize,
    /// Pairs whose distance was actually computed.
    pub pairs_evaluated: usize,
}

struct Prepared<'a> {
    curve: &'a Curve,
    pts: Vec<[f64; 3]>,
    center: [f64; 3],
    radius: f64,
    diam: f64,
}

fn prepare(c: &Curve) -> Prepared<'_> {
    let pts = c.sphere_points();
    let n = pts.len() as f64;
    let mut center = [0.0; 3];
    for p in &pts {
        for a in 0..3 {
            center[a] += p[a] / n;
        }
    }
    let radius = pts.iter().map(|p| dist3(p, &center)).fold(0.0, f64::max);
    let diam = diameter_of_points(&pts).0;
    Prepared { curve: c, pts, center, radius, diam }
}

/// Minimum vertex-to-vertex chordal distance between two curves.
pub fn curve_distance(a: &Curve, b: &Curve) -> f64 {
    let (pa, pb) = (a.sphere_points(), b.sphere_points());
    let tree = KdTree::new(&pb);
    pa.iter().filter_map(|p| tree.nearest(p)).map(|(d, _)| d).fold(f64::INFINITY, f64::min)
}

fn min_distance(a: &Prepared, tree: &KdTree) -> f64 {
    let mut best = f64::INFINITY;
    for p in &a.pts {
        if let Some((d, _)) = tree.nearest_below(p, best) {
            best = d;
        }
    }
    best
}

fn finite_points(c: &Curve) -> Option<Vec<Complex64>> {
    c.vertices().iter().map(ExtComplex::finite).collect()
}

fn orient(a: Complex64, b: Complex64, c: Complex64) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn on_segment(a: Complex64, b: Complex64, p: Complex64) -> bool {
    p.re >= a.re.min(b.re) && p.re <= a.re.max(b.re) && p.im >= a.im.min(b.im) && p.im <= a.im.max(b.im)
}

fn segments_cross(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Planar edge crossing test using a uniform hash of the edges of `b`.
/// Curves through infinity are compared on the sphere by vertex coincidence
/// only.
fn edges_cross(a: &Curve, b: &Curve) -> bool {
    let (Some(pa), Some(pb)) = (finite_points(a), finite_points(b)) else {
        return false;
    };
    let edge = |p: &[Complex64], i: usize| (p[i], p[(i + 1) % p.len()]);
    let cell = pb
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let (u, v) = edge(&pb, i);
            f64::max(libm::fabs(u.re - v.re), libm::fabs(u.im - v.im))
        })
        .fold(0.0, f64::max)
        .max(1e-300);
    let key = |z: Complex64| (libm::floor(z.re / cell) as i64, libm::floor(z.im / cell) as i64);
    let mut buckets: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for i in 0..pb.len() {
        let (u, v) = edge(&pb, i);
        let (k1, k2) = (key(u), key(v));
        for x in k1.0.min(k2.0)..=k1.0.max(k2.0) {
            for y in k1.1.min(k2.1)..=k1.1.max(k2.1) {
                buckets.entry((x, y)).or_default().push(i);
            }
        }
    }
    for i in 0..pa.len() {
        let (u, v) = edge(&pa, i);
        let (k1, k2) = (key(u), key(v));
        // Edges of `a` may be longer than the cell; scan their full box.
        for x in k1.0.min(k2.0)..=k1.0.max(k2.0) {
            for y in k1.1.min(k2.1)..=k1.1.max(k2.1) {
                if let Some(list) = buckets.get(&(x, y)) {
                    for &j in list {
                        let (c, d) = edge(&pb, j);
                        if segments_cross(u, v, c, d) {
                            return true;
                        }
                    }
                }
            }
        }
    }
    false
}

/// Family separation; fails on the first intersecting pair found.
pub fn separation(family: &[Curve]) -> Result<SeparationReport, GeometryError> {
    if family.len() < 2 {
        return Err(GeometryError::TooFewCurves);
    }
    let prep: Vec<Prepared> = family.iter().map(prepare).collect();
    let mut pairs: Vec<(f64, usize, usize, bool)> = Vec::new();
    for i in 0..prep.len() {
        for j in i + 1..prep.len() {
            let gap = dist3(&prep[i].center, &prep[j].center) - prep[i].radius - prep[j].radius;
            let small = prep[i].diam.min(prep[j].diam);
            let overlap = gap <= 0.0;
            let bound = if overlap { 0.0 } else if small > 0.0 { gap / small } else { f64::INFINITY };
            pairs.push((bound, i, j, overlap));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut trees: Vec<Option<KdTree>> = (0..prep.len()).map(|_| None).collect();
    let mut best: Option<(f64, usize, usize)> = None;
    let mut evaluated = 0;
    for &(bound, i, j, overlap) in &pairs {
        if !overlap && best.is_some_and(|b| bound >= b.0) {
            continue;
        }
        // Query the larger curve's tree from the smaller curve's vertices.
        let (q, t) = if prep[i].pts.len() <= prep[j].pts.len() { (i, j) } else { (j, i) };
        if trees[t].is_none() {
            trees[t] = Some(KdTree::new(&prep[t].pts));
        }
        let d = min_distance(&prep[q], trees[t].as_ref().unwrap());
        evaluated += 1;
        if d <= COINCIDENT_TOL {
            return Err(GeometryError::Intersecting(i, j));
        }
        let edge = prep[i].curve.max_edge().max(prep[j].curve.max_edge());
        if d <= edge && edges_cross(prep[i].curve, prep[j].curve) {
            return Err(GeometryError::Intersecting(i, j));
        }
        let small = prep[i].diam.min(prep[j].diam);
        let ratio = if small > 0.0 { d / small } else { f64::INFINITY };
        if best.is_none_or(|b| ratio < b.0) {
            best = Some((ratio, i, j));
        }
    }
    let (s, i, j) = best.expect("at least one pair is evaluated");
    Ok(SeparationReport { s_minimum: s, witness_curves: (i, j), pair_count: pairs.len(), pairs_evaluated: evaluated })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{chordal, circle_polyline, diameter};

    fn z(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn concentric_circles() {
        let a = circle_polyline(z(0.0, 0.0), 0.1, 720);
        let b = circle_polyline(z(0.0, 0.0), 0.3, 720);
        let r = separation(&[a.clone(), b.clone()]).unwrap();
        let d = chordal(ExtComplex::new(0.1, 0.0), ExtComplex::new(0.3, 0.0));
        assert!((r.s_minimum - d / diameter(&a)).abs() < 1e-9);
        assert_eq!(r.pair_count, 1);
    }

    #[test]
    fn minimum_at_close_pair_and_order_free() {
        let a = circle_polyline(z(0.0, 0.0), 0.1, 200);
        let b = circle_polyline(z(0.25, 0.0), 0.1, 200);
        let far = circle_polyline(z(30.0, 0.0), 0.1, 200);
        let r = separation(&[a.clone(), b.clone(), far.clone()]).unwrap();
        assert_eq!(r.witness_curves, (0, 1));
        let r2 = separation(&[far, b, a]).unwrap();
        assert_eq!(r2.s_minimum, r.s_minimum);
        assert_eq!(r2.witness_curves, (1, 2));
    }

    #[test]
    fn shared_vertex_is_error() {
        let a = circle_polyline(z(0.0, 0.0), 0.1, 64);
        let b = circle_polyline(z(0.2, 0.0), 0.1, 64);
        assert_eq!(separation(&[a, b]), Err(GeometryError::Intersecting(0, 1)));
    }

    #[test]
    fn crossing_without_shared_vertex_is_error() {
        let a = circle_polyline(z(0.0, 0.0), 0.1, 64);
        let b = circle_polyline(z(0.05, 0.013), 0.1, 50);
        assert_eq!(separation(&[a, b]), Err(GeometryError::Intersecting(0, 1)));
    }

    #[test]
    fn singleton_rejected() {
        assert_eq!(separation(&[circle_polyline(z(0.0, 0.0), 0.1, 16)]), Err(GeometryError::TooFewCurves));
    }
}
