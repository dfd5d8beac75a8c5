//! JSON reports and CSV tables. Numbers use Rust's shortest round-trip
//! formatting, so identical runs give identical bytes.

use std::fmt::Write as _;
use std::path::Path;

use mcmullen_core::cantor::{to_f64, IntervalUnion};
use mcmullen_core::geometry::{CarpetReport, Curve};
use mcmullen_core::surgery::QuasiregularReport;
use mcmullen_core::{Bounds, Complex64, RealBracket, Verdict};
use serde_json::{json, Value};

use crate::LabError;

/// Caveat carried by every curve-metrics report.
pub const FINITE_DEPTH_NOTE: &str =
    "constants are estimates over the curves extracted at the computed depths; they show boundedness there, not uniformity over all depths";

pub fn complex(z: Complex64) -> Value {
    json!([z.re, z.im])
}

pub fn bounds(b: &Bounds) -> Value {
    json!({ "reMin": b.re_min, "reMax": b.re_max, "imMin": b.im_min, "imMax": b.im_max })
}

pub fn verdict(v: &Verdict) -> Value {
    json!({
        "class": v.class.name(),
        "code": v.class.code(),
        "escapeIndex": v.escape_index,
        "entryIndex": v.entry_index,
        "entryModulus": v.entry_modulus,
        "iterationsUsed": v.iterations_used,
    })
}

pub fn bracket(b: &RealBracket) -> Value {
    json!({
        "lambda0": b.lambda0,
        "lambda1": b.lambda1,
        "tol": b.tol,
        "lambda0Interval": [b.lambda0_interval.0, b.lambda0_interval.1],
        "lambda1Interval": [b.lambda1_interval.0, b.lambda1_interval.1],
    })
}

pub fn quasiregular(r: &QuasiregularReport) -> Value {
    json!({
        "degreeCount": r.degree_count,
        "degreeMax": r.degree_max,
        "maxDilatation": r.max_dilatation,
        "maxDilatationAt": complex(r.max_dilatation_at),
        "symmetryError": r.symmetry_error,
        "seamError": r.seam_error,
        "passThroughViolations": r.pass_through_violations,
        "inversionFailures": r.inversion_failures,
        "roundTripError": r.round_trip_error,
        "branchFiberSize": r.branch_fiber_size,
    })
}

/// One row per curve: `curveId,depth,vertices,diameter,kEstimate`.
pub fn curves_csv(family: &[Curve], report: &CarpetReport) -> String {
    let mut s = String::from("curveId,depth,vertices,diameter,kEstimate\n");
    for (i, (c, t)) in family.iter().zip(&report.per_curve).enumerate() {
        let depth = c.source_depth().map(|d| d.to_string()).unwrap_or_default();
        let _ = writeln!(s, "{i},{depth},{},{},{}", c.len(), mcmullen_core::geometry::diameter(c), t.k_estimate);
    }
    s
}

pub fn carpet_summary(report: &CarpetReport) -> Value {
    let sep = report.separation.as_ref();
    json!({
        "curves": report.per_curve.len(),
        "maxK": report.max_turning.k_estimate,
        "sMin": sep.map(|s| s.s_minimum),
        "witnesses": {
            "maxK": {
                "curve": report.max_turning_curve,
                "vertices": [report.max_turning.witness_pair.0, report.max_turning.witness_pair.1],
            },
            "sMin": sep.map(|s| json!([s.witness_curves.0, s.witness_curves.1])),
        },
        "perDepth": report.per_depth.iter().map(|&(d, n, k)| json!({ "depth": d, "curves": n, "maxK": k })).collect::<Vec<_>>(),
        "note": FINITE_DEPTH_NOTE,
    })
}

/// Exact endpoints and their nearest floats: `index,left,right,leftValue,rightValue`.
pub fn intervals_csv(set: &IntervalUnion) -> String {
    let mut s = String::from("index,left,right,leftValue,rightValue\n");
    for (i, &(a, b)) in set.intervals().iter().enumerate() {
        let _ = writeln!(s, "{i},{a},{b},{},{}", to_f64(a), to_f64(b));
    }
    s
}

/// Vertices then edges of a mesh. Vertex rows carry `re,im`, edge rows the
/// two vertex ids.
pub fn mesh_csv(vertices: &[Complex64], edges: &[(usize, usize)]) -> String {
    let mut s = String::from("kind,id,a,b\n");
    for (i, z) in vertices.iter().enumerate() {
        let _ = writeln!(s, "vertex,{i},{},{}", z.re, z.im);
    }
    for (i, (a, b)) in edges.iter().enumerate() {
        let _ = writeln!(s, "edge,{i},{a},{b}");
    }
    s
}

pub fn scan_csv(rows: &[(f64, i32)]) -> String {
    let mut s = String::from("lambda,verdictCode\n");
    for (x, c) in rows {
        let _ = writeln!(s, "{x},{c}");
    }
    s
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

pub fn write_text(path: &Path, text: &str) -> Result<(), LabError> {
    std::fs::write(path, text).map_err(|e| LabError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mcmullen_core::cantor::CantorIfs;
    use mcmullen_core::{Exponents, VerdictClass};

    #[test]
    fn verdict_fields() {
        let v = Verdict { class: VerdictClass::CantorSet, escape_index: Some(1), entry_index: None, entry_modulus: None, iterations_used: 1 };
        let j = verdict(&v);
        assert_eq!(j["class"], "CantorSet");
        assert_eq!(j["escapeIndex"], 1);
        assert!(j["entryIndex"].is_null());
        assert_eq!(j["iterationsUsed"], 1);
    }

    #[test]
    fn cantor_table() {
        let set = CantorIfs::new(Exponents::symmetric(3).unwrap()).level_set(1).unwrap();
        assert_eq!(intervals_csv(&set), "index,left,right,leftValue,rightValue\n0,0,1/3,0,0.3333333333333333\n1,2/3,1,0.6666666666666666,1\n");
    }

    #[test]
    fn mesh_table() {
        let v = [Complex64::new(0.5, 0.0), Complex64::new(0.0, -1.0)];
        assert_eq!(mesh_csv(&v, &[(0, 1)]), "kind,id,a,b\nvertex,0,0.5,0\nvertex,1,0,-1\nedge,0,0,1\n");
    }

    #[test]
    fn scan_table() {
        assert_eq!(scan_csv(&[(0.5, 1), (1e-7, 2)]), "lambda,verdictCode\n0.5,1\n0.0000001,2\n");
    }
}
