//! Peripheral curves from an escape-depth grid.
//!
//! Fatou components of an escaping parameter are preimages of the basin of
//! infinity; inside a component of preimage depth `k` the escape depth is at
//! least `k` and grows toward the boundary. Each component is approximated
//! from inside by the pixels of depth `k ..= k + margin` grown out of its
//! depth-`k` core. Each piece is tagged with `k`, and its largest closed
//! boundary loop is traced by marching squares with vertices at pixel-edge
//! midpoints.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::{Curve, GeometryError, MIN_CURVE_VERTICES};
use crate::grid::{FieldGrid, PayloadKind};

/// Default number of escape levels above its seed depth each component grows.
pub const DEFAULT_FILL_MARGIN: u32 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractOptions {
    pub max_depth: u32,
    pub min_pixels: usize,
    pub fill_margin: u32,
}

impl ExtractOptions {
    pub fn new(max_depth: u32, min_pixels: usize) -> Self {
        ExtractOptions { max_depth, min_pixels, fill_margin: DEFAULT_FILL_MARGIN }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    /// Sorted by depth, then by position of the component's first pixel.
    pub curves: Vec<Curve>,
    /// Boundary pieces that run into the grid edge.
    pub open_dropped: usize,
    /// Components or loops below the size threshold.
    pub small_dropped: usize,
    /// Grown regions with seed depth at most `maxDepth`.
    pub components: usize,
}

pub fn extract_peripheral(grid: &FieldGrid, max_depth: u32, min_pixels: usize) -> Result<Extraction, GeometryError> {
    extract_peripheral_with(grid, &ExtractOptions::new(max_depth, min_pixels))
}

struct Component {
    label: u32,
    first: usize,
    size: usize,
    depth: i32,
    x0: usize,
    x1: usize,
    y0: usize,
    y1: usize,
}

type Key = (u32, u32);

const BLOCKED: u32 = u32::MAX;

pub fn extract_peripheral_with(grid: &FieldGrid, opts: &ExtractOptions) -> Result<Extraction, GeometryError> {
    if grid.kind() != PayloadKind::EscapeDepth {
        return Err(GeometryError::WrongPayload);
    }
    let (w, h) = (grid.width(), grid.height());
    let data = grid.data();
    let (labels, comps) = grow_regions(data, w, h, opts);

    let mut out = Extraction { curves: Vec::new(), open_dropped: 0, small_dropped: 0, components: 0 };
    let mut found: Vec<(i32, usize, Curve)> = Vec::new();
    for c in comps.iter().filter(|c| c.depth <= opts.max_depth as i32) {
        out.components += 1;
        if c.size < opts.min_pixels {
            out.small_dropped += 1;
            continue;
        }
        let (loops, open) = trace_component(&labels, w, h, c);
        out.open_dropped += open;
        let best = loops
            .into_iter()
            .map(|lp| (libm::fabs(shoelace(&lp)), lp))
            .max_by(|a, b| a.0.total_cmp(&b.0));
        match best {
            Some((area, lp)) if area >= opts.min_pixels as f64 && lp.len() >= MIN_CURVE_VERTICES => {
                let pts = lp.iter().map(|&(kx, ky)| {
                    grid.bounds().from_pixel((f64::from(kx) + 1.0) * 0.5, (f64::from(ky) + 1.0) * 0.5, w, h)
                });
                let curve = Curve::from_finite(pts)?.with_depth(c.depth as u32);
                found.push((c.depth, c.first, curve));
            }
            _ => out.small_dropped += 1,
        }
    }
    found.sort_by_key(|f| (f.0, f.1));
    out.curves = found.into_iter().map(|f| f.2).collect();
    Ok(out)
}

/// Regions grown level by level in order of escape depth. At level `L`,
/// unlabeled depth-`L` pixels first join an adjacent region whose cap is at
/// least `L` (breadth first, so neighbouring regions split contested pixels),
/// and what remains seeds new regions with cap `L + margin`. A global
/// threshold would leak across the Julia set near shallow components once
/// deep ones are wanted; a cap relative to each seed does not.
fn grow_regions(data: &[i32], w: usize, h: usize, opts: &ExtractOptions) -> (Vec<u32>, Vec<Component>) {
    let top = i64::from(opts.max_depth) + i64::from(opts.fill_margin);
    let top = top.min(i64::from(i32::MAX)) as i32;
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); top as usize + 1];
    for (p, &v) in data.iter().enumerate() {
        if v >= 0 && v <= top {
            buckets[v as usize].push(p);
        }
    }
    let neighbours = |p: usize| {
        let (x, y) = (p % w, p / w);
        [
            (x > 0).then(|| p - 1),
            (x + 1 < w).then(|| p + 1),
            (y > 0).then(|| p - w),
            (y + 1 < h).then(|| p + w),
        ]
    };
    // A pixel touching two regions is left to neither, so distinct regions
    // never share a boundary vertex.
    let claim = |labels: &mut [u32], p: usize, label: u32, queue: &mut VecDeque<usize>| {
        let contested = neighbours(p).into_iter().flatten().any(|q| labels[q] != 0 && labels[q] != BLOCKED && labels[q] != label);
        if contested {
            labels[p] = BLOCKED;
        } else {
            labels[p] = label;
            queue.push_back(p);
        }
    };
    let mut labels = vec![0u32; w * h];
    // Seed depth of each region, indexed by label - 1.
    let mut seeds: Vec<i32> = Vec::new();
    let mut queue = VecDeque::new();
    for level in 0..=top {
        let bucket = &buckets[level as usize];
        let open = |labels: &[u32], q: usize| labels[q] == 0 && data[q] == level;
        let reach = |labels: &[u32], q: usize| labels[q] != 0 && labels[q] != BLOCKED && seeds[labels[q] as usize - 1] + opts.fill_margin as i32 >= level;
        for &p in bucket {
            if let Some(q) = neighbours(p).into_iter().flatten().find(|&q| reach(&labels, q)) {
                let label = labels[q];
                claim(&mut labels, p, label, &mut queue);
            }
        }
        while let Some(p) = queue.pop_front() {
            let label = labels[p];
            for q in neighbours(p).into_iter().flatten() {
                if open(&labels, q) {
                    claim(&mut labels, q, label, &mut queue);
                }
            }
        }
        for &p in bucket {
            if labels[p] != 0 {
                continue;
            }
            seeds.push(level);
            let label = seeds.len() as u32;
            labels[p] = label;
            queue.push_back(p);
            while let Some(p) = queue.pop_front() {
                for q in neighbours(p).into_iter().flatten() {
                    if open(&labels, q) {
                        claim(&mut labels, q, label, &mut queue);
                    }
                }
            }
        }
    }
    let mut comps: Vec<Component> = seeds
        .iter()
        .enumerate()
        .map(|(k, &depth)| Component { label: k as u32 + 1, first: usize::MAX, size: 0, depth, x0: w, x1: 0, y0: h, y1: 0 })
        .collect();
    for (p, l) in labels.iter_mut().enumerate() {
        if *l == BLOCKED {
            *l = 0;
        }
        if *l == 0 {
            continue;
        }
        let c = &mut comps[*l as usize - 1];
        let (x, y) = (p % w, p / w);
        c.first = c.first.min(p);
        c.size += 1;
        c.x0 = c.x0.min(x);
        c.x1 = c.x1.max(x);
        c.y0 = c.y0.min(y);
        c.y1 = c.y1.max(y);
    }
    (labels, comps)
}

/// Twice-scaled vertex coordinates: `(2i + 1, 2j)` is the midpoint between
/// pixels `(i, j)` and `(i + 1, j)`, `(2i, 2j + 1)` between `(i, j)` and
/// `(i, j + 1)`.
fn shoelace(lp: &[Key]) -> f64 {
    let n = lp.len();
    let mut s = 0.0;
    for k in 0..n {
        let (a, b) = (lp[k], lp[(k + 1) % n]);
        s += f64::from(a.0) * f64::from(b.1) - f64::from(b.0) * f64::from(a.1);
    }
    s / 8.0
}

/// Closed loops of the component boundary, oriented with the component on
/// the left, and the number of open pieces that reach the grid edge.
fn trace_component(labels: &[u32], w: usize, h: usize, c: &Component) -> (Vec<Vec<Key>>, usize) {
    if w < 2 || h < 2 {
        return (Vec::new(), 0);
    }
    let cx0 = c.x0.saturating_sub(1);
    let cy0 = c.y0.saturating_sub(1);
    let cx1 = c.x1.min(w - 2);
    let cy1 = c.y1.min(h - 2);
    let mut next: BTreeMap<Key, Key> = BTreeMap::new();
    let mut has_incoming: BTreeMap<Key, ()> = BTreeMap::new();
    for j in cy0..=cy1 {
        for i in cx0..=cx1 {
            let at = |x: usize, y: usize| labels[y * w + x] == c.label;
            let mask = at(i, j) as u8 | (at(i + 1, j) as u8) << 1 | (at(i + 1, j + 1) as u8) << 2 | (at(i, j + 1) as u8) << 3;
            let (i2, j2) = (2 * i as u32, 2 * j as u32);
            let s = (i2 + 1, j2);
            let e = (i2 + 2, j2 + 1);
            let n = (i2 + 1, j2 + 2);
            let wv = (i2, j2 + 1);
            let segs: &[(Key, Key)] = match mask {
                1 => &[(s, wv)],
                2 => &[(e, s)],
                3 => &[(e, wv)],
                4 => &[(n, e)],
                5 => &[(s, wv), (n, e)],
                6 => &[(n, s)],
                7 => &[(n, wv)],
                8 => &[(wv, n)],
                9 => &[(s, n)],
                10 => &[(e, s), (wv, n)],
                11 => &[(e, n)],
                12 => &[(wv, e)],
                13 => &[(s, e)],
                14 => &[(wv, s)],
                _ => &[],
            };
            for &(a, b) in segs {
                next.insert(a, b);
                has_incoming.insert(b, ());
            }
        }
    }
    let mut open = 0;
    // Open pieces start at a vertex without an incoming segment.
    let starts: Vec<Key> = next.keys().copied().filter(|k| !has_incoming.contains_key(k)).collect();
    for s in starts {
        open += 1;
        let mut cur = s;
        while let Some(n) = next.remove(&cur) {
            cur = n;
        }
    }
    let mut loops = Vec::new();
    while let Some((&start, _)) = next.iter().next() {
        let mut lp = Vec::new();
        let mut cur = start;
        while let Some(n) = next.remove(&cur) {
            lp.push(cur);
            cur = n;
        }
        if cur == start {
            loops.push(lp);
        } else {
            open += 1;
        }
    }
    (loops, open)
}
