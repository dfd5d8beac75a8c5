//! Static 3-d tree over points on the unit sphere with nearest and farthest
//! queries.

use alloc::vec::Vec;

use super::dist3;

const LEAF: usize = 8;

#[derive(Debug, Clone)]
struct Node {
    lo: [f64; 3],
    hi: [f64; 3],
    start: usize,
    end: usize,
    children: Option<(usize, usize)>,
}

#[derive(Debug, Clone)]
pub struct KdTree<'a> {
    pts: &'a [[f64; 3]],
    idx: Vec<usize>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    pub fn new(pts: &'a [[f64; 3]]) -> Self {
        let mut t = KdTree { pts, idx: (0..pts.len()).collect(), nodes: Vec::new() };
        if !pts.is_empty() {
            t.build(0, pts.len());
        }
        t
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.idx[start..end] {
            for a in 0..3 {
                lo[a] = lo[a].min(self.pts[i][a]);
                hi[a] = hi[a].max(self.pts[i][a]);
            }
        }
        let id = self.nodes.len();
        self.nodes.push(Node { lo, hi, start, end, children: None });
        if end - start > LEAF {
            let axis = (0..3).fold(0, |b, a| if hi[a] - lo[a] > hi[b] - lo[b] { a } else { b });
            let mid = (start + end) / 2;
            let pts = self.pts;
            self.idx[start..end].select_nth_unstable_by(mid - start, |&a, &b| pts[a][axis].total_cmp(&pts[b][axis]));
            let l = self.build(start, mid);
            let r = self.build(mid, end);
            self.nodes[id].children = Some((l, r));
        }
        id
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    fn min_box(node: &Node, q: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            let d = if q[a] < node.lo[a] {
                node.lo[a] - q[a]
            } else if q[a] > node.hi[a] {
                q[a] - node.hi[a]
            } else {
                0.0
            };
            s += d * d;
        }
        libm::sqrt(s)
    }

    fn max_box(node: &Node, q: &[f64; 3]) -> f64 {
        let mut s = 0.0;
        for a in 0..3 {
            let d = f64::max(libm::fabs(q[a] - node.lo[a]), libm::fabs(q[a] - node.hi[a]));
            s += d * d;
        }
        libm::sqrt(s)
    }

    /// Nearest point to `q` strictly closer than `bound`, as `(distance, index)`.
    pub fn nearest_below(&self, q: &[f64; 3], bound: f64) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        let mut limit = bound;
        if self.nodes.is_empty() {
            return None;
        }
        let mut stack = alloc::vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if Self::min_box(node, q) >= limit {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    let (dl, dr) = (Self::min_box(&self.nodes[l], q), Self::min_box(&self.nodes[r], q));
                    if dl <= dr {
                        stack.push(r);
                        stack.push(l);
                    } else {
                        stack.push(l);
                        stack.push(r);
                    }
                }
                None => {
                    for &i in &self.idx[node.start..node.end] {
                        let d = dist3(q, &self.pts[i]);
                        if d < limit {
                            limit = d;
                            best = Some((d, i));
                        }
                    }
                }
            }
        }
        best
    }

    pub fn nearest(&self, q: &[f64; 3]) -> Option<(f64, usize)> {
        self.nearest_below(q, f64::INFINITY)
    }

    /// Farthest point from `q` strictly farther than `threshold`.
    pub fn farthest_above(&self, q: &[f64; 3], threshold: f64) -> Option<(f64, usize)> {
        let mut best: Option<(f64, usize)> = None;
        let mut limit = threshold;
        if self.nodes.is_empty() {
            return None;
        }
        let mut stack = alloc::vec![0usize];
        while let Some(n) = stack.pop() {
            let node = &self.nodes[n];
            if Self::max_box(node, q) <= limit {
                continue;
            }
            match node.children {
                Some((l, r)) => {
                    let (dl, dr) = (Self::max_box(&self.nodes[l], q), Self::max_box(&self.nodes[r], q));
                    if dl >= dr {
                        stack.push(r);
                        stack.push(l);
                    } else {
                        stack.push(l);
                        stack.push(r);
                    }
                }
                None => {
                    for &i in &self.idx[node.start..node.end] {
                        let d = dist3(q, &self.pts[i]);
                        if d > limit {
                            limit = d;
                            best = Some((d, i));
                        }
                    }
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cloud(n: usize, seed: u64) -> Vec<[f64; 3]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| super::super::to_sphere(crate::ExtComplex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))))
            .collect()
    }

    #[test]
    fn queries_match_linear_scan() {
        let pts = cloud(500, 3);
        let tree = KdTree::new(&pts);
        for q in cloud(50, 4) {
            let near = pts.iter().map(|p| dist3(&q, p)).fold(f64::INFINITY, f64::min);
            let far = pts.iter().map(|p| dist3(&q, p)).fold(0.0, f64::max);
            assert_eq!(tree.nearest(&q).unwrap().0, near);
            assert_eq!(tree.farthest_above(&q, 0.0).unwrap().0, far);
            assert!(tree.farthest_above(&q, far).is_none());
        }
    }
}
