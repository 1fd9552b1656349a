//! Static 2D kd-tree for radius and nearest-neighbour queries.
//!
//! The tree only prunes; every reported hit has been re-checked with the
//! exact Euclidean distance, so query results never depend on tree layout.

use crate::geometry::Point;

const LEAF: usize = 16;
const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    lo: u32,
    hi: u32,
    split: f64,
    axis: u8,
    left: u32,
    right: u32,
}

#[derive(Debug, Clone)]
pub struct KdTree {
    pts: Vec<Point>,
    perm: Vec<u32>,
    nodes: Vec<Node>,
}

fn coord(p: Point, axis: u8) -> f64 {
    if axis == 0 {
        p.x
    } else {
        p.y
    }
}

impl KdTree {
    pub fn new(points: &[Point]) -> Self {
        let mut tree = KdTree {
            pts: points.to_vec(),
            perm: (0..points.len() as u32).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build(0, points.len());
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    fn build(&mut self, lo: usize, hi: usize) -> u32 {
        let id = self.nodes.len() as u32;
        self.nodes.push(Node {
            lo: lo as u32,
            hi: hi as u32,
            split: 0.0,
            axis: 0,
            left: NONE,
            right: NONE,
        });
        if hi - lo <= LEAF {
            return id;
        }
        let (mut minx, mut maxx, mut miny, mut maxy) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &i in &self.perm[lo..hi] {
            let p = self.pts[i as usize];
            minx = minx.min(p.x);
            maxx = maxx.max(p.x);
            miny = miny.min(p.y);
            maxy = maxy.max(p.y);
        }
        let axis = u8::from(maxy - miny > maxx - minx);
        let mid = lo + (hi - lo) / 2;
        let pts = &self.pts;
        self.perm[lo..hi].select_nth_unstable_by(mid - lo, |&a, &b| {
            coord(pts[a as usize], axis).total_cmp(&coord(pts[b as usize], axis))
        });
        let split = coord(self.pts[self.perm[mid] as usize], axis);
        let left = self.build(lo, mid);
        let right = self.build(mid, hi);
        let n = &mut self.nodes[id as usize];
        n.split = split;
        n.axis = axis;
        n.left = left;
        n.right = right;
        id
    }

    /// Calls `visit(index, distance)` for every point with `d(p, center) ≤ r`.
    pub fn for_each_within<F: FnMut(usize, f64)>(&self, center: Point, r: f64, mut visit: F) {
        if self.nodes.is_empty() {
            return;
        }
        let slack = r * (1.0 + 1e-12) + 1e-300;
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id as usize];
            if n.left == NONE {
                for &i in &self.perm[n.lo as usize..n.hi as usize] {
                    let d = self.pts[i as usize].dist(center);
                    if d <= r {
                        visit(i as usize, d);
                    }
                }
                continue;
            }
            let c = coord(center, n.axis);
            if c - n.split <= slack {
                stack.push(n.left);
            }
            if n.split - c <= slack {
                stack.push(n.right);
            }
        }
    }

    /// Indices within distance `r` (closed ball), sorted ascending.
    pub fn within(&self, center: Point, r: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(center, r, |i, _| out.push(i));
        out.sort_unstable();
        out
    }

    /// Nearest point; ties go to the lowest index.
    pub fn nearest(&self, q: Point) -> Option<(usize, f64)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (usize::MAX, f64::INFINITY);
        let mut stack = vec![0u32];
        while let Some(id) = stack.pop() {
            let n = &self.nodes[id as usize];
            if n.left == NONE {
                for &i in &self.perm[n.lo as usize..n.hi as usize] {
                    let d = self.pts[i as usize].dist(q);
                    let i = i as usize;
                    if d < best.1 || (d == best.1 && i < best.0) {
                        best = (i, d);
                    }
                }
                continue;
            }
            let diff = coord(q, n.axis) - n.split;
            let (near, far) = if diff <= 0.0 { (n.left, n.right) } else { (n.right, n.left) };
            if diff.abs() <= best.1 * (1.0 + 1e-12) {
                stack.push(far);
            }
            stack.push(near);
        }
        Some(best)
    }
}
