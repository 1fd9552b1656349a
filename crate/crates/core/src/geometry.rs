//! Planar primitives: points, segments, axis-aligned rectangles and the
//! exact area of a disc clipped to a rectangle.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A point of the plane. Serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dist(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Lexicographic order on (x, y); used wherever a fixed visiting order is needed.
    pub fn lex_cmp(&self, other: &Point) -> std::cmp::Ordering {
        self.x.total_cmp(&other.x).then(self.y.total_cmp(&other.y))
    }
}

impl From<[f64; 2]> for Point {
    fn from(v: [f64; 2]) -> Self {
        Point::new(v[0], v[1])
    }
}

impl From<Point> for [f64; 2] {
    fn from(p: Point) -> Self {
        [p.x, p.y]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub a: Point,
    pub b: Point,
}

impl Segment {
    pub const fn new(a: Point, b: Point) -> Self {
        Self { a, b }
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn point_at(&self, t: f64) -> Point {
        Point::new(
            self.a.x + t * (self.b.x - self.a.x),
            self.a.y + t * (self.b.y - self.a.y),
        )
    }

    pub fn dist_to(&self, p: Point) -> f64 {
        let (dx, dy) = (self.b.x - self.a.x, self.b.y - self.a.y);
        let len2 = dx * dx + dy * dy;
        if len2 == 0.0 {
            return p.dist(self.a);
        }
        let t = (((p.x - self.a.x) * dx + (p.y - self.a.y) * dy) / len2).clamp(0.0, 1.0);
        p.dist(self.point_at(t))
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        Self { x0, y0, x1, y1 }
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.x0 && p.x <= self.x1 && p.y >= self.y0 && p.y <= self.y1
    }
}

/// `∫ sqrt(r² − x²) dx`.
fn half_chord_primitive(r: f64, x: f64) -> f64 {
    let x = x.clamp(-r, r);
    let s = (r * r - x * x).max(0.0).sqrt();
    0.5 * (x * s + r * r * (x / r).asin())
}

/// Area of `{|p| < r, p.x ≤ xc, p.y ≤ yc}` for a disc centered at the origin.
fn quadrant_area(r: f64, xc: f64, yc: f64) -> f64 {
    let hi = xc.min(r);
    if hi <= -r || yc <= -r {
        return 0.0;
    }
    let p = |x: f64| half_chord_primitive(r, x);
    if yc >= r {
        return 2.0 * (p(hi) - p(-r));
    }
    let c = (r * r - yc * yc).sqrt();
    let piece = |a: f64, b: f64, f: &dyn Fn(f64) -> f64| {
        let b = b.min(hi);
        if b > a {
            f(b) - f(a)
        } else {
            0.0
        }
    };
    let inner = |x: f64| yc * x + p(x);
    let outer = |x: f64| if yc >= 0.0 { 2.0 * p(x) } else { 0.0 };
    piece(-r, -c, &outer) + piece(-c, c, &inner) + piece(c, r, &outer)
}

/// Exact area of `B(center, r) ∩ rect`.
pub fn disc_rect_area(center: Point, r: f64, rect: &Rect) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let (x0, x1) = (rect.x0 - center.x, rect.x1 - center.x);
    let (y0, y1) = (rect.y0 - center.y, rect.y1 - center.y);
    let a = quadrant_area(r, x1, y1) - quadrant_area(r, x0, y1) - quadrant_area(r, x1, y0)
        + quadrant_area(r, x0, y0);
    a.clamp(0.0, (PI * r * r).min(rect.area()))
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: Point, vertices: &[Point]) -> bool {
    let n = vertices.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Shoelace area, absolute value.
pub fn polygon_area(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        s += a.x * b.y - b.x * a.y;
    }
    0.5 * s.abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn segment_distance() {
        let s = Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0));
        assert_relative_eq!(s.dist_to(Point::new(0.5, 0.3)), 0.3);
        assert_relative_eq!(s.dist_to(Point::new(2.0, 0.0)), 1.0);
        assert_relative_eq!(s.dist_to(Point::new(-3.0, 4.0)), 5.0);
    }

    #[test]
    fn disc_inside_rect_is_full_area() {
        let r = Rect::new(-2.0, -2.0, 2.0, 2.0);
        assert_relative_eq!(disc_rect_area(Point::new(0.1, -0.2), 1.0, &r), PI, epsilon = 1e-12);
    }

    #[test]
    fn half_and_quarter_discs() {
        let upper = Rect::new(-5.0, 0.0, 5.0, 5.0);
        assert_relative_eq!(disc_rect_area(Point::new(0.0, 0.0), 2.0, &upper), 2.0 * PI, epsilon = 1e-12);
        let quad = Rect::new(0.0, 0.0, 5.0, 5.0);
        assert_relative_eq!(disc_rect_area(Point::new(0.0, 0.0), 1.0, &quad), PI / 4.0, epsilon = 1e-12);
    }

    #[test]
    fn rect_inside_disc_is_rect_area() {
        let r = Rect::new(0.1, 0.2, 0.3, 0.25);
        assert_relative_eq!(disc_rect_area(Point::new(0.2, 0.2), 1.0, &r), r.area(), epsilon = 1e-14);
    }

    #[test]
    fn matches_riemann_sum() {
        let rect = Rect::new(0.2, -0.3, 1.1, 0.4);
        let c = Point::new(0.5, 0.1);
        let r = 0.6;
        let n = 2000;
        let (dx, dy) = (rect.width() / n as f64, rect.height() / n as f64);
        let mut count = 0usize;
        for i in 0..n {
            for j in 0..n {
                let p = Point::new(rect.x0 + (i as f64 + 0.5) * dx, rect.y0 + (j as f64 + 0.5) * dy);
                if p.dist(c) < r {
                    count += 1;
                }
            }
        }
        let approx = count as f64 * dx * dy;
        assert_relative_eq!(disc_rect_area(c, r, &rect), approx, max_relative = 2e-3);
    }

    #[test]
    fn polygon_helpers() {
        let l = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 0.5),
            Point::new(0.5, 0.5),
            Point::new(0.5, 1.0),
            Point::new(0.0, 1.0),
        ];
        assert_relative_eq!(polygon_area(&l), 0.75);
        assert!(point_in_polygon(Point::new(0.25, 0.75), &l));
        assert!(!point_in_polygon(Point::new(0.75, 0.75), &l));
    }

    #[test]
    fn point_serializes_as_pair() {
        let s = serde_json::to_string(&Point::new(1.5, -2.0)).unwrap();
        assert_eq!(s, "[1.5,-2.0]");
        let p: Point = serde_json::from_str("[0.25,4]").unwrap();
        assert_eq!(p, Point::new(0.25, 4.0));
    }
}
