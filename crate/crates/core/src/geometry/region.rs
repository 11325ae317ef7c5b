use std::f64::consts::PI;
use std::path::Path;

use super::clip::{self, segment_enters_interior, segments_intersect};
use super::disk::unit_disk_rect_area;
use super::Rect;
use crate::error::{Result, SernError};

/// Simple polygon stored counterclockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<[f64; 2]>,
    area: f64,
    bounds: Rect,
}

impl Polygon {
    /// Validates and orients `vertices`; the polygon closes implicitly.
    ///
    /// Self-intersecting polygons are rejected by an `O(V^2)` edge-pair check.
    pub fn new(mut vertices: Vec<[f64; 2]>) -> Result<Self> {
        if vertices.len() > 3 && vertices.first() == vertices.last() {
            vertices.pop();
        }
        if vertices.len() < 3 {
            return Err(SernError::param("polygon needs at least 3 vertices"));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(SernError::param("polygon vertex is not finite"));
        }
        let n = vertices.len();
        for k in 0..n {
            if vertices[k] == vertices[(k + 1) % n] {
                return Err(SernError::param(format!("polygon has a repeated vertex at {k}")));
            }
        }
        for a in 0..n {
            let (p1, p2) = (vertices[a], vertices[(a + 1) % n]);
            for b in (a + 1)..n {
                let (p3, p4) = (vertices[b], vertices[(b + 1) % n]);
                let adjacent = b == a + 1 || (a == 0 && b == n - 1);
                if adjacent {
                    // neighbours share one vertex; anything more is a fold back
                    let shared = if b == a + 1 { p2 } else { p1 };
                    let other = if b == a + 1 { p4 } else { p3 };
                    let own = if b == a + 1 { p1 } else { p2 };
                    if clip::on_segment(own, shared, other) || clip::on_segment(shared, other, own) {
                        return Err(SernError::param("polygon edges overlap"));
                    }
                } else if segments_intersect(p1, p2, p3, p4) {
                    return Err(SernError::param(format!(
                        "polygon is not simple: edges {a} and {b} intersect"
                    )));
                }
            }
        }
        let mut area = clip::signed_area(&vertices);
        if area < 0.0 {
            vertices.reverse();
            area = -area;
        }
        if area.is_nan() || area <= 0.0 {
            return Err(SernError::param("polygon has zero area"));
        }
        let (mut x0, mut y0, mut x1, mut y1) = (f64::MAX, f64::MAX, f64::MIN, f64::MIN);
        for v in &vertices {
            x0 = x0.min(v[0]);
            y0 = y0.min(v[1]);
            x1 = x1.max(v[0]);
            y1 = y1.max(v[1]);
        }
        Ok(Polygon {
            vertices,
            area,
            bounds: Rect::new(x0, y0, x1, y1),
        })
    }

    /// Parses one `x y` vertex per line; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<Self> {
        let mut vertices = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut coord = || -> Result<f64> {
                fields
                    .next()
                    .and_then(|f| f.parse().ok())
                    .ok_or_else(|| SernError::Format(format!("polygon line {}: expected two reals", lineno + 1)))
            };
            let v = [coord()?, coord()?];
            if fields.next().is_some() {
                return Err(SernError::Format(format!(
                    "polygon line {}: trailing fields",
                    lineno + 1
                )));
            }
            vertices.push(v);
        }
        Polygon::new(vertices)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Polygon::parse(&std::fs::read_to_string(path)?)
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    fn edges(&self) -> impl Iterator<Item = ([f64; 2], [f64; 2])> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        if !self.bounds.contains(p) {
            return false;
        }
        let mut inside = false;
        for (a, b) in self.edges() {
            if clip::on_segment(a, b, p) {
                return true;
            }
            if (a[1] > p[1]) != (b[1] > p[1]) {
                let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
                if p[0] < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    fn covers(&self, r: &Rect) -> bool {
        r.corners().iter().all(|&c| self.contains(c))
            && !self.edges().any(|(a, b)| segment_enters_interior(a, b, r))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    /// `[0, width] x [0, height]`.
    Rectangle { width: f64, height: f64 },
    /// Axis-aligned ellipse centred on the origin.
    Ellipse { a: f64, b: f64 },
    Polygon(Polygon),
}

impl Region {
    pub fn rectangle(width: f64, height: f64) -> Result<Self> {
        if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
            return Err(SernError::param(format!(
                "rectangle {width} x {height} must have positive finite sides"
            )));
        }
        Ok(Region::Rectangle { width, height })
    }

    pub fn unit_square() -> Self {
        Region::Rectangle {
            width: 1.0,
            height: 1.0,
        }
    }

    pub fn ellipse(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(SernError::param(format!(
                "ellipse semi-axes {a}, {b} must be positive and finite"
            )));
        }
        Ok(Region::Ellipse { a, b })
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self> {
        Polygon::new(vertices).map(Region::Polygon)
    }

    pub fn area(&self) -> f64 {
        match self {
            Region::Rectangle { width, height } => width * height,
            Region::Ellipse { a, b } => PI * a * b,
            Region::Polygon(p) => p.area,
        }
    }

    pub fn bounds(&self) -> Rect {
        match *self {
            Region::Rectangle { width, height } => Rect::new(0.0, 0.0, width, height),
            Region::Ellipse { a, b } => Rect::new(-a, -b, a, b),
            Region::Polygon(ref p) => p.bounds,
        }
    }

    /// Membership test; the boundary counts as inside.
    pub fn contains(&self, p: [f64; 2]) -> bool {
        match *self {
            Region::Rectangle { width, height } => {
                p[0] >= 0.0 && p[0] <= width && p[1] >= 0.0 && p[1] <= height
            }
            Region::Ellipse { a, b } => {
                let (u, v) = (p[0] / a, p[1] / b);
                u * u + v * v <= 1.0
            }
            Region::Polygon(ref poly) => poly.contains(p),
        }
    }

    /// True when every point of `r` lies in the region.
    pub fn covers(&self, r: &Rect) -> bool {
        match *self {
            Region::Rectangle { .. } => self.bounds().contains([r.x0, r.y0]) && self.bounds().contains([r.x1, r.y1]),
            Region::Ellipse { .. } => r.corners().iter().all(|&c| self.contains(c)),
            Region::Polygon(ref poly) => poly.covers(r),
        }
    }

    /// Area of `r` intersected with the region.
    pub fn intersection_area(&self, r: &Rect) -> f64 {
        match *self {
            Region::Rectangle { width, height } => {
                let w = (r.x1.min(width) - r.x0.max(0.0)).max(0.0);
                let h = (r.y1.min(height) - r.y0.max(0.0)).max(0.0);
                w * h
            }
            Region::Ellipse { a, b } => {
                if self.covers(r) {
                    return r.area();
                }
                let scaled = Rect::new(r.x0 / a, r.y0 / b, r.x1 / a, r.y1 / b);
                unit_disk_rect_area(&scaled) * a * b
            }
            Region::Polygon(ref poly) => {
                if !poly.bounds.overlaps(r) {
                    0.0
                } else if poly.covers(r) {
                    r.area()
                } else {
                    clip::clipped_area(&poly.vertices, r)
                }
            }
        }
    }
}
