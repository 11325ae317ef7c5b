//! Polygon clipping against axis-aligned rectangles.

use super::Rect;

/// Signed shoelace area; positive for counterclockwise vertex order.
pub fn signed_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for (k, p) in poly.iter().enumerate() {
        let q = poly[(k + 1) % poly.len()];
        acc += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * acc
}

#[derive(Clone, Copy)]
enum Edge {
    Left(f64),
    Right(f64),
    Bottom(f64),
    Top(f64),
}

impl Edge {
    fn inside(self, p: [f64; 2]) -> bool {
        match self {
            Edge::Left(x) => p[0] >= x,
            Edge::Right(x) => p[0] <= x,
            Edge::Bottom(y) => p[1] >= y,
            Edge::Top(y) => p[1] <= y,
        }
    }

    fn intersect(self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        match self {
            Edge::Left(x) | Edge::Right(x) => {
                let t = (x - a[0]) / (b[0] - a[0]);
                [x, a[1] + t * (b[1] - a[1])]
            }
            Edge::Bottom(y) | Edge::Top(y) => {
                let t = (y - a[1]) / (b[1] - a[1]);
                [a[0] + t * (b[0] - a[0]), y]
            }
        }
    }
}

/// Sutherland-Hodgman clip of `subject` (any simple polygon) to `window`.
///
/// Concave subjects can come back with zero-width bridges along the window
/// boundary; they contribute nothing to the area.
pub fn clip_to_rect(subject: &[[f64; 2]], window: &Rect) -> Vec<[f64; 2]> {
    let edges = [
        Edge::Left(window.x0),
        Edge::Right(window.x1),
        Edge::Bottom(window.y0),
        Edge::Top(window.y1),
    ];
    let mut output = subject.to_vec();
    let mut input = Vec::with_capacity(subject.len() + 4);
    for edge in edges {
        if output.is_empty() {
            break;
        }
        std::mem::swap(&mut input, &mut output);
        output.clear();
        let mut prev = *input.last().unwrap();
        for &cur in input.iter() {
            match (edge.inside(prev), edge.inside(cur)) {
                (true, true) => output.push(cur),
                (true, false) => output.push(edge.intersect(prev, cur)),
                (false, true) => {
                    output.push(edge.intersect(prev, cur));
                    output.push(cur);
                }
                (false, false) => {}
            }
            prev = cur;
        }
    }
    output
}

pub fn clipped_area(subject: &[[f64; 2]], window: &Rect) -> f64 {
    signed_area(&clip_to_rect(subject, window)).abs()
}

#[inline]
fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn within_box(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0])
        && p[0] <= a[0].max(b[0])
        && p[1] >= a[1].min(b[1])
        && p[1] <= a[1].max(b[1])
}

pub fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    orient(a, b, p) == 0.0 && within_box(a, b, p)
}

/// Closed-segment intersection test, touching and collinear overlap included.
pub fn segments_intersect(p1: [f64; 2], p2: [f64; 2], p3: [f64; 2], p4: [f64; 2]) -> bool {
    let d1 = orient(p3, p4, p1);
    let d2 = orient(p3, p4, p2);
    let d3 = orient(p1, p2, p3);
    let d4 = orient(p1, p2, p4);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && within_box(p3, p4, p1))
        || (d2 == 0.0 && within_box(p3, p4, p2))
        || (d3 == 0.0 && within_box(p1, p2, p3))
        || (d4 == 0.0 && within_box(p1, p2, p4))
}

/// True when some part of segment `a`-`b` lies strictly inside `rect`.
pub fn segment_enters_interior(a: [f64; 2], b: [f64; 2], rect: &Rect) -> bool {
    // Liang-Barsky against the closed rectangle, then test the chord midpoint.
    let d = [b[0] - a[0], b[1] - a[1]];
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    let checks = [
        (-d[0], a[0] - rect.x0),
        (d[0], rect.x1 - a[0]),
        (-d[1], a[1] - rect.y0),
        (d[1], rect.y1 - a[1]),
    ];
    for (p, q) in checks {
        if p == 0.0 {
            if q < 0.0 {
                return false;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                t0 = t0.max(r);
            } else {
                t1 = t1.min(r);
            }
        }
    }
    if t0 > t1 {
        return false;
    }
    let tm = 0.5 * (t0 + t1);
    let m = [a[0] + tm * d[0], a[1] + tm * d[1]];
    m[0] > rect.x0 && m[0] < rect.x1 && m[1] > rect.y0 && m[1] < rect.y1
}
