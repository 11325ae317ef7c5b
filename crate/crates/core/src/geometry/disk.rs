//! Closed-form area of a unit disk intersected with an axis-aligned rectangle.
//!
//! With `s(u) = sqrt(1 - u^2)`, the disk slice `{v : -s(u) <= v <= y}` at
//! abscissa `u` has length `max(0, min(y, s(u)) + s(u))`. Integrating that
//! over `u <= x` gives the corner function `F(x, y)`, and the rectangle
//! area follows by inclusion-exclusion over its four corners. Every piece
//! integrates `s` in closed form, `(u s(u) + asin u) / 2`.

use super::Rect;

#[inline]
fn half_chord_primitive(u: f64) -> f64 {
    0.5 * (u * (1.0 - u * u).max(0.0).sqrt() + u.asin())
}

#[inline]
fn half_chord_integral(a: f64, b: f64) -> f64 {
    if b > a {
        half_chord_primitive(b) - half_chord_primitive(a)
    } else {
        0.0
    }
}

/// Area of `{(u, v) in unit disk : u <= x, v <= y}`.
fn corner_area(x: f64, y: f64) -> f64 {
    let x = x.clamp(-1.0, 1.0);
    if x <= -1.0 || y <= -1.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 2.0 * half_chord_integral(-1.0, x);
    }
    let h = (1.0 - y * y).sqrt();
    // where s(u) >= |y| the slice is clipped by y
    let (a, b) = (-h, x.min(h));
    let mut area = 0.0;
    if b > a {
        area += y * (b - a) + half_chord_integral(a, b);
    }
    if y > 0.0 {
        // outside |u| < h the whole chord lies below y
        area += 2.0 * half_chord_integral(-1.0, x.min(-h));
        area += 2.0 * half_chord_integral(h, x);
    }
    area
}

pub fn unit_disk_rect_area(r: &Rect) -> f64 {
    let a = corner_area(r.x1, r.y1) - corner_area(r.x0, r.y1) - corner_area(r.x1, r.y0)
        + corner_area(r.x0, r.y0);
    a.max(0.0)
}
