//! Exact planar overlap testing between oriented rectangular vehicle
//! footprints.
//!
//! Overlap uses the separating-axis test over the four edge normals, which is
//! sufficient for convex rectangles. Touching boundaries count as collision
//! (closed-set semantics).

use crate::error::{Error, Result};

/// Normalize an angle to the half-open interval `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let r = theta.rem_euclid(two_pi); // [0, 2*pi)
    if r > std::f64::consts::PI {
        r - two_pi
    } else {
        r
    }
}

/// Planar position and heading. The heading is measured counterclockwise from
/// the +x axis and is normalized to `(-pi, pi]` on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        assert!(theta.is_finite(), "pose heading must be finite");
        Pose {
            x,
            y,
            theta: normalize_angle(theta),
        }
    }

    /// Unit vector along the heading.
    pub fn heading_vec(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }
}

/// Rectangle centered on a pose: `length` extends along the heading, `width`
/// perpendicular to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedRect {
    pub center: Pose,
    pub length: f64,
    pub width: f64,
}

impl OrientedRect {
    pub fn new(center: Pose, length: f64, width: f64) -> Result<Self> {
        if !(length > 0.0 && width > 0.0) || !length.is_finite() || !width.is_finite() {
            return Err(Error::BadRectDimensions { length, width });
        }
        Ok(OrientedRect {
            center,
            length,
            width,
        })
    }

    /// Corner coordinates in counterclockwise order.
    pub fn corners(&self) -> [(f64, f64); 4] {
        let (hx, hy) = self.center.heading_vec();
        let (px, py) = (-hy, hx);
        let (hl, hw) = (self.length / 2.0, self.width / 2.0);
        let c = (self.center.x, self.center.y);
        [
            (c.0 + hl * hx + hw * px, c.1 + hl * hy + hw * py),
            (c.0 - hl * hx + hw * px, c.1 - hl * hy + hw * py),
            (c.0 - hl * hx - hw * px, c.1 - hl * hy - hw * py),
            (c.0 + hl * hx - hw * px, c.1 + hl * hy - hw * py),
        ]
    }

    /// Half-extent of the projection onto the unit axis `(ux, uy)`.
    fn projection_radius(&self, ux: f64, uy: f64) -> f64 {
        let (hx, hy) = self.center.heading_vec();
        let (px, py) = (-hy, hx);
        (self.length / 2.0) * (hx * ux + hy * uy).abs()
            + (self.width / 2.0) * (px * ux + py * uy).abs()
    }
}

/// True iff the closed rectangles intersect; touching edges count as overlap.
///
/// Separating-axis test over the 4 candidate axes (two edge normals per
/// rectangle). The rectangles are disjoint iff some axis has a strictly
/// positive gap between the projected intervals.
pub fn rect_overlap(a: &OrientedRect, b: &OrientedRect) -> bool {
    let dx = b.center.x - a.center.x;
    let dy = b.center.y - a.center.y;
    for rect in [a, b] {
        let (hx, hy) = rect.center.heading_vec();
        for (ux, uy) in [(hx, hy), (-hy, hx)] {
            let dist = (dx * ux + dy * uy).abs();
            if dist > a.projection_radius(ux, uy) + b.projection_radius(ux, uy) {
                return false;
            }
        }
    }
    true
}

/// Grow a rectangle by `margin` on every side; the center is unchanged.
pub fn inflate(r: &OrientedRect, margin: f64) -> Result<OrientedRect> {
    if !(margin >= 0.0) {
        return Err(Error::NegativeMargin(margin));
    }
    OrientedRect::new(r.center, r.length + 2.0 * margin, r.width + 2.0 * margin)
}
