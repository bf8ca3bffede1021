//! Piecewise paths built from straight segments and circular arcs.
//!
//! A [`PathCurve`] maps arc length `s` to a [`Pose`] whose heading equals the
//! curve tangent. Queries outside `[0, total_length]` extrapolate straight
//! along the end headings, which lets path-constrained vehicles be placed
//! before the curve start when episodes are rolled backwards in time.

use crate::error::{Error, Result};
use crate::geometry::Pose;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    Straight {
        length: f64,
    },
    /// Circular arc; positive `angle` turns left (counterclockwise).
    Arc {
        radius: f64,
        angle: f64,
    },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Straight { length } => length,
            Segment::Arc { radius, angle } => radius * angle.abs(),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Segment::Straight { length } => length > 0.0 && length.is_finite(),
            Segment::Arc { radius, angle } => {
                radius > 0.0 && radius.is_finite() && angle != 0.0 && angle.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::BadSegment)
        }
    }

    /// Pose after traveling `d` along this segment from `from` (0 <= d <= length).
    fn advance(&self, from: &Pose, d: f64) -> Pose {
        match *self {
            Segment::Straight { .. } => {
                let (hx, hy) = from.heading_vec();
                Pose::new(from.x + d * hx, from.y + d * hy, from.theta)
            }
            Segment::Arc { radius, angle } => {
                let side = angle.signum();
                let (hx, hy) = from.heading_vec();
                // Center sits perpendicular to the heading, on the turn side.
                let cx = from.x - side * radius * hy;
                let cy = from.y + side * radius * hx;
                let alpha0 = (from.y - cy).atan2(from.x - cx);
                let delta = side * d / radius;
                let alpha = alpha0 + delta;
                Pose::new(
                    cx + radius * alpha.cos(),
                    cy + radius * alpha.sin(),
                    from.theta + delta,
                )
            }
        }
    }
}

/// Piecewise curve parameterized by arc length from a start pose.
#[derive(Debug, Clone, PartialEq)]
pub struct PathCurve {
    start: Pose,
    segments: Vec<Segment>,
    /// Pose at the start of each segment, plus the final end pose.
    joints: Vec<Pose>,
    /// Cumulative arc length at each joint.
    cum: Vec<f64>,
}

impl PathCurve {
    pub fn new(start: Pose, segments: Vec<Segment>) -> Result<Self> {
        for seg in &segments {
            seg.validate()?;
        }
        let mut curve = PathCurve {
            start,
            segments,
            joints: Vec::new(),
            cum: Vec::new(),
        };
        curve.rebuild();
        Ok(curve)
    }

    fn rebuild(&mut self) {
        self.joints = Vec::with_capacity(self.segments.len() + 1);
        self.cum = Vec::with_capacity(self.segments.len() + 1);
        let mut pose = self.start;
        let mut s = 0.0;
        self.joints.push(pose);
        self.cum.push(s);
        for seg in &self.segments {
            pose = seg.advance(&pose, seg.length());
            s += seg.length();
            self.joints.push(pose);
            self.cum.push(s);
        }
    }

    pub fn total_length(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    /// Pose at arc length `s`; extrapolates along the boundary headings
    /// outside `[0, total_length]`.
    pub fn pose_at(&self, s: f64) -> Pose {
        if s < 0.0 {
            let p = self.joints[0];
            let (hx, hy) = p.heading_vec();
            return Pose::new(p.x + s * hx, p.y + s * hy, p.theta);
        }
        if s >= self.total_length() {
            let p = *self.joints.last().unwrap();
            let d = s - self.total_length();
            let (hx, hy) = p.heading_vec();
            return Pose::new(p.x + d * hx, p.y + d * hy, p.theta);
        }
        // cum is sorted; find the segment containing s.
        let idx = match self
            .cum
            .binary_search_by(|c| c.partial_cmp(&s).expect("finite arc length"))
        {
            Ok(i) => i.min(self.segments.len() - 1),
            Err(i) => i - 1,
        };
        self.segments[idx].advance(&self.joints[idx], s - self.cum[idx])
    }
}

/// Arc-length pair minimizing the distance between two curves' poses, found
/// by coarse grid search plus local refinement. Returns `(s_a, s_b, dist)`.
pub fn closest_approach(a: &PathCurve, b: &PathCurve) -> (f64, f64, f64) {
    let coarse = 0.5;
    let steps = |c: &PathCurve| (c.total_length() / coarse).ceil() as usize + 1;
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..steps(a) {
        let sa = (i as f64 * coarse).min(a.total_length());
        let pa = a.pose_at(sa);
        for j in 0..steps(b) {
            let sb = (j as f64 * coarse).min(b.total_length());
            let pb = b.pose_at(sb);
            let d = (pa.x - pb.x).hypot(pa.y - pb.y);
            if d < best.2 {
                best = (sa, sb, d);
            }
        }
    }
    // Refine around the coarse optimum.
    let mut window = coarse;
    for _ in 0..6 {
        let (ca, cb, _) = best;
        for i in -10..=10 {
            let sa = ca + i as f64 * window / 10.0;
            let pa = a.pose_at(sa);
            for j in -10..=10 {
                let sb = cb + j as f64 * window / 10.0;
                let pb = b.pose_at(sb);
                let d = (pa.x - pb.x).hypot(pa.y - pb.y);
                if d < best.2 {
                    best = (sa, sb, d);
                }
            }
        }
        window /= 10.0;
    }
    best
}
