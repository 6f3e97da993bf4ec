//! Small geometric helpers shared by the scene and channel code.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

pub type Vec3 = Vector3<f64>;

/// Vertical cylinder standing on `base_center`, used for human and object blockers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderBlocker {
    pub base_center: Vec3,
    pub radius: f64,
    pub height: f64,
}

impl CylinderBlocker {
    pub const DEFAULT_RADIUS: f64 = 0.15;
    pub const DEFAULT_HEIGHT: f64 = 1.65;

    pub fn person_at(x: f64, y: f64) -> Self {
        Self {
            base_center: Vec3::new(x, y, 0.0),
            radius: Self::DEFAULT_RADIUS,
            height: Self::DEFAULT_HEIGHT,
        }
    }
}

/// Returns true iff the open segment `(a, b)` passes strictly within `radius` of the
/// cylinder axis at a height inside `[base, base + height]`.
///
/// Tangent contact (distance exactly equal to the radius) does not block.
pub fn segment_intersects_cylinder(a: &Vec3, b: &Vec3, blocker: &CylinderBlocker) -> bool {
    let c = blocker.base_center;
    let d = b - a;

    // Closed parameter interval [s0, s1] where the line is inside the height slab.
    let (z_lo, z_hi) = (c.z, c.z + blocker.height);
    let (s0, s1) = if d.z.abs() < f64::EPSILON {
        if a.z < z_lo || a.z > z_hi {
            return false;
        }
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        let ta = (z_lo - a.z) / d.z;
        let tb = (z_hi - a.z) / d.z;
        (ta.min(tb), ta.max(tb))
    };

    // Open parameter interval (q0, q1) where the horizontal distance to the axis is
    // strictly below the radius: roots of |p + t d_xy|^2 = r^2.
    let (px, py) = (a.x - c.x, a.y - c.y);
    let qa = d.x * d.x + d.y * d.y;
    let qb = 2.0 * (px * d.x + py * d.y);
    let qc = px * px + py * py - blocker.radius * blocker.radius;
    let (q0, q1) = if qa <= f64::EPSILON * f64::EPSILON {
        if qc >= 0.0 {
            return false;
        }
        (f64::NEG_INFINITY, f64::INFINITY)
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            return false;
        }
        let root = disc.sqrt();
        ((-qb - root) / (2.0 * qa), (-qb + root) / (2.0 * qa))
    };

    // Open segment (0, 1) intersected with the open radial interval, then with the
    // closed slab interval.
    let lo = q0.max(0.0);
    let hi = q1.min(1.0);
    lo < hi && s0 < hi && s1 > lo && s0 <= s1
}
