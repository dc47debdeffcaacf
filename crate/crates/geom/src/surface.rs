//! Surface primitives: signed implicit functions, sense queries, and
//! ray-crossing distances.

use crate::vec3::{Axis, Direction, Position, Vec3};

/// Which side of a surface a point lies on. `Positive` is the side where the
/// implicit function is positive; an exact zero maps to `Positive`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sense {
    Negative,
    Positive,
}

impl Sense {
    #[inline]
    pub fn of_value(f: f64) -> Sense {
        if f >= 0.0 {
            Sense::Positive
        } else {
            Sense::Negative
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Sense::Negative => 0,
            Sense::Positive => 1,
        }
    }

    #[inline]
    pub fn flipped(self) -> Sense {
        match self {
            Sense::Negative => Sense::Positive,
            Sense::Positive => Sense::Negative,
        }
    }
}

/// Geometric surface primitive.
///
/// Implicit functions:
/// - axis planes: `f = coord - a`
/// - general plane: `f = n . r - d` with `n` unit
/// - cylinder along z: `f = (x-x0)^2 + (y-y0)^2 - r^2` (outside is positive)
/// - sphere: `f = |r - c|^2 - r^2`
#[derive(Debug, Clone, PartialEq)]
pub enum Surface {
    PlaneX(f64),
    PlaneY(f64),
    PlaneZ(f64),
    GeneralPlane { normal: Vec3, d: f64 },
    CylinderZ { x0: f64, y0: f64, r: f64 },
    Sphere { center: Vec3, r: f64 },
}

impl Surface {
    pub fn general_plane(normal: Vec3, d: f64) -> Surface {
        let n = normal.norm();
        assert!((n - 1.0).abs() <= 1e-12, "general plane normal must be unit length");
        Surface::GeneralPlane { normal, d }
    }

    /// Signed implicit function value at `pos`.
    #[inline]
    pub fn evaluate(&self, pos: Position) -> f64 {
        match *self {
            Surface::PlaneX(a) => pos.x - a,
            Surface::PlaneY(a) => pos.y - a,
            Surface::PlaneZ(a) => pos.z - a,
            Surface::GeneralPlane { normal, d } => normal.dot(pos.as_vec()) - d,
            Surface::CylinderZ { x0, y0, r } => {
                let dx = pos.x - x0;
                let dy = pos.y - y0;
                dx * dx + dy * dy - r * r
            }
            Surface::Sphere { center, r } => {
                let dx = pos.x - center.x;
                let dy = pos.y - center.y;
                let dz = pos.z - center.z;
                dx * dx + dy * dy + dz * dz - r * r
            }
        }
    }

    /// Sense of `pos` relative to this surface (zero ties break positive).
    #[inline]
    pub fn sense_of(&self, pos: Position) -> Sense {
        Sense::of_value(self.evaluate(pos))
    }

    /// Smallest crossing distance strictly greater than `min_dist`, or `None`
    /// when the ray never crosses the surface going forward.
    pub fn distance_to(&self, pos: Position, dir: Direction, min_dist: f64) -> Option<f64> {
        match *self {
            Surface::PlaneX(a) => plane_distance(a - pos.x, dir.u, min_dist),
            Surface::PlaneY(a) => plane_distance(a - pos.y, dir.v, min_dist),
            Surface::PlaneZ(a) => plane_distance(a - pos.z, dir.w, min_dist),
            Surface::GeneralPlane { normal, d } => {
                plane_distance(d - normal.dot(pos.as_vec()), normal.dot(dir.as_vec()), min_dist)
            }
            Surface::CylinderZ { x0, y0, r } => {
                let ox = pos.x - x0;
                let oy = pos.y - y0;
                let a = dir.u * dir.u + dir.v * dir.v;
                let b = 2.0 * (ox * dir.u + oy * dir.v);
                let c = ox * ox + oy * oy - r * r;
                quadric_distance(a, b, c, min_dist)
            }
            Surface::Sphere { center, r } => {
                let ox = pos.x - center.x;
                let oy = pos.y - center.y;
                let oz = pos.z - center.z;
                let a = 1.0;
                let b = 2.0 * (ox * dir.u + oy * dir.v + oz * dir.w);
                let c = ox * ox + oy * oy + oz * oz - r * r;
                quadric_distance(a, b, c, min_dist)
            }
        }
    }

    /// The same surface expressed in a parent frame whose origin offset to the
    /// local frame is `t` (a local point `p` appears at `p + t` in the parent).
    pub fn translated(&self, t: Vec3) -> Surface {
        match *self {
            Surface::PlaneX(a) => Surface::PlaneX(a + t.x),
            Surface::PlaneY(a) => Surface::PlaneY(a + t.y),
            Surface::PlaneZ(a) => Surface::PlaneZ(a + t.z),
            Surface::GeneralPlane { normal, d } => Surface::GeneralPlane {
                normal,
                d: d + normal.dot(t),
            },
            Surface::CylinderZ { x0, y0, r } => Surface::CylinderZ {
                x0: x0 + t.x,
                y0: y0 + t.y,
                r,
            },
            Surface::Sphere { center, r } => Surface::Sphere {
                center: center.add(t),
                r,
            },
        }
    }

    /// Geometric equality within `tol`. Planes compare up to an overall sign
    /// flip of (normal, offset); axis planes and general planes with the
    /// matching normal compare equal.
    pub fn approx_eq(&self, other: &Surface, tol: f64) -> bool {
        let a = self.plane_form();
        let b = other.plane_form();
        match (a, b) {
            (Some((na, da)), Some((nb, db))) => {
                let same = (na.x - nb.x).abs() <= tol
                    && (na.y - nb.y).abs() <= tol
                    && (na.z - nb.z).abs() <= tol
                    && (da - db).abs() <= tol;
                let flipped = (na.x + nb.x).abs() <= tol
                    && (na.y + nb.y).abs() <= tol
                    && (na.z + nb.z).abs() <= tol
                    && (da + db).abs() <= tol;
                same || flipped
            }
            (None, None) => match (self, other) {
                (
                    Surface::CylinderZ { x0, y0, r },
                    Surface::CylinderZ { x0: x1, y0: y1, r: r1 },
                ) => (x0 - x1).abs() <= tol && (y0 - y1).abs() <= tol && (r - r1).abs() <= tol,
                (Surface::Sphere { center: c0, r: r0 }, Surface::Sphere { center: c1, r: r1 }) => {
                    (c0.x - c1.x).abs() <= tol
                        && (c0.y - c1.y).abs() <= tol
                        && (c0.z - c1.z).abs() <= tol
                        && (r0 - r1).abs() <= tol
                }
                _ => false,
            },
            _ => false,
        }
    }

    /// (unit normal, offset) when this surface is a plane.
    fn plane_form(&self) -> Option<(Vec3, f64)> {
        match *self {
            Surface::PlaneX(a) => Some((Vec3::new(1.0, 0.0, 0.0), a)),
            Surface::PlaneY(a) => Some((Vec3::new(0.0, 1.0, 0.0), a)),
            Surface::PlaneZ(a) => Some((Vec3::new(0.0, 0.0, 1.0), a)),
            Surface::GeneralPlane { normal, d } => Some((normal, d)),
            _ => None,
        }
    }

    /// Axis for specular reflection, available only for axis-aligned planes.
    pub fn reflection_axis(&self) -> Option<Axis> {
        const TOL: f64 = 1e-12;
        let (n, _) = self.plane_form()?;
        for axis in Axis::ALL {
            if (n.component(axis).abs() - 1.0).abs() <= TOL {
                return Some(axis);
            }
        }
        None
    }
}

#[inline]
fn plane_distance(num: f64, denom: f64, min_dist: f64) -> Option<f64> {
    if denom == 0.0 {
        return None;
    }
    let t = num / denom;
    if t > min_dist && t.is_finite() {
        Some(t)
    } else {
        None
    }
}

/// Smallest root of `a t^2 + b t + c = 0` exceeding `min_dist`, solved with
/// the sign-aware (citardauq) formulation so grazing rays do not cancel.
fn quadric_distance(a: f64, b: f64, c: f64, min_dist: f64) -> Option<f64> {
    if a == 0.0 {
        // Ray parallel to the quadric axis: implicit value never changes.
        return None;
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sqrt_disc = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sqrt_disc);
    let (mut t0, mut t1) = if q == 0.0 {
        (0.0, 0.0)
    } else {
        (q / a, c / q)
    };
    if t0 > t1 {
        std::mem::swap(&mut t0, &mut t1);
    }
    if t0 > min_dist {
        Some(t0)
    } else if t1 > min_dist {
        Some(t1)
    } else {
        None
    }
}
