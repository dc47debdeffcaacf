//! Positions, directions, and the small amount of vector algebra tracking needs.

use std::fmt;

/// Coordinate axis, ordered x < y < z for deterministic tie-breaking.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::X => write!(f, "x"),
            Axis::Y => write!(f, "y"),
            Axis::Z => write!(f, "z"),
        }
    }
}

/// Free vector (cm). Used for translations between universe frames.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn scale(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    #[inline]
    pub fn add(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    #[inline]
    pub fn component(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// A point in space (cm). All components finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Position {
    pub const ORIGIN: Position = Position { x: 0.0, y: 0.0, z: 0.0 };

    #[inline]
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        debug_assert!(x.is_finite() && y.is_finite() && z.is_finite());
        Position { x, y, z }
    }

    #[inline]
    pub fn component(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.x,
            Axis::Y => self.y,
            Axis::Z => self.z,
        }
    }

    #[inline]
    pub fn as_vec(self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    /// Point reached after travelling `t` along `dir`.
    #[inline]
    pub fn advanced(self, dir: Direction, t: f64) -> Position {
        Position {
            x: self.x + t * dir.u,
            y: self.y + t * dir.v,
            z: self.z + t * dir.w,
        }
    }

    /// Translate into a daughter frame whose origin sits at `t` in this frame.
    #[inline]
    pub fn to_local(self, t: Vec3) -> Position {
        Position {
            x: self.x - t.x,
            y: self.y - t.y,
            z: self.z - t.z,
        }
    }

    #[inline]
    pub fn offset(self, t: Vec3) -> Position {
        Position {
            x: self.x + t.x,
            y: self.y + t.y,
            z: self.z + t.z,
        }
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.as_vec().norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn distance_to(self, other: Position) -> f64 {
        let d = Vec3::new(other.x - self.x, other.y - self.y, other.z - self.z);
        d.norm()
    }
}

/// Unit vector. Renormalized on construction; `new` panics on a zero vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub u: f64,
    pub v: f64,
    pub w: f64,
}

impl Direction {
    pub fn new(u: f64, v: f64, w: f64) -> Self {
        let n = (u * u + v * v + w * w).sqrt();
        assert!(n > 0.0 && n.is_finite(), "direction must be a nonzero finite vector");
        Direction {
            u: u / n,
            v: v / n,
            w: w / n,
        }
    }

    pub const PLUS_X: Direction = Direction { u: 1.0, v: 0.0, w: 0.0 };
    pub const PLUS_Y: Direction = Direction { u: 0.0, v: 1.0, w: 0.0 };
    pub const PLUS_Z: Direction = Direction { u: 0.0, v: 0.0, w: 1.0 };

    #[inline]
    pub fn component(self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.u,
            Axis::Y => self.v,
            Axis::Z => self.w,
        }
    }

    #[inline]
    pub fn as_vec(self) -> Vec3 {
        Vec3::new(self.u, self.v, self.w)
    }

    /// Specular reflection off a plane normal to `axis`.
    #[inline]
    pub fn reflected(self, axis: Axis) -> Direction {
        match axis {
            Axis::X => Direction { u: -self.u, ..self },
            Axis::Y => Direction { v: -self.v, ..self },
            Axis::Z => Direction { w: -self.w, ..self },
        }
    }

    pub fn norm(self) -> f64 {
        self.as_vec().norm()
    }
}

/// Nudge applied when stepping a particle across a surface, and the exclusion
/// band below which crossings are treated as the surface the particle sits on.
#[inline]
pub fn bump_distance(pos: Position) -> f64 {
    f64::max(1e-8, 1e-11 * pos.norm())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_renormalizes() {
        let d = Direction::new(3.0, 4.0, 0.0);
        assert!((d.norm() - 1.0).abs() < 1e-12);
        assert!((d.u - 0.6).abs() < 1e-12);
    }

    #[test]
    fn reflection_flips_one_component() {
        let d = Direction::new(1.0, 2.0, -2.0);
        let r = d.reflected(Axis::Y);
        assert_eq!(r.u, d.u);
        assert_eq!(r.v, -d.v);
        assert_eq!(r.w, d.w);
        assert!((r.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bump_floor_and_scaling() {
        assert_eq!(bump_distance(Position::ORIGIN), 1e-8);
        let far = Position::new(1e6, 0.0, 0.0);
        assert!((bump_distance(far) - 1e-5).abs() < 1e-18);
    }
}
