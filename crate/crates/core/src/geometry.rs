//! Minimal 3D vector math and ray/quad intersection.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl From<[f64; 3]> for Vec3 {
    fn from(a: [f64; 3]) -> Self {
        Vec3::new(a[0], a[1], a[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn length(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn normalized(self) -> Vec3 {
        self / self.length()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Orthonormal tangent frame `(t, b)` around unit normal `n`.
    pub fn frame(self) -> (Vec3, Vec3) {
        let n = self;
        let sign = if n.z >= 0.0 { 1.0 } else { -1.0 };
        let a = -1.0 / (sign + n.z);
        let b = n.x * n.y * a;
        (
            Vec3::new(1.0 + sign * n.x * n.x * a, sign * b, -sign * n.x),
            Vec3::new(b, sign + n.y * n.y * a, -n.y),
        )
    }

    /// Rotation about the +y axis.
    pub fn rotate_y(self, degrees: f64) -> Vec3 {
        let (s, c) = degrees.to_radians().sin_cos();
        Vec3::new(c * self.x + s * self.z, self.y, -s * self.x + c * self.z)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Ray {
    pub origin: Vec3,
    pub dir: Vec3,
}

impl Ray {
    pub fn new(origin: Vec3, dir: Vec3) -> Self {
        Self { origin, dir }
    }

    #[inline]
    pub fn at(&self, t: f64) -> Vec3 {
        self.origin + self.dir * t
    }
}

/// Parallelogram `origin + s·edge_u + t·edge_v`, `s, t ∈ [0, 1]`.
///
/// The geometric normal is `normalize(edge_u × edge_v)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub origin: Vec3,
    pub edge_u: Vec3,
    pub edge_v: Vec3,
    normal: Vec3,
    area: f64,
}

/// Ray/quad hit in quad-local parameters.
#[derive(Debug, Clone, Copy)]
pub struct QuadHit {
    pub t: f64,
    pub s: f64,
    pub u: f64,
}

impl Quad {
    pub fn new(origin: Vec3, edge_u: Vec3, edge_v: Vec3) -> Self {
        let c = edge_u.cross(edge_v);
        let area = c.length();
        let normal = if area > 0.0 { c / area } else { Vec3::ZERO };
        Self {
            origin,
            edge_u,
            edge_v,
            normal,
            area,
        }
    }

    /// Build from four corners in order `p0 → p1 → p2 → p3`. Returns `None`
    /// unless the corners form a planar parallelogram.
    pub fn from_corners(c: [Vec3; 4]) -> Option<Quad> {
        let q = Quad::new(c[0], c[1] - c[0], c[3] - c[0]);
        let scale = (c[1] - c[0]).length().max((c[3] - c[0]).length());
        let closure = (c[0] + q.edge_u + q.edge_v - c[2]).length();
        if !(closure <= 1e-9 * scale.max(1.0)) {
            return None;
        }
        Some(q)
    }

    pub fn corners(&self) -> [Vec3; 4] {
        [
            self.origin,
            self.origin + self.edge_u,
            self.origin + self.edge_u + self.edge_v,
            self.origin + self.edge_v,
        ]
    }

    pub fn normal(&self) -> Vec3 {
        self.normal
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn center(&self) -> Vec3 {
        self.origin + (self.edge_u + self.edge_v) * 0.5
    }

    pub fn point(&self, s: f64, t: f64) -> Vec3 {
        self.origin + self.edge_u * s + self.edge_v * t
    }

    pub fn flipped(&self) -> Quad {
        Quad::new(self.origin, self.edge_v, self.edge_u)
    }

    /// Nearest hit with `t ∈ (t_min, t_max)`.
    #[inline]
    pub fn intersect(&self, ray: &Ray, t_min: f64, t_max: f64) -> Option<QuadHit> {
        let denom = self.normal.dot(ray.dir);
        if denom.abs() < 1e-14 {
            return None;
        }
        let t = self.normal.dot(self.origin - ray.origin) / denom;
        if t <= t_min || t >= t_max {
            return None;
        }
        let p = ray.at(t) - self.origin;
        // Solve p = s·u + w·v in the plane via the dual basis.
        let n = self.edge_u.cross(self.edge_v);
        let inv = 1.0 / n.dot(n);
        let s = p.cross(self.edge_v).dot(n) * inv;
        if !(0.0..=1.0).contains(&s) {
            return None;
        }
        let w = self.edge_u.cross(p).dot(n) * inv;
        if !(0.0..=1.0).contains(&w) {
            return None;
        }
        Some(QuadHit { t, s, u: w })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quad_intersection_and_params() {
        let q = Quad::new(Vec3::ZERO, Vec3::new(2.0, 0.0, 0.0), Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(q.area(), 2.0);
        assert_eq!(q.normal(), Vec3::new(0.0, 0.0, 1.0));
        let r = Ray::new(Vec3::new(0.5, 0.25, 3.0), Vec3::new(0.0, 0.0, -1.0));
        let h = q.intersect(&r, 1e-9, f64::INFINITY).unwrap();
        assert!((h.t - 3.0).abs() < 1e-12);
        assert!((h.s - 0.25).abs() < 1e-12);
        assert!((h.u - 0.25).abs() < 1e-12);
        let miss = Ray::new(Vec3::new(2.5, 0.25, 3.0), Vec3::new(0.0, 0.0, -1.0));
        assert!(q.intersect(&miss, 1e-9, f64::INFINITY).is_none());
    }

    #[test]
    fn corners_must_close() {
        let c = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
        ];
        assert!(Quad::from_corners(c).is_some());
        let mut bent = c;
        bent[2].z = 0.1;
        assert!(Quad::from_corners(bent).is_none());
    }

    #[test]
    fn frame_is_orthonormal() {
        for n in [
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, -1.0),
            Vec3::new(1.0, 2.0, 3.0).normalized(),
        ] {
            let (t, b) = n.frame();
            assert!(t.dot(n).abs() < 1e-12 && b.dot(n).abs() < 1e-12 && t.dot(b).abs() < 1e-12);
            assert!((t.length() - 1.0).abs() < 1e-12 && (b.length() - 1.0).abs() < 1e-12);
        }
    }
}
