//! Planar and spatial primitives shared by the rest of the crate.
//!
//! Every topological decision in the plane (left/right, crossing, touching)
//! goes through [`orient2d`], which is exact in sign: a floating-point filter
//! with an adaptive-precision fallback.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Result, UnfoldError};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn normalized(self) -> Option<Self> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }

    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn lerp(self, o: Self, t: f64) -> Self {
        self + (o - self) * t
    }
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Self) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Self) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Self) -> f64 {
        (self - o).norm()
    }

    /// Rotates counterclockwise by `angle` radians.
    pub fn rotated(self, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

macro_rules! vector_ops {
    ($t:ident { $($f:ident),+ }) => {
        impl Add for $t {
            type Output = $t;
            fn add(self, o: $t) -> $t { $t { $($f: self.$f + o.$f),+ } }
        }
        impl Sub for $t {
            type Output = $t;
            fn sub(self, o: $t) -> $t { $t { $($f: self.$f - o.$f),+ } }
        }
        impl Mul<f64> for $t {
            type Output = $t;
            fn mul(self, s: f64) -> $t { $t { $($f: self.$f * s),+ } }
        }
        impl Neg for $t {
            type Output = $t;
            fn neg(self) -> $t { $t { $($f: -self.$f),+ } }
        }
    };
}

vector_ops!(Point3 { x, y, z });
vector_ops!(Point2 { x, y });

/// Length and angle tolerances for a run.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TolerancePolicy {
    /// Relative length tolerance.
    pub eps_len: f64,
    /// Absolute angle tolerance in radians.
    pub eps_ang: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self { eps_len: 1e-9, eps_ang: 1e-9 }
    }
}

impl TolerancePolicy {
    pub fn new(eps_len: f64, eps_ang: f64) -> Result<Self> {
        let ok = |e: f64| e > 0.0 && e < 1e-3;
        if !ok(eps_len) || !ok(eps_ang) {
            return Err(UnfoldError::Domain(format!(
                "tolerances must lie in (0, 1e-3): eps_len={eps_len}, eps_ang={eps_ang}"
            )));
        }
        Ok(Self { eps_len, eps_ang })
    }

    /// Default policy with `eps_len` taken from `UNFOLDER_EPS` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var("UNFOLDER_EPS") {
            Ok(s) => {
                let eps: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| UnfoldError::Domain(format!("UNFOLDER_EPS is not a number: {s:?}")))?;
                Self::new(eps, Self::default().eps_ang)
            }
            Err(_) => Ok(Self::default()),
        }
    }
}

/// Sign of the signed area of triangle `(a, b, c)`: `+1` counterclockwise,
/// `-1` clockwise, `0` collinear. Exact.
pub fn orient2d(a: Point2, b: Point2, c: Point2) -> i8 {
    let det = robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    );
    if det > 0.0 {
        1
    } else if det < 0.0 {
        -1
    } else {
        0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SegmentIntersection {
    Disjoint,
    /// The segments meet in a single point which is an endpoint of at least
    /// one of them (or two endpoints coincide within tolerance).
    EndpointTouch(Point2),
    ProperCross(Point2),
    /// Collinear with a shared sub-segment of positive length.
    Overlap(Point2),
}

impl SegmentIntersection {
    pub fn is_disjoint(&self) -> bool {
        matches!(self, Self::Disjoint)
    }

    pub fn witness(&self) -> Option<Point2> {
        match *self {
            Self::Disjoint => None,
            Self::EndpointTouch(p) | Self::ProperCross(p) | Self::Overlap(p) => Some(p),
        }
    }
}

// `p` is known to be collinear with segment `ab`.
fn on_collinear_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Classifies how two closed segments meet.
pub fn segment_intersection(
    s1: (Point2, Point2),
    s2: (Point2, Point2),
    tol: &TolerancePolicy,
) -> SegmentIntersection {
    let (a, b) = s1;
    let (c, d) = s2;
    let o1 = orient2d(a, b, c);
    let o2 = orient2d(a, b, d);
    let o3 = orient2d(c, d, a);
    let o4 = orient2d(c, d, b);

    if o1 == 0 && o2 == 0 {
        // Collinear: compare along the dominant axis.
        let dir = b - a;
        let key = |p: Point2| if dir.x.abs() >= dir.y.abs() { p.x } else { p.y };
        let (lo1, hi1) = minmax(key(a), key(b));
        let (lo2, hi2) = minmax(key(c), key(d));
        let lo = lo1.max(lo2);
        let hi = hi1.min(hi2);
        if lo < hi {
            let w = [a, b, c, d]
                .into_iter()
                .find(|&p| key(p) == lo)
                .unwrap_or(a);
            return SegmentIntersection::Overlap(w);
        }
        if lo == hi {
            let w = [a, b, c, d].into_iter().find(|&p| key(p) == lo).unwrap_or(a);
            return SegmentIntersection::EndpointTouch(w);
        }
        return near_touch(s1, s2, tol);
    }

    if o1 * o2 < 0 && o3 * o4 < 0 {
        // Proper crossing; the witness is computed in floating point.
        let r = b - a;
        let s = d - c;
        let t = (c - a).cross(s) / r.cross(s);
        return SegmentIntersection::ProperCross(a + r * t);
    }

    if o1 == 0 && on_collinear_segment(a, b, c) {
        return SegmentIntersection::EndpointTouch(c);
    }
    if o2 == 0 && on_collinear_segment(a, b, d) {
        return SegmentIntersection::EndpointTouch(d);
    }
    if o3 == 0 && on_collinear_segment(c, d, a) {
        return SegmentIntersection::EndpointTouch(a);
    }
    if o4 == 0 && on_collinear_segment(c, d, b) {
        return SegmentIntersection::EndpointTouch(b);
    }
    near_touch(s1, s2, tol)
}

fn minmax(a: f64, b: f64) -> (f64, f64) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

fn near_touch(s1: (Point2, Point2), s2: (Point2, Point2), tol: &TolerancePolicy) -> SegmentIntersection {
    let len = s1.0.dist(s1.1).min(s2.0.dist(s2.1));
    let thresh = tol.eps_len * len;
    for p in [s1.0, s1.1] {
        for q in [s2.0, s2.1] {
            if p.dist(q) <= thresh {
                return SegmentIntersection::EndpointTouch(p);
            }
        }
    }
    SegmentIntersection::Disjoint
}

/// Angle in `[0, pi]` between two nonzero vectors.
pub fn ambient_angle(u: Point3, v: Point3) -> Result<f64> {
    let (nu, nv) = (u.norm(), v.norm());
    if nu == 0.0 || nv == 0.0 || !nu.is_finite() || !nv.is_finite() {
        return Err(UnfoldError::Domain("ambient_angle of a zero vector".into()));
    }
    // atan2 form stays accurate near 0 and pi where acos loses digits.
    Ok(u.cross(v).norm().atan2(u.dot(v)))
}

/// Counterclockwise angle in `[0, 2pi)` from `from` to `to` about the axis
/// `normal`; both vectors are assumed orthogonal to `normal`.
pub fn ccw_angle_about(from: Point3, to: Point3, normal: Point3) -> f64 {
    let a = from.cross(to).dot(normal).atan2(from.dot(to));
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

/// Twice the signed area of a planar polygon (positive when counterclockwise).
pub fn signed_area2(poly: &[Point2]) -> f64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].cross(poly[(i + 1) % n])).sum()
}
