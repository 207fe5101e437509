//! Standard solids and rigid rotations.

use super::{convex_hull, Polyhedron};
use crate::geom::{Point3, TolerancePolicy};

/// Row-major 3x3 rotation matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(pub [[f64; 3]; 3]);

impl Rotation {
    /// `Rz(c) * Ry(b) * Rx(a)`.
    pub fn from_euler(a: f64, b: f64, c: f64) -> Self {
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        let (sc, cc) = c.sin_cos();
        Rotation([
            [cc * cb, cc * sb * sa - sc * ca, cc * sb * ca + sc * sa],
            [sc * cb, sc * sb * sa + cc * ca, sc * sb * ca - cc * sa],
            [-sb, cb * sa, cb * ca],
        ])
    }

    pub fn apply(&self, p: Point3) -> Point3 {
        let m = &self.0;
        Point3::new(
            m[0][0] * p.x + m[0][1] * p.y + m[0][2] * p.z,
            m[1][0] * p.x + m[1][1] * p.y + m[1][2] * p.z,
            m[2][0] * p.x + m[2][1] * p.y + m[2][2] * p.z,
        )
    }
}

/// A fixed rotation that puts the standard solids in general position
/// with respect to the vertical axis.
pub fn sample_rotation() -> Rotation {
    Rotation::from_euler(0.3, 0.7, 1.1)
}

pub fn rotated(p: &Polyhedron, r: Rotation) -> Polyhedron {
    p.map_vertices(|q| r.apply(q)).expect("rotation keeps faces non-degenerate")
}

fn hull_of(points: &[Point3]) -> Polyhedron {
    convex_hull(points, TolerancePolicy::default()).expect("standard solid")
}

/// Regular tetrahedron on alternate corners of the cube `[-1, 1]^3`.
pub fn tetrahedron() -> Polyhedron {
    hull_of(&[
        Point3::new(1., 1., 1.),
        Point3::new(1., -1., -1.),
        Point3::new(-1., 1., -1.),
        Point3::new(-1., -1., 1.),
    ])
}

/// The unit cube `[0, 1]^3`.
pub fn cube() -> Polyhedron {
    let pts: Vec<Point3> = (0..8)
        .map(|i| Point3::new((i & 1) as f64, ((i >> 1) & 1) as f64, ((i >> 2) & 1) as f64))
        .collect();
    hull_of(&pts)
}

pub fn octahedron() -> Polyhedron {
    hull_of(&[
        Point3::new(1., 0., 0.),
        Point3::new(-1., 0., 0.),
        Point3::new(0., 1., 0.),
        Point3::new(0., -1., 0.),
        Point3::new(0., 0., 1.),
        Point3::new(0., 0., -1.),
    ])
}

/// Permutations of `(+-3, +-1, +-1)` with an even number of minus signs:
/// four triangles and four hexagons.
pub fn truncated_tetrahedron() -> Polyhedron {
    let mut pts = Vec::new();
    for pos in 0..3 {
        for signs in 0..8u32 {
            if signs.count_ones() % 2 == 1 {
                continue;
            }
            let mut c = [1.0f64; 3];
            c[pos] = 3.0;
            for (k, ck) in c.iter_mut().enumerate() {
                if signs >> k & 1 == 1 {
                    *ck = -*ck;
                }
            }
            pts.push(Point3::new(c[0], c[1], c[2]));
        }
    }
    hull_of(&pts)
}

/// A tetrahedron with corner `i` cut off by the plane through the points at
/// fraction `cuts[i]` along its three edges. Cuts below one half keep the
/// truncated-tetrahedron combinatorics: four triangles and four hexagons.
pub fn truncated_tetrahedron_with(corners: [Point3; 4], cuts: [f64; 4]) -> Polyhedron {
    let mut pts = Vec::with_capacity(12);
    for i in 0..4 {
        for j in 0..4 {
            if i != j {
                pts.push(corners[i].lerp(corners[j], cuts[i]));
            }
        }
    }
    hull_of(&pts)
}

/// Triangular prism of height `h` over an equilateral triangle.
pub fn prism(h: f64) -> Polyhedron {
    let mut pts = Vec::new();
    for z in [0.0, h] {
        for k in 0..3 {
            let a = k as f64 * std::f64::consts::TAU / 3.0;
            pts.push(Point3::new(a.cos(), a.sin(), z));
        }
    }
    hull_of(&pts)
}

/// Truncated cone over a regular `n`-gon: bottom radius `r0`, top radius
/// `r1`, height `h`.
pub fn frustum(n: usize, r0: f64, r1: f64, h: f64) -> Polyhedron {
    let mut pts = Vec::new();
    for (z, r) in [(0.0, r0), (h, r1)] {
        for k in 0..n {
            let a = k as f64 * std::f64::consts::TAU / n as f64;
            pts.push(Point3::new(r * a.cos(), r * a.sin(), z));
        }
    }
    hull_of(&pts)
}
