//! Seeded test instances: standard solids, random convex hulls, random
//! directions, and random samples on the surface.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::geom::{Point3, TolerancePolicy};
use crate::path::SurfacePath;
use crate::polyhedron::{convex_hull, shapes, Direction, Polyhedron, SurfacePoint};

#[derive(Clone, Debug)]
pub struct CorpusInstance {
    pub name: String,
    pub polyhedron: Polyhedron,
    pub direction: Direction,
}

/// Uniform on the unit sphere, by rejection from the cube.
pub fn random_unit_vector(rng: &mut impl Rng) -> Point3 {
    loop {
        let p = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = p.norm();
        if n > 1e-3 && n <= 1.0 {
            return p * (1.0 / n);
        }
    }
}

pub fn random_direction(rng: &mut impl Rng) -> Direction {
    Direction::new(random_unit_vector(rng)).expect("unit vector")
}

/// Hull of `n` random points on an ellipsoid with semi-axes in `[0.5, 1.5]`.
/// Every point is a vertex, since the ellipsoid is strictly convex.
pub fn random_hull(rng: &mut impl Rng, n: usize) -> Result<Polyhedron> {
    let axes = Point3::new(rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5));
    let pts: Vec<Point3> = (0..n)
        .map(|_| {
            let d = random_unit_vector(rng);
            Point3::new(d.x * axes.x, d.y * axes.y, d.z * axes.z)
        })
        .collect();
    convex_hull(&pts, TolerancePolicy::default())
}

/// A random hull with between 6 and `max_vertices` vertices and a random
/// direction that puts it in general position.
pub fn random_generic_instance(rng: &mut impl Rng, max_vertices: usize) -> (Polyhedron, Direction) {
    loop {
        let n = rng.gen_range(6..=max_vertices.max(6));
        let Ok(p) = random_hull(rng, n) else { continue };
        for _ in 0..10 {
            let u = random_direction(rng);
            if p.check_general_position(u).is_general {
                return (p, u);
            }
        }
    }
}

/// A squat tetrahedron with each corner cut at its own depth: combinatorially
/// a truncated tetrahedron, but with unequal faces.
pub fn random_truncated_tetrahedron(rng: &mut impl Rng) -> Polyhedron {
    loop {
        let mut corners = [Point3::default(); 4];
        for c in corners.iter_mut() {
            *c = Point3::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-0.5..0.5));
        }
        let mut cuts = [0.0; 4];
        for c in cuts.iter_mut() {
            *c = rng.gen_range(0.1..0.45);
        }
        let volume6 = (corners[1] - corners[0]).cross(corners[2] - corners[0]).dot(corners[3] - corners[0]);
        if volume6.abs() < 0.5 {
            continue;
        }
        let p = shapes::truncated_tetrahedron_with(corners, cuts);
        if p.num_vertices() == 12 && p.num_faces() == 8 {
            return p;
        }
    }
}

/// The standard solids, rotated into general position with respect to the
/// vertical axis.
pub fn standard_solids() -> Vec<(String, Polyhedron)> {
    let r = shapes::sample_rotation();
    vec![
        ("tetrahedron".into(), shapes::rotated(&shapes::tetrahedron(), r)),
        ("cube".into(), shapes::rotated(&shapes::cube(), r)),
        ("octahedron".into(), shapes::rotated(&shapes::octahedron(), r)),
        ("truncated tetrahedron".into(), shapes::rotated(&shapes::truncated_tetrahedron(), r)),
    ]
}

/// The standard solids followed by `n_random` random hulls with at most 30
/// vertices, each with a direction in general position.
pub fn corpus(rng: &mut impl Rng, n_random: usize) -> Vec<CorpusInstance> {
    let mut out: Vec<CorpusInstance> = standard_solids()
        .into_iter()
        .map(|(name, polyhedron)| CorpusInstance { name, polyhedron, direction: Direction::up() })
        .collect();
    for i in 0..n_random {
        let (polyhedron, direction) = random_generic_instance(rng, 30);
        out.push(CorpusInstance { name: format!("random hull {i}"), polyhedron, direction });
    }
    out
}

/// A random point of the open star of vertex `o`: on an incident edge or
/// inside an incident face.
pub fn random_star_point(p: &Polyhedron, o: usize, rng: &mut impl Rng) -> SurfacePoint {
    let star = p.star(o);
    let c = star[rng.gen_range(0..star.len())];
    if rng.gen_bool(0.3) {
        let e = p.edge_between(o, c.next).expect("star ray is an edge");
        let s = rng.gen_range(0.05..0.95);
        let t = if p.edge(e).v[0] == o { s } else { 1.0 - s };
        return SurfacePoint::Edge { edge: e, t };
    }
    let f = p.face(c.face);
    let mut w: Vec<f64> = (0..f.len()).map(|_| rng.gen_range(0.05..1.0)).collect();
    let i = f.iter().position(|&v| v == o).expect("corner vertex lies on its face");
    w[i] = 0.0;
    let total: f64 = w.iter().sum();
    let mix = rng.gen_range(0.05..0.95);
    let coords = w.iter().enumerate().map(|(j, x)| x / total * mix + if j == i { 1.0 - mix } else { 0.0 }).collect();
    SurfacePoint::Face { face: c.face, coords }
}

/// Random non-backtracking vertex walks `gamma`, `omega` sharing their
/// first `m + 1` vertices (`m >= 1`), where `omega` leaves strictly to the
/// left of `gamma`. `None` when the drawn corner admits no left turn.
pub fn random_shared_prefix_pair(p: &Polyhedron, rng: &mut impl Rng) -> Option<(SurfacePath, SurfacePath, usize)> {
    let walk = |mut w: Vec<usize>, steps: usize, rng: &mut dyn rand::RngCore| {
        for _ in 0..steps {
            let cur = *w.last().unwrap();
            let prev = w.len().checked_sub(2).map(|i| w[i]);
            let opts: Vec<usize> = p.neighbors(cur).filter(|&x| Some(x) != prev).collect();
            w.push(*opts.choose(rng).expect("vertices have degree at least 3"));
        }
        w
    };
    let m = rng.gen_range(1..=4);
    let prefix = walk(vec![rng.gen_range(0..p.num_vertices())], m, rng);
    let tail_g = rng.gen_range(1..=4);
    let g = walk(prefix.clone(), tail_g, rng);
    let sp = SurfacePoint::Vertex;
    let (a, o, b) = (prefix[m - 1], prefix[m], g[m + 1]);
    let lefts: Vec<usize> = p
        .neighbors(o)
        .filter(|&x| p.strictly_left_of(&sp(x), &sp(a), &sp(o), &sp(b)).unwrap_or(false))
        .collect();
    let turn = *lefts.choose(rng)?;
    let mut om = prefix;
    om.push(turn);
    let tail_o = rng.gen_range(0..=3);
    let om = walk(om, tail_o, rng);
    Some((SurfacePath::from_vertices(g), SurfacePath::from_vertices(om), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_hulls_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let (p, u) = random_generic_instance(&mut rng, 30);
            assert!(p.num_vertices() <= 30 && p.num_vertices() >= 6);
            assert!(p.gauss_bonnet_residual() < 1e-9 * p.num_vertices() as f64);
            assert!(p.check_general_position(u).is_general);
        }
    }

    #[test]
    fn corpus_is_reproducible() {
        let a = corpus(&mut ChaCha8Rng::seed_from_u64(3), 3);
        let b = corpus(&mut ChaCha8Rng::seed_from_u64(3), 3);
        assert_eq!(a.len(), 7);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.polyhedron.vertices(), y.polyhedron.vertices());
            assert_eq!(x.direction, y.direction);
        }
    }

    #[test]
    fn random_truncated_tetrahedra() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = random_truncated_tetrahedron(&mut rng);
            assert_eq!(p.faces().iter().filter(|f| f.len() == 6).count(), 4);
        }
    }

    #[test]
    fn star_points_lie_in_the_star() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = shapes::cube();
        for _ in 0..200 {
            let o = rng.gen_range(0..8);
            let x = random_star_point(&c, o, &mut rng);
            assert!(c.faces_of(&x).iter().any(|&f| c.face(f).contains(&o)));
            assert!(c.star_position(o, &x).is_ok());
        }
    }

    #[test]
    fn shared_prefix_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = shapes::rotated(&shapes::cube(), shapes::sample_rotation());
        let mut found = 0;
        for _ in 0..100 {
            if let Some((g, o, m)) = random_shared_prefix_pair(&c, &mut rng) {
                assert_eq!(g.points[..=m], o.points[..=m]);
                assert_ne!(g.points[m + 1], o.points[m + 1]);
                found += 1;
            }
        }
        assert!(found > 20);
    }
}
