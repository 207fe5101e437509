//! Polygonal paths on the surface and their algebra.

use serde::{Deserialize, Serialize};

use crate::error::{Result, UnfoldError};
use crate::polyhedron::{Direction, Polyhedron, SurfacePoint};

/// A path `[g0, ..., gk]` whose consecutive points share a face, so each
/// segment is a straight segment inside that face.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfacePath {
    pub points: Vec<SurfacePoint>,
}

/// Left and right angles at one interior point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathAngle {
    pub left: f64,
    pub right: f64,
}

impl SurfacePath {
    pub fn new(points: Vec<SurfacePoint>) -> Self {
        Self { points }
    }

    pub fn from_vertices(vs: impl IntoIterator<Item = usize>) -> Self {
        Self { points: vs.into_iter().map(SurfacePoint::Vertex).collect() }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of segments.
    pub fn num_edges(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn first(&self) -> &SurfacePoint {
        &self.points[0]
    }

    pub fn last(&self) -> &SurfacePoint {
        self.points.last().expect("nonempty path")
    }

    pub fn is_closed(&self) -> bool {
        self.points.len() > 1 && self.first() == self.last()
    }

    pub fn inverse(&self) -> Self {
        Self { points: self.points.iter().rev().cloned().collect() }
    }

    /// `[g0..gk] . [w0..wl] = [g0..gk, w1..wl]`, requiring `gk = w0`.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        if self.last() != other.first() {
            return Err(UnfoldError::Domain("concatenated paths do not meet".into()));
        }
        let mut points = self.points.clone();
        points.extend(other.points[1..].iter().cloned());
        Ok(Self { points })
    }

    /// Length of the longest back-tracking run at the junction: the largest
    /// `m` with `g(k-i) = w(i)` for `0 <= i <= m`.
    pub fn backtrack_len(&self, other: &Self) -> Result<usize> {
        if self.last() != other.first() {
            return Err(UnfoldError::Domain("composed paths do not meet".into()));
        }
        let k = self.points.len() - 1;
        let mut m = 0;
        while m < k && m + 1 < other.points.len() && self.points[k - m - 1] == other.points[m + 1] {
            m += 1;
        }
        Ok(m)
    }

    /// Concatenation with the doubled-back part at the junction excised:
    /// `[g0..g(k-m), w(m+1)..wl]`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let m = self.backtrack_len(other)?;
        let k = self.points.len() - 1;
        let mut points = self.points[..=k - m].to_vec();
        points.extend(other.points[m + 1..].iter().cloned());
        Ok(Self { points })
    }

    /// `D(G) = G . G^-1`.
    pub fn double(&self) -> Self {
        self.concat(&self.inverse()).expect("a path meets its inverse")
    }

    pub fn edge_lengths(&self, p: &Polyhedron) -> Vec<f64> {
        self.points
            .windows(2)
            .map(|w| p.position(&w[0]).dist(p.position(&w[1])))
            .collect()
    }

    pub fn heights(&self, p: &Polyhedron, u: Direction) -> Vec<f64> {
        self.points.iter().map(|x| u.height(p.position(x))).collect()
    }

    /// Angles at the interior points `1..k`.
    pub fn angles(&self, p: &Polyhedron) -> Result<Vec<PathAngle>> {
        self.points
            .windows(3)
            .map(|w| {
                let left = p.left_angle_at(&w[0], &w[1], &w[2])?;
                Ok(PathAngle { left, right: p.total_angle_at(&w[1]) - left })
            })
            .collect()
    }

    /// For a closed path, the angle at the base point between the last and
    /// the first segment.
    pub fn closing_angle(&self, p: &Polyhedron) -> Result<PathAngle> {
        if !self.is_closed() || self.points.len() < 3 {
            return Err(UnfoldError::Domain("closing angle of an open path".into()));
        }
        let n = self.points.len();
        let left = p.left_angle_at(&self.points[n - 2], &self.points[0], &self.points[1])?;
        Ok(PathAngle { left, right: p.total_angle_at(&self.points[0]) - left })
    }

    /// Checks that consecutive points are distinct and share a face.
    pub fn check_segments(&self, p: &Polyhedron) -> Result<()> {
        for (i, w) in self.points.windows(2).enumerate() {
            if w[0] == w[1] || p.position(&w[0]).dist(p.position(&w[1])) == 0.0 {
                return Err(UnfoldError::Domain(format!("segment {i} is degenerate")));
            }
            if p.common_face(&w[0], &w[1]).is_none() {
                return Err(UnfoldError::Domain(format!("segment {i} does not lie in a face")));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::shapes;
    use proptest::prelude::*;
    use std::f64::consts::TAU;

    fn path(v: &[usize]) -> SurfacePath {
        SurfacePath::from_vertices(v.iter().copied())
    }

    #[test]
    fn concat_examples() {
        assert_eq!(path(&[0, 1]).concat(&path(&[1, 2])).unwrap(), path(&[0, 1, 2]));
        assert_eq!(path(&[0]).concat(&path(&[0, 1])).unwrap(), path(&[0, 1]));
        assert!(path(&[0, 1]).concat(&path(&[2, 3])).is_err());
    }

    #[test]
    fn compose_examples() {
        assert_eq!(path(&[0, 1, 2]).compose(&path(&[2, 1, 3])).unwrap(), path(&[0, 1, 3]));
        let g = path(&[0, 1, 2, 3]);
        assert_eq!(g.compose(&g.inverse()).unwrap(), path(&[0]));
        assert_eq!(path(&[0, 1]).compose(&path(&[1, 2])).unwrap(), path(&[0, 1, 2]));
        assert!(path(&[0, 1]).compose(&path(&[2, 1])).is_err());
    }

    #[test]
    fn double_example() {
        let d = path(&[0, 1]).double();
        assert_eq!(d, path(&[0, 1, 0]));
        let c = shapes::cube();
        let g = path(&[0, 1, 3]);
        let l: f64 = g.edge_lengths(&c).iter().sum();
        let ld: f64 = g.double().edge_lengths(&c).iter().sum();
        assert!((ld - 2.0 * l).abs() < 1e-15);
    }

    #[test]
    fn angles_sum_to_total() {
        let c = shapes::cube();
        let (a, o) = (c.star(0)[0].next, 0);
        let b = c.star(0)[1].next;
        let g = path(&[a, o, b]);
        let ang = g.angles(&c).unwrap();
        assert_eq!(ang.len(), 1);
        assert!((ang[0].left + ang[0].right - 0.75 * TAU).abs() < 1e-12);
    }

    /// Reduced walks on four symbols: no repeats and no immediate
    /// back-tracking, so composition behaves like free-group reduction.
    fn reduced(start: usize, steps: &[usize]) -> Vec<usize> {
        let mut out = vec![start];
        for &s in steps {
            let cur = *out.last().unwrap();
            let prev = if out.len() > 1 { Some(out[out.len() - 2]) } else { None };
            let options: Vec<usize> = (0..4).filter(|&x| x != cur && Some(x) != prev).collect();
            out.push(options[s % options.len()]);
        }
        out
    }

    fn seqs() -> impl Strategy<Value = (Vec<usize>, Vec<usize>, Vec<usize>)> {
        (
            (0usize..4, proptest::collection::vec(0usize..6, 0..6)).prop_map(|(s, v)| reduced(s, &v)),
            proptest::collection::vec(0usize..6, 0..6),
            proptest::collection::vec(0usize..6, 0..6),
        )
    }

    fn joined(a: &[usize], b: &[usize]) -> (SurfacePath, SurfacePath) {
        (path(a), path(&reduced(*a.last().unwrap(), b)))
    }

    proptest! {
        #[test]
        fn inverse_of_concat((a, b, _) in seqs()) {
            let (g, w) = joined(&a, &b);
            let gw = g.concat(&w).unwrap();
            prop_assert_eq!(gw.inverse(), w.inverse().concat(&g.inverse()).unwrap());
        }

        #[test]
        fn inverse_annihilates((a, _, _) in seqs()) {
            let g = path(&a);
            prop_assert_eq!(g.compose(&g.inverse()).unwrap(), path(&a[..1]));
            prop_assert_eq!(g.inverse().compose(&g).unwrap(), path(&a[a.len() - 1..]));
        }

        #[test]
        fn compose_associative((a, b, c) in seqs()) {
            let (g, w) = joined(&a, &b);
            let x = path(&reduced(w.last().as_vertex().unwrap(), &c));
            let left = g.compose(&w).unwrap().compose(&x).unwrap();
            let right = g.compose(&w.compose(&x).unwrap()).unwrap();
            prop_assert_eq!(left, right);
        }
    }
}
