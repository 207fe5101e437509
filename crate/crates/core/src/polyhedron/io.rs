//! OFF and OBJ ingestion.

use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{newell_normal, Polyhedron};
use crate::error::{Result, UnfoldError};
use crate::geom::{Point3, TolerancePolicy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MeshFormat {
    Off,
    Obj,
}

impl FromStr for MeshFormat {
    type Err = UnfoldError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(MeshFormat::Off),
            "obj" => Ok(MeshFormat::Obj),
            _ => Err(UnfoldError::Format(format!("unknown mesh format {s:?}"))),
        }
    }
}

/// Reads a convex mesh. Faces are re-oriented outward and coplanar
/// neighbours are merged into a single polygonal face.
pub fn load_polyhedron(mut source: impl Read, format: MeshFormat, tol: TolerancePolicy) -> Result<Polyhedron> {
    let mut text = String::new();
    source.read_to_string(&mut text)?;
    let (vertices, faces) = match format {
        MeshFormat::Off => parse_off(&text)?,
        MeshFormat::Obj => parse_obj(&text)?,
    };
    from_raw(vertices, faces, tol)
}

fn num<T: FromStr>(tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| UnfoldError::Format(format!("bad {what}: {tok:?}")))
}

fn parse_off(text: &str) -> Result<(Vec<Point3>, Vec<Vec<usize>>)> {
    let mut tokens = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .flat_map(str::split_whitespace);
    match tokens.next() {
        Some("OFF") => {}
        other => return Err(UnfoldError::Format(format!("expected OFF header, found {other:?}"))),
    }
    let mut next = |what: &str| tokens.next().ok_or_else(|| UnfoldError::Format(format!("unexpected end of file reading {what}")));
    let nv: usize = num(next("vertex count")?, "vertex count")?;
    let nf: usize = num(next("face count")?, "face count")?;
    let _ne: usize = num(next("edge count")?, "edge count")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let x = num(next("coordinate")?, "coordinate")?;
        let y = num(next("coordinate")?, "coordinate")?;
        let z = num(next("coordinate")?, "coordinate")?;
        vertices.push(Point3::new(x, y, z));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let k: usize = num(next("face size")?, "face size")?;
        let mut f = Vec::with_capacity(k);
        for _ in 0..k {
            f.push(num(next("face index")?, "face index")?);
        }
        faces.push(f);
    }
    Ok((vertices, faces))
}

fn parse_obj(text: &str) -> Result<(Vec<Point3>, Vec<Vec<usize>>)> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for line in text.lines() {
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let c: Vec<f64> = it.take(3).map(|t| num(t, "coordinate")).collect::<Result<_>>()?;
                if c.len() != 3 {
                    return Err(UnfoldError::Format(format!("short vertex record: {line:?}")));
                }
                vertices.push(Point3::new(c[0], c[1], c[2]));
            }
            Some("f") => {
                let mut f = Vec::new();
                for t in it {
                    let idx: i64 = num(t.split('/').next().unwrap_or(""), "face index")?;
                    let resolved = if idx > 0 {
                        idx - 1
                    } else {
                        vertices.len() as i64 + idx
                    };
                    if idx == 0 || resolved < 0 {
                        return Err(UnfoldError::Format(format!("bad face index {idx}")));
                    }
                    f.push(resolved as usize);
                }
                faces.push(f);
            }
            _ => {}
        }
    }
    Ok((vertices, faces))
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let n = self.0[y];
            self.0[y] = r;
            y = n;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Orients faces outward and merges coplanar neighbours, then validates.
pub(super) fn from_raw(vertices: Vec<Point3>, mut faces: Vec<Vec<usize>>, tol: TolerancePolicy) -> Result<Polyhedron> {
    for (fi, f) in faces.iter().enumerate() {
        if f.len() < 3 || f.iter().any(|&v| v >= vertices.len()) {
            return Err(UnfoldError::Format(format!("face {fi} is degenerate or out of range")));
        }
    }
    if vertices.is_empty() {
        return Err(UnfoldError::Format("no vertices".into()));
    }
    let centre = vertices.iter().fold(Point3::default(), |a, &p| a + p) * (1.0 / vertices.len() as f64);
    // A consistently wound input keeps its winding (flipped as a whole when
    // it encloses negative volume), so an inward-facing face means the
    // surface is not convex. Otherwise each face is turned away from the
    // centroid.
    let mut directed = std::collections::HashSet::new();
    let consistent = faces.iter().all(|f| (0..f.len()).all(|i| directed.insert((f[i], f[(i + 1) % f.len()]))));
    if consistent {
        let volume6: f64 = faces
            .iter()
            .flat_map(|f| (1..f.len() - 1).map(move |i| (f[0], f[i], f[i + 1])))
            .map(|(a, b, c)| (vertices[a] - centre).cross(vertices[b] - centre).dot(vertices[c] - centre))
            .sum();
        if volume6 < 0.0 {
            faces.iter_mut().for_each(|f| f.reverse());
        }
    }
    let mut normals = Vec::with_capacity(faces.len());
    for (fi, f) in faces.iter_mut().enumerate() {
        let pts: Vec<Point3> = f.iter().map(|&v| vertices[v]).collect();
        let n = newell_normal(&pts)
            .normalized()
            .ok_or_else(|| UnfoldError::Format(format!("face {fi} has zero area")))?;
        let fc = pts.iter().fold(Point3::default(), |a, &p| a + p) * (1.0 / pts.len() as f64);
        if n.dot(fc - centre) < 0.0 {
            if consistent {
                return Err(UnfoldError::Convexity { vertex: f[0], reason: format!("face {fi} faces inward") });
            }
            f.reverse();
            normals.push(-n);
        } else {
            normals.push(n);
        }
    }

    let mut owner = std::collections::HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for i in 0..f.len() {
            owner.insert((f[i], f[(i + 1) % f.len()]), fi);
        }
    }
    let mut dsu = Dsu((0..faces.len()).collect());
    for (&(a, b), &fa) in &owner {
        if let Some(&fb) = owner.get(&(b, a)) {
            let ang = normals[fa].cross(normals[fb]).norm().atan2(normals[fa].dot(normals[fb]));
            if ang < tol.eps_ang {
                dsu.union(fa, fb);
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for fi in 0..faces.len() {
        groups.entry(dsu.find(fi)).or_default().push(fi);
    }
    let mut merged = Vec::with_capacity(groups.len());
    for members in groups.values() {
        if members.len() == 1 {
            merged.push(faces[members[0]].clone());
            continue;
        }
        let inside: std::collections::HashSet<usize> = members.iter().copied().collect();
        let mut succ = std::collections::HashMap::new();
        for &fi in members {
            let f = &faces[fi];
            for i in 0..f.len() {
                let (a, b) = (f[i], f[(i + 1) % f.len()]);
                let interior = owner.get(&(b, a)).is_some_and(|g| inside.contains(g));
                if !interior && succ.insert(a, b).is_some() {
                    return Err(UnfoldError::Format(format!("coplanar faces around vertex {a} do not form a disk")));
                }
            }
        }
        let start = *succ.keys().min().unwrap();
        let mut cycle = vec![start];
        let mut cur = succ[&start];
        while cur != start {
            if cycle.len() > succ.len() {
                return Err(UnfoldError::Format("coplanar face boundary does not close".into()));
            }
            cycle.push(cur);
            cur = *succ
                .get(&cur)
                .ok_or_else(|| UnfoldError::Format("coplanar face boundary is open".into()))?;
        }
        if cycle.len() != succ.len() {
            return Err(UnfoldError::Format("coplanar face region has holes".into()));
        }
        merged.push(cycle);
    }
    Polyhedron::from_faces(vertices, merged, tol)
}
