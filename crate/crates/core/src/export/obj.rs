//! Triangle mesh of the closed surface of revolution.

use std::f64::consts::PI;
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    /// Zero-based vertex indices, counter-clockwise seen from outside.
    pub faces: Vec<[usize; 3]>,
}

/// Revolves the half profile `(r, Z)` (pole first, equator last) about the
/// axis and reflects it through `Z = 0`. With `m = half.len() - 1` rings per
/// half the mesh has `n_theta (2m - 1) + 2` vertices.
pub fn revolve(half: &[(f64, f64)], n_theta: usize) -> Mesh {
    assert!(half.len() >= 2 && n_theta >= 3);
    let m = half.len() - 1;
    // ring profile points: upper rings 1..=m, then lower rings m-1..=1
    let mut rings: Vec<(f64, f64)> = half[1..].to_vec();
    rings.extend(half[1..m].iter().rev().map(|&(r, z)| (r, -z)));
    let top = (0.0, half[0].1);
    let n_rings = rings.len();

    let mut vertices = Vec::with_capacity(n_rings * n_theta + 2);
    vertices.push([0.0, 0.0, top.1]);
    for &(r, z) in &rings {
        for i in 0..n_theta {
            let t = 2.0 * PI * i as f64 / n_theta as f64;
            vertices.push([r * t.cos(), r * t.sin(), z]);
        }
    }
    vertices.push([0.0, 0.0, -top.1]);
    let bottom = vertices.len() - 1;
    let at = |k: usize, i: usize| 1 + k * n_theta + (i % n_theta);

    let mut faces = Vec::with_capacity(2 * n_rings * n_theta);
    for i in 0..n_theta {
        faces.push([0, at(0, i), at(0, i + 1)]);
    }
    for k in 0..n_rings - 1 {
        for i in 0..n_theta {
            let (a0, a1, b0, b1) = (at(k, i), at(k, i + 1), at(k + 1, i), at(k + 1, i + 1));
            faces.push([a0, b0, b1]);
            faces.push([a0, b1, a1]);
        }
    }
    for i in 0..n_theta {
        faces.push([bottom, at(n_rings - 1, i + 1), at(n_rings - 1, i)]);
    }
    Mesh { vertices, faces }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl Mesh {
    pub fn area(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                let n = cross(sub(b, a), sub(c, a));
                0.5 * dot(n, n).sqrt()
            })
            .sum()
    }

    /// Signed volume from tetrahedra against the origin; positive for an
    /// outward-oriented closed mesh.
    pub fn volume(&self) -> f64 {
        self.faces
            .iter()
            .map(|f| {
                let [a, b, c] = f.map(|i| self.vertices[i]);
                dot(a, cross(b, c)) / 6.0
            })
            .sum()
    }

    /// Number of distinct undirected edges.
    pub fn edge_count(&self) -> usize {
        let mut edges: Vec<(usize, usize)> = self
            .faces
            .iter()
            .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])])
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.faces.len() as i64
    }

    /// OBJ text with `v` and `f` records only (one-based indices).
    pub fn to_obj(&self) -> String {
        let mut s = String::with_capacity(self.vertices.len() * 60 + self.faces.len() * 24);
        for v in &self.vertices {
            let _ = writeln!(s, "v {:.12e} {:.12e} {:.12e}", v[0], v[1], v[2]);
        }
        for f in &self.faces {
            let _ = writeln!(s, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_half(m: usize) -> Vec<(f64, f64)> {
        (0..=m)
            .map(|j| {
                let t = 0.5 * PI * j as f64 / m as f64;
                (t.sin(), t.cos())
            })
            .collect()
    }

    #[test]
    fn sphere_mesh_topology_and_measures() {
        let mesh = revolve(&sphere_half(64), 128);
        assert_eq!(mesh.vertices.len(), 128 * (2 * 64 - 1) + 2);
        assert_eq!(mesh.euler_characteristic(), 2);
        assert!((mesh.area() / (4.0 * PI) - 1.0).abs() < 1e-3);
        assert!((mesh.volume() / (4.0 / 3.0 * PI) - 1.0).abs() < 2e-3);
    }

    #[test]
    fn obj_records() {
        let mesh = revolve(&sphere_half(2), 3);
        let text = mesh.to_obj();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), mesh.vertices.len());
        assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), mesh.faces.len());
        assert!(text.lines().all(|l| l.starts_with("v ") || l.starts_with("f ")));
    }
}
