//! Closed, consistently oriented triangle meshes and the ASCII OFF format.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use super::{SurfaceSample, VolumeSample};
use crate::numerics::gauss_legendre;
use crate::Vec3;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("cannot read mesh: {0}")]
    Io(#[from] std::io::Error),

    #[error("OFF parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh is open: edge ({from}, {to}) has no opposite half-edge")]
    OpenEdge { from: usize, to: usize },

    #[error("inconsistent orientation: edge ({from}, {to}) is traversed in the same direction by two faces")]
    InconsistentOrientation { from: usize, to: usize },

    #[error("face {face} is degenerate")]
    DegenerateFace { face: usize },

    #[error("faces are oriented inward (signed volume {signed_volume:e})")]
    InwardOrientation { signed_volume: f64 },

    #[error("mesh has no faces")]
    Empty,
}

/// Closed triangle mesh with outward, consistently oriented faces.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Validates that every half-edge has exactly one opposite half-edge and
    /// that the enclosed signed volume is positive.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        if triangles.is_empty() {
            return Err(MeshError::Empty);
        }
        let mut half_edges: HashMap<(usize, usize), usize> = HashMap::new();
        for (f, t) in triangles.iter().enumerate() {
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || t.iter().any(|&i| i >= vertices.len()) {
                return Err(MeshError::DegenerateFace { face: f });
            }
            for k in 0..3 {
                let edge = (t[k], t[(k + 1) % 3]);
                if half_edges.insert(edge, f).is_some() {
                    return Err(MeshError::InconsistentOrientation { from: edge.0, to: edge.1 });
                }
            }
        }
        let mut open: Vec<(usize, usize)> =
            half_edges.keys().filter(|(a, b)| !half_edges.contains_key(&(*b, *a))).copied().collect();
        open.sort_unstable();
        if let Some(&(from, to)) = open.first() {
            return Err(MeshError::OpenEdge { from, to });
        }
        let mesh = Self { vertices, triangles };
        let signed_volume = mesh.signed_volume();
        if signed_volume <= 0.0 {
            return Err(MeshError::InwardOrientation { signed_volume });
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edge_count(&self) -> usize {
        3 * self.triangles.len() / 2
    }

    /// `V − E + F`; 2 for a closed genus-0 surface.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    fn corners(&self, t: &[usize; 3]) -> (Vec3, Vec3, Vec3) {
        (self.vertices[t[0]], self.vertices[t[1]], self.vertices[t[2]])
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let (a, b, c) = self.corners(t);
                0.5 * (b - a).cross(&(c - a)).norm()
            })
            .sum()
    }

    pub fn signed_volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let (a, b, c) = self.corners(t);
                a.dot(&b.cross(&c)) / 6.0
            })
            .sum()
    }

    pub fn vertex_centroid(&self) -> Vec3 {
        self.vertices.iter().sum::<Vec3>() / self.vertices.len() as f64
    }

    pub fn translated(&self, a: &Vec3) -> Self {
        Self { vertices: self.vertices.iter().map(|v| v + a).collect(), triangles: self.triangles.clone() }
    }

    /// Applies `f` to every vertex and revalidates orientation.
    pub fn map_vertices<F: Fn(&Vec3) -> Vec3>(&self, f: F) -> Result<Self, MeshError> {
        Self::new(self.vertices.iter().map(f).collect(), self.triangles.clone())
    }

    /// Geodesic sphere: the icosahedron with each face split into four
    /// `level` times, vertices projected onto the unit sphere.
    pub fn icosphere(level: usize) -> Self {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut vertices: Vec<Vec3> = [
            (-1.0, t, 0.0),
            (1.0, t, 0.0),
            (-1.0, -t, 0.0),
            (1.0, -t, 0.0),
            (0.0, -1.0, t),
            (0.0, 1.0, t),
            (0.0, -1.0, -t),
            (0.0, 1.0, -t),
            (t, 0.0, -1.0),
            (t, 0.0, 1.0),
            (-t, 0.0, -1.0),
            (-t, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut triangles: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..level {
            let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
            let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| {
                *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                    vertices.push((vertices[a] + vertices[b]).normalize());
                    vertices.len() - 1
                })
            };
            let mut next = Vec::with_capacity(triangles.len() * 4);
            for &[a, b, c] in &triangles {
                let ab = midpoint(a, b, &mut vertices);
                let bc = midpoint(b, c, &mut vertices);
                let ca = midpoint(c, a, &mut vertices);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            triangles = next;
        }
        Self::new(vertices, triangles).expect("icosphere is closed and outward")
    }

    /// Collapsed Gauss rule with `order²` points per triangle.
    pub fn surface_samples(&self, order: usize) -> Vec<SurfaceSample> {
        let rule: Vec<(f64, f64)> = gauss_legendre(order).on_interval(0.0, 1.0).collect();
        let mut out = Vec::with_capacity(self.triangles.len() * order * order);
        for t in &self.triangles {
            let (a, b, c) = self.corners(t);
            let n = (b - a).cross(&(c - a));
            let twice_area = n.norm();
            let normal = n / twice_area;
            for &(xi, wx) in &rule {
                for &(eta, we) in &rule {
                    let v = (1.0 - xi) * eta;
                    out.push(SurfaceSample {
                        point: a + (b - a) * xi + (c - a) * v,
                        normal,
                        weight: twice_area * wx * we * (1.0 - xi),
                    });
                }
            }
        }
        out
    }

    /// Tetrahedra fanned from the vertex centroid. Each cone is swept
    /// radially from the apex with `radial_order` Gauss points against the
    /// `order²` collapsed rule on its base triangle, so long thin cones stay
    /// resolved along their length. Weights are positive when the mesh is
    /// star-shaped about its centroid.
    pub fn volume_samples(&self, order: usize, radial_order: usize) -> Vec<VolumeSample> {
        let rule: Vec<(f64, f64)> = gauss_legendre(order).on_interval(0.0, 1.0).collect();
        let radial: Vec<(f64, f64)> = gauss_legendre(radial_order).on_interval(0.0, 1.0).collect();
        let apex = self.vertex_centroid();
        let mut out = Vec::with_capacity(self.triangles.len() * order * order * radial_order);
        for t in &self.triangles {
            let (a, b, c) = self.corners(t);
            let (e1, e2, e3) = (a - apex, b - apex, c - apex);
            let six_volume = e1.dot(&e2.cross(&e3));
            for &(x, wx) in &rule {
                for &(y, wy) in &rule {
                    let v = (1.0 - x) * y;
                    let base = e1 + (e2 - e1) * x + (e3 - e1) * v;
                    let w_base = six_volume * wx * wy * (1.0 - x);
                    for &(r, wr) in &radial {
                        out.push(VolumeSample { point: apex + base * r, weight: w_base * wr * r * r });
                    }
                }
            }
        }
        out
    }

    pub fn to_off(&self) -> String {
        let mut s = String::new();
        writeln!(s, "OFF").unwrap();
        writeln!(s, "{} {} {}", self.vertices.len(), self.triangles.len(), self.edge_count()).unwrap();
        for v in &self.vertices {
            writeln!(s, "{:.17e} {:.17e} {:.17e}", v[0], v[1], v[2]).unwrap();
        }
        for t in &self.triangles {
            writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
        }
        s
    }
}

pub fn load_mesh<P: AsRef<Path>>(path: P) -> Result<TriMesh, MeshError> {
    parse_off(&std::fs::read_to_string(path)?)
}

/// Strict ASCII OFF reader: `OFF` header, counts line, vertex lines with
/// exactly three coordinates, face lines `3 i j k`. `#` starts a comment.
pub fn parse_off(text: &str) -> Result<TriMesh, MeshError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let err = |line: usize, message: String| MeshError::Parse { line, message };

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty file".into()))?;
    let mut header_tokens = header.split_whitespace();
    if header_tokens.next() != Some("OFF") {
        return Err(err(line, format!("expected OFF header, found {header:?}")));
    }
    let rest: Vec<&str> = header_tokens.collect();
    let (count_line, counts) = if rest.is_empty() {
        let (l, c) = lines.next().ok_or_else(|| err(line, "missing counts line".into()))?;
        (l, c.split_whitespace().collect::<Vec<_>>())
    } else {
        (line, rest)
    };
    if counts.len() != 3 {
        return Err(err(count_line, format!("expected 3 counts, found {}", counts.len())));
    }
    let parse_count = |s: &str| s.parse::<usize>().map_err(|e| err(count_line, format!("bad count {s:?}: {e}")));
    let n_vertices = parse_count(counts[0])?;
    let n_faces = parse_count(counts[1])?;

    let mut vertices = Vec::with_capacity(n_vertices);
    for _ in 0..n_vertices {
        let (line, text) = lines.next().ok_or_else(|| err(count_line, "unexpected end of vertex list".into()))?;
        let coords: Vec<f64> = text
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| err(line, format!("bad coordinate {t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        if coords.len() != 3 {
            return Err(err(line, format!("expected 3 coordinates, found {}", coords.len())));
        }
        vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
    }

    let mut triangles = Vec::with_capacity(n_faces);
    for _ in 0..n_faces {
        let (line, text) = lines.next().ok_or_else(|| err(count_line, "unexpected end of face list".into()))?;
        let idx: Vec<usize> = text
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| err(line, format!("bad index {t:?}: {e}"))))
            .collect::<Result<_, _>>()?;
        if idx.first() != Some(&3) || idx.len() != 4 {
            return Err(err(line, "only triangles (`3 i j k`) are supported".into()));
        }
        if let Some(&bad) = idx[1..].iter().find(|&&i| i >= n_vertices) {
            return Err(err(line, format!("vertex index {bad} out of range")));
        }
        triangles.push([idx[1], idx[2], idx[3]]);
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing content after face list".into()));
    }
    TriMesh::new(vertices, triangles)
}

#[cfg(test)]
mod tests {
    use super::*;

    const OCTAHEDRON: &str = "OFF
# regular octahedron
6 8 12
1 0 0
-1 0 0
0 1 0
0 -1 0
0 0 1
0 0 -1
3 0 2 4
3 2 1 4
3 1 3 4
3 3 0 4
3 2 0 5
3 1 2 5
3 3 1 5
3 0 3 5
";

    #[test]
    fn octahedron_parses_closed() {
        let m = parse_off(OCTAHEDRON).unwrap();
        assert_eq!(m.vertices().len(), 6);
        assert_eq!(m.triangles().len(), 8);
        assert_eq!(m.euler_characteristic(), 2);
        assert!((m.signed_volume() - 4.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn flipped_face_names_the_edge() {
        let text = "OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n3 2 3 1\n";
        assert!(parse_off(text).is_ok());
        let flipped = text.replace("3 2 3 1", "3 1 3 2");
        match parse_off(&flipped) {
            Err(MeshError::InconsistentOrientation { from, to }) => {
                let e = (from.min(to), from.max(to));
                assert!([(1, 3), (2, 3), (1, 2)].contains(&e), "{e:?}");
            }
            other => panic!("expected orientation error, got {other:?}"),
        }
    }

    #[test]
    fn open_mesh_is_rejected() {
        let text = "OFF\n4 3 0\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 2 1\n3 0 1 3\n3 0 3 2\n";
        assert!(matches!(parse_off(text), Err(MeshError::OpenEdge { .. })));
    }

    #[test]
    fn inward_mesh_is_rejected() {
        let text = "OFF\n4 4 6\n0 0 0\n1 0 0\n0 1 0\n0 0 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n3 2 1 3\n";
        assert!(matches!(parse_off(text), Err(MeshError::InwardOrientation { .. })));
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_off("OFF\n1 1 0\n0 0 zero\n3 0 0 0\n") {
            Err(MeshError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_off("PLY\n"), Err(MeshError::Parse { line: 1, .. })));
        assert!(matches!(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n4 0 1 2 0\n"), Err(MeshError::Parse { .. })));
    }

    #[test]
    fn off_round_trip() {
        let m = TriMesh::icosphere(1);
        assert_eq!(parse_off(&m.to_off()).unwrap(), m);
    }

    #[test]
    fn icosphere_euler_and_area() {
        for level in 0..4 {
            let m = TriMesh::icosphere(level);
            assert_eq!(m.euler_characteristic(), 2);
            assert_eq!(m.triangles().len(), 20 * 4usize.pow(level as u32));
        }
        let area = TriMesh::icosphere(3).area();
        assert!((area / (4.0 * std::f64::consts::PI) - 1.0).abs() < 0.02);
    }

    #[test]
    fn sample_weights_reproduce_area_and_volume() {
        let m = TriMesh::icosphere(2);
        let area: f64 = m.surface_samples(3).iter().map(|s| s.weight).sum();
        assert!((area - m.area()).abs() < 1e-12);
        let vol: f64 = m.volume_samples(3, 4).iter().map(|s| s.weight).sum();
        assert!((vol - m.signed_volume()).abs() < 1e-12);
        assert!(m.volume_samples(2, 3).iter().all(|s| s.weight > 0.0));
    }
}
