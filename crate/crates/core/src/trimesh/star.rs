//! One-ring extraction around a vertex.

use std::collections::HashMap;

use super::{MeshError, TriMesh, MIN_FACE_AREA};
use crate::numcore::Vec3;

/// One triangle of a vertex star, seen from the center vertex `O`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarEntry {
    pub face: usize,
    /// The two other corners `(P, Q)`, in the face's winding order after `O`.
    pub opposite: [usize; 2],
    pub area: f64,
    /// Length of the edge `PQ`.
    pub opposite_length: f64,
    /// Unit vector in the triangle's plane, perpendicular to `PQ`, pointing
    /// from `O` toward `PQ`.
    pub conormal: Vec3,
}

/// All triangles incident to one vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexStar {
    pub center: usize,
    pub ring: Vec<StarEntry>,
    /// True unless the opposite edges form a single closed loop.
    pub is_boundary: bool,
}

impl VertexStar {
    pub fn valence(&self) -> usize {
        self.ring.len()
    }

    pub fn area(&self) -> f64 {
        self.ring.iter().map(|e| e.area).sum()
    }

    /// Total length of the opposite-edge polygon.
    pub fn perimeter(&self) -> f64 {
        self.ring.iter().map(|e| e.opposite_length).sum()
    }
}

pub fn build_star(mesh: &TriMesh, v: usize) -> Result<VertexStar, MeshError> {
    if v >= mesh.vertex_count() {
        return Err(MeshError::VertexOutOfRange { vertex: v, count: mesh.vertex_count() });
    }
    let faces = mesh.incident_faces(v);
    if faces.is_empty() {
        return Err(MeshError::IsolatedVertex { vertex: v });
    }
    let pos = mesh.positions();
    let origin = pos[v];
    let mut ring = Vec::with_capacity(faces.len());
    for &f in faces {
        let face = mesh.faces()[f];
        let k = face.iter().position(|&i| i == v).expect("incident face contains the vertex");
        let (p, q) = (face[(k + 1) % 3], face[(k + 2) % 3]);
        let edge = pos[q] - pos[p];
        let to_edge = pos[p] - origin;
        let area = 0.5 * to_edge.cross(&(pos[q] - origin)).norm();
        let length = edge.norm();
        let foot = to_edge - edge * (to_edge.dot(&edge) / (length * length));
        let height = foot.norm();
        if !(area >= MIN_FACE_AREA && height > 0.0) {
            return Err(MeshError::ZeroArea { face: f, area, line: None });
        }
        ring.push(StarEntry { face: f, opposite: [p, q], area, opposite_length: length, conormal: foot / height });
    }
    let is_boundary = !is_single_loop(ring.iter().map(|e| e.opposite));
    Ok(VertexStar { center: v, ring, is_boundary })
}

/// Whether undirected edges form exactly one closed cycle.
fn is_single_loop(edges: impl Iterator<Item = [usize; 2]>) -> bool {
    let edges: Vec<[usize; 2]> = edges.collect();
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &[a, b] in &edges {
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    }
    if edges.len() < 3 || adjacency.values().any(|n| n.len() != 2) {
        return false;
    }
    let start = edges[0][0];
    let (mut prev, mut at) = (start, edges[0][1]);
    let mut steps = 1;
    while at != start {
        let next = adjacency[&at].iter().copied().find(|&n| n != prev).unwrap_or(prev);
        prev = at;
        at = next;
        steps += 1;
        if steps > edges.len() {
            return false;
        }
    }
    steps == edges.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trimesh::{make_primitive, Primitive};

    #[test]
    fn grid_stars() {
        let grid = make_primitive(&Primitive::Grid { n: 4 }).unwrap();
        let interior = build_star(&grid, 6).unwrap();
        assert_eq!(interior.valence(), 6);
        assert!(!interior.is_boundary);
        assert!(build_star(&grid, 0).unwrap().is_boundary);
        assert!(build_star(&grid, 2).unwrap().is_boundary);
    }

    #[test]
    fn single_triangle_entry() {
        let mesh = TriMesh::new(vec![Vec3::zeros(), Vec3::x(), Vec3::y()], vec![[0, 1, 2]]).unwrap();
        let star = build_star(&mesh, 0).unwrap();
        let e = star.ring[0];
        assert!((e.opposite_length - 2f64.sqrt()).abs() < 1e-15);
        assert!((e.conormal - Vec3::new(1.0, 1.0, 0.0) / 2f64.sqrt()).norm() < 1e-15);
        assert!((e.area - 0.5).abs() < 1e-15);
        assert!(star.is_boundary);
    }

    #[test]
    fn errors() {
        let mesh = TriMesh::new(vec![Vec3::zeros(), Vec3::x(), Vec3::y(), Vec3::z()], vec![[0, 1, 2]]).unwrap();
        assert!(matches!(build_star(&mesh, 3), Err(MeshError::IsolatedVertex { vertex: 3 })));
        assert!(matches!(build_star(&mesh, 4), Err(MeshError::VertexOutOfRange { .. })));
        let flat =
            TriMesh::new_allowing_degenerate(vec![Vec3::zeros(), Vec3::x(), 2.0 * Vec3::x()], vec![[0, 1, 2]]).unwrap();
        assert!(matches!(build_star(&flat, 0), Err(MeshError::ZeroArea { face: 0, .. })));
    }

    fn bundled() -> Vec<TriMesh> {
        [
            Primitive::Grid { n: 5 },
            Primitive::Icosphere { level: 2, radius: 1.0 },
            Primitive::Tube { radius: 0.5, length: 2.0, n_around: 10, n_along: 3 },
            Primitive::Catenoid { c: 1.0, n_around: 16, n_along: 6 },
        ]
        .iter()
        .map(|p| make_primitive(p).unwrap())
        .collect()
    }

    #[test]
    fn conormal_invariants_on_primitives() {
        for mesh in bundled() {
            for v in 0..mesh.vertex_count() {
                let star = build_star(&mesh, v).unwrap();
                for e in &star.ring {
                    assert!((e.conormal.norm() - 1.0).abs() <= 1e-12);
                    assert!(e.conormal.dot(&mesh.face_normal(e.face)).abs() <= 1e-10);
                    let mid = 0.5 * (mesh.positions()[e.opposite[0]] + mesh.positions()[e.opposite[1]]);
                    assert!(e.conormal.dot(&(mid - mesh.positions()[v])) > 0.0);
                    assert!(e.area > 0.0);
                }
            }
        }
    }

    #[test]
    fn boundary_flag_matches_edge_topology() {
        for mesh in bundled() {
            let boundary = mesh.boundary_vertices();
            for (v, &b) in boundary.iter().enumerate() {
                assert_eq!(build_star(&mesh, v).unwrap().is_boundary, b);
            }
        }
    }

    #[test]
    fn closed_mesh_stars_cover_each_face_three_times() {
        let mesh = make_primitive(&Primitive::Icosphere { level: 2, radius: 1.0 }).unwrap();
        let mut seen: HashMap<(usize, [usize; 2]), usize> = HashMap::new();
        for v in 0..mesh.vertex_count() {
            for e in build_star(&mesh, v).unwrap().ring {
                let [a, b] = e.opposite;
                *seen.entry((e.face, [a.min(b), a.max(b)])).or_default() += 1;
            }
        }
        assert_eq!(seen.len(), 3 * mesh.face_count());
        assert!(seen.values().all(|&n| n == 1));
        let mut per_face = vec![0; mesh.face_count()];
        for (f, _) in seen.keys() {
            per_face[*f] += 1;
        }
        assert!(per_face.iter().all(|&n| n == 3));
    }
}
