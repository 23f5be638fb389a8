//! Indexed triangle meshes.
//!
//! [`TriMesh`] is validated on construction and immutable afterwards. File
//! I/O lives in [`io`], generated fixtures in [`primitives`], and one-ring
//! extraction in [`star`].

pub mod io;
pub mod primitives;
pub mod star;

use thiserror::Error;

use crate::numcore::Vec3;

pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh, MeshFormat};
pub use primitives::{make_primitive, Primitive};
pub use star::{build_star, StarEntry, VertexStar};

/// Faces with less area than this are rejected unless explicitly permitted.
pub const MIN_FACE_AREA: f64 = 1e-14;

fn at_line(line: &Option<usize>) -> String {
    line.map(|l| format!("line {l}: ")).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{}face {face} references vertex {index}, but the mesh has {count} vertices", at_line(.line))]
    IndexOutOfRange { face: usize, index: i64, count: usize, line: Option<usize> },
    #[error("{}face {face} repeats vertex {vertex}", at_line(.line))]
    RepeatedVertex { face: usize, vertex: usize, line: Option<usize> },
    #[error("{}face {face} has area {area:e}, below the minimum {MIN_FACE_AREA:e}", at_line(.line))]
    ZeroArea { face: usize, area: f64, line: Option<usize> },
    #[error("{}vertex {vertex} has a non-finite coordinate", at_line(.line))]
    NonFinitePosition { vertex: usize, line: Option<usize> },
    #[error("vertex {vertex} out of range for a mesh with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("vertex {vertex} has no incident faces")]
    IsolatedVertex { vertex: usize },
    #[error("unsupported mesh format: {0}")]
    UnknownFormat(String),
    #[error("invalid primitive: {0}")]
    InvalidPrimitive(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl MeshError {
    /// Source line the error refers to, when it came from a parser.
    pub fn line(&self) -> Option<usize> {
        match self {
            Self::Parse { line, .. } => Some(*line),
            Self::IndexOutOfRange { line, .. }
            | Self::RepeatedVertex { line, .. }
            | Self::ZeroArea { line, .. }
            | Self::NonFinitePosition { line, .. } => *line,
            _ => None,
        }
    }
}

impl From<std::io::Error> for MeshError {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}

/// Indexed triangle mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    positions: Vec<Vec3>,
    faces: Vec<[usize; 3]>,
    incident: Vec<Vec<usize>>,
    allow_degenerate: bool,
}

/// Source line numbers for diagnostics, aligned with vertices and faces.
#[derive(Debug, Clone, Default)]
pub(crate) struct SourceLines {
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
}

impl TriMesh {
    /// Validated mesh. Rejects out-of-range indices, repeated vertices,
    /// non-finite positions and faces with area below [`MIN_FACE_AREA`].
    pub fn new(positions: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        Self::build(positions, faces, false, None)
    }

    /// Like [`TriMesh::new`] but keeps zero-area faces.
    pub fn new_allowing_degenerate(positions: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        Self::build(positions, faces, true, None)
    }

    pub(crate) fn build(
        positions: Vec<Vec3>,
        faces: Vec<[usize; 3]>,
        allow_degenerate: bool,
        lines: Option<&SourceLines>,
    ) -> Result<Self, MeshError> {
        let face_line = |f: usize| lines.and_then(|l| l.faces.get(f).copied());
        for (i, p) in positions.iter().enumerate() {
            if !p.iter().all(|c| c.is_finite()) {
                let line = lines.and_then(|l| l.vertices.get(i).copied());
                return Err(MeshError::NonFinitePosition { vertex: i, line });
            }
        }
        let count = positions.len();
        let mut incident = vec![Vec::new(); count];
        for (f, face) in faces.iter().enumerate() {
            for &index in face {
                if index >= count {
                    return Err(MeshError::IndexOutOfRange { face: f, index: index as i64, count, line: face_line(f) });
                }
            }
            let [a, b, c] = *face;
            if a == b || b == c || a == c {
                let vertex = if a == b || a == c { a } else { b };
                return Err(MeshError::RepeatedVertex { face: f, vertex, line: face_line(f) });
            }
            let area = triangle_area(positions[a], positions[b], positions[c]);
            if !allow_degenerate && !(area >= MIN_FACE_AREA) {
                return Err(MeshError::ZeroArea { face: f, area, line: face_line(f) });
            }
            for &index in face {
                incident[index].push(f);
            }
        }
        Ok(Self { positions, faces, incident, allow_degenerate })
    }

    /// Same connectivity with new vertex positions, revalidated.
    pub fn with_positions(&self, positions: Vec<Vec3>) -> Result<Self, MeshError> {
        if positions.len() != self.positions.len() {
            return Err(MeshError::VertexOutOfRange { vertex: positions.len(), count: self.positions.len() });
        }
        Self::build(positions, self.faces.clone(), self.allow_degenerate, None)
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// Faces incident to `v`, in ascending order.
    pub fn incident_faces(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn corners(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.faces[f];
        [self.positions[a], self.positions[b], self.positions[c]]
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.corners(f);
        triangle_area(a, b, c)
    }

    /// Unit normal by the right-hand rule on the stored corner order.
    pub fn face_normal(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.corners(f);
        (b - a).cross(&(c - a)).normalize()
    }

    pub fn min_face_area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).fold(f64::INFINITY, f64::min)
    }

    /// Vertices on an open boundary: those with an incident edge used by
    /// exactly one face.
    pub fn boundary_vertices(&self) -> Vec<bool> {
        let mut uses = std::collections::HashMap::new();
        for face in &self.faces {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                *uses.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
            }
        }
        let mut boundary = vec![false; self.positions.len()];
        for ((a, b), n) in uses {
            if n == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
        }
        boundary
    }
}

pub fn triangle_area(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Sum of triangle areas.
pub fn total_area(mesh: &TriMesh) -> f64 {
    (0..mesh.face_count()).map(|f| mesh.face_area(f)).sum()
}
