//! Generated meshes used as fixtures and CLI output.

use std::collections::HashMap;
use std::f64::consts::TAU;

use super::{MeshError, TriMesh};
use crate::numcore::Vec3;
use crate::surfaces::CATENOID_HALF_HEIGHT;

pub const MAX_ICOSPHERE_LEVEL: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    /// Unit square `[0, 1]^2` in the `z = 0` plane, `n x n` cells, each
    /// split along its `(0,0)-(1,1)` diagonal.
    Grid { n: usize },
    /// Subdivided icosahedron projected onto a sphere.
    Icosphere { level: u32, radius: f64 },
    /// Open cylinder around the z axis, `z` in `[-length/2, length/2]`.
    Tube { radius: f64, length: f64, n_around: usize, n_along: usize },
    /// Open catenoid over `|s| <= 2`, oriented like the analytic surface.
    Catenoid { c: f64, n_around: usize, n_along: usize },
}

pub fn make_primitive(kind: &Primitive) -> Result<TriMesh, MeshError> {
    match *kind {
        Primitive::Grid { n } => grid(n),
        Primitive::Icosphere { level, radius } => icosphere(level, radius),
        Primitive::Tube { radius, length, n_around, n_along } => {
            positive("tube radius", radius)?;
            positive("tube length", length)?;
            ring_surface(
                n_around,
                n_along,
                |t, phi| Vec3::new(radius * phi.cos(), radius * phi.sin(), length * (t - 0.5)),
                true,
            )
        }
        Primitive::Catenoid { c, n_around, n_along } => {
            positive("catenoid waist", c)?;
            ring_surface(
                n_around,
                n_along,
                |t, phi| {
                    let s = CATENOID_HALF_HEIGHT * (2.0 * t - 1.0);
                    let w = c * (s / c).cosh();
                    Vec3::new(w * phi.cos(), w * phi.sin(), s)
                },
                false,
            )
        }
    }
}

fn positive(what: &str, x: f64) -> Result<(), MeshError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(MeshError::InvalidPrimitive(format!("{what} must be positive, got {x}")))
    }
}

fn grid(n: usize) -> Result<TriMesh, MeshError> {
    if n == 0 {
        return Err(MeshError::InvalidPrimitive("grid resolution must be at least 1".into()));
    }
    let side = n + 1;
    let mut positions = Vec::with_capacity(side * side);
    for j in 0..side {
        for i in 0..side {
            positions.push(Vec3::new(i as f64 / n as f64, j as f64 / n as f64, 0.0));
        }
    }
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = j * side + i;
            let (v10, v01, v11) = (v00 + 1, v00 + side, v00 + side + 1);
            faces.push([v00, v10, v11]);
            faces.push([v00, v11, v01]);
        }
    }
    TriMesh::new(positions, faces)
}

/// `(t, phi)` strip closed in `phi`, `t` in `[0, 1]`. With `phi_first` the
/// faces are wound so that `d/dphi x d/dt` is the normal, otherwise
/// `d/dt x d/dphi`.
fn ring_surface<F>(n_around: usize, n_along: usize, at: F, phi_first: bool) -> Result<TriMesh, MeshError>
where
    F: Fn(f64, f64) -> Vec3,
{
    if n_around < 3 || n_along < 1 {
        return Err(MeshError::InvalidPrimitive(format!(
            "need at least 3 segments around and 1 along, got {n_around} and {n_along}"
        )));
    }
    let mut positions = Vec::with_capacity(n_around * (n_along + 1));
    for j in 0..=n_along {
        for k in 0..n_around {
            positions.push(at(j as f64 / n_along as f64, TAU * k as f64 / n_around as f64));
        }
    }
    let id = |j: usize, k: usize| j * n_around + k % n_around;
    let mut faces = Vec::with_capacity(2 * n_around * n_along);
    for j in 0..n_along {
        for k in 0..n_around {
            let (a, b, c, d) = (id(j, k), id(j, k + 1), id(j + 1, k + 1), id(j + 1, k));
            if phi_first {
                faces.push([a, b, c]);
                faces.push([a, c, d]);
            } else {
                faces.push([a, d, c]);
                faces.push([a, c, b]);
            }
        }
    }
    TriMesh::new(positions, faces)
}

fn icosphere(level: u32, radius: f64) -> Result<TriMesh, MeshError> {
    positive("icosphere radius", radius)?;
    if level > MAX_ICOSPHERE_LEVEL {
        return Err(MeshError::InvalidPrimitive(format!("icosphere level {level} exceeds {MAX_ICOSPHERE_LEVEL}")));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut positions: Vec<Vec3> = [
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
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize() * radius)
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
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
        let mut midpoint = |a: usize, b: usize, positions: &mut Vec<Vec3>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                positions.push((positions[a] + positions[b]).normalize() * radius);
                positions.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut positions);
            let bc = midpoint(b, c, &mut positions);
            let ca = midpoint(c, a, &mut positions);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    TriMesh::new(positions, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trimesh::total_area;
    use std::f64::consts::PI;

    #[test]
    fn counts() {
        let g = make_primitive(&Primitive::Grid { n: 1 }).unwrap();
        assert_eq!((g.vertex_count(), g.face_count()), (4, 2));
        assert!((total_area(&g) - 1.0).abs() < 1e-15);
        for level in 0..=4 {
            let m = make_primitive(&Primitive::Icosphere { level, radius: 1.0 }).unwrap();
            let f = 20 * 4usize.pow(level);
            assert_eq!((m.vertex_count(), m.face_count()), (2 + f / 2, f));
        }
        let tube = make_primitive(&Primitive::Tube { radius: 1.0, length: 2.0, n_around: 12, n_along: 4 }).unwrap();
        assert_eq!((tube.vertex_count(), tube.face_count()), (60, 96));
    }

    #[test]
    fn outward_orientation() {
        let ico = make_primitive(&Primitive::Icosphere { level: 2, radius: 2.0 }).unwrap();
        for f in 0..ico.face_count() {
            let [a, b, c] = ico.corners(f);
            assert!(ico.face_normal(f).dot(&(a + b + c)) > 0.0);
        }
        let tube = make_primitive(&Primitive::Tube { radius: 1.0, length: 2.0, n_around: 12, n_along: 4 }).unwrap();
        for f in 0..tube.face_count() {
            let [a, b, c] = tube.corners(f);
            let radial = Vec3::new(a.x + b.x + c.x, a.y + b.y + c.y, 0.0);
            assert!(tube.face_normal(f).dot(&radial) > 0.0);
        }
    }

    #[test]
    fn catenoid_mesh_follows_surface_orientation() {
        use crate::surfaces::{frame, SurfaceKind};
        let mesh = make_primitive(&Primitive::Catenoid { c: 1.0, n_around: 24, n_along: 8 }).unwrap();
        let surface = SurfaceKind::catenoid(1.0).unwrap();
        let [a, b, c] = mesh.corners(0);
        let centroid = (a + b + c) / 3.0;
        let phi = centroid.y.atan2(centroid.x);
        let n = frame(&surface, centroid.z, phi).unwrap().normal;
        assert!(mesh.face_normal(0).dot(&n) > 0.9);
    }

    #[test]
    fn icosphere_area_converges_from_below() {
        let areas: Vec<f64> = (0..=3)
            .map(|level| total_area(&make_primitive(&Primitive::Icosphere { level, radius: 1.0 }).unwrap()))
            .collect();
        assert!(areas.windows(2).all(|w| w[0] < w[1]));
        assert!(areas.iter().all(|&a| a < 4.0 * PI));
        assert!((4.0 * PI - areas[3]) / (4.0 * PI) < 0.01);
    }

    #[test]
    fn bad_parameters() {
        assert!(make_primitive(&Primitive::Grid { n: 0 }).is_err());
        assert!(make_primitive(&Primitive::Icosphere { level: 7, radius: 1.0 }).is_err());
        assert!(make_primitive(&Primitive::Icosphere { level: 1, radius: 0.0 }).is_err());
        assert!(make_primitive(&Primitive::Tube { radius: 1.0, length: 1.0, n_around: 2, n_along: 1 }).is_err());
        assert!(make_primitive(&Primitive::Catenoid { c: 1.0, n_around: 8, n_along: 0 }).is_err());
    }
}
