//! Vector mean curvature on triangle meshes.
//!
//! For a vertex `O` with incident triangles `T_i` of area `A_i`, let `a_i` be
//! the length of the edge of `T_i` opposite `O` and `n_i` the unit vector in
//! the plane of `T_i`, perpendicular to that edge and pointing away from `O`.
//! The vector mean curvature is
//!
//! ```text
//! B = (sum a_i n_i) / (sum A_i)
//! ```
//!
//! The numerator equals `-2` times the gradient of the total mesh area with
//! respect to the position of `O`, so `B` vanishes on flat stars and at any
//! critical point of area. On a convex closed mesh `B` points inward.
//!
//! Replacing `n_i` with the in-plane derivative of a piecewise-linear field
//! across the opposite edge gives a surface Laplacian of that field.

use rayon::prelude::*;
use thiserror::Error;

use crate::numcore::Vec3;
use crate::trimesh::{build_star, MeshError, TriMesh, VertexStar, MIN_FACE_AREA};

pub const DEFAULT_TOL_DIRECTION: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiscreteError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("vertex {vertex} lies on an open boundary")]
    BoundaryVertex { vertex: usize },
    #[error("field has {got} values but the mesh has {expected} vertices")]
    FieldLength { expected: usize, got: usize },
    #[error("field value at vertex {vertex} is not finite")]
    NonFiniteField { vertex: usize },
}

/// Discrete vector mean curvature at one vertex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub vector: Vec3,
    pub magnitude: f64,
    /// `vector / magnitude`, absent when the sample is near-minimal.
    pub direction: Option<Vec3>,
    pub near_minimal: bool,
    /// `sum a_i / sum A_i`, the natural curvature scale of the star.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureOptions {
    /// Relative threshold on `|B| / scale` below which no direction is
    /// reported.
    pub tol_direction: f64,
    /// Evaluate boundary stars as-is instead of refusing them.
    pub allow_boundary: bool,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        Self { tol_direction: DEFAULT_TOL_DIRECTION, allow_boundary: false }
    }
}

/// Per-vertex values on a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(mesh: &TriMesh, values: Vec<f64>) -> Result<Self, DiscreteError> {
        if values.len() != mesh.vertex_count() {
            return Err(DiscreteError::FieldLength { expected: mesh.vertex_count(), got: values.len() });
        }
        if let Some(vertex) = values.iter().position(|x| !x.is_finite()) {
            return Err(DiscreteError::NonFiniteField { vertex });
        }
        Ok(Self { values })
    }

    pub fn from_fn<F: Fn(Vec3) -> f64>(mesh: &TriMesh, f: F) -> Result<Self, DiscreteError> {
        Self::new(mesh, mesh.positions().iter().map(|&p| f(p)).collect())
    }

    /// One Cartesian coordinate of every vertex.
    pub fn coordinate(mesh: &TriMesh, axis: usize) -> Self {
        Self { values: mesh.positions().iter().map(|p| p[axis]).collect() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn interior_star(mesh: &TriMesh, v: usize, allow_boundary: bool) -> Result<VertexStar, DiscreteError> {
    let star = build_star(mesh, v)?;
    if star.is_boundary && !allow_boundary {
        return Err(DiscreteError::BoundaryVertex { vertex: v });
    }
    Ok(star)
}

fn weighted_conormal_sum(star: &VertexStar) -> Vec3 {
    star.ring.iter().map(|e| e.conormal * e.opposite_length).sum()
}

/// `sum a_i n_i` over the star of `v`. Boundary stars are accepted.
pub fn star_sum(mesh: &TriMesh, v: usize) -> Result<Vec3, DiscreteError> {
    Ok(weighted_conormal_sum(&build_star(mesh, v)?))
}

pub fn vector_mean_curvature(mesh: &TriMesh, v: usize, tol_direction: f64) -> Result<CurvatureSample, DiscreteError> {
    vector_mean_curvature_with(mesh, v, &CurvatureOptions { tol_direction, ..Default::default() })
}

pub fn vector_mean_curvature_with(
    mesh: &TriMesh,
    v: usize,
    options: &CurvatureOptions,
) -> Result<CurvatureSample, DiscreteError> {
    let star = interior_star(mesh, v, options.allow_boundary)?;
    let area = star.area();
    let vector = weighted_conormal_sum(&star) / area;
    let magnitude = vector.norm();
    let scale = star.perimeter() / area;
    let near_minimal = magnitude < options.tol_direction * scale;
    let direction = (!near_minimal).then(|| vector / magnitude);
    Ok(CurvatureSample { vector, magnitude, direction, near_minimal, scale })
}

/// Gradient of the total mesh area with respect to the position of `v`,
/// from the cross-product form `1/2 N x (Q - P)` per incident triangle
/// `(v, P, Q)`. Defined on boundary vertices too.
pub fn area_gradient(mesh: &TriMesh, v: usize) -> Result<Vec3, DiscreteError> {
    if v >= mesh.vertex_count() {
        return Err(MeshError::VertexOutOfRange { vertex: v, count: mesh.vertex_count() }.into());
    }
    let pos = mesh.positions();
    let mut grad = Vec3::zeros();
    for &f in mesh.incident_faces(v) {
        let face = mesh.faces()[f];
        let k = face.iter().position(|&i| i == v).expect("incident face contains the vertex");
        let (p, q) = (pos[face[(k + 1) % 3]], pos[face[(k + 2) % 3]]);
        let cross = (p - pos[v]).cross(&(q - pos[v]));
        let twice_area = cross.norm();
        if !(0.5 * twice_area >= MIN_FACE_AREA) {
            return Err(MeshError::ZeroArea { face: f, area: 0.5 * twice_area, line: None }.into());
        }
        grad += 0.5 * (cross / twice_area).cross(&(q - p));
    }
    Ok(grad)
}

/// Constant gradient of the linear interpolant of `values` on a triangle.
pub fn triangle_gradient(corners: [Vec3; 3], values: [f64; 3]) -> Vec3 {
    let [a, b, c] = corners;
    let cross = (b - a).cross(&(c - a));
    let twice_area = cross.norm();
    let normal = cross / twice_area;
    let rotated = |edge: Vec3| normal.cross(&edge);
    (rotated(c - b) * values[0] + rotated(a - c) * values[1] + rotated(b - a) * values[2]) / twice_area
}

/// `sum a_i (g_i . n_i) / sum A_i`, with `g_i` the gradient of the field's
/// linear interpolant on `T_i`.
pub fn laplacian(mesh: &TriMesh, v: usize, field: &ScalarField) -> Result<f64, DiscreteError> {
    if field.len() != mesh.vertex_count() {
        return Err(DiscreteError::FieldLength { expected: mesh.vertex_count(), got: field.len() });
    }
    let star = interior_star(mesh, v, false)?;
    let f = field.values();
    let numerator: f64 = star
        .ring
        .iter()
        .map(|e| {
            let [a, b, c] = mesh.faces()[e.face];
            let g = triangle_gradient(mesh.corners(e.face), [f[a], f[b], f[c]]);
            e.opposite_length * g.dot(&e.conormal)
        })
        .sum();
    Ok(numerator / star.area())
}

/// Outcome of evaluating one vertex in a batch.
#[derive(Debug, Clone, PartialEq)]
pub enum CurvatureEntry {
    Sample(CurvatureSample),
    Boundary,
    Failed(DiscreteError),
}

impl CurvatureEntry {
    pub fn sample(&self) -> Option<&CurvatureSample> {
        match self {
            Self::Sample(s) => Some(s),
            _ => None,
        }
    }
}

/// Vector mean curvature at every vertex, in vertex order. Boundary and
/// failing vertices become markers.
pub fn curvature_field(mesh: &TriMesh, tol_direction: f64) -> Vec<(usize, CurvatureEntry)> {
    (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| {
            let entry = match vector_mean_curvature(mesh, v, tol_direction) {
                Ok(s) => CurvatureEntry::Sample(s),
                Err(DiscreteError::BoundaryVertex { .. }) => CurvatureEntry::Boundary,
                Err(e) => CurvatureEntry::Failed(e),
            };
            (v, entry)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numcore::central_gradient;
    use crate::trimesh::{make_primitive, total_area, Primitive};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TriMesh {
        make_primitive(&Primitive::Grid { n }).unwrap()
    }

    fn ico(level: u32) -> TriMesh {
        make_primitive(&Primitive::Icosphere { level, radius: 1.0 }).unwrap()
    }

    /// Apex of a pyramid over the square with corners `(+-1, 0, 0)`,
    /// `(0, +-1, 0)`, apex at height `t`.
    fn pyramid(t: f64) -> TriMesh {
        let p = vec![
            Vec3::new(0.0, 0.0, t),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(-1.0, 0.0, 0.0),
            Vec3::new(0.0, -1.0, 0.0),
        ];
        TriMesh::new(p, vec![[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]]).unwrap()
    }

    fn perturbed(mesh: &TriMesh, amplitude: f64, seed: u64) -> TriMesh {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let moved = mesh
            .positions()
            .iter()
            .map(|p| {
                p + amplitude * Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            })
            .collect();
        mesh.with_positions(moved).unwrap()
    }

    fn rel(a: Vec3, b: Vec3) -> f64 {
        (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn flat_grid_is_near_minimal() {
        let g = grid(16);
        let s = vector_mean_curvature(&g, 8 * 17 + 8, DEFAULT_TOL_DIRECTION).unwrap();
        assert!(s.vector.norm() <= 1e-12 * s.scale);
        assert!(s.near_minimal);
        assert!(s.direction.is_none());
        assert!(matches!(
            vector_mean_curvature(&g, 0, DEFAULT_TOL_DIRECTION),
            Err(DiscreteError::BoundaryVertex { vertex: 0 })
        ));
        let forced =
            vector_mean_curvature_with(&g, 0, &CurvatureOptions { allow_boundary: true, ..Default::default() });
        assert!(forced.is_ok());
    }

    #[test]
    fn pyramid_apex_matches_closed_form() {
        // Opposite-edge midpoints sit at (+-1/2, +-1/2, 0); each n_i is the
        // unit slant direction, so B_z = -2 t / (1/2 + t^2).
        for t in [0.3, 1.0, 2.5] {
            let s = vector_mean_curvature(&pyramid(t), 0, DEFAULT_TOL_DIRECTION).unwrap();
            assert!(s.vector.x.abs() <= 1e-12 && s.vector.y.abs() <= 1e-12);
            assert!((s.vector.z + 2.0 * t / (0.5 + t * t)).abs() <= 1e-12);
            let dir = s.direction.unwrap();
            assert!((dir - Vec3::new(0.0, 0.0, -1.0)).norm() <= 1e-12);
            assert!((s.vector - s.magnitude * dir).norm() <= 1e-12);
        }
    }

    #[test]
    fn icosahedron_vertex_matches_closed_form() {
        // Valence-5 cone on the unit sphere: ring at polar angle alpha with
        // cos(alpha) = 1/sqrt(5); B . N_out = -2 (1 - cos a) / h^2, h the slant
        // height to an opposite-edge midpoint.
        let mesh = ico(0);
        let cos_a = 1.0 / 5f64.sqrt();
        let sin_a = (1.0 - cos_a * cos_a).sqrt();
        let h2 = (sin_a * (PI / 5.0).cos()).powi(2) + (1.0 - cos_a).powi(2);
        let expect = -2.0 * (1.0 - cos_a) / h2;
        for v in 0..12 {
            let s = vector_mean_curvature(&mesh, v, DEFAULT_TOL_DIRECTION).unwrap();
            let n_out = mesh.positions()[v].normalize();
            assert!((s.vector.dot(&n_out) - expect).abs() <= 1e-12);
            assert!((s.vector - n_out * expect).norm() <= 1e-12);
        }
    }

    #[test]
    fn area_gradient_single_triangle() {
        let mesh = TriMesh::new(vec![Vec3::zeros(), Vec3::x(), Vec3::y()], vec![[0, 1, 2]]).unwrap();
        let g = area_gradient(&mesh, 0).unwrap();
        assert!((g - Vec3::new(-0.5, -0.5, 0.0)).norm() <= 1e-15);
        assert!((star_sum(&mesh, 0).unwrap() + 2.0 * g).norm() <= 1e-15);
    }

    #[test]
    fn area_gradient_matches_finite_differences() {
        let meshes = [perturbed(&ico(1), 0.08, 1), perturbed(&grid(5), 0.05, 2), pyramid(0.7)];
        for mesh in &meshes {
            for v in 0..mesh.vertex_count() {
                let analytic = area_gradient(mesh, v).unwrap();
                let fd = central_gradient(
                    |x| {
                        let mut p = mesh.positions().to_vec();
                        p[v] = x;
                        total_area(&TriMesh::new_allowing_degenerate(p, mesh.faces().to_vec()).unwrap())
                    },
                    mesh.positions()[v],
                    1e-5,
                )
                .unwrap();
                assert!(rel(analytic, fd) <= 1e-6, "vertex {v}: {analytic} vs {fd}");
            }
        }
        assert!(area_gradient(&grid(16), 8 * 17 + 8).unwrap().norm() <= 1e-15);
    }

    #[test]
    fn star_sum_is_minus_twice_area_gradient() {
        let meshes = [
            ico(2),
            grid(6),
            perturbed(&ico(2), 0.03, 5),
            make_primitive(&Primitive::Tube { radius: 1.0, length: 3.0, n_around: 9, n_along: 4 }).unwrap(),
        ];
        for mesh in &meshes {
            for v in 0..mesh.vertex_count() {
                let s = star_sum(mesh, v).unwrap();
                let g = area_gradient(mesh, v).unwrap();
                let scale = build_star(mesh, v).unwrap().perimeter();
                assert!((s + 2.0 * g).norm() <= 1e-12 * scale, "vertex {v}");
            }
        }
    }

    #[test]
    fn star_sums_cancel_over_the_mesh() {
        for mesh in [ico(3), grid(7), perturbed(&grid(7), 0.04, 9)] {
            let mut total = Vec3::zeros();
            let mut scale = 0.0;
            for v in 0..mesh.vertex_count() {
                let star = build_star(&mesh, v).unwrap();
                total += weighted_conormal_sum(&star);
                scale += star.ring.iter().map(|e| e.opposite_length).sum::<f64>();
            }
            assert!(total.norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn laplacian_of_affine_field_vanishes() {
        let g = grid(16);
        let f = ScalarField::from_fn(&g, |p| 3.0 * p.x - 2.0 * p.y + 7.0).unwrap();
        for v in 0..g.vertex_count() {
            match laplacian(&g, v, &f) {
                Ok(l) => assert!(l.abs() <= 1e-10),
                Err(DiscreteError::BoundaryVertex { .. }) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }

    #[test]
    fn laplacian_of_quadratic_on_regular_grid() {
        // On the diagonal-split grid the numerator reduces to twice the
        // five-point stencil, 8 h^2, over a star area of 3 h^2.
        for n in [4, 32] {
            let g = grid(n);
            let f = ScalarField::from_fn(&g, |p| p.x * p.x + p.y * p.y).unwrap();
            let v = (n / 2) * (n + 1) + n / 2;
            assert!((laplacian(&g, v, &f).unwrap() - 8.0 / 3.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn coordinate_laplacian_reproduces_curvature() {
        for mesh in [ico(2), perturbed(&ico(2), 0.05, 4)] {
            let fields: Vec<ScalarField> = (0..3).map(|k| ScalarField::coordinate(&mesh, k)).collect();
            for v in 0..mesh.vertex_count() {
                let b = vector_mean_curvature(&mesh, v, DEFAULT_TOL_DIRECTION).unwrap().vector;
                for k in 0..3 {
                    let l = laplacian(&mesh, v, &fields[k]).unwrap();
                    assert!((l - b[k]).abs() <= 1e-12 * b.norm().max(1.0));
                }
            }
        }
    }

    #[test]
    fn field_validation() {
        let g = grid(2);
        assert!(matches!(ScalarField::new(&g, vec![0.0; 3]), Err(DiscreteError::FieldLength { .. })));
        let mut vals = vec![0.0; 9];
        vals[4] = f64::INFINITY;
        assert!(matches!(ScalarField::new(&g, vals), Err(DiscreteError::NonFiniteField { vertex: 4 })));
        let f = ScalarField::new(&g, vec![1.0; 9]).unwrap();
        assert!(matches!(laplacian(&g, 0, &f), Err(DiscreteError::BoundaryVertex { .. })));
    }

    #[test]
    fn batch_markers() {
        let field = curvature_field(&grid(8), DEFAULT_TOL_DIRECTION);
        let samples: Vec<_> = field.iter().filter_map(|(_, e)| e.sample()).collect();
        assert_eq!(samples.len(), 49);
        assert!(samples.iter().all(|s| s.near_minimal));
        assert_eq!(field.iter().filter(|(_, e)| *e == CurvatureEntry::Boundary).count(), 32);
        assert!(field.iter().enumerate().all(|(i, (v, _))| i == *v));

        let field = curvature_field(&ico(2), DEFAULT_TOL_DIRECTION);
        assert_eq!(field.len(), 162);
        assert!(field.iter().all(|(_, e)| e.sample().is_some()));

        let tube = make_primitive(&Primitive::Tube { radius: 1.0, length: 2.0, n_around: 10, n_along: 3 }).unwrap();
        let field = curvature_field(&tube, DEFAULT_TOL_DIRECTION);
        let boundary: Vec<usize> =
            field.iter().filter(|(_, e)| *e == CurvatureEntry::Boundary).map(|(v, _)| *v).collect();
        assert_eq!(boundary, (0..10).chain(30..40).collect::<Vec<_>>());
    }

    #[test]
    fn icosphere_error_shrinks_with_level() {
        let errors: Vec<f64> = (1..=4)
            .map(|level| {
                let mesh = ico(level);
                (0..mesh.vertex_count())
                    .map(|v| {
                        let b = vector_mean_curvature(&mesh, v, DEFAULT_TOL_DIRECTION).unwrap().vector;
                        (b.dot(&mesh.positions()[v].normalize()) + 2.0).abs()
                    })
                    .fold(0.0, f64::max)
            })
            .collect();
        println!("icosphere max |B.N + 2| by level: {errors:?}");
        assert!(errors.windows(2).all(|w| w[1] < w[0]));
    }

    fn rotation(axis: Vec3, angle: f64) -> nalgebra::Rotation3<f64> {
        nalgebra::Rotation3::from_axis_angle(&nalgebra::Unit::new_normalize(axis), angle)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn rotation_equivariance(ax in -1.0f64..1.0, ay in -1.0f64..1.0, az in 0.1f64..1.0, angle in 0.0f64..std::f64::consts::TAU, seed in 0u64..1000) {
            let mesh = perturbed(&ico(1), 0.05, seed);
            let q = rotation(Vec3::new(ax, ay, az), angle);
            let turned = mesh.with_positions(mesh.positions().iter().map(|p| q * p).collect()).unwrap();
            for v in 0..mesh.vertex_count() {
                let b = vector_mean_curvature(&mesh, v, DEFAULT_TOL_DIRECTION).unwrap().vector;
                let bq = vector_mean_curvature(&turned, v, DEFAULT_TOL_DIRECTION).unwrap().vector;
                prop_assert!((bq - q * b).norm() <= 1e-10);
            }
        }

        #[test]
        fn scale_covariance(s in 0.05f64..20.0, seed in 0u64..1000) {
            let mesh = perturbed(&ico(1), 0.05, seed);
            let scaled = mesh.with_positions(mesh.positions().iter().map(|p| p * s).collect()).unwrap();
            for v in 0..mesh.vertex_count() {
                let b = vector_mean_curvature(&mesh, v, DEFAULT_TOL_DIRECTION).unwrap().vector;
                let bs = vector_mean_curvature(&scaled, v, DEFAULT_TOL_DIRECTION).unwrap().vector;
                prop_assert!(rel(bs, b / s) <= 1e-10);
            }
        }

        #[test]
        fn planar_meshes_have_zero_curvature(seed in 0u64..1000, n in 3usize..10) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let base = grid(n);
            let h = 0.3 / n as f64;
            let q = rotation(Vec3::new(rng.gen(), rng.gen(), 1.0), rng.gen_range(0.0..3.0));
            let moved: Vec<Vec3> = base.positions().iter().map(|p| {
                q * Vec3::new(p.x + h * rng.gen_range(-1.0..1.0), p.y + h * rng.gen_range(-1.0..1.0), 0.0)
            }).collect();
            let mesh = base.with_positions(moved).unwrap();
            for (_, entry) in curvature_field(&mesh, DEFAULT_TOL_DIRECTION) {
                if let CurvatureEntry::Sample(s) = entry {
                    prop_assert!(s.vector.norm() <= 1e-12 * s.scale);
                }
            }
        }
    }
}
