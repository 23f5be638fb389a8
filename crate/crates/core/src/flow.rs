//! Explicit mean-curvature flow on closed meshes.
//!
//! Each step moves every vertex by `dt * B(v)`, evaluated on the frozen
//! previous mesh. Since `B` is proportional to minus the area gradient, a
//! small enough step decreases total area.

use rayon::prelude::*;
use thiserror::Error;

use crate::discrete::{vector_mean_curvature, DiscreteError, DEFAULT_TOL_DIRECTION};
use crate::numcore::Vec3;
use crate::trimesh::{total_area, triangle_area, MeshError, TriMesh, MIN_FACE_AREA};

/// Largest step tried by [`stable_dt`].
pub const PROBE_START_DT: f64 = 1e-2;
const PROBE_HALVINGS: u32 = 40;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("time step must be finite and non-negative, got {0}")]
    InvalidStep(f64),
    #[error("flow requires a closed mesh, vertex {vertex} is on a boundary")]
    OpenMesh { vertex: usize },
    #[error("face {face} collapsed to area {area:e}")]
    Collapse { face: usize, area: f64 },
    #[error("no step down to {dt:e} decreases the area")]
    NoStableStep { dt: f64 },
    #[error(transparent)]
    Discrete(DiscreteError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

impl From<DiscreteError> for FlowError {
    fn from(e: DiscreteError) -> Self {
        match e {
            DiscreteError::BoundaryVertex { vertex } => Self::OpenMesh { vertex },
            other => Self::Discrete(other),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowRecord {
    pub step: usize,
    pub area: f64,
    pub max_curvature: f64,
    pub min_face_area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StopReason {
    Completed,
    /// The step would have produced a face below the minimum area.
    Collapse {
        step: usize,
        face: usize,
        area: f64,
    },
    /// The step would have increased total area; it was rejected.
    AreaIncrease {
        step: usize,
        before: f64,
        after: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrace {
    pub dt: f64,
    pub records: Vec<FlowRecord>,
    pub stop: StopReason,
}

impl FlowTrace {
    pub fn final_record(&self) -> &FlowRecord {
        self.records.last().expect("a trace always holds the initial state")
    }
}

fn check_dt(dt: f64) -> Result<(), FlowError> {
    if dt.is_finite() && dt >= 0.0 {
        Ok(())
    } else {
        Err(FlowError::InvalidStep(dt))
    }
}

/// `B(v)` for every vertex, in vertex order.
pub fn curvature_vectors(mesh: &TriMesh) -> Result<Vec<Vec3>, FlowError> {
    (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| Ok(vector_mean_curvature(mesh, v, DEFAULT_TOL_DIRECTION)?.vector))
        .collect()
}

fn advance(mesh: &TriMesh, b: &[Vec3], dt: f64) -> Result<TriMesh, FlowError> {
    let moved: Vec<Vec3> = mesh.positions().iter().zip(b).map(|(p, b)| p + dt * b).collect();
    for (face, &[i, j, k]) in mesh.faces().iter().enumerate() {
        let area = triangle_area(moved[i], moved[j], moved[k]);
        if !(area >= MIN_FACE_AREA) {
            return Err(FlowError::Collapse { face, area });
        }
    }
    Ok(mesh.with_positions(moved)?)
}

/// One explicit Euler step.
pub fn mcf_step(mesh: &TriMesh, dt: f64) -> Result<TriMesh, FlowError> {
    check_dt(dt)?;
    advance(mesh, &curvature_vectors(mesh)?, dt)
}

fn record(step: usize, mesh: &TriMesh, b: &[Vec3]) -> FlowRecord {
    FlowRecord {
        step,
        area: total_area(mesh),
        max_curvature: b.iter().map(|b| b.norm()).fold(0.0, f64::max),
        min_face_area: mesh.min_face_area(),
    }
}

/// Runs up to `n_steps` steps. Collapse and area increase end the run early
/// and are reported in the trace; the returned mesh is the last accepted one.
pub fn run_flow(mesh: &TriMesh, dt: f64, n_steps: usize) -> Result<(FlowTrace, TriMesh), FlowError> {
    check_dt(dt)?;
    let mut current = mesh.clone();
    let mut b = curvature_vectors(&current)?;
    let mut records = vec![record(0, &current, &b)];
    let mut stop = StopReason::Completed;
    for step in 1..=n_steps {
        let next = match advance(&current, &b, dt) {
            Ok(next) => next,
            Err(FlowError::Collapse { face, area }) => {
                stop = StopReason::Collapse { step, face, area };
                break;
            }
            Err(e) => return Err(e),
        };
        let (before, after) = (records[records.len() - 1].area, total_area(&next));
        if dt > 0.0 && after >= before {
            stop = StopReason::AreaIncrease { step, before, after };
            break;
        }
        b = curvature_vectors(&next)?;
        records.push(record(step, &next, &b));
        current = next;
    }
    Ok((FlowTrace { dt, records, stop }, current))
}

/// Halves from [`PROBE_START_DT`] until one step decreases total area.
pub fn stable_dt(mesh: &TriMesh) -> Result<f64, FlowError> {
    stable_dt_over(mesh, 1)
}

/// Halves from [`PROBE_START_DT`] until a run of `probe_steps` steps
/// decreases total area at every step.
pub fn stable_dt_over(mesh: &TriMesh, probe_steps: usize) -> Result<f64, FlowError> {
    let mut dt = PROBE_START_DT;
    for _ in 0..PROBE_HALVINGS {
        let (trace, _) = run_flow(mesh, dt, probe_steps.max(1))?;
        if trace.stop == StopReason::Completed {
            return Ok(dt);
        }
        dt *= 0.5;
    }
    Err(FlowError::NoStableStep { dt })
}
