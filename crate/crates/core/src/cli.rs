//! Command-line front end. Every subcommand writes CSV with a header row.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when a tolerance given on
//! the command line is exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::contour::{shrinking_limit, verify_identity, ContourError, ParamRegion, DEFAULT_RADII};
use crate::discrete::{
    area_gradient, curvature_field, laplacian, CurvatureEntry, DiscreteError, ScalarField, DEFAULT_TOL_DIRECTION,
};
use crate::flow::{run_flow, FlowError, StopReason};
use crate::numcore::{central_gradient, fmt_real, NumError, QuadratureRule, Vec3, DEFAULT_NODES, DEFAULT_PANELS};
use crate::surfaces::{HeightField, SurfaceError, SurfaceKind};
use crate::trimesh::{
    build_star, load_mesh, make_primitive, save_mesh, triangle_area, write_mesh, MeshError, MeshFormat, Primitive,
    TriMesh,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_TOLERANCE: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: line {line}: {message}")]
    Field { path: String, line: usize, message: String },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Contour(#[from] ContourError),
    #[error(transparent)]
    Numeric(#[from] NumError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Discrete(#[from] DiscreteError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

#[derive(Debug, Parser)]
#[command(name = "meancurv", version, about = "Mean-curvature experiments on analytic surfaces and triangle meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare the patch integral of N H with the contour integral of the conormal.
    Verify(VerifyArgs),
    /// Estimate N H at a point from shrinking disks.
    Limit(LimitArgs),
    /// Per-vertex vector mean curvature of a mesh.
    Curvature(CurvatureArgs),
    /// Compare the analytic area gradient with central differences.
    Gradcheck(GradcheckArgs),
    /// Discrete Laplacian of a per-vertex field.
    Laplacian(LaplacianArgs),
    /// Write a generated mesh.
    Make(MakeArgs),
    /// Explicit mean-curvature flow of a closed mesh.
    Flow(FlowArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SurfaceName {
    Plane,
    Sphere,
    Cylinder,
    Torus,
    Catenoid,
    Enneper,
    Saddle,
}

#[derive(Debug, Args)]
struct SurfaceArgs {
    #[arg(long, value_enum)]
    surface: SurfaceName,
    /// Sphere or cylinder radius, torus major radius.
    #[arg(long = "R", default_value_t = 1.0)]
    big_r: f64,
    /// Torus minor radius.
    #[arg(long = "r", default_value_t = 0.5)]
    small_r: f64,
    /// Catenoid waist radius.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
}

impl SurfaceArgs {
    fn build(&self) -> Result<SurfaceKind, CliError> {
        Ok(match self.surface {
            SurfaceName::Plane => SurfaceKind::Plane,
            SurfaceName::Sphere => SurfaceKind::sphere(self.big_r)?,
            SurfaceName::Cylinder => SurfaceKind::cylinder(self.big_r)?,
            SurfaceName::Torus => SurfaceKind::torus(self.big_r, self.small_r)?,
            SurfaceName::Catenoid => SurfaceKind::catenoid(self.c)?,
            SurfaceName::Enneper => SurfaceKind::Enneper,
            SurfaceName::Saddle => SurfaceKind::MongeGraph(HeightField::saddle()),
        })
    }
}

#[derive(Debug, Args)]
struct QuadArgs {
    /// Gauss-Legendre nodes per panel.
    #[arg(long = "quad-n", default_value_t = DEFAULT_NODES)]
    quad_n: usize,
    /// Panels per parameter direction.
    #[arg(long, default_value_t = DEFAULT_PANELS)]
    panels: usize,
}

impl QuadArgs {
    fn rule(&self) -> Result<QuadratureRule, CliError> {
        Ok(QuadratureRule::gauss_legendre(self.quad_n, self.panels)?)
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegionName {
    Rect,
    Disk,
    Cap,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    #[arg(long, value_enum)]
    region: RegionName,
    #[arg(long, allow_negative_numbers = true)]
    u0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    u1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    v0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    v1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    uc: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    vc: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Polar angle of a sphere cap.
    #[arg(long)]
    theta0: Option<f64>,
    #[command(flatten)]
    quad: QuadArgs,
    /// Exit with status 2 if the relative error exceeds this.
    #[arg(long = "max-rel-err")]
    max_rel_err: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

fn required(value: Option<f64>, flag: &str, region: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::Usage(format!("--{flag} is required for --region {region}")))
}

impl VerifyArgs {
    fn region(&self) -> Result<ParamRegion, CliError> {
        Ok(match self.region {
            RegionName::Rect => ParamRegion::Rect {
                u0: required(self.u0, "u0", "rect")?,
                u1: required(self.u1, "u1", "rect")?,
                v0: required(self.v0, "v0", "rect")?,
                v1: required(self.v1, "v1", "rect")?,
            },
            RegionName::Disk => ParamRegion::Disk {
                uc: required(self.uc, "uc", "disk")?,
                vc: required(self.vc, "vc", "disk")?,
                rho: required(self.rho, "rho", "disk")?,
            },
            RegionName::Cap => {
                if !matches!(self.surface.surface, SurfaceName::Sphere) {
                    return Err(CliError::Usage("--region cap requires --surface sphere".into()));
                }
                ParamRegion::sphere_cap(required(self.theta0, "theta0", "cap")?)
            }
        })
    }
}

#[derive(Debug, Args)]
struct LimitArgs {
    #[command(flatten)]
    surface: SurfaceArgs,
    #[arg(long, allow_negative_numbers = true)]
    uc: f64,
    #[arg(long, allow_negative_numbers = true)]
    vc: f64,
    /// Strictly decreasing disk radii.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_RADII)]
    radii: Vec<f64>,
    #[command(flatten)]
    quad: QuadArgs,
    /// Exit with status 2 if the error at the smallest radius exceeds this.
    #[arg(long = "max-err")]
    max_err: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvatureArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Relative magnitude below which a vertex counts as near-minimal.
    #[arg(long = "tol-direction", default_value_t = DEFAULT_TOL_DIRECTION)]
    tol_direction: f64,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GradcheckArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// Central-difference step.
    #[arg(long, default_value_t = 1e-5)]
    h: f64,
    /// Exit with status 2 if any vertex exceeds this relative error.
    #[arg(long = "max-rel-err")]
    max_rel_err: Option<f64>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct LaplacianArgs {
    #[arg(long, short)]
    input: PathBuf,
    /// CSV with columns `vertex,value`.
    #[arg(long)]
    field: PathBuf,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PrimitiveName {
    Grid,
    Icosphere,
    Tube,
    Catenoid,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatName {
    Obj,
    Off,
}

#[derive(Debug, Args)]
struct MakeArgs {
    #[arg(long, value_enum)]
    primitive: PrimitiveName,
    /// Grid cells per side.
    #[arg(long, default_value_t = 8)]
    n: usize,
    /// Icosphere subdivision level.
    #[arg(long, default_value_t = 2)]
    level: u32,
    /// Icosphere or tube radius.
    #[arg(long = "R", default_value_t = 1.0)]
    big_r: f64,
    /// Tube length.
    #[arg(long, default_value_t = 2.0)]
    length: f64,
    /// Catenoid waist radius.
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long = "n-around", default_value_t = 16)]
    n_around: usize,
    #[arg(long = "n-along", default_value_t = 8)]
    n_along: usize,
    /// Output format when writing to standard output.
    #[arg(long, value_enum, default_value_t = FormatName::Off)]
    format: FormatName,
    /// Destination file; the format follows its extension.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct FlowArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long)]
    dt: f64,
    #[arg(long)]
    steps: usize,
    /// Exit with status 2 if the run stops before the last step.
    #[arg(long = "require-complete")]
    require_complete: bool,
    /// Where to write the final mesh.
    #[arg(long = "output-mesh")]
    output_mesh: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_INVALID,
            };
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Pass) => EXIT_OK,
        Ok(Outcome::ToleranceExceeded(message)) => {
            eprintln!("error: {message}");
            EXIT_TOLERANCE
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INVALID
        }
    }
}

enum Outcome {
    Pass,
    ToleranceExceeded(String),
}

fn check(value: f64, limit: Option<f64>, what: &str) -> Outcome {
    match limit {
        Some(limit) if !(value <= limit) => {
            Outcome::ToleranceExceeded(format!("{what} {} exceeds {}", fmt_real(value), fmt_real(limit)))
        }
        _ => Outcome::Pass,
    }
}

fn emit(output: Option<&Path>, csv: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, csv).map_err(|source| CliError::Io { path: path.display().to_string(), source }),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<Outcome, CliError> {
    match command {
        Command::Verify(a) => verify(a),
        Command::Limit(a) => limit(a),
        Command::Curvature(a) => curvature(a),
        Command::Gradcheck(a) => gradcheck(a),
        Command::Laplacian(a) => laplacian_cmd(a),
        Command::Make(a) => make(a),
        Command::Flow(a) => flow(a),
    }
}

fn verify(a: VerifyArgs) -> Result<Outcome, CliError> {
    let kind = a.surface.build()?;
    let region = a.region()?;
    let report = verify_identity(&kind, &region, &a.quad.rule()?)?;
    let region_name = if matches!(a.region, RegionName::Cap) { "cap" } else { region.name() };
    let mut csv = String::from("surface,region,lhs_x,lhs_y,lhs_z,rhs_x,rhs_y,rhs_z,abs_err,rel_err,area\n");
    let reals = [
        report.lhs.x,
        report.lhs.y,
        report.lhs.z,
        report.rhs.x,
        report.rhs.y,
        report.rhs.z,
        report.abs_err,
        report.rel_err,
        report.area,
    ];
    csv.push_str(&format!("{},{region_name},{}\n", kind.name(), join_reals(&reals)));
    emit(a.output.as_deref(), &csv)?;
    Ok(check(report.rel_err, a.max_rel_err, "relative error"))
}

fn join_reals(xs: &[f64]) -> String {
    xs.iter().map(|&x| fmt_real(x)).collect::<Vec<_>>().join(",")
}

fn limit(a: LimitArgs) -> Result<Outcome, CliError> {
    let kind = a.surface.build()?;
    let est = shrinking_limit(&kind, (a.uc, a.vc), &a.radii, &a.quad.rule()?)?;
    let mut csv = String::from("radius,est_x,est_y,est_z,err,observed_order\n");
    let last = est.radii.len() - 1;
    for (i, ((r, e), err)) in est.radii.iter().zip(&est.estimates).zip(&est.errors).enumerate() {
        let order = match (i == last, est.observed_order) {
            (true, Some(p)) => fmt_real(p),
            _ => String::new(),
        };
        let _ = writeln!(csv, "{},{order}", join_reals(&[*r, e.x, e.y, e.z, *err]));
    }
    emit(a.output.as_deref(), &csv)?;
    Ok(check(est.errors[last], a.max_err, "final error"))
}

fn curvature(a: CurvatureArgs) -> Result<Outcome, CliError> {
    let mesh = load_mesh(&a.input)?;
    let mut csv = String::from("vertex,Bx,By,Bz,magnitude,near_minimal,boundary\n");
    for (v, entry) in curvature_field(&mesh, a.tol_direction) {
        match entry {
            CurvatureEntry::Sample(s) => {
                let b = s.vector;
                let _ = writeln!(csv, "{v},{},{},false", join_reals(&[b.x, b.y, b.z, s.magnitude]), s.near_minimal);
            }
            CurvatureEntry::Boundary => {
                let _ = writeln!(csv, "{v},,,,,,true");
            }
            CurvatureEntry::Failed(e) => return Err(e.into()),
        }
    }
    emit(a.output.as_deref(), &csv)?;
    Ok(Outcome::Pass)
}

/// Area of the faces around `v` with `v` moved to `x`. The rest of the mesh
/// contributes a constant, so the gradient equals that of the total area.
fn star_area_at(mesh: &TriMesh, v: usize, x: Vec3) -> f64 {
    let pos = mesh.positions();
    let at = |i: usize| if i == v { x } else { pos[i] };
    mesh.incident_faces(v)
        .iter()
        .map(|&f| {
            let [a, b, c] = mesh.faces()[f];
            triangle_area(at(a), at(b), at(c))
        })
        .sum()
}

fn gradcheck(a: GradcheckArgs) -> Result<Outcome, CliError> {
    let mesh = load_mesh(&a.input)?;
    let rows: Vec<_> = (0..mesh.vertex_count())
        .into_par_iter()
        .map(|v| -> Result<_, CliError> {
            let analytic = area_gradient(&mesh, v)?;
            let fd = central_gradient(|x| star_area_at(&mesh, v, x), mesh.positions()[v], a.h)?;
            // A flat star has zero gradient; measure against a fraction of
            // the largest possible one instead of dividing by roundoff.
            let floor = 1e-4 * 0.5 * build_star(&mesh, v)?.perimeter();
            let rel = (analytic - fd).norm() / analytic.norm().max(fd.norm()).max(floor);
            Ok((analytic, fd, rel))
        })
        .collect::<Result<_, _>>()?;
    let mut csv = String::from("vertex,analytic_x,analytic_y,analytic_z,fd_x,fd_y,fd_z,rel_err\n");
    let mut worst = 0.0f64;
    for (v, (g, fd, rel)) in rows.iter().enumerate() {
        worst = worst.max(*rel);
        let _ = writeln!(csv, "{v},{}", join_reals(&[g.x, g.y, g.z, fd.x, fd.y, fd.z, *rel]));
    }
    emit(a.output.as_deref(), &csv)?;
    Ok(check(worst, a.max_rel_err, "largest relative error"))
}

/// Reads a `vertex,value` CSV. A non-numeric first row is taken as a header.
fn read_field(path: &Path, mesh: &TriMesh) -> Result<ScalarField, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let fail = |line: usize, message: String| CliError::Field { path: path.display().to_string(), line, message };
    let mut values: Vec<Option<f64>> = vec![None; mesh.vertex_count()];
    let mut seen_row = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split(',').map(str::trim).collect();
        if cols.len() != 2 {
            return Err(fail(line, format!("expected 2 columns, found {}", cols.len())));
        }
        let parsed = (cols[0].parse::<usize>(), cols[1].parse::<f64>());
        let (v, x) = match parsed {
            (Ok(v), Ok(x)) => (v, x),
            _ if !seen_row && cols[0].parse::<f64>().is_err() => {
                seen_row = true;
                continue;
            }
            (Err(_), _) => return Err(fail(line, format!("invalid vertex index {:?}", cols[0]))),
            (_, Err(_)) => return Err(fail(line, format!("invalid value {:?}", cols[1]))),
        };
        seen_row = true;
        if !x.is_finite() {
            return Err(fail(line, format!("non-finite value {:?}", cols[1])));
        }
        let slot = values
            .get_mut(v)
            .ok_or_else(|| fail(line, format!("vertex {v} out of range for {} vertices", mesh.vertex_count())))?;
        if slot.replace(x).is_some() {
            return Err(fail(line, format!("vertex {v} given twice")));
        }
    }
    let values = values
        .iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| CliError::Usage(format!("{}: no value for vertex {v}", path.display()))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ScalarField::new(mesh, values)?)
}

fn laplacian_cmd(a: LaplacianArgs) -> Result<Outcome, CliError> {
    let mesh = load_mesh(&a.input)?;
    let field = read_field(&a.field, &mesh)?;
    let mut csv = String::from("vertex,L\n");
    for v in 0..mesh.vertex_count() {
        match laplacian(&mesh, v, &field) {
            Ok(l) => {
                let _ = writeln!(csv, "{v},{}", fmt_real(l));
            }
            Err(DiscreteError::BoundaryVertex { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    emit(a.output.as_deref(), &csv)?;
    Ok(Outcome::Pass)
}

fn make(a: MakeArgs) -> Result<Outcome, CliError> {
    let primitive = match a.primitive {
        PrimitiveName::Grid => Primitive::Grid { n: a.n },
        PrimitiveName::Icosphere => Primitive::Icosphere { level: a.level, radius: a.big_r },
        PrimitiveName::Tube => {
            Primitive::Tube { radius: a.big_r, length: a.length, n_around: a.n_around, n_along: a.n_along }
        }
        PrimitiveName::Catenoid => Primitive::Catenoid { c: a.c, n_around: a.n_around, n_along: a.n_along },
    };
    let mesh = make_primitive(&primitive)?;
    match &a.output {
        Some(path) => save_mesh(&mesh, path)?,
        None => {
            let format = match a.format {
                FormatName::Obj => MeshFormat::Obj,
                FormatName::Off => MeshFormat::Off,
            };
            write_mesh(&mesh, format, &mut std::io::stdout().lock())?;
        }
    }
    Ok(Outcome::Pass)
}

fn flow(a: FlowArgs) -> Result<Outcome, CliError> {
    let mesh = load_mesh(&a.input)?;
    let (trace, last) = run_flow(&mesh, a.dt, a.steps)?;
    let mut csv = String::from("step,area,max_B,min_tri_area\n");
    for r in &trace.records {
        let _ = writeln!(csv, "{},{}", r.step, join_reals(&[r.area, r.max_curvature, r.min_face_area]));
    }
    emit(a.output.as_deref(), &csv)?;
    if let Some(path) = &a.output_mesh {
        save_mesh(&last, path)?;
    }
    Ok(match trace.stop {
        StopReason::Completed => Outcome::Pass,
        stop => {
            let message = match stop {
                StopReason::Collapse { step, face, area } => {
                    format!("flow stopped at step {step}: face {face} collapsed to area {}", fmt_real(area))
                }
                StopReason::AreaIncrease { step, before, after } => format!(
                    "flow stopped at step {step}: area would grow from {} to {}",
                    fmt_real(before),
                    fmt_real(after)
                ),
                StopReason::Completed => unreachable!(),
            };
            if a.require_complete {
                Outcome::ToleranceExceeded(message)
            } else {
                eprintln!("warning: {message}");
                Outcome::Pass
            }
        }
    })
}
