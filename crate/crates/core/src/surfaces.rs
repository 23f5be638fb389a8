//! Analytic parametric surfaces.
//!
//! Each [`SurfaceKind`] supplies its position and the first and second
//! parameter derivatives in closed form. [`frame`] turns those into the
//! tangent basis, unit normal, area element and mean curvature.
//!
//! Sign convention: `N = S1 x S2 / |S1 x S2|` and `b_ab = r_ab . N`, with
//! `H = g^ab b_ab`. Under this convention the outward-parameterized sphere
//! has `H = -2 / R`, and `N H` is the vector whose patch integral equals the
//! contour integral of the exterior conormal (see [`crate::contour`]).

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::numcore::Vec3;

/// Distance kept from the sphere poles.
pub const POLE_MARGIN: f64 = 1e-9;
/// Minimum admissible area element.
pub const MIN_AREA_ELEMENT: f64 = 1e-12;
/// Half-height of the catenoid parameter domain.
pub const CATENOID_HALF_HEIGHT: f64 = 2.0;
/// Half-width of the Enneper parameter square.
pub const ENNEPER_HALF_WIDTH: f64 = 1.5;
/// Largest parameter span allowed along a periodic direction.
pub const MAX_PERIODIC_SPAN: f64 = TAU + 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SurfaceError {
    #[error("invalid surface parameter: {0}")]
    InvalidShape(String),
    #[error("parameter ({u}, {v}) outside the admissible domain of {surface}")]
    OutOfDomain { surface: String, u: f64, v: f64 },
    #[error("degenerate parameterization of {surface} at ({u}, {v}): |S1 x S2| = {area_element:e}")]
    Degenerate { surface: String, u: f64, v: f64, area_element: f64 },
}

/// Height value with first and second partials, `z = f(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HeightJet {
    pub z: f64,
    pub zx: f64,
    pub zy: f64,
    pub zxx: f64,
    pub zxy: f64,
    pub zyy: f64,
}

type JetFn = dyn Fn(f64, f64) -> HeightJet + Send + Sync;

/// Graph surface `z = f(x, y)` over a rectangle, with analytic partials.
#[derive(Clone)]
pub struct HeightField {
    name: String,
    bounds: [f64; 4],
    jet: Arc<JetFn>,
}

impl fmt::Debug for HeightField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeightField").field("name", &self.name).field("bounds", &self.bounds).finish_non_exhaustive()
    }
}

impl HeightField {
    /// `bounds` is `[x0, x1, y0, y1]`.
    pub fn new<F>(name: impl Into<String>, bounds: [f64; 4], jet: F) -> Result<Self, SurfaceError>
    where
        F: Fn(f64, f64) -> HeightJet + Send + Sync + 'static,
    {
        let [x0, x1, y0, y1] = bounds;
        if !(bounds.iter().all(|b| b.is_finite()) && x0 < x1 && y0 < y1) {
            return Err(SurfaceError::InvalidShape(format!("height-field bounds {bounds:?}")));
        }
        Ok(Self { name: name.into(), bounds, jet: Arc::new(jet) })
    }

    /// `z = x^2 - y^2` on `[-1, 1]^2`.
    pub fn saddle() -> Self {
        Self::new("saddle", [-1.0, 1.0, -1.0, 1.0], |x, y| HeightJet {
            z: x * x - y * y,
            zx: 2.0 * x,
            zy: -2.0 * y,
            zxx: 2.0,
            zxy: 0.0,
            zyy: -2.0,
        })
        .expect("static bounds")
    }

    /// `z = a (x^2 + y^2)` on `[-1, 1]^2`.
    pub fn paraboloid(a: f64) -> Self {
        Self::new("paraboloid", [-1.0, 1.0, -1.0, 1.0], move |x, y| HeightJet {
            z: a * (x * x + y * y),
            zx: 2.0 * a * x,
            zy: 2.0 * a * y,
            zxx: 2.0 * a,
            zxy: 0.0,
            zyy: 2.0 * a,
        })
        .expect("static bounds")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn bounds(&self) -> [f64; 4] {
        self.bounds
    }

    pub fn eval(&self, x: f64, y: f64) -> HeightJet {
        (self.jet)(x, y)
    }
}

/// The bundled analytic surfaces.
#[derive(Debug, Clone)]
pub enum SurfaceKind {
    /// `z = 0`, parameters `(x, y)`.
    Plane,
    /// Parameters `(theta, phi)`, polar angle first; outward normal.
    Sphere {
        radius: f64,
    },
    /// Parameters `(z, phi)`; the normal points toward the axis.
    Cylinder {
        radius: f64,
    },
    /// Parameters `(theta, phi)`: `theta` around the axis, `phi` around the
    /// tube; outward normal.
    Torus {
        major: f64,
        minor: f64,
    },
    /// Parameters `(s, phi)`: `(c cosh(s/c) cos phi, c cosh(s/c) sin phi, s)`.
    Catenoid {
        c: f64,
    },
    /// Enneper's minimal surface in its polynomial parameterization.
    Enneper,
    MongeGraph(HeightField),
}

/// One closed interval of a parameter domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub min: f64,
    pub max: f64,
    pub periodic: bool,
}

impl ParamRange {
    const fn bounded(min: f64, max: f64) -> Self {
        Self { min, max, periodic: false }
    }

    const fn periodic() -> Self {
        Self { min: f64::NEG_INFINITY, max: f64::INFINITY, periodic: true }
    }

    const fn unbounded() -> Self {
        Self { min: f64::NEG_INFINITY, max: f64::INFINITY, periodic: false }
    }

    pub fn contains(&self, x: f64) -> bool {
        x.is_finite() && x >= self.min && x <= self.max
    }
}

/// Admissible `(u, v)` domain of a surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDomain {
    pub u: ParamRange,
    pub v: ParamRange,
}

impl ParamDomain {
    pub fn contains(&self, u: f64, v: f64) -> bool {
        self.u.contains(u) && self.v.contains(v)
    }
}

/// Position and its parameter derivatives up to second order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceJet {
    pub r: Vec3,
    pub ru: Vec3,
    pub rv: Vec3,
    pub ruu: Vec3,
    pub ruv: Vec3,
    pub rvv: Vec3,
}

/// Local differential data at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceFrame {
    pub position: Vec3,
    /// `dr/du`.
    pub s1: Vec3,
    /// `dr/dv`.
    pub s2: Vec3,
    pub normal: Vec3,
    /// Area element `|S1 x S2|`.
    pub sqrt_g: f64,
    /// Mean curvature (trace of the shape operator) with respect to `normal`.
    pub mean_curvature: f64,
}

impl SurfaceFrame {
    /// The vector mean curvature `N H`.
    pub fn curvature_vector(&self) -> Vec3 {
        self.normal * self.mean_curvature
    }
}

impl SurfaceKind {
    pub fn sphere(radius: f64) -> Result<Self, SurfaceError> {
        positive("sphere radius", radius)?;
        Ok(Self::Sphere { radius })
    }

    pub fn cylinder(radius: f64) -> Result<Self, SurfaceError> {
        positive("cylinder radius", radius)?;
        Ok(Self::Cylinder { radius })
    }

    pub fn torus(major: f64, minor: f64) -> Result<Self, SurfaceError> {
        positive("torus major radius", major)?;
        positive("torus minor radius", minor)?;
        if minor >= major {
            return Err(SurfaceError::InvalidShape(format!(
                "torus minor radius {minor} must be below major radius {major}"
            )));
        }
        Ok(Self::Torus { major, minor })
    }

    pub fn catenoid(c: f64) -> Result<Self, SurfaceError> {
        positive("catenoid waist", c)?;
        Ok(Self::Catenoid { c })
    }

    /// Checks the shape parameters of a kind built by hand.
    pub fn validate(&self) -> Result<(), SurfaceError> {
        match *self {
            Self::Sphere { radius } => Self::sphere(radius).map(drop),
            Self::Cylinder { radius } => Self::cylinder(radius).map(drop),
            Self::Torus { major, minor } => Self::torus(major, minor).map(drop),
            Self::Catenoid { c } => Self::catenoid(c).map(drop),
            Self::Plane | Self::Enneper | Self::MongeGraph(_) => Ok(()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Plane => "plane".into(),
            Self::Sphere { .. } => "sphere".into(),
            Self::Cylinder { .. } => "cylinder".into(),
            Self::Torus { .. } => "torus".into(),
            Self::Catenoid { .. } => "catenoid".into(),
            Self::Enneper => "enneper".into(),
            Self::MongeGraph(h) => h.name().to_string(),
        }
    }

    pub fn is_minimal(&self) -> bool {
        matches!(self, Self::Plane | Self::Catenoid { .. } | Self::Enneper)
    }

    pub fn domain(&self) -> ParamDomain {
        match self {
            Self::Plane => ParamDomain { u: ParamRange::unbounded(), v: ParamRange::unbounded() },
            Self::Sphere { .. } => {
                ParamDomain { u: ParamRange::bounded(POLE_MARGIN, PI - POLE_MARGIN), v: ParamRange::periodic() }
            }
            Self::Cylinder { .. } => ParamDomain { u: ParamRange::unbounded(), v: ParamRange::periodic() },
            Self::Torus { .. } => ParamDomain { u: ParamRange::periodic(), v: ParamRange::periodic() },
            Self::Catenoid { .. } => ParamDomain {
                u: ParamRange::bounded(-CATENOID_HALF_HEIGHT, CATENOID_HALF_HEIGHT),
                v: ParamRange::periodic(),
            },
            Self::Enneper => ParamDomain {
                u: ParamRange::bounded(-ENNEPER_HALF_WIDTH, ENNEPER_HALF_WIDTH),
                v: ParamRange::bounded(-ENNEPER_HALF_WIDTH, ENNEPER_HALF_WIDTH),
            },
            Self::MongeGraph(h) => {
                let [x0, x1, y0, y1] = h.bounds();
                ParamDomain { u: ParamRange::bounded(x0, x1), v: ParamRange::bounded(y0, y1) }
            }
        }
    }

    fn check_domain(&self, u: f64, v: f64) -> Result<(), SurfaceError> {
        if self.domain().contains(u, v) {
            Ok(())
        } else {
            Err(SurfaceError::OutOfDomain { surface: self.name(), u, v })
        }
    }

    /// Position only. No domain check.
    pub fn position(&self, u: f64, v: f64) -> Vec3 {
        self.jet_unchecked(u, v).r
    }

    /// Closed-form position and derivatives after a domain check.
    pub fn jet(&self, u: f64, v: f64) -> Result<SurfaceJet, SurfaceError> {
        self.check_domain(u, v)?;
        Ok(self.jet_unchecked(u, v))
    }

    fn jet_unchecked(&self, u: f64, v: f64) -> SurfaceJet {
        let zero = Vec3::zeros();
        match *self {
            Self::Plane => {
                SurfaceJet { r: Vec3::new(u, v, 0.0), ru: Vec3::x(), rv: Vec3::y(), ruu: zero, ruv: zero, rvv: zero }
            }
            Self::Sphere { radius } => {
                let (st, ct) = u.sin_cos();
                let (sp, cp) = v.sin_cos();
                SurfaceJet {
                    r: radius * Vec3::new(st * cp, st * sp, ct),
                    ru: radius * Vec3::new(ct * cp, ct * sp, -st),
                    rv: radius * Vec3::new(-st * sp, st * cp, 0.0),
                    ruu: -radius * Vec3::new(st * cp, st * sp, ct),
                    ruv: radius * Vec3::new(-ct * sp, ct * cp, 0.0),
                    rvv: -radius * Vec3::new(st * cp, st * sp, 0.0),
                }
            }
            Self::Cylinder { radius } => {
                let (sp, cp) = v.sin_cos();
                SurfaceJet {
                    r: Vec3::new(radius * cp, radius * sp, u),
                    ru: Vec3::z(),
                    rv: Vec3::new(-radius * sp, radius * cp, 0.0),
                    ruu: zero,
                    ruv: zero,
                    rvv: Vec3::new(-radius * cp, -radius * sp, 0.0),
                }
            }
            Self::Torus { major, minor } => {
                let (st, ct) = u.sin_cos();
                let (sp, cp) = v.sin_cos();
                let w = major + minor * cp;
                SurfaceJet {
                    r: Vec3::new(w * ct, w * st, minor * sp),
                    ru: Vec3::new(-w * st, w * ct, 0.0),
                    rv: Vec3::new(-minor * sp * ct, -minor * sp * st, minor * cp),
                    ruu: Vec3::new(-w * ct, -w * st, 0.0),
                    ruv: Vec3::new(minor * sp * st, -minor * sp * ct, 0.0),
                    rvv: Vec3::new(-minor * cp * ct, -minor * cp * st, -minor * sp),
                }
            }
            Self::Catenoid { c } => {
                let (sh, ch) = ((u / c).sinh(), (u / c).cosh());
                let (sp, cp) = v.sin_cos();
                SurfaceJet {
                    r: Vec3::new(c * ch * cp, c * ch * sp, u),
                    ru: Vec3::new(sh * cp, sh * sp, 1.0),
                    rv: Vec3::new(-c * ch * sp, c * ch * cp, 0.0),
                    ruu: Vec3::new(ch * cp / c, ch * sp / c, 0.0),
                    ruv: Vec3::new(-sh * sp, sh * cp, 0.0),
                    rvv: Vec3::new(-c * ch * cp, -c * ch * sp, 0.0),
                }
            }
            Self::Enneper => SurfaceJet {
                r: Vec3::new(u - u * u * u / 3.0 + u * v * v, v - v * v * v / 3.0 + v * u * u, u * u - v * v),
                ru: Vec3::new(1.0 - u * u + v * v, 2.0 * u * v, 2.0 * u),
                rv: Vec3::new(2.0 * u * v, 1.0 - v * v + u * u, -2.0 * v),
                ruu: Vec3::new(-2.0 * u, 2.0 * v, 2.0),
                ruv: Vec3::new(2.0 * v, 2.0 * u, 0.0),
                rvv: Vec3::new(2.0 * u, -2.0 * v, -2.0),
            },
            Self::MongeGraph(ref h) => {
                let j = h.eval(u, v);
                SurfaceJet {
                    r: Vec3::new(u, v, j.z),
                    ru: Vec3::new(1.0, 0.0, j.zx),
                    rv: Vec3::new(0.0, 1.0, j.zy),
                    ruu: Vec3::new(0.0, 0.0, j.zxx),
                    ruv: Vec3::new(0.0, 0.0, j.zxy),
                    rvv: Vec3::new(0.0, 0.0, j.zyy),
                }
            }
        }
    }
}

fn positive(what: &str, x: f64) -> Result<(), SurfaceError> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(SurfaceError::InvalidShape(format!("{what} must be positive, got {x}")))
    }
}

/// `H = g^ab b_ab` from first derivatives and second derivatives.
fn mean_curvature_from(ru: Vec3, rv: Vec3, ruu: Vec3, ruv: Vec3, rvv: Vec3, normal: Vec3) -> f64 {
    let (e, f, g) = (ru.dot(&ru), ru.dot(&rv), rv.dot(&rv));
    let (l, m, n) = (ruu.dot(&normal), ruv.dot(&normal), rvv.dot(&normal));
    (g * l - 2.0 * f * m + e * n) / (e * g - f * f)
}

fn normal_and_area(kind: &SurfaceKind, u: f64, v: f64, ru: Vec3, rv: Vec3) -> Result<(Vec3, f64), SurfaceError> {
    let cross = ru.cross(&rv);
    let sqrt_g = cross.norm();
    if !(sqrt_g >= MIN_AREA_ELEMENT) {
        return Err(SurfaceError::Degenerate { surface: kind.name(), u, v, area_element: sqrt_g });
    }
    Ok((cross / sqrt_g, sqrt_g))
}

/// Closed-form frame at `(u, v)`.
pub fn frame(kind: &SurfaceKind, u: f64, v: f64) -> Result<SurfaceFrame, SurfaceError> {
    let j = kind.jet(u, v)?;
    let (normal, sqrt_g) = normal_and_area(kind, u, v, j.ru, j.rv)?;
    Ok(SurfaceFrame {
        position: j.r,
        s1: j.ru,
        s2: j.rv,
        normal,
        sqrt_g,
        mean_curvature: mean_curvature_from(j.ru, j.rv, j.ruu, j.ruv, j.rvv, normal),
    })
}

/// Mean curvature recomputed from finite differences of the position alone.
/// Independent of the closed-form derivatives used by [`frame`].
pub fn numeric_mean_curvature(kind: &SurfaceKind, u: f64, v: f64, h: f64) -> Result<f64, SurfaceError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(SurfaceError::InvalidShape(format!("step h must be positive, got {h}")));
    }
    let dom = kind.domain();
    for (du, dv) in [(-2.0, 0.0), (2.0, 0.0), (0.0, -2.0), (0.0, 2.0)] {
        if !dom.contains(u + du * h, v + dv * h) {
            return Err(SurfaceError::OutOfDomain { surface: kind.name(), u, v });
        }
    }
    let r = |a: f64, b: f64| kind.position(u + a * h, v + b * h);
    let c = r(0.0, 0.0);
    let ru = (r(1.0, 0.0) - r(-1.0, 0.0)) / (2.0 * h);
    let rv = (r(0.0, 1.0) - r(0.0, -1.0)) / (2.0 * h);
    let ruu = (r(1.0, 0.0) - 2.0 * c + r(-1.0, 0.0)) / (h * h);
    let rvv = (r(0.0, 1.0) - 2.0 * c + r(0.0, -1.0)) / (h * h);
    let ruv = (r(1.0, 1.0) - r(1.0, -1.0) - r(-1.0, 1.0) + r(-1.0, -1.0)) / (4.0 * h * h);
    let (normal, _) = normal_and_area(kind, u, v, ru, rv)?;
    Ok(mean_curvature_from(ru, rv, ruu, ruv, rvv, normal))
}

/// Closed-form mean curvature for the surfaces that have one, for tests.
pub fn known_mean_curvature(kind: &SurfaceKind, _u: f64, v: f64) -> Option<f64> {
    match *kind {
        SurfaceKind::Plane | SurfaceKind::Catenoid { .. } | SurfaceKind::Enneper => Some(0.0),
        SurfaceKind::Sphere { radius } => Some(-2.0 / radius),
        SurfaceKind::Cylinder { radius } => Some(1.0 / radius),
        SurfaceKind::Torus { major, minor } => {
            let cp = v.cos();
            Some(-(major + 2.0 * minor * cp) / (minor * (major + minor * cp)))
        }
        SurfaceKind::MongeGraph(_) => None,
    }
}
