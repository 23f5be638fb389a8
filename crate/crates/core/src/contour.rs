//! Patch and contour integrals of the mean-curvature vector on analytic
//! surfaces.
//!
//! For a patch `P` with boundary `G`, the patch integral of `N H dS` equals
//! the contour integral of the exterior conormal `n dG`. This module evaluates
//! both sides by quadrature, independently, and reports how well they agree.
//! Dividing the contour integral by the patch area and shrinking the patch
//! recovers `N H` at a point.
//!
//! Regions live in parameter space. Their boundary is traversed
//! counterclockwise in the `(u, v)` plane, and the exterior conormal is
//! `t x N`.

use std::f64::consts::{PI, TAU};

use thiserror::Error;

use crate::numcore::{NumError, QuadratureRule, Vec3};
use crate::surfaces::{frame, SurfaceError, SurfaceKind, MAX_PERIODIC_SPAN, POLE_MARGIN};

/// Smallest boundary speed accepted before a contour is called degenerate.
pub const MIN_CONTOUR_SPEED: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Numeric(#[from] NumError),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("degenerate contour at s = {s}: speed {speed:e}")]
    DegenerateContour { s: f64, speed: f64 },
    #[error("invalid radius schedule: {0}")]
    InvalidRadii(String),
}

/// A patch in parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamRegion {
    Rect { u0: f64, u1: f64, v0: f64, v1: f64 },
    Disk { uc: f64, vc: f64, rho: f64 },
}

impl ParamRegion {
    /// Spherical cap `theta <= theta0` as a full-longitude rectangle that
    /// stops [`POLE_MARGIN`] short of the pole.
    pub fn sphere_cap(theta0: f64) -> Self {
        Self::Rect { u0: POLE_MARGIN, u1: theta0, v0: 0.0, v1: TAU }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Rect { .. } => "rect",
            Self::Disk { .. } => "disk",
        }
    }

    /// Parameter-space bounding box `(u0, u1, v0, v1)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        match *self {
            Self::Rect { u0, u1, v0, v1 } => (u0, u1, v0, v1),
            Self::Disk { uc, vc, rho } => (uc - rho, uc + rho, vc - rho, vc + rho),
        }
    }

    /// Checks positive extent and that the region sits inside the surface's
    /// admissible domain.
    pub fn validate(&self, kind: &SurfaceKind) -> Result<(), ContourError> {
        let (u0, u1, v0, v1) = self.bounding_box();
        if ![u0, u1, v0, v1].iter().all(|x| x.is_finite()) {
            return Err(ContourError::InvalidRegion(format!("non-finite bounds in {self:?}")));
        }
        let positive = match *self {
            Self::Rect { u0, u1, v0, v1 } => u1 > u0 && v1 > v0,
            Self::Disk { rho, .. } => rho > 0.0,
        };
        if !positive {
            return Err(ContourError::InvalidRegion(format!("empty region {self:?}")));
        }
        let dom = kind.domain();
        for (range, lo, hi, axis) in [(dom.u, u0, u1, "u"), (dom.v, v0, v1, "v")] {
            if !(range.contains(lo) && range.contains(hi)) {
                return Err(ContourError::InvalidRegion(format!(
                    "{axis} extent [{lo}, {hi}] leaves the domain of {}",
                    kind.name()
                )));
            }
            if range.periodic && hi - lo > MAX_PERIODIC_SPAN {
                return Err(ContourError::InvalidRegion(format!(
                    "{axis} extent [{lo}, {hi}] wraps a periodic direction"
                )));
            }
        }
        Ok(())
    }

    /// Parameter point on the boundary and its derivative with respect to
    /// `s`, for `s` in `[0, 1)`.
    fn boundary_param(&self, s: f64) -> ((f64, f64), (f64, f64)) {
        match *self {
            Self::Rect { u0, u1, v0, v1 } => {
                let (du, dv) = (u1 - u0, v1 - v0);
                let scaled = 4.0 * s;
                let edge = (scaled.floor() as i64).clamp(0, 3);
                let tau = scaled - edge as f64;
                match edge {
                    0 => ((u0 + tau * du, v0), (4.0 * du, 0.0)),
                    1 => ((u1, v0 + tau * dv), (0.0, 4.0 * dv)),
                    2 => ((u1 - tau * du, v1), (-4.0 * du, 0.0)),
                    _ => ((u0, v1 - tau * dv), (0.0, -4.0 * dv)),
                }
            }
            Self::Disk { uc, vc, rho } => {
                let (sn, cs) = (TAU * s).sin_cos();
                ((uc + rho * cs, vc + rho * sn), (-TAU * rho * sn, TAU * rho * cs))
            }
        }
    }

    /// Unit outward normal of the region in the parameter plane at `s`.
    pub fn param_outward(&self, s: f64) -> (f64, f64) {
        let (_, (du, dv)) = self.boundary_param(s);
        let len = du.hypot(dv);
        (dv / len, -du / len)
    }

    /// Smooth pieces of the boundary parameter `s`.
    fn segments(&self) -> &'static [(f64, f64)] {
        match self {
            Self::Rect { .. } => &[(0.0, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 1.0)],
            Self::Disk { .. } => &[(0.0, 1.0)],
        }
    }
}

/// One sample of the oriented contour.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub position: Vec3,
    /// Unit tangent in the direction of traversal.
    pub tangent: Vec3,
    /// Unit exterior conormal, tangent to the surface.
    pub conormal: Vec3,
    /// Surface normal at this point.
    pub normal: Vec3,
    /// `|dG/ds|`.
    pub speed: f64,
}

/// Both sides of the patch/contour identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// Patch integral of `N H dS`.
    pub lhs: Vec3,
    /// Contour integral of `n dG`.
    pub rhs: Vec3,
    pub abs_err: f64,
    pub rel_err: f64,
    pub area: f64,
}

impl IdentityReport {
    pub fn new(lhs: Vec3, rhs: Vec3, area: f64) -> Self {
        let abs_err = (lhs - rhs).norm();
        let rel_err = abs_err / lhs.norm().max(rhs.norm()).max(1e-30);
        Self { lhs, rhs, abs_err, rel_err, area }
    }
}

/// Convergence study of `(1/A) * contour integral` toward `N H`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitEstimate {
    pub radii: Vec<f64>,
    pub estimates: Vec<Vec3>,
    pub target: Vec3,
    pub errors: Vec<f64>,
    /// Least-squares slope of `log(error)` against `log(radius)`. Absent
    /// when some error is exactly zero or fewer than two radii were used.
    pub observed_order: Option<f64>,
}

pub fn boundary_point(kind: &SurfaceKind, region: &ParamRegion, s: f64) -> Result<BoundaryPoint, ContourError> {
    let ((u, v), (du, dv)) = region.boundary_param(s);
    let f = frame(kind, u, v)?;
    let velocity = f.s1 * du + f.s2 * dv;
    let speed = velocity.norm();
    if !(speed >= MIN_CONTOUR_SPEED) {
        return Err(ContourError::DegenerateContour { s, speed });
    }
    let tangent = velocity / speed;
    Ok(BoundaryPoint { position: f.position, tangent, conormal: tangent.cross(&f.normal), normal: f.normal, speed })
}

/// Integrates `g(u, v, frame) * sqrt_g` over the region.
fn patch_integral<T, G>(
    kind: &SurfaceKind,
    region: &ParamRegion,
    rule: &QuadratureRule,
    g: G,
) -> Result<T, ContourError>
where
    T: crate::numcore::Integrand,
    G: Fn(&crate::surfaces::SurfaceFrame) -> T,
{
    region.validate(kind)?;
    match *region {
        ParamRegion::Rect { u0, u1, v0, v1 } => rule.try_integrate_rect((u0, u1), (v0, v1), |u, v| {
            let f = frame(kind, u, v)?;
            Ok(g(&f) * f.sqrt_g)
        }),
        ParamRegion::Disk { uc, vc, rho } => rule.try_integrate_rect((0.0, rho), (0.0, TAU), |r, psi| {
            let (sn, cs) = psi.sin_cos();
            let f = frame(kind, uc + r * cs, vc + r * sn)?;
            Ok(g(&f) * (f.sqrt_g * r))
        }),
    }
}

fn contour_integral<T, G>(
    kind: &SurfaceKind,
    region: &ParamRegion,
    rule: &QuadratureRule,
    g: G,
) -> Result<T, ContourError>
where
    T: crate::numcore::Integrand,
    G: Fn(&BoundaryPoint) -> T,
{
    region.validate(kind)?;
    let mut total = T::zero();
    for &(a, b) in region.segments() {
        total = total + rule.try_integrate(a, b, |s| boundary_point(kind, region, s).map(|p| g(&p)))?;
    }
    Ok(total)
}

/// Patch integral of `N H dS`.
pub fn lhs_integral(kind: &SurfaceKind, region: &ParamRegion, rule: &QuadratureRule) -> Result<Vec3, ContourError> {
    patch_integral(kind, region, rule, |f| f.curvature_vector())
}

/// Contour integral of the exterior conormal.
pub fn rhs_integral(kind: &SurfaceKind, region: &ParamRegion, rule: &QuadratureRule) -> Result<Vec3, ContourError> {
    contour_integral(kind, region, rule, |p| p.conormal * p.speed)
}

/// Area of the patch.
pub fn patch_area(kind: &SurfaceKind, region: &ParamRegion, rule: &QuadratureRule) -> Result<f64, ContourError> {
    patch_integral(kind, region, rule, |_| 1.0)
}

/// Length of the boundary contour.
pub fn contour_length(kind: &SurfaceKind, region: &ParamRegion, rule: &QuadratureRule) -> Result<f64, ContourError> {
    contour_integral(kind, region, rule, |p| p.speed)
}

pub fn verify_identity(
    kind: &SurfaceKind,
    region: &ParamRegion,
    rule: &QuadratureRule,
) -> Result<IdentityReport, ContourError> {
    let lhs = lhs_integral(kind, region, rule)?;
    let rhs = rhs_integral(kind, region, rule)?;
    let area = patch_area(kind, region, rule)?;
    Ok(IdentityReport::new(lhs, rhs, area))
}

/// Radius schedule used by the limit study unless overridden.
pub const DEFAULT_RADII: [f64; 4] = [0.2, 0.1, 0.05, 0.025];

pub fn shrinking_limit(
    kind: &SurfaceKind,
    center: (f64, f64),
    radii: &[f64],
    rule: &QuadratureRule,
) -> Result<LimitEstimate, ContourError> {
    if radii.is_empty() {
        return Err(ContourError::InvalidRadii("no radii given".into()));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(ContourError::InvalidRadii(format!("radii must be positive: {radii:?}")));
    }
    if radii.windows(2).any(|w| w[1] >= w[0]) {
        return Err(ContourError::InvalidRadii(format!("radii must be strictly decreasing: {radii:?}")));
    }
    let (uc, vc) = center;
    let target = frame(kind, uc, vc)?.curvature_vector();
    let mut estimates = Vec::with_capacity(radii.len());
    let mut errors = Vec::with_capacity(radii.len());
    for &rho in radii {
        let region = ParamRegion::Disk { uc, vc, rho };
        let estimate = rhs_integral(kind, &region, rule)? / patch_area(kind, &region, rule)?;
        errors.push((estimate - target).norm());
        estimates.push(estimate);
    }
    let observed_order = log_log_slope(radii, &errors);
    Ok(LimitEstimate { radii: radii.to_vec(), estimates, target, errors, observed_order })
}

fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() < 2 || ys.iter().any(|&y| !(y > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    Some(sxy / sxx)
}

/// Closed-form patch integral for the spherical cap `theta <= theta0`:
/// `(0, 0, -2 pi R sin^2 theta0)`.
pub fn sphere_cap_integral(radius: f64, theta0: f64) -> Vec3 {
    Vec3::new(0.0, 0.0, -2.0 * PI * radius * theta0.sin().powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surfaces::HeightField;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_3;

    fn rule() -> QuadratureRule {
        QuadratureRule::default()
    }

    #[test]
    fn plane_bottom_edge_conormal() {
        let region = ParamRegion::Rect { u0: 0.0, u1: 1.0, v0: 0.0, v1: 1.0 };
        let p = boundary_point(&SurfaceKind::Plane, &region, 0.125).unwrap();
        assert!((p.position - Vec3::new(0.5, 0.0, 0.0)).norm() < 1e-15);
        assert!((p.tangent - Vec3::x()).norm() < 1e-15);
        assert!((p.normal - Vec3::z()).norm() < 1e-15);
        assert!((p.conormal - Vec3::new(0.0, -1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn latitude_circle_conormal() {
        let sphere = SurfaceKind::sphere(1.0).unwrap();
        let theta0 = 1.1;
        let region = ParamRegion::sphere_cap(theta0);
        for k in 0..16 {
            // right edge: u = theta0, v runs over [0, 2 pi)
            let s = 0.25 + 0.25 * (k as f64 + 0.5) / 16.0;
            let phi = TAU * (k as f64 + 0.5) / 16.0;
            let p = boundary_point(&sphere, &region, s).unwrap();
            let expect = Vec3::new(theta0.cos() * phi.cos(), theta0.cos() * phi.sin(), -theta0.sin());
            assert!((p.conormal - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn disk_conormal_is_tangent() {
        let sphere = SurfaceKind::sphere(1.0).unwrap();
        let region = ParamRegion::Disk { uc: 1.0, vc: 0.5, rho: 0.3 };
        for k in 0..64 {
            let p = boundary_point(&sphere, &region, k as f64 / 64.0).unwrap();
            assert!(p.conormal.dot(&p.normal).abs() <= 1e-10);
            assert!(p.conormal.dot(&p.tangent).abs() <= 1e-10);
            assert!((p.conormal.norm() - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn conormal_points_out_of_the_region() {
        let cases: Vec<(SurfaceKind, ParamRegion)> = vec![
            (SurfaceKind::sphere(1.0).unwrap(), ParamRegion::Disk { uc: 1.0, vc: 2.0, rho: 0.4 }),
            (SurfaceKind::torus(2.0, 0.5).unwrap(), ParamRegion::Rect { u0: 0.3, u1: 1.1, v0: 0.2, v1: 0.9 }),
            (SurfaceKind::cylinder(1.0).unwrap(), ParamRegion::Rect { u0: -1.0, u1: 0.5, v0: 0.0, v1: 2.0 }),
            (SurfaceKind::Enneper, ParamRegion::Disk { uc: 0.2, vc: -0.3, rho: 1.0 }),
            (SurfaceKind::MongeGraph(HeightField::saddle()), ParamRegion::Rect { u0: -0.5, u1: 0.2, v0: 0.1, v1: 0.8 }),
        ];
        for (kind, region) in cases {
            for k in 0..64 {
                let s = (k as f64 + 0.5) / 64.0;
                let ((u, v), _) = region.boundary_param(s);
                let (nu, nv) = region.param_outward(s);
                let f = frame(&kind, u, v).unwrap();
                let outward = f.s1 * nu + f.s2 * nv;
                let p = boundary_point(&kind, &region, s).unwrap();
                assert!(p.conormal.dot(&outward) > 0.0, "{} {region:?} s={s}", kind.name());
            }
        }
    }

    #[test]
    fn sphere_cap_both_sides() {
        let sphere = SurfaceKind::sphere(1.0).unwrap();
        let exact = sphere_cap_integral(1.0, FRAC_PI_3);
        assert_abs_diff_eq!(exact.z, -1.5 * PI, epsilon = 1e-15);
        let report = verify_identity(&sphere, &ParamRegion::sphere_cap(FRAC_PI_3), &rule()).unwrap();
        assert!((report.lhs - exact).norm() < 1e-7);
        assert!((report.rhs - exact).norm() < 1e-8);
        assert!(report.rel_err <= 1e-8);
        assert_abs_diff_eq!(report.area, TAU * (1.0 - FRAC_PI_3.cos()), epsilon = 1e-10);
    }

    #[test]
    fn truncated_cap_loses_the_polar_piece() {
        let sphere = SurfaceKind::sphere(1.0).unwrap();
        let region = ParamRegion::Rect { u0: 0.01, u1: FRAC_PI_3, v0: 0.0, v1: TAU };
        let lhs = lhs_integral(&sphere, &region, &rule()).unwrap();
        let expect = sphere_cap_integral(1.0, FRAC_PI_3) - sphere_cap_integral(1.0, 0.01);
        assert!((lhs - expect).norm() < 1e-10);
        let gap = (lhs - sphere_cap_integral(1.0, FRAC_PI_3)).norm();
        assert_abs_diff_eq!(gap, TAU * 0.01f64.sin().powi(2), epsilon = 1e-10);
    }

    #[test]
    fn flat_and_minimal_vanish() {
        let region = ParamRegion::Rect { u0: -0.3, u1: 0.7, v0: 0.1, v1: 0.4 };
        assert_eq!(lhs_integral(&SurfaceKind::Plane, &region, &rule()).unwrap(), Vec3::zeros());
        assert!(rhs_integral(&SurfaceKind::Plane, &region, &rule()).unwrap().norm() < 1e-12);
        let cat = SurfaceKind::catenoid(1.0).unwrap();
        let region = ParamRegion::Rect { u0: -0.5, u1: 1.2, v0: 0.3, v1: 2.5 };
        assert!(lhs_integral(&cat, &region, &rule()).unwrap().norm() < 1e-10);
        let len = contour_length(&cat, &region, &rule()).unwrap();
        assert!(rhs_integral(&cat, &region, &rule()).unwrap().norm() <= 1e-8 * len);
    }

    #[test]
    fn torus_and_saddle_identity() {
        let torus = SurfaceKind::torus(2.0, 0.5).unwrap();
        let r = verify_identity(&torus, &ParamRegion::Rect { u0: 0.3, u1: 1.1, v0: 0.2, v1: 0.9 }, &rule()).unwrap();
        assert!(r.rel_err <= 1e-8, "{r:?}");
        let saddle = SurfaceKind::MongeGraph(HeightField::saddle());
        let r = verify_identity(&saddle, &ParamRegion::Rect { u0: 0.1, u1: 0.4, v0: -0.2, v1: 0.25 }, &rule()).unwrap();
        assert!(r.rel_err <= 1e-8, "{r:?}");
    }

    #[test]
    fn region_validation() {
        let sphere = SurfaceKind::sphere(1.0).unwrap();
        let bad = [
            ParamRegion::Rect { u0: 1.0, u1: 1.0, v0: 0.0, v1: 1.0 },
            ParamRegion::Disk { uc: 1.0, vc: 0.0, rho: 0.0 },
            ParamRegion::Disk { uc: 0.1, vc: 0.0, rho: 0.2 },
            ParamRegion::Rect { u0: 0.5, u1: 1.0, v0: 0.0, v1: 7.0 },
        ];
        for region in bad {
            assert!(matches!(verify_identity(&sphere, &region, &rule()), Err(ContourError::InvalidRegion(_))));
        }
    }

    #[test]
    fn shrinking_limit_examples() {
        let plane = shrinking_limit(&SurfaceKind::Plane, (0.3, 0.2), &DEFAULT_RADII, &rule()).unwrap();
        assert!(plane.estimates.iter().all(|e| e.norm() < 1e-12));

        let torus = SurfaceKind::torus(2.0, 0.5).unwrap();
        let est = shrinking_limit(&torus, (1.0, 1.0), &DEFAULT_RADII, &rule()).unwrap();
        assert!(est.errors.windows(2).all(|w| w[1] < w[0]), "{:?}", est.errors);
        assert!(est.observed_order.unwrap() >= 1.0);

        let sphere = SurfaceKind::sphere(1.0).unwrap();
        let est = shrinking_limit(&sphere, (FRAC_PI_3, PI / 4.0), &DEFAULT_RADII, &rule()).unwrap();
        assert!(*est.errors.last().unwrap() <= 1e-3 * 2.0);

        assert!(shrinking_limit(&sphere, (1.0, 1.0), &[0.1, 0.2], &rule()).is_err());
        assert!(shrinking_limit(&sphere, (1.0, 1.0), &[], &rule()).is_err());
        assert!(shrinking_limit(&sphere, (1.0, 1.0), &[0.1, -0.2], &rule()).is_err());
    }
}
