//! Scalar and vector numerics shared by the rest of the crate.
//!
//! Composite Gauss-Legendre quadrature on intervals and rectangles, plus a
//! central-difference gradient used as an oracle for analytic gradients.
//! Nodes and weights are generated by Newton iteration on the Legendre
//! polynomials, so any node count is available without lookup tables.

use std::ops::{Add, Mul};

use nalgebra::Vector3;
use thiserror::Error;

/// Three-component real vector. Every vector quantity in the crate uses this.
pub type Vec3 = Vector3<f64>;

/// Default number of Gauss-Legendre nodes per panel.
pub const DEFAULT_NODES: usize = 16;
/// Default number of composite panels per interval.
pub const DEFAULT_PANELS: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("non-finite integrand value at x = {x}")]
    NonFinite { x: f64 },
    #[error("non-finite integrand value at (u, v) = ({u}, {v})")]
    NonFinite2 { u: f64, v: f64 },
    #[error("non-finite function value at offset {offset:?}")]
    NonFiniteGradient { offset: [f64; 3] },
    #[error("invalid interval [{a}, {b}]")]
    EmptyInterval { a: f64, b: f64 },
    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),
    #[error("finite-difference step must be positive and finite, got {0}")]
    InvalidStep(f64),
}

/// Values that can be accumulated by a quadrature rule.
pub trait Integrand: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn all_finite(&self) -> bool;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }

    fn all_finite(&self) -> bool {
        self.is_finite()
    }
}

impl Integrand for Vec3 {
    fn zero() -> Self {
        Vec3::zeros()
    }

    fn all_finite(&self) -> bool {
        self.iter().all(|c| c.is_finite())
    }
}

/// Composite Gauss-Legendre rule on the reference interval [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    panels: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self::gauss_legendre(DEFAULT_NODES, DEFAULT_PANELS).expect("default rule is valid")
    }
}

impl QuadratureRule {
    /// Builds an `n`-point Gauss-Legendre rule applied on `panels` equal
    /// sub-intervals.
    pub fn gauss_legendre(n: usize, panels: usize) -> Result<Self, NumError> {
        if n == 0 {
            return Err(NumError::InvalidRule("node count must be at least 1".into()));
        }
        if panels == 0 {
            return Err(NumError::InvalidRule("panel count must be at least 1".into()));
        }
        let (nodes, weights) = legendre_nodes_weights(n);
        Ok(Self { nodes, weights, panels })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Same node set, different panel count.
    pub fn with_panels(&self, panels: usize) -> Result<Self, NumError> {
        if panels == 0 {
            return Err(NumError::InvalidRule("panel count must be at least 1".into()));
        }
        Ok(Self { panels, ..self.clone() })
    }

    /// Integrates an infallible integrand over `[a, b]`.
    pub fn integrate<T, F>(&self, a: f64, b: f64, mut f: F) -> Result<T, NumError>
    where
        T: Integrand,
        F: FnMut(f64) -> T,
    {
        self.try_integrate(a, b, |x| Ok::<T, NumError>(f(x)))
    }

    /// Integrates a fallible integrand over `[a, b]`. Errors raised by `f`
    /// are passed through unchanged; non-finite values become
    /// [`NumError::NonFinite`] carrying the abscissa.
    pub fn try_integrate<T, E, F>(&self, a: f64, b: f64, mut f: F) -> Result<T, E>
    where
        T: Integrand,
        E: From<NumError>,
        F: FnMut(f64) -> Result<T, E>,
    {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(NumError::EmptyInterval { a, b }.into());
        }
        let width = (b - a) / self.panels as f64;
        let half = 0.5 * width;
        let mut total = T::zero();
        for p in 0..self.panels {
            let mid = a + (p as f64 + 0.5) * width;
            let mut panel = T::zero();
            for (&x, &w) in self.nodes.iter().zip(&self.weights) {
                let at = mid + half * x;
                let value = f(at)?;
                if !value.all_finite() {
                    return Err(NumError::NonFinite { x: at }.into());
                }
                panel = panel + value * w;
            }
            total = total + panel * half;
        }
        Ok(total)
    }

    /// Tensor-product integration over `[u0, u1] x [v0, v1]`.
    pub fn try_integrate_rect<T, E, F>(&self, (u0, u1): (f64, f64), (v0, v1): (f64, f64), mut f: F) -> Result<T, E>
    where
        T: Integrand,
        E: From<NumError>,
        F: FnMut(f64, f64) -> Result<T, E>,
    {
        if !(v0.is_finite() && v1.is_finite() && v0 < v1) {
            return Err(NumError::EmptyInterval { a: v0, b: v1 }.into());
        }
        self.try_integrate(u0, u1, |u| {
            self.try_integrate(v0, v1, |v| {
                let value = f(u, v)?;
                if value.all_finite() {
                    Ok(value)
                } else {
                    Err(NumError::NonFinite2 { u, v }.into())
                }
            })
        })
    }
}

/// Gauss-Legendre nodes (ascending) and weights for `n` points.
fn legendre_nodes_weights(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th largest root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut deriv = 0.0;
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            deriv = dp;
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        if dp.is_finite() {
            deriv = dp;
        }
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    // Push the last-ulp residual into the central weights so constants
    // integrate exactly when summed in node order.
    for _ in 0..8 {
        let residual = 2.0 - weights.iter().sum::<f64>();
        if residual == 0.0 {
            break;
        }
        if n % 2 == 1 {
            weights[n / 2] += residual;
        } else {
            weights[n / 2 - 1] += 0.5 * residual;
            weights[n / 2] += 0.5 * residual;
        }
    }
    (nodes, weights)
}

/// `P_n(x)` and `P_n'(x)` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let n = n as f64;
    let dp = n * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Scientific notation with 17 significant digits; parses back exactly.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Composite Gauss-Legendre estimate of the integral of `f` over `[a, b]`.
pub fn integrate_interval<F>(f: F, a: f64, b: f64, rule: &QuadratureRule) -> Result<f64, NumError>
where
    F: FnMut(f64) -> f64,
{
    rule.integrate(a, b, f)
}

/// Tensor-product estimate over a rectangle.
pub fn integrate_rect<F>(mut f: F, u: (f64, f64), v: (f64, f64), rule: &QuadratureRule) -> Result<f64, NumError>
where
    F: FnMut(f64, f64) -> f64,
{
    rule.try_integrate_rect(u, v, |a, b| Ok::<f64, NumError>(f(a, b)))
}

/// Component-wise central difference `(f(x + h e) - f(x - h e)) / 2h`.
pub fn central_gradient<F>(mut f: F, x: Vec3, h: f64) -> Result<Vec3, NumError>
where
    F: FnMut(Vec3) -> f64,
{
    if !(h > 0.0 && h.is_finite()) {
        return Err(NumError::InvalidStep(h));
    }
    let mut grad = Vec3::zeros();
    for axis in 0..3 {
        let mut step = Vec3::zeros();
        step[axis] = h;
        let plus = f(x + step);
        let minus = f(x - step);
        if !plus.is_finite() {
            return Err(NumError::NonFiniteGradient { offset: step.into() });
        }
        if !minus.is_finite() {
            return Err(NumError::NonFiniteGradient { offset: (-step).into() });
        }
        grad[axis] = (plus - minus) / (2.0 * h);
    }
    Ok(grad)
}
