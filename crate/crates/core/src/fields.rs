//! Infinitesimal actions in chart `KC` and their pullbacks under `φ_f`.
//!
//! Every field `V_A(q) = d/dt|₀ exp(tA)·q` has a `y` component of the form
//! `v·c(u)`, so its pullback by `φ_f` has `y` component `c(u)·(f/f′)(y)` and
//! the same `x` part evaluated at `(u, f(y))`. The map `A ↦ V_A` comes from
//! a left action, hence `[V_A, V_B] = −V_{[A,B]}`.

use nalgebra::DVector;

use crate::actions::{act_reparam, chart_vector, BOUNDARY_FLOOR};
use crate::error::{Error, Result};
use crate::lorentz::{group_exp, AlgebraElement, GeneratorKind};
use crate::models::{BoundaryRegularity, Model, ModelPoint, ReparamMap};
use crate::numeric::richardson_derivative;

/// Step of the finite-difference oracle.
pub const FD_STEP: f64 = 1e-5;

/// A field value at a finite chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEvaluation {
    pub point: ModelPoint,
    /// Components along `∂/∂x₁,…,∂/∂x_{n−1}, ∂/∂y`.
    pub vector: Vec<f64>,
}

/// The `x` part of `V_A` at `(u, v)` and the factor `c` with `V_A^y = v·c`.
fn field_parts(a: &AlgebraElement, u: &[f64], v: f64) -> (Vec<f64>, f64) {
    match a.tag() {
        Some(kind) => tagged_parts(kind, u, v),
        None => linear_parts(a, u, v),
    }
}

/// `((Aw)_x − u·ℓ(Aw), −2ℓ(Aw))` for the chart vector `w(u, v)`.
fn linear_parts(a: &AlgebraElement, u: &[f64], v: f64) -> (Vec<f64>, f64) {
    let n = a.n();
    let w = DVector::from_vec(chart_vector(Some((u, v)), n));
    let aw = a.matrix() * w;
    let ell = aw[n] - aw[n - 1];
    let x = (0..n - 1).map(|i| aw[i] - u[i] * ell).collect();
    (x, -2.0 * ell)
}

fn tagged_parts(kind: GeneratorKind, u: &[f64], v: f64) -> (Vec<f64>, f64) {
    let m = u.len();
    match kind {
        GeneratorKind::H => (u.iter().map(|x| 2.0 * x).collect(), 4.0),
        GeneratorKind::X(i) => {
            let mut x = vec![0.0; m];
            x[i - 1] = 1.0;
            (x, 0.0)
        }
        GeneratorKind::Y(1) => y1_parts(u, v),
        GeneratorKind::Y(i) => {
            // Y_i = Ad(ρ)Y₁ with ρ the quarter turn taking x₁ to x_i
            let k = i - 1;
            let rot_inv = |p: &[f64]| {
                let mut r = p.to_vec();
                r[0] = p[k];
                r[k] = -p[0];
                r
            };
            let (x1, c) = y1_parts(&rot_inv(u), v);
            let mut x = x1.clone();
            x[k] = x1[0];
            x[0] = -x1[k];
            (x, c)
        }
        GeneratorKind::R(j, k) => {
            let mut x = vec![0.0; m];
            x[j - 1] = -u[k - 1];
            x[k - 1] = u[j - 1];
            (x, 0.0)
        }
    }
}

fn y1_parts(u: &[f64], v: f64) -> (Vec<f64>, f64) {
    let rest: f64 = u[1..].iter().map(|x| x * x).sum();
    let mut x = vec![v + rest - u[0] * u[0]];
    x.extend(u[1..].iter().map(|xj| -2.0 * u[0] * xj));
    (x, -4.0 * u[0])
}

fn chart_coords(x: &AlgebraElement, q: &ModelPoint) -> Result<Vec<f64>> {
    q.expect_model(Model::ChartKC)?;
    if x.n() != q.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            got: q.n(),
        });
    }
    Ok(q.finite_or_err()?.to_vec())
}

/// `proj_X` at a finite point of chart `KC`.
pub fn proj_field(x: &AlgebraElement, q: &ModelPoint) -> Result<Vec<f64>> {
    let c = chart_coords(x, q)?;
    let n = q.n();
    let v = c[n - 1];
    let (mut out, factor) = field_parts(x, &c[..n - 1], v);
    out.push(v * factor);
    Ok(out)
}

/// `(Dφ_f)⁻¹ · proj_X(φ_f(q))`.
///
/// At `y = 0` the value is the continuous extension when `f/f′` is smooth
/// there; otherwise [`Error::SingularAtBoundary`].
pub fn pullback_field(f: &ReparamMap, x: &AlgebraElement, q: &ModelPoint) -> Result<Vec<f64>> {
    let c = chart_coords(x, q)?;
    let n = q.n();
    let y = c[n - 1];
    let u = &c[..n - 1];
    if y < BOUNDARY_FLOOR {
        if f.regularity() != BoundaryRegularity::Smooth {
            return Err(Error::SingularAtBoundary);
        }
        let (mut out, _) = field_parts(x, u, 0.0);
        out.push(0.0);
        return Ok(out);
    }
    let (mut out, factor) = field_parts(x, u, f.eval(y));
    out.push(factor * f.ratio(y));
    Ok(out)
}

/// [`pullback_field`] packaged with its base point.
pub fn evaluate_pullback(
    f: &ReparamMap,
    x: &AlgebraElement,
    q: &ModelPoint,
) -> Result<FieldEvaluation> {
    Ok(FieldEvaluation {
        point: q.clone(),
        vector: pullback_field(f, x, q)?,
    })
}

/// `(f/f′)(y)`, with the limit 0 at `y = 0`.
pub fn f_over_fprime(f: &ReparamMap, y: f64) -> Result<f64> {
    if !(y >= 0.0) {
        return Err(Error::InvalidArgument(format!("y = {y} is not in [0, ∞)")));
    }
    Ok(f.ratio(y))
}

/// Richardson central difference of `t ↦ φ_f⁻¹(proj(exp(tX))·φ_f(q))` at 0.
pub fn pullback_field_numeric(
    f: &ReparamMap,
    x: &AlgebraElement,
    q: &ModelPoint,
) -> Result<Vec<f64>> {
    chart_coords(x, q)?;
    let failure = std::cell::RefCell::new(None);
    let d = richardson_derivative(
        |t| match act_reparam(f, &group_exp(&x.scale(t)), q) {
            Ok(p) if !p.is_infinity() => p.finite().expect("finite").to_vec(),
            Ok(_) => {
                *failure.borrow_mut() = Some(Error::AtInfinity);
                vec![f64::NAN; q.n()]
            }
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                vec![f64::NAN; q.n()]
            }
        },
        FD_STEP,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(d),
    }
}

/// The finite-difference oracle for [`proj_field`].
pub fn proj_field_numeric(x: &AlgebraElement, q: &ModelPoint) -> Result<Vec<f64>> {
    pullback_field_numeric(&ReparamMap::identity(), x, q)
}
