//! Points of `ℍⁿ` and of its compactification in the hyperboloid, Klein and
//! Poincaré models and in the half-space charts `KC` and `PC`.
//!
//! Ball coordinates are `(x₁,…,x_{n−1}, y)`. Chart coordinates are
//! `(u₁,…,u_{n−1}, v)` with `v ≥ 0`; the single point a chart misses is the
//! explicit value [`Coords::Infinity`].
//!
//! * `KC`: `(x, y) ↦ (x/(1−y), (1−|x|²−y²)/(1−y)²)` on the Klein ball, missing
//!   `(0,…,0,1)`.
//! * `PC`: `p ↦ (2p_x, 1−|p|²)/|p − e_n|²` on the Poincaré ball, missing
//!   `e_n = (0,…,0,1)`. In these coordinates the hyperbolic metric is
//!   `(|du|² + dw²)/w²`, and `KC = φ₂ ∘ PC` under the boundary-identity
//!   correspondence of the two balls.

mod reparam;

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::norm;

pub use reparam::{BoundaryRegularity, FlatExample, ReparamKind, ReparamMap, FLAT_GLUE};

/// Closed-ball points with `|p| ∈ (1, 1 + BOUNDARY_BAND]` are pulled onto the
/// sphere; chart points with `v ∈ [−BOUNDARY_BAND, 0)` onto `v = 0`.
pub const BOUNDARY_BAND: f64 = 1e-9;

/// `|1 − |p|²|` below this is read as a boundary point by the conversions.
const SPHERE_EPS: f64 = 4.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Model {
    Hyperboloid,
    KleinClosed,
    PoincareClosed,
    ChartKC,
    ChartPC,
}

impl Model {
    pub fn is_chart(self) -> bool {
        matches!(self, Model::ChartKC | Model::ChartPC)
    }

    pub fn is_ball(self) -> bool {
        matches!(self, Model::KleinClosed | Model::PoincareClosed)
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Hyperboloid => "Hyperboloid",
            Model::KleinClosed => "KleinClosed",
            Model::PoincareClosed => "PoincareClosed",
            Model::ChartKC => "ChartKC",
            Model::ChartPC => "ChartPC",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Model::Hyperboloid,
            Model::KleinClosed,
            Model::PoincareClosed,
            Model::ChartKC,
            Model::ChartPC,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| Error::InvalidArgument(format!("unknown model {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coords {
    Finite(Vec<f64>),
    /// The point a half-space chart misses.
    Infinity,
}

/// A validated point of one of the models.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelPoint {
    model: Model,
    n: usize,
    coords: Coords,
}

impl ModelPoint {
    /// Validates `coords` for `model`; ball and chart points inside the
    /// boundary band are snapped onto the boundary.
    pub fn new(model: Model, coords: Vec<f64>) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidPoint { model, reason };
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(invalid("non-finite coordinate".into()));
        }
        let n = match model {
            Model::Hyperboloid => coords.len().saturating_sub(1),
            _ => coords.len(),
        };
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let mut coords = coords;
        match model {
            Model::Hyperboloid => {
                let t = coords[n];
                let q: f64 = coords[..n].iter().map(|x| x * x).sum::<f64>() - t * t;
                if t <= 0.0 {
                    return Err(invalid("timelike coordinate must be positive".into()));
                }
                if (q + 1.0).abs() > BOUNDARY_BAND * t * t {
                    return Err(invalid(format!("Q(p) = {q} is not -1")));
                }
            }
            Model::KleinClosed | Model::PoincareClosed => {
                let r = norm(&coords);
                if r > 1.0 + BOUNDARY_BAND {
                    return Err(invalid(format!("|p| = {r} exceeds 1")));
                }
                if r > 1.0 {
                    coords.iter_mut().for_each(|c| *c /= r);
                }
            }
            Model::ChartKC | Model::ChartPC => {
                let v = coords[n - 1];
                if v < -BOUNDARY_BAND {
                    return Err(invalid(format!("last coordinate {v} is negative")));
                }
                if v < 0.0 {
                    coords[n - 1] = 0.0;
                }
            }
        }
        Ok(Self {
            model,
            n,
            coords: Coords::Finite(coords),
        })
    }

    /// The missed point of a chart.
    pub fn infinity(model: Model, n: usize) -> Result<Self> {
        if !model.is_chart() {
            return Err(Error::InvalidPoint {
                model,
                reason: "only charts have a point at infinity".into(),
            });
        }
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self {
            model,
            n,
            coords: Coords::Infinity,
        })
    }

    /// Trusted constructor for values produced by this crate's own formulas.
    pub(crate) fn raw(model: Model, n: usize, coords: Option<Vec<f64>>) -> Self {
        Self {
            model,
            n,
            coords: coords.map_or(Coords::Infinity, Coords::Finite),
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    /// Dimension of the hyperbolic space.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &Coords {
        &self.coords
    }

    /// Finite coordinates, or `None` at infinity.
    pub fn finite(&self) -> Option<&[f64]> {
        match &self.coords {
            Coords::Finite(c) => Some(c),
            Coords::Infinity => None,
        }
    }

    pub(crate) fn finite_or_err(&self) -> Result<&[f64]> {
        self.finite().ok_or(Error::AtInfinity)
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self.coords, Coords::Infinity)
    }

    /// Whether the point lies on the ideal boundary (within `tol`).
    /// Infinity is a boundary point; hyperboloid points never are.
    pub fn is_boundary(&self, tol: f64) -> bool {
        match (&self.coords, self.model) {
            (Coords::Infinity, _) => true,
            (_, Model::Hyperboloid) => false,
            (Coords::Finite(c), m) if m.is_ball() => (1.0 - norm(c)).abs() <= tol,
            (Coords::Finite(c), _) => c[self.n - 1].abs() <= tol,
        }
    }

    pub(crate) fn expect_model(&self, model: Model) -> Result<()> {
        if self.model == model {
            Ok(())
        } else {
            Err(Error::WrongModel {
                expected: model,
                got: self.model,
            })
        }
    }

    /// Converts to any other model. Boundary points have no hyperboloid image.
    pub fn to_model(&self, target: Model) -> Result<ModelPoint> {
        if target == self.model {
            return Ok(self.clone());
        }
        let klein = match self.model {
            Model::KleinClosed => self.clone(),
            Model::Hyperboloid => hyperboloid_to_klein(self)?,
            Model::PoincareClosed => poincare_to_klein(self)?,
            Model::ChartKC => chart_kc_to_klein(self)?,
            Model::ChartPC => poincare_to_klein(&chart_pc_to_poincare(self)?)?,
        };
        match target {
            Model::KleinClosed => Ok(klein),
            Model::Hyperboloid => klein_to_hyperboloid(&klein),
            Model::PoincareClosed => klein_to_poincare(&klein),
            Model::ChartKC => klein_to_chart_kc(&klein),
            Model::ChartPC => poincare_to_chart_pc(&klein_to_poincare(&klein)?),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("model points always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))
    }
}

impl Serialize for ModelPoint {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("ModelPoint", 3)?;
        st.serialize_field("model", &self.model)?;
        match &self.coords {
            Coords::Finite(c) => st.serialize_field("coords", c)?,
            Coords::Infinity => st.serialize_field("coords", "inf")?,
        }
        st.serialize_field("n", &self.n)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for ModelPoint {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum RawCoords {
            Finite(Vec<f64>),
            Tag(String),
        }
        #[derive(Deserialize)]
        struct Raw {
            model: Model,
            coords: RawCoords,
            n: Option<usize>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let point = match raw.coords {
            RawCoords::Finite(c) => ModelPoint::new(raw.model, c).map_err(de::Error::custom)?,
            RawCoords::Tag(t) if t == "inf" => {
                let n = raw
                    .n
                    .ok_or_else(|| de::Error::custom("a point at infinity needs \"n\""))?;
                ModelPoint::infinity(raw.model, n).map_err(de::Error::custom)?
            }
            RawCoords::Tag(t) => {
                return Err(de::Error::custom(format!("coords must be a list or \"inf\", got {t:?}")))
            }
        };
        if let Some(n) = raw.n {
            if n != point.n {
                return Err(de::Error::custom(Error::DimensionMismatch {
                    expected: n,
                    got: point.n,
                }));
            }
        }
        Ok(point)
    }
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Rescales onto the closed unit ball when rounding pushed a point outside.
fn clamp_ball(mut v: Vec<f64>) -> Vec<f64> {
    let r = norm(&v);
    if r > 1.0 {
        v.iter_mut().for_each(|c| *c /= r);
    }
    v
}

/// `1 − |p|²`, zero for points that are on the sphere up to rounding.
fn ball_defect(p: &[f64]) -> f64 {
    let d = 1.0 - sq(p);
    if d <= SPHERE_EPS {
        0.0
    } else {
        d
    }
}

// Coordinate-level maps, shared with the actions.

pub(crate) fn klein_to_poincare_coords(k: &[f64]) -> Vec<f64> {
    let d = ball_defect(k);
    if d == 0.0 {
        return clamp_ball(k.to_vec());
    }
    let s = 1.0 + d.sqrt();
    k.iter().map(|x| x / s).collect()
}

pub(crate) fn poincare_to_klein_coords(p: &[f64]) -> Vec<f64> {
    if ball_defect(p) == 0.0 {
        return clamp_ball(p.to_vec());
    }
    let s = 1.0 + sq(p);
    clamp_ball(p.iter().map(|x| 2.0 * x / s).collect())
}

/// `None` is the missed point.
pub(crate) fn klein_to_kc_coords(k: &[f64]) -> Option<Vec<f64>> {
    let n = k.len();
    let y = k[n - 1];
    let one_minus = 1.0 - y;
    if one_minus <= 0.0 {
        return None;
    }
    let mut out: Vec<f64> = k[..n - 1].iter().map(|x| x / one_minus).collect();
    let d = ball_defect(k);
    let v = if d == 0.0 {
        0.0
    } else {
        d / (one_minus * one_minus)
    };
    if !v.is_finite() || out.iter().any(|c| !c.is_finite()) {
        return None;
    }
    out.push(v);
    Some(out)
}

pub(crate) fn kc_to_klein_coords(q: Option<&[f64]>, n: usize) -> Vec<f64> {
    match q {
        None => {
            let mut k = vec![0.0; n];
            k[n - 1] = 1.0;
            k
        }
        Some(q) => {
            let u = &q[..n - 1];
            let v = q[n - 1];
            let t = 2.0 / (1.0 + v + sq(u));
            let mut k: Vec<f64> = u.iter().map(|x| x * t).collect();
            k.push(1.0 - t);
            clamp_ball(k)
        }
    }
}

pub(crate) fn poincare_to_pc_coords(p: &[f64]) -> Option<Vec<f64>> {
    let n = p.len();
    let mut diff = p.to_vec();
    diff[n - 1] -= 1.0;
    let den = sq(&diff);
    if den == 0.0 {
        return None;
    }
    let mut out: Vec<f64> = p[..n - 1].iter().map(|x| 2.0 * x / den).collect();
    out.push(ball_defect(p) / den);
    if out.iter().any(|c| !c.is_finite()) {
        return None;
    }
    Some(out)
}

pub(crate) fn pc_to_poincare_coords(q: Option<&[f64]>, n: usize) -> Vec<f64> {
    match q {
        None => {
            let mut p = vec![0.0; n];
            p[n - 1] = 1.0;
            p
        }
        Some(q) => {
            let u = &q[..n - 1];
            let w = q[n - 1];
            let u2 = sq(u);
            let den = (w + 1.0) * (w + 1.0) + u2;
            let mut p: Vec<f64> = u.iter().map(|x| 2.0 * x / den).collect();
            p.push((w * w + u2 - 1.0) / den);
            clamp_ball(p)
        }
    }
}

// Point-level conversions.

/// Central projection `X ↦ X_s/X_T` onto the open Klein ball.
pub fn hyperboloid_to_klein(p: &ModelPoint) -> Result<ModelPoint> {
    p.expect_model(Model::Hyperboloid)?;
    let c = p.finite_or_err()?;
    let n = p.n;
    let k = clamp_ball(c[..n].iter().map(|x| x / c[n]).collect());
    Ok(ModelPoint::raw(Model::KleinClosed, n, Some(k)))
}

/// Inverse of [`hyperboloid_to_klein`]; interior points only.
pub fn klein_to_hyperboloid(k: &ModelPoint) -> Result<ModelPoint> {
    k.expect_model(Model::KleinClosed)?;
    let c = k.finite_or_err()?;
    let d = ball_defect(c);
    if d == 0.0 {
        return Err(Error::InvalidPoint {
            model: Model::KleinClosed,
            reason: "boundary points have no hyperboloid image".into(),
        });
    }
    let s = d.sqrt();
    let mut x: Vec<f64> = c.iter().map(|v| v / s).collect();
    x.push(1.0 / s);
    Ok(ModelPoint::raw(Model::Hyperboloid, k.n, Some(x)))
}

/// `X ↦ X_s/(1 + X_T)`.
pub fn hyperboloid_to_poincare(p: &ModelPoint) -> Result<ModelPoint> {
    p.expect_model(Model::Hyperboloid)?;
    let c = p.finite_or_err()?;
    let n = p.n;
    let q = clamp_ball(c[..n].iter().map(|x| x / (1.0 + c[n])).collect());
    Ok(ModelPoint::raw(Model::PoincareClosed, n, Some(q)))
}

/// `p ↦ (2p, 1 + |p|²)/(1 − |p|²)`; interior points only.
pub fn poincare_to_hyperboloid(p: &ModelPoint) -> Result<ModelPoint> {
    p.expect_model(Model::PoincareClosed)?;
    let c = p.finite_or_err()?;
    let d = ball_defect(c);
    if d == 0.0 {
        return Err(Error::InvalidPoint {
            model: Model::PoincareClosed,
            reason: "boundary points have no hyperboloid image".into(),
        });
    }
    let mut x: Vec<f64> = c.iter().map(|v| 2.0 * v / d).collect();
    x.push((2.0 - d) / d);
    Ok(ModelPoint::raw(Model::Hyperboloid, p.n, Some(x)))
}

/// `k ↦ k/(1 + √(1 − |k|²))`, the identity on the boundary sphere.
pub fn klein_to_poincare(k: &ModelPoint) -> Result<ModelPoint> {
    k.expect_model(Model::KleinClosed)?;
    let c = k.finite_or_err()?;
    Ok(ModelPoint::raw(
        Model::PoincareClosed,
        k.n,
        Some(klein_to_poincare_coords(c)),
    ))
}

/// `p ↦ 2p/(1 + |p|²)`.
pub fn poincare_to_klein(p: &ModelPoint) -> Result<ModelPoint> {
    p.expect_model(Model::PoincareClosed)?;
    let c = p.finite_or_err()?;
    Ok(ModelPoint::raw(
        Model::KleinClosed,
        p.n,
        Some(poincare_to_klein_coords(c)),
    ))
}

/// Chart `KC`; `(0,…,0,1)` goes to infinity.
pub fn klein_to_chart_kc(k: &ModelPoint) -> Result<ModelPoint> {
    k.expect_model(Model::KleinClosed)?;
    let c = k.finite_or_err()?;
    Ok(ModelPoint::raw(Model::ChartKC, k.n, klein_to_kc_coords(c)))
}

/// `(u, v) ↦ (u·t, 1 − t)` with `t = 2/(1 + v + |u|²)`.
pub fn chart_kc_to_klein(q: &ModelPoint) -> Result<ModelPoint> {
    q.expect_model(Model::ChartKC)?;
    Ok(ModelPoint::raw(
        Model::KleinClosed,
        q.n,
        Some(kc_to_klein_coords(q.finite(), q.n)),
    ))
}

/// Chart `PC`; `e_n = (0,…,0,1)` goes to infinity.
pub fn poincare_to_chart_pc(p: &ModelPoint) -> Result<ModelPoint> {
    p.expect_model(Model::PoincareClosed)?;
    let c = p.finite_or_err()?;
    Ok(ModelPoint::raw(Model::ChartPC, p.n, poincare_to_pc_coords(c)))
}

/// `(u, w) ↦ (2u, w² + |u|² − 1)/((w + 1)² + |u|²)`.
pub fn chart_pc_to_poincare(q: &ModelPoint) -> Result<ModelPoint> {
    q.expect_model(Model::ChartPC)?;
    Ok(ModelPoint::raw(
        Model::PoincareClosed,
        q.n,
        Some(pc_to_poincare_coords(q.finite(), q.n)),
    ))
}

/// `(x, y) ↦ (x, f(y))` on chart `KC`; infinity is fixed.
pub fn apply_phi(f: &ReparamMap, q: &ModelPoint) -> Result<ModelPoint> {
    q.expect_model(Model::ChartKC)?;
    let Some(c) = q.finite() else {
        return Ok(q.clone());
    };
    let mut out = c.to_vec();
    let n = q.n;
    out[n - 1] = f.eval(c[n - 1]);
    Ok(ModelPoint::raw(Model::ChartKC, n, Some(out)))
}

/// `(x, y) ↦ (x, f⁻¹(y))` on chart `KC`; infinity is fixed.
pub fn apply_phi_inverse(f: &ReparamMap, q: &ModelPoint) -> Result<ModelPoint> {
    q.expect_model(Model::ChartKC)?;
    let Some(c) = q.finite() else {
        return Ok(q.clone());
    };
    let mut out = c.to_vec();
    let n = q.n;
    out[n - 1] = f.inverse(c[n - 1])?;
    Ok(ModelPoint::raw(Model::ChartKC, n, Some(out)))
}

/// Hyperbolic distance between interior points of the Poincaré ball,
/// `2·asinh(|p − q|/√((1 − |p|²)(1 − |q|²)))`.
pub fn poincare_distance(p: &[f64], q: &[f64]) -> f64 {
    let d = crate::numeric::dist(p, q);
    2.0 * (d / ((1.0 - sq(p)) * (1.0 - sq(q))).sqrt()).asinh()
}

/// Hyperbolic distance between hyperboloid points, as
/// `2·asinh(√Q(X − Y)/2)`, which equals `acosh(−⟨X, Y⟩)` and keeps its
/// accuracy for nearby points.
pub fn hyperboloid_distance(x: &[f64], y: &[f64]) -> f64 {
    let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let q = crate::lorentz::minkowski_unchecked(&d, &d).max(0.0);
    2.0 * (q.sqrt() / 2.0).asinh()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(model: Model, c: &[f64]) -> ModelPoint {
        ModelPoint::new(model, c.to_vec()).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn hyperboloid_examples() {
        let o = hyperboloid_to_klein(&pt(Model::Hyperboloid, &[0.0, 0.0, 1.0])).unwrap();
        assert_eq!(o.finite().unwrap(), &[0.0, 0.0]);
        let s2 = 2f64.sqrt();
        let k = hyperboloid_to_klein(&pt(Model::Hyperboloid, &[1.0, 0.0, s2])).unwrap();
        assert!(close(k.finite().unwrap(), &[1.0 / s2, 0.0], 1e-15));
        assert!(ModelPoint::new(Model::Hyperboloid, vec![1.0, 0.0, 1.0]).is_err());
        assert!(ModelPoint::new(Model::Hyperboloid, vec![0.0, 0.0, -1.0]).is_err());
    }

    #[test]
    fn kc_examples() {
        let q = klein_to_chart_kc(&pt(Model::KleinClosed, &[0.0, 0.0])).unwrap();
        assert_eq!(q.finite().unwrap(), &[0.0, 1.0]);
        let q = klein_to_chart_kc(&pt(Model::KleinClosed, &[0.0, -1.0])).unwrap();
        assert_eq!(q.finite().unwrap(), &[0.0, 0.0]);
        let q = klein_to_chart_kc(&pt(Model::KleinClosed, &[0.0, 0.6, 0.8])).unwrap();
        assert!(close(q.finite().unwrap(), &[0.0, 3.0, 0.0], 1e-14));
        let inf = klein_to_chart_kc(&pt(Model::KleinClosed, &[0.0, 0.0, 1.0])).unwrap();
        assert!(inf.is_infinity());
        let back = chart_kc_to_klein(&inf).unwrap();
        assert_eq!(back.finite().unwrap(), &[0.0, 0.0, 1.0]);
    }

    #[test]
    fn kc_is_phi2_of_pc() {
        for k in [[0.1, -0.2, 0.3], [0.5, 0.5, -0.1], [0.6, 0.0, 0.8]] {
            let kp = pt(Model::KleinClosed, &k);
            let kc = klein_to_chart_kc(&kp).unwrap();
            let pc = poincare_to_chart_pc(&klein_to_poincare(&kp).unwrap()).unwrap();
            let a = kc.finite().unwrap();
            let b = pc.finite().unwrap();
            assert!(close(&a[..2], &b[..2], 1e-13));
            assert!((a[2] - b[2] * b[2]).abs() < 1e-13);
        }
    }

    #[test]
    fn snapping_band() {
        let p = pt(Model::KleinClosed, &[1.0 + 5e-10, 0.0]);
        assert_eq!(p.finite().unwrap(), &[1.0, 0.0]);
        assert!(ModelPoint::new(Model::KleinClosed, vec![1.0 + 1e-8, 0.0]).is_err());
        let q = pt(Model::ChartKC, &[3.0, -1e-10]);
        assert_eq!(q.finite().unwrap(), &[3.0, 0.0]);
        assert!(ModelPoint::new(Model::ChartPC, vec![0.0, -1e-3]).is_err());
        assert!(ModelPoint::infinity(Model::KleinClosed, 3).is_err());
        assert!(ModelPoint::new(Model::KleinClosed, vec![0.1]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let p = pt(Model::ChartPC, &[0.5, 2.0]);
        let s = p.to_json();
        assert_eq!(s, r#"{"model":"ChartPC","coords":[0.5,2.0],"n":2}"#);
        assert_eq!(ModelPoint::from_json(&s).unwrap(), p);
        let inf = ModelPoint::infinity(Model::ChartKC, 4).unwrap();
        let s = inf.to_json();
        assert_eq!(s, r#"{"model":"ChartKC","coords":"inf","n":4}"#);
        assert_eq!(ModelPoint::from_json(&s).unwrap(), inf);
        assert!(ModelPoint::from_json(r#"{"model":"ChartKC","coords":"inf"}"#).is_err());
        assert!(ModelPoint::from_json(r#"{"model":"Foo","coords":[0,0]}"#).is_err());
        let k = ModelPoint::from_json(r#"{"model":"KleinClosed","coords":[0.0,0.5]}"#).unwrap();
        assert_eq!(k.n(), 2);
    }

    #[test]
    fn phi_monomial() {
        let f = ReparamMap::monomial(2).unwrap();
        let q = pt(Model::ChartKC, &[0.4, 3.0]);
        assert_eq!(apply_phi(&f, &q).unwrap().finite().unwrap(), &[0.4, 9.0]);
        let b = pt(Model::ChartKC, &[0.4, 0.0]);
        assert_eq!(apply_phi(&f, &b).unwrap(), b);
        let id = ReparamMap::identity();
        assert_eq!(apply_phi(&id, &q).unwrap(), q);
        assert_eq!(apply_phi_inverse(&id, &q).unwrap(), q);
        let inf = ModelPoint::infinity(Model::ChartKC, 2).unwrap();
        assert!(apply_phi(&f, &inf).unwrap().is_infinity());
        assert!(matches!(
            apply_phi(&f, &pt(Model::ChartPC, &[0.0, 1.0])),
            Err(Error::WrongModel { .. })
        ));
    }

    #[test]
    fn to_model_routes() {
        let h = pt(Model::Hyperboloid, &[0.3, -0.4, (1.25f64).sqrt()]);
        for m in [Model::KleinClosed, Model::PoincareClosed, Model::ChartKC, Model::ChartPC] {
            let there = h.to_model(m).unwrap();
            let back = there.to_model(Model::Hyperboloid).unwrap();
            assert!(close(back.finite().unwrap(), h.finite().unwrap(), 1e-12), "{m}");
        }
        let b = pt(Model::PoincareClosed, &[0.6, 0.8]);
        assert!(b.to_model(Model::Hyperboloid).is_err());
    }

    #[test]
    fn distances_agree() {
        let p = [0.2, -0.1, 0.4];
        let q = [-0.5, 0.3, 0.1];
        let hp = poincare_to_hyperboloid(&pt(Model::PoincareClosed, &p)).unwrap();
        let hq = poincare_to_hyperboloid(&pt(Model::PoincareClosed, &q)).unwrap();
        let d1 = poincare_distance(&p, &q);
        let d2 = hyperboloid_distance(hp.finite().unwrap(), hq.finite().unwrap());
        assert!((d1 - d2).abs() < 1e-12);
    }
}
