//! The compactified actions of `SO₀(n,1)` on the closed ball and on chart
//! `KC`: the projective action `proj`, the conformal action `conf`, and the
//! conjugates `φ_f⁻¹ ∘ proj ∘ φ_f`.
//!
//! In chart `KC` a point `(u, v)` corresponds to the ray of
//!
//! ```text
//! w(u, v) = (u, (v + |u|² − 1)/2, (v + |u|² + 1)/2),    w_τ − w_y = 1,  Q(w) = −v,
//! ```
//!
//! so with `z = g·w` and `ℓ = z_τ − z_y` the image is `(z_x/ℓ, v/ℓ²)`. The
//! boundary `v = 0` is the null cone and `ℓ = 0` is the missed point. The
//! reparametrized action works with `ln f(y)` throughout, so flat maps stay
//! exact at heights where `f(y)` underflows.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lorentz::GroupElement;
use crate::models::{
    self, Model, ModelPoint, ReparamMap,
};
use crate::numeric::norm;

/// Heights below this are treated as the boundary `y = 0`.
pub const BOUNDARY_FLOOR: f64 = 1e-300;

/// `ℓ = z_τ − z_y` below this multiple of `|z|` sends the image to infinity.
const INFINITY_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub enum ActionKind {
    Proj,
    Conf,
    Reparam(ReparamMap),
}

/// One of the compactified actions, with its ambient model.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactifiedAction {
    kind: ActionKind,
}

impl CompactifiedAction {
    pub fn proj() -> Self {
        Self {
            kind: ActionKind::Proj,
        }
    }

    pub fn conf() -> Self {
        Self {
            kind: ActionKind::Conf,
        }
    }

    pub fn reparam(f: ReparamMap) -> Self {
        Self {
            kind: ActionKind::Reparam(f),
        }
    }

    pub fn kind(&self) -> &ActionKind {
        &self.kind
    }

    pub fn model(&self) -> Model {
        match self.kind {
            ActionKind::Proj => Model::KleinClosed,
            ActionKind::Conf => Model::PoincareClosed,
            ActionKind::Reparam(_) => Model::ChartKC,
        }
    }

    pub fn act(&self, g: &GroupElement, p: &ModelPoint) -> Result<ModelPoint> {
        match &self.kind {
            ActionKind::Proj => act_proj(g, p),
            ActionKind::Conf => act_conf(g, p),
            ActionKind::Reparam(f) => act_reparam(f, g, p),
        }
    }
}

fn check_dim(g: &GroupElement, p: &ModelPoint) -> Result<()> {
    if g.n() != p.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: p.n(),
        });
    }
    Ok(())
}

fn apply(g: &GroupElement, w: Vec<f64>) -> Vec<f64> {
    g.apply(&DVector::from_vec(w)).as_slice().to_vec()
}

/// Puts an image back on the closed ball; boundary inputs stay on the sphere.
fn finish_ball(mut v: Vec<f64>, on_boundary: bool) -> Vec<f64> {
    let r = norm(&v);
    if on_boundary || r > 1.0 {
        v.iter_mut().for_each(|c| *c /= r);
    }
    v
}

fn on_sphere(p: &[f64]) -> bool {
    (1.0 - p.iter().map(|x| x * x).sum::<f64>()).abs() <= 4.0 * f64::EPSILON
}

/// The projective action on the closed Klein ball: `[k : 1] ↦ [g·(k, 1)]`.
pub fn act_proj(g: &GroupElement, k: &ModelPoint) -> Result<ModelPoint> {
    k.expect_model(Model::KleinClosed)?;
    check_dim(g, k)?;
    let c = k.finite_or_err()?;
    let n = k.n();
    let mut w = c.to_vec();
    w.push(1.0);
    let z = apply(g, w);
    if !(z[n] > 0.0) {
        return Err(Error::InvalidArgument(
            "image left the affine chart of the closed ball".into(),
        ));
    }
    let image = z[..n].iter().map(|x| x / z[n]).collect();
    Ok(ModelPoint::raw(
        Model::KleinClosed,
        n,
        Some(finish_ball(image, on_sphere(c))),
    ))
}

/// The conformal action on the closed Poincaré ball.
///
/// With `z = g·(2p, 1 + |p|²)` and `d = 1 − |p|²` the image is
/// `z_s/(z_τ + d)`, which is `klein_to_poincare ∘ proj ∘ poincare_to_klein`
/// written without the square roots and continuous up to `d = 0`.
pub fn act_conf(g: &GroupElement, p: &ModelPoint) -> Result<ModelPoint> {
    p.expect_model(Model::PoincareClosed)?;
    check_dim(g, p)?;
    let c = p.finite_or_err()?;
    let n = p.n();
    let boundary = on_sphere(c);
    let r2: f64 = c.iter().map(|x| x * x).sum();
    let d = if boundary { 0.0 } else { 1.0 - r2 };
    let mut w: Vec<f64> = c.iter().map(|x| 2.0 * x).collect();
    w.push(1.0 + r2);
    let z = apply(g, w);
    let den = z[n] + d;
    if !(den > 0.0) {
        return Err(Error::InvalidArgument(
            "image left the affine chart of the closed ball".into(),
        ));
    }
    let image = z[..n].iter().map(|x| x / den).collect();
    Ok(ModelPoint::raw(
        Model::PoincareClosed,
        n,
        Some(finish_ball(image, boundary)),
    ))
}

/// `w(u, v)`; `None` gives the null vector of the missed point.
pub(crate) fn chart_vector(q: Option<(&[f64], f64)>, n: usize) -> Vec<f64> {
    match q {
        None => {
            let mut w = vec![0.0; n + 1];
            w[n - 1] = 1.0;
            w[n] = 1.0;
            w
        }
        Some((u, v)) => {
            let u2: f64 = u.iter().map(|x| x * x).sum();
            let mut w = u.to_vec();
            w.push(0.5 * (v + u2 - 1.0));
            w.push(0.5 * (v + u2 + 1.0));
            w
        }
    }
}

/// `g·w`, split into `(z_x/ℓ, ℓ)`, or `None` when `ℓ` vanishes.
fn chart_image(g: &GroupElement, w: Vec<f64>, n: usize) -> Option<(Vec<f64>, f64)> {
    let z = apply(g, w);
    let ell = z[n] - z[n - 1];
    let scale = z.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if !(ell > INFINITY_RATIO * scale) {
        return None;
    }
    Some((z[..n - 1].iter().map(|x| x / ell).collect(), ell))
}

/// `φ_f⁻¹ ∘ proj ∘ φ_f` on chart `KC`.
///
/// The boundary `y = 0` (and heights below [`BOUNDARY_FLOOR`]) is mapped by
/// the continuous extension, which only moves the `x` part.
pub fn act_reparam(f: &ReparamMap, g: &GroupElement, q: &ModelPoint) -> Result<ModelPoint> {
    q.expect_model(Model::ChartKC)?;
    check_dim(g, q)?;
    let n = q.n();
    let infinity = || ModelPoint::raw(Model::ChartKC, n, None);
    let Some(c) = q.finite() else {
        let w = chart_vector(None, n);
        return Ok(match chart_image(g, w, n) {
            None => infinity(),
            Some((mut u, _)) => {
                u.push(0.0);
                ModelPoint::raw(Model::ChartKC, n, Some(u))
            }
        });
    };
    let u = &c[..n - 1];
    let y = c[n - 1];
    if y < BOUNDARY_FLOOR {
        let w = chart_vector(Some((u, 0.0)), n);
        return Ok(match chart_image(g, w, n) {
            None => infinity(),
            Some((mut u2, _)) => {
                u2.push(0.0);
                ModelPoint::raw(Model::ChartKC, n, Some(u2))
            }
        });
    }
    let level = f.log_eval(y);
    let v = level.exp();
    let w = chart_vector(Some((u, v)), n);
    let Some((mut u2, ell)) = chart_image(g, w, n) else {
        return Ok(infinity());
    };
    let v2 = v / (ell * ell);
    let y2 = if f.is_identity() {
        v2
    } else if v.is_normal() && v2.is_normal() {
        f.inverse(v2)?
    } else {
        f.inverse_log(level - 2.0 * ell.ln())?
    };
    u2.push(y2);
    Ok(ModelPoint::raw(Model::ChartKC, n, Some(u2)))
}

/// `act_proj` transported to chart `KC`, the reference for `Monomial(1)`.
pub fn act_proj_in_chart_kc(g: &GroupElement, q: &ModelPoint) -> Result<ModelPoint> {
    let k = models::chart_kc_to_klein(q)?;
    models::klein_to_chart_kc(&act_proj(g, &k)?)
}

/// `act_conf` transported to chart `PC`.
pub fn act_conf_in_chart_pc(g: &GroupElement, q: &ModelPoint) -> Result<ModelPoint> {
    let p = models::chart_pc_to_poincare(q)?;
    models::poincare_to_chart_pc(&act_conf(g, &p)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{generator, group_exp, GeneratorKind};
    use crate::models::{klein_to_poincare, poincare_to_klein, FlatExample};

    fn boost(kind: GeneratorKind, n: usize, t: f64) -> GroupElement {
        group_exp(&generator(kind, n).unwrap().scale(t))
    }

    fn pt(model: Model, c: &[f64]) -> ModelPoint {
        ModelPoint::new(model, c.to_vec()).unwrap()
    }

    fn close(a: &ModelPoint, b: &ModelPoint, tol: f64) -> bool {
        match (a.finite(), b.finite()) {
            (None, None) => true,
            (Some(x), Some(y)) => x.iter().zip(y).all(|(p, q)| (p - q).abs() <= tol),
            _ => false,
        }
    }

    #[test]
    fn identity_acts_trivially() {
        let e = GroupElement::identity(3);
        let k = pt(Model::KleinClosed, &[0.2, -0.3, 0.1]);
        assert!(close(&act_proj(&e, &k).unwrap(), &k, 1e-15));
        let p = pt(Model::PoincareClosed, &[0.6, 0.0, 0.8]);
        assert!(close(&act_conf(&e, &p).unwrap(), &p, 1e-15));
        let q = pt(Model::ChartKC, &[0.2, -0.3, 0.1]);
        let f = ReparamMap::flat(FlatExample::F1);
        assert!(close(&act_reparam(&f, &e, &q).unwrap(), &q, 1e-14));
    }

    #[test]
    fn boost_fixes_poles() {
        for t in [-2.0, 0.3, 1.5] {
            let g = boost(GeneratorKind::H, 3, t);
            for s in [-1.0, 1.0] {
                let k = pt(Model::KleinClosed, &[0.0, 0.0, s]);
                assert!(close(&act_proj(&g, &k).unwrap(), &k, 1e-14));
            }
        }
    }

    #[test]
    fn boost_scales_chart() {
        // proj_H = (2u, 4v) integrates to (e^{2t}u, e^{4t}v)
        let g = boost(GeneratorKind::H, 3, 0.25);
        let q = pt(Model::ChartKC, &[0.3, -0.2, 0.7]);
        let r = act_reparam(&ReparamMap::identity(), &g, &q).unwrap();
        let e2 = (0.5f64).exp();
        let expected = pt(Model::ChartKC, &[0.3 * e2, -0.2 * e2, 0.7 * e2 * e2]);
        assert!(close(&r, &expected, 1e-13));
    }

    #[test]
    fn parabolic_translates_chart() {
        let g = boost(GeneratorKind::X(2), 3, 0.75);
        let q = pt(Model::ChartKC, &[0.3, -0.2, 0.7]);
        let r = act_reparam(&ReparamMap::flat(FlatExample::F2), &g, &q).unwrap();
        assert!(close(&r, &pt(Model::ChartKC, &[0.3, 0.55, 0.7]), 1e-13));
    }

    #[test]
    fn conf_matches_composition() {
        let g = group_exp(
            &crate::lorentz::AlgebraElement::combination(3, &[0.3, -0.5, 0.2, 0.4, -0.1, 0.6])
                .unwrap(),
        );
        for c in [[0.1, 0.2, -0.3], [0.0, 0.6, 0.8], [-0.5, 0.5, 0.1]] {
            let p = pt(Model::PoincareClosed, &c);
            let direct = act_conf(&g, &p).unwrap();
            let k = act_proj(&g, &poincare_to_klein(&p).unwrap()).unwrap();
            let composed = klein_to_poincare(&k).unwrap();
            assert!(close(&direct, &composed, 1e-12));
        }
    }

    #[test]
    fn missed_point_and_infinity() {
        // Y₁ moves infinity; H fixes it
        let n = 2;
        let inf = ModelPoint::infinity(Model::ChartKC, n).unwrap();
        let id = ReparamMap::identity();
        let h = boost(GeneratorKind::H, n, 0.7);
        assert!(act_reparam(&id, &h, &inf).unwrap().is_infinity());
        let y = boost(GeneratorKind::Y(1), n, 0.5);
        let moved = act_reparam(&id, &y, &inf).unwrap();
        assert!(!moved.is_infinity());
        assert_eq!(moved.finite().unwrap()[1], 0.0);
        let back = act_reparam(&id, &y.inverse(), &moved).unwrap();
        assert!(back.is_infinity());
    }

    #[test]
    fn flat_map_deep_boundary_layer() {
        // f₁(1e-2) = e^{-10⁴} underflows; the action must stay accurate
        let f = ReparamMap::flat(FlatExample::F1);
        let g = boost(GeneratorKind::H, 2, 0.1);
        let q = pt(Model::ChartKC, &[0.5, 1e-2]);
        let r = act_reparam(&f, &g, &q).unwrap();
        let c = r.finite().unwrap();
        // ln f₁ shifts by 0.4: y'^{-2} = y^{-2} − 0.4
        assert!((c[1] - (1e4f64 - 0.4).powf(-0.5)).abs() < 1e-15);
        assert!((c[0] - 0.5 * (0.2f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn wrong_model_and_dimension() {
        let g = GroupElement::identity(3);
        let k = pt(Model::KleinClosed, &[0.1, 0.2]);
        assert!(matches!(act_proj(&g, &k), Err(Error::DimensionMismatch { .. })));
        let k3 = pt(Model::KleinClosed, &[0.1, 0.2, 0.0]);
        assert!(matches!(act_conf(&g, &k3), Err(Error::WrongModel { .. })));
    }
}
