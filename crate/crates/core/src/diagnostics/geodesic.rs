//! Geodesics of the Klein ball near their ideal endpoints: endpoint limits in
//! the reparametrized charts, boundary angles between asymptotic geodesics,
//! and transversality to the boundary.
//!
//! Along the chord `k(t) = a + t(b − a)` with `|a| = |b| = 1` and
//! `ℓ(t) = (1 − a_y) − t(b_y − a_y)`,
//!
//! ```text
//! 1 − |k|² = 2t(1 − t)(1 − a·b)
//! u(t) − u(0) = t·[(b − a)_x(1 − a_y) + a_x(b_y − a_y)] / (ℓ(t)(1 − a_y))
//! ln v(t) = ln t + ln(1 − t) + ln 2(1 − a·b) − 2 ln ℓ(t)
//! ```
//!
//! so chart points are computed from `ln t` without cancellation, for
//! parameters far below the `f64` range.

use serde::{Deserialize, Serialize};

use super::holder::ActionModel;
use crate::error::{Error, Result};
use crate::models::{Model, ModelPoint, ReparamMap};
use crate::numeric::{aitken, dist, norm};
use crate::tolerances::Tolerances;

/// `1 − a_y` below this puts the endpoint at the chart's missed point.
const POLE_EPS: f64 = 1e-14;

/// Iterates kept in a trail before the final five.
const TRAIL_HEAD: usize = 10;

/// Iteration budget of [`endpoints_under`].
pub const MAX_ENDPOINT_STEPS: usize = 100_000;

/// Levels `t = 10^{−j}`, `j = 1..=ANGLE_LEVELS`, for the angle estimates.
pub const ANGLE_LEVELS: usize = 12;

/// A geodesic of the Klein ball: the open chord between two boundary points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geodesic {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl Geodesic {
    /// Endpoints must lie on the unit sphere within the boundary band.
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.len(),
                got: b.len(),
            });
        }
        if a.len() < 2 {
            return Err(Error::InvalidDimension(a.len()));
        }
        let a = on_sphere(a)?;
        let b = on_sphere(b)?;
        if dist(&a, &b) <= 1e-12 {
            return Err(Error::CoincidentEndpoints);
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn n(&self) -> usize {
        self.a.len()
    }

    /// `(1 − t)a + tb`.
    pub fn point(&self, t: f64) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(x, y)| (1.0 - t) * x + t * y)
            .collect()
    }

    pub fn reversed(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
        }
    }
}

fn on_sphere(mut p: Vec<f64>) -> Result<Vec<f64>> {
    let r = norm(&p);
    if (r - 1.0).abs() > crate::models::BOUNDARY_BAND {
        return Err(Error::NotOnBoundary(r));
    }
    p.iter_mut().for_each(|x| *x /= r);
    Ok(p)
}

/// Chart data of a chord near its start `a`, in log form.
struct ChordNearStart {
    n: usize,
    pole: bool,
    one_minus: f64,
    u0: Vec<f64>,
    du_coeff: Vec<f64>,
    d_y: f64,
    log_gap: f64,
    a: Vec<f64>,
    d: Vec<f64>,
}

/// A chart point along the chord: `u` and `ln v`.
struct ChartSample {
    u: Vec<f64>,
    /// `|u − u₀|` without cancellation; unused at the pole.
    du_norm: f64,
    log_v: f64,
}

impl ChordNearStart {
    fn new(l: &Geodesic) -> Self {
        let n = l.n();
        let a = l.a.clone();
        let d: Vec<f64> = l.b.iter().zip(&a).map(|(x, y)| x - y).collect();
        let one_minus = 1.0 - a[n - 1];
        let pole = one_minus < POLE_EPS;
        let d_y = d[n - 1];
        let dot: f64 = a.iter().zip(&l.b).map(|(x, y)| x * y).sum();
        let (u0, du_coeff) = if pole {
            (vec![0.0; n - 1], vec![0.0; n - 1])
        } else {
            (
                a[..n - 1].iter().map(|x| x / one_minus).collect(),
                (0..n - 1)
                    .map(|i| (d[i] * one_minus + a[i] * d_y) / one_minus)
                    .collect(),
            )
        };
        Self {
            n,
            pole,
            one_minus,
            u0,
            du_coeff,
            d_y,
            log_gap: (2.0 * (1.0 - dot)).ln(),
            a,
            d,
        }
    }

    /// The chart `KC` image of `k(t)` for `t = exp(log_t)`.
    fn sample(&self, log_t: f64) -> ChartSample {
        let t = log_t.exp();
        let (ell, u) = if self.pole {
            // 1 − a_y vanishes: ℓ = −t·d_y
            let ell = -t * self.d_y;
            let u = (0..self.n - 1)
                .map(|i| {
                    let lead = if self.a[i] == 0.0 { 0.0 } else { self.a[i] / ell };
                    lead - self.d[i] / self.d_y
                })
                .collect();
            (ell, u)
        } else {
            let ell = self.one_minus - t * self.d_y;
            let u = self
                .u0
                .iter()
                .zip(&self.du_coeff)
                .map(|(u0, c)| u0 + t * c / ell)
                .collect();
            (ell, u)
        };
        let log_ell = if self.pole {
            log_t + (-self.d_y).ln()
        } else {
            ell.ln()
        };
        let log_v = log_t + (-t).ln_1p() + self.log_gap - 2.0 * log_ell;
        let du_norm = t * norm(&self.du_coeff) / ell.abs();
        ChartSample { u, du_norm, log_v }
    }
}

/// One point of an iterate trail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrailPoint {
    /// `t = 10^{−j}`.
    pub j: usize,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointEvidence {
    /// The boundary point the chord tends to in chart `KC`; `φ_f` fixes the
    /// boundary, so this is also the limit in the reparametrized chart.
    pub limit: ModelPoint,
    /// The first iterates and the last five.
    pub trail: Vec<TrailPoint>,
    pub steps: usize,
    /// Largest pairwise distance of the last five iterates; taken between
    /// their Klein images when the limit is infinity.
    pub cauchy: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointReport {
    pub map: String,
    pub start: EndpointEvidence,
    pub end: EndpointEvidence,
    pub distinct: bool,
}

impl EndpointReport {
    pub fn converged(&self) -> bool {
        self.start.converged && self.end.converged
    }
}

/// The Klein image of a chart point, with `(0,…,0,1)` for unbounded ones.
fn compactified(q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let mut out = vec![0.0; n];
    out[n - 1] = 1.0;
    if q.iter().any(|x| !x.is_finite()) {
        return out;
    }
    let (u, y) = q.split_at(n - 1);
    let denom = 1.0 + y[0] + u.iter().map(|x| x * x).sum::<f64>();
    if !denom.is_finite() {
        return out;
    }
    let t = 2.0 / denom;
    for (o, x) in out.iter_mut().zip(u) {
        *o = x * t;
    }
    out[n - 1] = 1.0 - t;
    out
}

fn phi_inverse_point(f: &ReparamMap, s: &ChartSample) -> Result<Vec<f64>> {
    let mut q = s.u.clone();
    q.push(f.inverse_log(s.log_v)?);
    Ok(q)
}

fn endpoint(f: &ReparamMap, l: &Geodesic, tol: f64) -> Result<EndpointEvidence> {
    let chord = ChordNearStart::new(l);
    let n = chord.n;
    let ln10 = std::f64::consts::LN_10;
    let mut window: Vec<TrailPoint> = Vec::with_capacity(5);
    let mut trail = Vec::new();
    let mut cauchy = f64::INFINITY;
    let mut converged = false;
    let mut steps = 0;
    for j in 1..=MAX_ENDPOINT_STEPS {
        steps = j;
        let q = phi_inverse_point(f, &chord.sample(-(j as f64) * ln10))?;
        let p = TrailPoint { j, coords: q };
        if j <= TRAIL_HEAD {
            trail.push(p.clone());
        }
        if window.len() == 5 {
            window.remove(0);
        }
        window.push(p);
        if window.len() < 5 {
            continue;
        }
        let images: Vec<Vec<f64>> = if chord.pole {
            window.iter().map(|p| compactified(&p.coords)).collect()
        } else {
            window.iter().map(|p| p.coords.clone()).collect()
        };
        let mut spread = 0.0f64;
        for i in 0..5 {
            for k in i + 1..5 {
                spread = spread.max(dist(&images[i], &images[k]));
            }
        }
        cauchy = spread;
        if spread < tol {
            converged = true;
            break;
        }
    }
    for p in window {
        if p.j > TRAIL_HEAD {
            trail.push(p);
        }
    }
    let limit = if chord.pole {
        ModelPoint::raw(Model::ChartKC, n, None)
    } else {
        let mut c = chord.u0.clone();
        c.push(0.0);
        ModelPoint::raw(Model::ChartKC, n, Some(c))
    };
    Ok(EndpointEvidence {
        limit,
        trail,
        steps,
        cauchy,
        converged,
    })
}

/// Limits of `φ_f⁻¹(KC(L(t)))` as `t → 0⁺` and `t → 1⁻`, iterating
/// `t = 10^{−j}` from each end until five consecutive iterates agree within
/// the `endpoint` tolerance.
pub fn endpoints_under(f: &ReparamMap, l: &Geodesic, tol: &Tolerances) -> Result<EndpointReport> {
    let eps = tol.get("endpoint");
    let start = endpoint(f, l, eps)?;
    let end = endpoint(f, &l.reversed(), eps)?;
    let distinct = match (start.limit.finite(), end.limit.finite()) {
        (Some(x), Some(y)) => dist(x, y) > eps,
        (None, None) => false,
        _ => true,
    };
    Ok(EndpointReport {
        map: f.to_string(),
        start,
        end,
        distinct,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    pub model: ActionModel,
    /// Extrapolated limit angle, in radians.
    pub angle: f64,
    /// Secant angles at `t = 10^{−j}`, `j = 1..=ANGLE_LEVELS`.
    pub trail: Vec<f64>,
    pub converged: bool,
}

/// The angle between unit vectors along `x` and `y`, accurate near 0.
fn angle_between(x: &[f64], y: &[f64]) -> f64 {
    let nx = norm(x);
    let ny = norm(y);
    let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a / nx - b / ny).collect();
    let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a / nx + b / ny).collect();
    2.0 * norm(&diff).atan2(norm(&sum))
}

/// Limit of a sequence by Aitken's Δ² on its last three terms, when the
/// tail contracts; otherwise the last term.
fn extrapolate(trail: &[f64]) -> (f64, bool) {
    let m = trail.len();
    let (x0, x1, x2) = (trail[m - 3], trail[m - 2], trail[m - 1]);
    let d1 = (x1 - x0).abs();
    let d2 = (x2 - x1).abs();
    let converged = d2 <= d1 || d2 <= 1e-12;
    let limit = aitken(x0, x1, x2).unwrap_or(x2);
    (limit, converged)
}

/// Secant direction from the common endpoint `e` towards the point at
/// parameter `t` of the chord from `e` to `o`.
fn secant(model: ActionModel, e: &[f64], o: &[f64], t: f64) -> Vec<f64> {
    let chord: Vec<f64> = o.iter().zip(e).map(|(x, y)| x - y).collect();
    match model {
        ActionModel::Proj => chord.iter().map(|c| t * c).collect(),
        ActionModel::Conf => {
            // p − e = (t(o − e) − s·e)/(1 + s), s = √(1 − |k|²)
            let dot: f64 = e.iter().zip(o).map(|(x, y)| x * y).sum();
            let s = (2.0 * t * (1.0 - t) * (1.0 - dot)).sqrt();
            chord
                .iter()
                .zip(e)
                .map(|(c, x)| (t * c - s * x) / (1.0 + s))
                .collect()
        }
    }
}

/// The angle at a common ideal endpoint between two geodesics, measured in
/// the Klein ball (`Proj`) or after the map to the Poincaré ball (`Conf`).
pub fn boundary_tangency_angle(
    model: ActionModel,
    g1: &Geodesic,
    g2: &Geodesic,
) -> Result<AngleReport> {
    if g1.n() != g2.n() {
        return Err(Error::DimensionMismatch {
            expected: g1.n(),
            got: g2.n(),
        });
    }
    let shared = |p: &[f64], q: &[f64]| dist(p, q) <= 1e-12;
    let mut common = None;
    'outer: for (e1, o1) in [(g1.a(), g1.b()), (g1.b(), g1.a())] {
        for (e2, o2) in [(g2.a(), g2.b()), (g2.b(), g2.a())] {
            if shared(e1, e2) {
                common = Some((e1, o1, o2));
                break 'outer;
            }
        }
    }
    let (e, o1, o2) = common.ok_or_else(|| {
        Error::InvalidArgument("the geodesics share no endpoint".into())
    })?;
    let trail: Vec<f64> = (1..=ANGLE_LEVELS)
        .map(|j| {
            let t = 10f64.powi(-(j as i32));
            angle_between(&secant(model, e, o1, t), &secant(model, e, o2, t))
        })
        .collect();
    let (limit, converged) = extrapolate(&trail);
    Ok(AngleReport {
        model,
        angle: limit.abs(),
        trail,
        converged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransversalityReport {
    pub map: String,
    pub transversal: bool,
    /// Extrapolated angle with the boundary plane, in radians.
    pub angle: f64,
    pub trail: Vec<f64>,
    pub converged: bool,
    /// Which end of the chord was examined.
    pub at_start: bool,
}

/// Angle at the boundary between `t ↦ φ_f⁻¹(KC(L(t)))` and the plane
/// `y = 0`, at the start of `L` (or its end when the start is the missed
/// point). Transversal when the limit exceeds the `transversal` tolerance.
pub fn transversality_check(
    f: &ReparamMap,
    l: &Geodesic,
    tol: &Tolerances,
) -> Result<TransversalityReport> {
    let mut chord = ChordNearStart::new(l);
    let mut at_start = true;
    if chord.pole {
        chord = ChordNearStart::new(&l.reversed());
        at_start = false;
    }
    let ln10 = std::f64::consts::LN_10;
    let mut trail = Vec::with_capacity(ANGLE_LEVELS);
    for j in 1..=ANGLE_LEVELS {
        let s = chord.sample(-(j as f64) * ln10);
        let y = f.inverse_log(s.log_v)?;
        trail.push(y.atan2(s.du_norm));
    }
    let (limit, converged) = extrapolate(&trail);
    let angle = limit.clamp(0.0, std::f64::consts::FRAC_PI_2);
    Ok(TransversalityReport {
        map: f.to_string(),
        transversal: converged && angle > tol.get("transversal"),
        angle,
        trail,
        converged,
        at_start,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{klein_to_chart_kc, FlatExample};

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn geo(a: &[f64], b: &[f64]) -> Geodesic {
        Geodesic::new(a.to_vec(), b.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(matches!(
            Geodesic::new(vec![0.5, 0.0], vec![0.0, 1.0]),
            Err(Error::NotOnBoundary(_))
        ));
        assert!(matches!(
            Geodesic::new(vec![0.0, 1.0], vec![0.0, 1.0]),
            Err(Error::CoincidentEndpoints)
        ));
        let l = geo(&[0.0, -1.0], &[1.0, 0.0]);
        assert_eq!(l.point(0.5), vec![0.5, -0.5]);
    }

    #[test]
    fn vertical_geodesic_endpoints() {
        let l = geo(&[0.0, 0.0, -1.0], &[0.0, 0.0, 1.0]);
        for f in [
            ReparamMap::identity(),
            ReparamMap::monomial(3).unwrap(),
            ReparamMap::flat(FlatExample::F1),
        ] {
            let r = endpoints_under(&f, &l, &tol()).unwrap();
            assert!(r.converged(), "{f}: {r:?}");
            assert_eq!(r.start.limit.finite().unwrap(), &[0.0, 0.0, 0.0]);
            assert!(r.end.limit.is_infinity());
            assert!(r.distinct);
        }
    }

    #[test]
    fn identity_endpoints_are_chart_images() {
        let s = 0.6f64;
        let l = geo(&[s, -0.8], &[-0.28, 0.96]);
        let r = endpoints_under(&ReparamMap::identity(), &l, &tol()).unwrap();
        assert!(r.converged());
        for (ev, p) in [(&r.start, l.a()), (&r.end, l.b())] {
            let k = ModelPoint::new(Model::KleinClosed, p.to_vec()).unwrap();
            let c = klein_to_chart_kc(&k).unwrap();
            let x = c.finite().unwrap();
            let y = ev.limit.finite().unwrap();
            assert!(dist(x, y) < 1e-12);
            let last = &ev.trail.last().unwrap().coords;
            assert!(dist(last, y) < 1e-5);
        }
    }

    #[test]
    fn flat_map_needs_many_steps() {
        let l = geo(&[0.6, -0.8], &[-0.28, 0.96]);
        let r = endpoints_under(&ReparamMap::flat(FlatExample::F1), &l, &tol()).unwrap();
        assert!(r.converged());
        assert!(r.start.steps > 1000);
    }

    #[test]
    fn tangency_dichotomy_example() {
        let e = [0.0, -1.0];
        let g1 = geo(&e, &[1.0, 0.0]);
        let g2 = geo(&[0.6, 0.8], &e);
        let proj = boundary_tangency_angle(ActionModel::Proj, &g1, &g2).unwrap();
        // chords from (0,−1) to (1,0) and (0.6,0.8): 45° and atan(0.6/1.8)
        let expected = std::f64::consts::FRAC_PI_4 - (0.6f64 / 1.8).atan();
        assert!((proj.angle - expected).abs() < 1e-12);
        let conf = boundary_tangency_angle(ActionModel::Conf, &g1, &g2).unwrap();
        assert!(conf.angle < 1e-4, "{conf:?}");
        let same = boundary_tangency_angle(ActionModel::Conf, &g1, &g1).unwrap();
        assert_eq!(same.angle, 0.0);
        let g3 = geo(&[1.0, 0.0], &[0.0, 1.0]);
        assert!(boundary_tangency_angle(ActionModel::Proj, &g2, &geo(&[-1.0, 0.0], &[0.0, -1.0])).is_ok());
        assert!(boundary_tangency_angle(ActionModel::Proj, &geo(&[-1.0, 0.0], &[0.0, -1.0]), &g3).is_err());
    }

    #[test]
    fn transversality_examples() {
        let vertical = geo(&[0.0, -1.0], &[0.0, 1.0]);
        let r = transversality_check(&ReparamMap::identity(), &vertical, &tol()).unwrap();
        assert!(r.transversal);
        assert!((r.angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        let l = geo(&[0.6, -0.8], &[-0.28, 0.96]);
        for f in [ReparamMap::identity(), ReparamMap::monomial(2).unwrap()] {
            let r = transversality_check(&f, &l, &tol()).unwrap();
            assert!(r.transversal, "{f}: {r:?}");
        }
        let from_pole = geo(&[0.0, 1.0], &[0.6, -0.8]);
        let r = transversality_check(&ReparamMap::identity(), &from_pole, &tol()).unwrap();
        assert!(!r.at_start);
    }
}
