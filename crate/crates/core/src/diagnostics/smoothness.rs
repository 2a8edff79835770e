//! Numeric classification of boundary regularity: smoothness of `f/f′` at 0
//! and the first non-vanishing derivative of `f` at 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{self, Real};
use crate::models::ReparamMap;
use crate::tolerances::Tolerances;

type HpFn = dyn Fn(&Real) -> Real + Send + Sync;

/// A function on `(0, 1]` evaluated in extended precision.
pub struct SmoothnessProbe {
    f: Box<HpFn>,
    bits: usize,
    label: String,
}

impl std::fmt::Debug for SmoothnessProbe {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothnessProbe")
            .field("label", &self.label)
            .field("bits", &self.bits)
            .finish()
    }
}

impl SmoothnessProbe {
    /// A probe whose values are accurate to `bits` bits.
    pub fn hp<F>(label: &str, bits: usize, f: F) -> Self
    where
        F: Fn(&Real) -> Real + Send + Sync + 'static,
    {
        Self {
            f: Box::new(f),
            bits,
            label: label.to_string(),
        }
    }

    /// A double-precision probe; its noise floor is set accordingly.
    pub fn from_f64<F>(label: &str, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::hp(label, 53, move |y| {
            hp::from_f64(f(hp::to_f64(y)), hp::bits_of(y))
        })
    }

    /// `f/f′` of a reparametrization.
    pub fn ratio_of(map: &ReparamMap) -> Self {
        let m = map.clone();
        Self::hp(
            &format!("f/f' of {map}"),
            map.hp_bits(hp::DEFAULT_BITS),
            move |y| m.ratio_hp(y),
        )
    }

    /// Multiplies the probe by a constant.
    pub fn scaled(self, c: f64) -> Self {
        let label = format!("{c} * {}", self.label);
        let f = self.f;
        Self::hp(&label, self.bits, move |y| {
            f(y) * hp::from_f64(c, hp::bits_of(y))
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, y: &Real) -> Real {
        (self.f)(y)
    }
}

/// The sample grid `y_j = 10^{−j}`, `j = 1..=levels`, with step `h_j = y_j·step_ratio`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub levels: usize,
    pub step_ratio: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            levels: 7,
            step_ratio: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SmoothnessVerdict {
    SmoothUpTo(usize),
    DivergesAtOrder(usize),
}

/// Estimates of one derivative order along the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderEvidence {
    pub order: usize,
    /// One estimate per grid level.
    pub estimates: Vec<f64>,
    /// Largest pairwise difference over the last three levels.
    pub spread: f64,
    /// Largest `|estimate|` over the whole grid.
    pub scale: f64,
    /// `|e_J| / |e_{J−2}|`.
    pub growth: f64,
    pub converged: bool,
    pub diverges: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessReport {
    pub label: String,
    pub orders_checked: usize,
    pub verdict: SmoothnessVerdict,
    pub grid: Vec<f64>,
    pub evidence: Vec<OrderEvidence>,
    /// Orders of magnitude backing the verdict: the weakest Cauchy
    /// contraction `−log10(spread/scale)` over the smooth orders, or the
    /// largest `log10(growth)` from the diverging order upwards.
    pub evidence_decades: f64,
    /// Some probe value came out as exactly 0 at a positive argument.
    pub underflow: bool,
    pub precision_bits: usize,
}

fn binomial(k: usize, i: usize) -> i64 {
    (0..i).fold(1i64, |acc, m| acc * (k - m) as i64 / (m + 1) as i64)
}

/// Cap on reported decades: beyond the working precision nothing is measured.
fn decade_cap(bits: usize) -> f64 {
    (bits as f64 * std::f64::consts::LOG10_2).floor()
}

/// Classifies the derivatives of `probe` of orders `1..=k_max` at `0⁺`.
///
/// Central differences of order `k` are taken at `y_j` with step `h_j`.
/// An order has converged when its estimates over the last three levels are
/// within `smooth_cauchy` of each other relative to their largest value on
/// the grid, and diverges when `|e_J|/|e_{J−2}| ≥ smooth_growth`. Estimates
/// below the rounding level of the probe are read as 0.
pub fn classify_smoothness(
    probe: &SmoothnessProbe,
    k_max: usize,
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<SmoothnessReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if grid.levels < 3 {
        return Err(Error::InvalidArgument("the grid needs at least 3 levels".into()));
    }
    if !(grid.step_ratio > 0.0) || k_max as f64 * grid.step_ratio / 2.0 >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "step ratio {} leaves (0, ∞) at order {k_max}",
            grid.step_ratio
        )));
    }
    let cauchy = tol.get("smooth_cauchy");
    let growth_tol = tol.get("smooth_growth");
    let work = hp::DEFAULT_BITS.max(probe.bits);
    // rounding level of a sum of probe values, relative to Σ|terms|
    let noise = 2f64.powi(6 - probe.bits as i32);
    let step = hp::from_f64(grid.step_ratio, work);
    let half = hp::ratio(1, 2, work);
    let zero = hp::from_i64(0, work);

    let ys: Vec<Real> = (1..=grid.levels)
        .map(|j| hp::pow10(-(j as i32), work))
        .collect();
    let mut underflow = false;
    let mut evidence = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut estimates = Vec::with_capacity(grid.levels);
        for y in &ys {
            let h = y.clone() * &step;
            let mut sum = zero.clone();
            let mut magnitude = zero.clone();
            for i in 0..=k {
                let offset = hp::from_i64(k as i64 - 2 * i as i64, work) * &half;
                let x = y.clone() + offset * &h;
                let g = probe.eval(&x);
                if g == zero {
                    underflow = true;
                }
                let c = hp::from_i64(binomial(k, i), work);
                let term = if i % 2 == 0 { c * g } else { -(c * g) };
                magnitude += hp::abs(&term);
                sum += term;
            }
            let e = if hp::abs(&sum) <= magnitude * hp::from_f64(noise, work) {
                0.0
            } else {
                hp::to_f64(&(sum / h.powi(k.into())))
            };
            estimates.push(e);
        }
        evidence.push(order_evidence(k, estimates, cauchy, growth_tol));
    }

    let cap = decade_cap(probe.bits);
    let verdict = match evidence.iter().find(|e| e.diverges) {
        Some(e) => SmoothnessVerdict::DivergesAtOrder(e.order),
        None => {
            let ok = evidence.iter().take_while(|e| e.converged).count();
            SmoothnessVerdict::SmoothUpTo(ok)
        }
    };
    let evidence_decades = match verdict {
        SmoothnessVerdict::DivergesAtOrder(k) => evidence[k - 1..]
            .iter()
            .map(|e| e.growth.log10())
            .fold(f64::NEG_INFINITY, f64::max)
            .min(cap),
        SmoothnessVerdict::SmoothUpTo(0) => 0.0,
        SmoothnessVerdict::SmoothUpTo(k) => evidence[..k]
            .iter()
            .map(|e| contraction_decades(e, cap))
            .fold(f64::INFINITY, f64::min),
    };
    Ok(SmoothnessReport {
        label: probe.label.clone(),
        orders_checked: k_max,
        verdict,
        grid: ys.iter().map(hp::to_f64).collect(),
        evidence,
        evidence_decades,
        underflow,
        precision_bits: probe.bits,
    })
}

fn contraction_decades(e: &OrderEvidence, cap: f64) -> f64 {
    if e.spread == 0.0 || e.scale == 0.0 {
        cap
    } else {
        (-(e.spread / e.scale).log10()).min(cap)
    }
}

fn order_evidence(order: usize, estimates: Vec<f64>, cauchy: f64, growth_tol: f64) -> OrderEvidence {
    let n = estimates.len();
    let last = &estimates[n - 3..];
    let mut spread = 0.0f64;
    for i in 0..3 {
        for j in i + 1..3 {
            spread = spread.max((last[i] - last[j]).abs());
        }
    }
    let scale = estimates.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let (first, end) = (last[0].abs(), last[2].abs());
    let growth = if end == 0.0 {
        0.0
    } else if first == 0.0 {
        f64::MAX
    } else {
        end / first
    };
    // the exact ratio 10 of a y^{-1/2} law must not fall through on rounding
    let diverges = growth >= growth_tol * (1.0 - 1e-9);
    OrderEvidence {
        order,
        estimates,
        spread,
        scale,
        growth,
        converged: spread <= cauchy * scale,
        diverges,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatnessVerdict {
    NonFlatAtOrder(usize),
    FlatUpTo(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatnessReport {
    pub label: String,
    pub verdict: FlatnessVerdict,
    /// Steps `h = 10^{−j}`, `j = 1..=10`.
    pub steps: Vec<f64>,
    /// Forward-difference estimates of `f^{(k)}(0)`, one row per order.
    pub estimates: Vec<Vec<f64>>,
}

const FLAT_LEVELS: usize = 10;

/// Smallest `k ≤ k_max` whose forward-difference estimate of `f^{(k)}(0)` is
/// above `flat_threshold` and stable within 10% over the two finest steps.
pub fn flatness_order(f: &ReparamMap, k_max: usize, tol: &Tolerances) -> Result<FlatnessReport> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let threshold = tol.get("flat_threshold");
    let work = hp::DEFAULT_BITS;
    let hs: Vec<Real> = (1..=FLAT_LEVELS)
        .map(|j| hp::pow10(-(j as i32), work))
        .collect();
    let mut estimates = Vec::with_capacity(k_max);
    let mut verdict = FlatnessVerdict::FlatUpTo(k_max);
    for k in 1..=k_max {
        let row: Vec<f64> = hs
            .iter()
            .map(|h| {
                let mut sum = hp::from_i64(0, work);
                for i in 0..=k {
                    let x = h.clone() * hp::from_i64(i as i64, work);
                    let c = hp::from_i64(binomial(k, i), work) * f.eval_hp(&x);
                    if (k - i) % 2 == 0 {
                        sum += c;
                    } else {
                        sum -= c;
                    }
                }
                hp::to_f64(&(sum / h.powi(k.into())))
            })
            .collect();
        let (a, b) = (row[FLAT_LEVELS - 2], row[FLAT_LEVELS - 1]);
        let stable = (a - b).abs() <= 0.1 * a.abs().max(b.abs());
        estimates.push(row);
        if a.abs() > threshold && b.abs() > threshold && stable {
            verdict = FlatnessVerdict::NonFlatAtOrder(k);
            break;
        }
    }
    Ok(FlatnessReport {
        label: f.to_string(),
        verdict,
        steps: hs.iter().map(hp::to_f64).collect(),
        estimates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::FlatExample;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(4, 0), 1);
        assert_eq!(binomial(6, 6), 1);
    }

    #[test]
    fn linear_probe_is_smooth() {
        let p = SmoothnessProbe::ratio_of(&ReparamMap::monomial(3).unwrap());
        let r = classify_smoothness(&p, 5, &GridSpec::default(), &tol()).unwrap();
        assert_eq!(r.verdict, SmoothnessVerdict::SmoothUpTo(5));
        assert!((r.evidence[0].estimates[6] - 1.0 / 3.0).abs() < 1e-12);
        assert!(r.evidence_decades >= 2.0);
    }

    #[test]
    fn flat_examples_separate() {
        let g = GridSpec::default();
        let f1 = SmoothnessProbe::ratio_of(&ReparamMap::flat(FlatExample::F1));
        let r1 = classify_smoothness(&f1, 5, &g, &tol()).unwrap();
        assert_eq!(r1.verdict, SmoothnessVerdict::SmoothUpTo(5));
        assert!((r1.evidence[2].estimates[6] - 3.0).abs() < 1e-12);
        let f2 = SmoothnessProbe::ratio_of(&ReparamMap::flat(FlatExample::F2));
        let r2 = classify_smoothness(&f2, 5, &g, &tol()).unwrap();
        assert_eq!(r2.verdict, SmoothnessVerdict::DivergesAtOrder(3));
        assert!((r2.evidence[2].growth - 10.0).abs() < 1e-9);
        assert!(r2.evidence_decades >= 2.0);
    }

    #[test]
    fn double_precision_probe() {
        let p = SmoothnessProbe::from_f64("y/2", |y| y / 2.0);
        let r = classify_smoothness(&p, 4, &GridSpec::default(), &tol()).unwrap();
        assert_eq!(r.verdict, SmoothnessVerdict::SmoothUpTo(4));
        let s = SmoothnessProbe::from_f64("sqrt", f64::sqrt);
        let r = classify_smoothness(&s, 3, &GridSpec::default(), &tol()).unwrap();
        assert_eq!(r.verdict, SmoothnessVerdict::DivergesAtOrder(1));
    }

    #[test]
    fn verdicts_are_scale_equivariant() {
        for c in [1e-3, 1e3] {
            let p = SmoothnessProbe::ratio_of(&ReparamMap::flat(FlatExample::F2)).scaled(c);
            let r = classify_smoothness(&p, 5, &GridSpec::default(), &tol()).unwrap();
            assert_eq!(r.verdict, SmoothnessVerdict::DivergesAtOrder(3));
        }
    }

    #[test]
    fn bad_arguments() {
        let p = SmoothnessProbe::from_f64("id", |y| y);
        assert!(classify_smoothness(&p, 0, &GridSpec::default(), &tol()).is_err());
        let g = GridSpec {
            levels: 5,
            step_ratio: 0.5,
        };
        assert!(classify_smoothness(&p, 5, &g, &tol()).is_err());
    }

    #[test]
    fn flatness_of_examples() {
        for p in 1..=5 {
            let r = flatness_order(&ReparamMap::monomial(p).unwrap(), 6, &tol()).unwrap();
            assert_eq!(r.verdict, FlatnessVerdict::NonFlatAtOrder(p as usize));
        }
        let r = flatness_order(&ReparamMap::flat(FlatExample::F1), 5, &tol()).unwrap();
        assert_eq!(r.verdict, FlatnessVerdict::FlatUpTo(5));
        let r = flatness_order(&ReparamMap::monomial(7).unwrap(), 5, &tol()).unwrap();
        assert_eq!(r.verdict, FlatnessVerdict::FlatUpTo(5));
    }
}
