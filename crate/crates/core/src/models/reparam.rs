//! Boundary reparametrizations `f : ℝ⁺ → ℝ⁺` and the chart maps
//! `φ_f(x, y) = (x, f(y))`.
//!
//! Every map is evaluated through `ln f` and its derivative `(ln f)′ = f′/f`.
//! This keeps flat maps such as `exp(−y⁻²)` usable far below the `f64`
//! underflow threshold, and gives `f/f′ = 1/(ln f)′` without cancellation.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hp::{self, Real};

/// The flat examples `f₁ = exp(−y⁻²)` and `f₂ = exp(−y^{−3/2})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FlatExample {
    F1,
    F2,
}

impl FlatExample {
    /// The exponent `α` in `ln f = −y^{−α}`.
    pub fn alpha(self) -> f64 {
        match self {
            FlatExample::F1 => 2.0,
            FlatExample::F2 => 1.5,
        }
    }
}

/// Past this point the flat maps are continued so that they become onto.
///
/// `exp(−y^{−α})` is bounded by 1, so on `y > FLAT_GLUE` the log is
/// `−y^{−α} + s·exp(−1/s)` with `s = y − FLAT_GLUE`; the added term is flat at
/// `s = 0`, so the germ at the boundary is untouched.
pub const FLAT_GLUE: f64 = 4.0;

/// How `f/f′` behaves at `y = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryRegularity {
    /// `f/f′` extends smoothly to 0.
    Smooth,
    /// `f/f′` is continuous at 0 but not smooth.
    NotSmooth,
    /// Not known analytically (user-supplied maps).
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ReparamKind {
    Monomial(u32),
    NamedFlat(FlatExample),
    /// `Σ cᵢ yⁱ`, index = degree, `c₀ = 0`, `cᵢ ≥ 0`.
    Polynomial(Vec<f64>),
    Custom(String),
}

type ScalarFn = dyn Fn(f64) -> f64 + Send + Sync;

struct CustomMap {
    f: Box<ScalarFn>,
    fprime: Box<ScalarFn>,
    regularity: BoundaryRegularity,
}

/// A boundary reparametrization with analytic evaluators.
#[derive(Clone)]
pub struct ReparamMap {
    kind: ReparamKind,
    custom: Option<Arc<CustomMap>>,
}

impl fmt::Debug for ReparamMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ReparamMap").field(&self.kind).finish()
    }
}

impl PartialEq for ReparamMap {
    fn eq(&self, other: &Self) -> bool {
        self.custom.is_none() && other.custom.is_none() && self.kind == other.kind
    }
}

impl fmt::Display for ReparamMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ReparamKind::Monomial(p) => write!(f, "p={p}"),
            ReparamKind::NamedFlat(FlatExample::F1) => write!(f, "f1"),
            ReparamKind::NamedFlat(FlatExample::F2) => write!(f, "f2"),
            ReparamKind::Polynomial(c) => {
                let terms: Vec<String> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| **v != 0.0)
                    .map(|(i, v)| format!("{v}*y^{i}"))
                    .collect();
                write!(f, "poly({})", terms.join("+"))
            }
            ReparamKind::Custom(name) => write!(f, "custom({name})"),
        }
    }
}

impl FromStr for ReparamMap {
    type Err = Error;

    /// `p=<int>`, `f1` or `f2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "f1" => return Ok(Self::flat(FlatExample::F1)),
            "f2" => return Ok(Self::flat(FlatExample::F2)),
            _ => {}
        }
        if let Some(p) = s.strip_prefix("p=") {
            let p: u32 = p
                .parse()
                .map_err(|_| Error::InvalidReparam(format!("bad monomial degree in {s:?}")))?;
            return Self::monomial(p);
        }
        Err(Error::InvalidReparam(format!(
            "expected p=<int>, f1 or f2, got {s:?}"
        )))
    }
}

impl ReparamMap {
    /// `f(y) = yᵖ`, `p ≥ 1`.
    pub fn monomial(p: u32) -> Result<Self> {
        if p == 0 {
            return Err(Error::InvalidReparam("monomial degree must be >= 1".into()));
        }
        Ok(Self {
            kind: ReparamKind::Monomial(p),
            custom: None,
        })
    }

    pub fn identity() -> Self {
        Self::monomial(1).expect("degree 1")
    }

    pub fn flat(which: FlatExample) -> Self {
        Self {
            kind: ReparamKind::NamedFlat(which),
            custom: None,
        }
    }

    /// `f(y) = Σ cᵢ yⁱ` with `c₀ = 0`, all `cᵢ ≥ 0` and at least one `cᵢ > 0`.
    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.first().copied().unwrap_or(0.0) != 0.0 {
            return Err(Error::InvalidReparam("constant term must vanish".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(Error::InvalidReparam(
                "coefficients must be finite and non-negative".into(),
            ));
        }
        if !coefficients.iter().any(|c| *c > 0.0) {
            return Err(Error::InvalidReparam("polynomial is zero".into()));
        }
        Ok(Self {
            kind: ReparamKind::Polynomial(coefficients),
            custom: None,
        })
    }

    /// A user map. `f′` must be supplied; nothing here differentiates `f`.
    pub fn custom<F, D>(name: &str, f: F, fprime: D, regularity: BoundaryRegularity) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            kind: ReparamKind::Custom(name.to_string()),
            custom: Some(Arc::new(CustomMap {
                f: Box::new(f),
                fprime: Box::new(fprime),
                regularity,
            })),
        }
    }

    pub fn kind(&self) -> &ReparamKind {
        &self.kind
    }

    pub fn regularity(&self) -> BoundaryRegularity {
        match &self.kind {
            ReparamKind::Monomial(_) | ReparamKind::Polynomial(_) => BoundaryRegularity::Smooth,
            ReparamKind::NamedFlat(FlatExample::F1) => BoundaryRegularity::Smooth,
            ReparamKind::NamedFlat(FlatExample::F2) => BoundaryRegularity::NotSmooth,
            ReparamKind::Custom(_) => self.custom_map().regularity,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.kind == ReparamKind::Monomial(1)
    }

    fn custom_map(&self) -> &CustomMap {
        self.custom.as_deref().expect("custom kind carries its closures")
    }

    /// `f(y)` for `y ≥ 0`.
    pub fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            ReparamKind::Monomial(p) => y.powi(*p as i32),
            ReparamKind::Polynomial(c) => horner(c, y),
            ReparamKind::Custom(_) => (self.custom_map().f)(y),
            ReparamKind::NamedFlat(_) => self.log_eval(y).exp(),
        }
    }

    /// `f′(y)` for `y > 0`.
    pub fn deriv(&self, y: f64) -> f64 {
        match &self.kind {
            ReparamKind::Monomial(1) => 1.0,
            ReparamKind::Monomial(p) => *p as f64 * y.powi(*p as i32 - 1),
            ReparamKind::Polynomial(c) => horner(&derivative_coefficients(c), y),
            ReparamKind::Custom(_) => (self.custom_map().fprime)(y),
            ReparamKind::NamedFlat(_) => self.eval(y) * self.log_deriv(y),
        }
    }

    /// `ln f(y)` for `y > 0`.
    pub fn log_eval(&self, y: f64) -> f64 {
        match &self.kind {
            ReparamKind::Monomial(p) => *p as f64 * y.ln(),
            ReparamKind::Polynomial(c) => {
                let k = lowest_degree(c);
                // f = yᵏ · Σ cᵢ y^{i−k}
                k as f64 * y.ln() + horner(&c[k..], y).ln()
            }
            ReparamKind::NamedFlat(which) => {
                let mut v = -y.powf(-which.alpha());
                if y > FLAT_GLUE {
                    let s = y - FLAT_GLUE;
                    v += s * (-1.0 / s).exp();
                }
                v
            }
            ReparamKind::Custom(_) => (self.custom_map().f)(y).ln(),
        }
    }

    /// `(ln f)′(y) = f′(y)/f(y)` for `y > 0`.
    pub fn log_deriv(&self, y: f64) -> f64 {
        match &self.kind {
            ReparamKind::Monomial(p) => *p as f64 / y,
            ReparamKind::Polynomial(c) => {
                let k = lowest_degree(c);
                let tail = &c[k..];
                k as f64 / y + horner(&derivative_coefficients(tail), y) / horner(tail, y)
            }
            ReparamKind::NamedFlat(which) => {
                let a = which.alpha();
                let mut v = a * y.powf(-a - 1.0);
                if y > FLAT_GLUE {
                    let s = y - FLAT_GLUE;
                    v += (-1.0 / s).exp() * (1.0 + 1.0 / s);
                }
                v
            }
            ReparamKind::Custom(_) => {
                let m = self.custom_map();
                (m.fprime)(y) / (m.f)(y)
            }
        }
    }

    /// `(f/f′)(y)`, with the value 0 at `y = 0`.
    pub fn ratio(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        match &self.kind {
            ReparamKind::Monomial(p) => y / *p as f64,
            _ => 1.0 / self.log_deriv(y),
        }
    }

    /// `f⁻¹(z)` for `z ≥ 0`.
    pub fn inverse(&self, z: f64) -> Result<f64> {
        if z <= 0.0 {
            return Ok(0.0);
        }
        match self.kind {
            ReparamKind::Monomial(1) => Ok(z),
            ReparamKind::Monomial(2) => Ok(z.sqrt()),
            _ => self.inverse_log(z.ln()),
        }
    }

    /// The `y > 0` with `ln f(y) = level`.
    pub fn inverse_log(&self, level: f64) -> Result<f64> {
        if level == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        if !level.is_finite() {
            return Err(Error::InverseFailed(level));
        }
        match &self.kind {
            ReparamKind::Monomial(p) => Ok((level / *p as f64).exp()),
            ReparamKind::NamedFlat(which) => {
                let a = which.alpha();
                let glue_level = -FLAT_GLUE.powf(-a);
                if level <= glue_level {
                    Ok((-level).powf(-1.0 / a))
                } else {
                    self.solve_log(level, FLAT_GLUE)
                }
            }
            ReparamKind::Polynomial(c) => {
                let k = lowest_degree(c);
                let guess = ((level - c[k].ln()) / k as f64).exp();
                self.solve_log(level, guess)
            }
            ReparamKind::Custom(_) => self.solve_log(level, 1.0),
        }
    }

    /// Safeguarded Newton iteration on `s = ln y` for `ln f(eˢ) = level`.
    fn solve_log(&self, level: f64, guess: f64) -> Result<f64> {
        let g = |s: f64| self.log_eval(s.exp()) - level;
        let mut s = guess.max(f64::MIN_POSITIVE).ln();
        let (mut lo, mut hi);
        if g(s) < 0.0 {
            lo = s;
            hi = s + 1.0;
            let mut tries = 0;
            while g(hi) < 0.0 {
                lo = hi;
                hi += (hi - s).abs().max(1.0);
                tries += 1;
                if tries > 200 {
                    return Err(Error::InverseFailed(level));
                }
            }
        } else {
            hi = s;
            lo = s - 1.0;
            let mut tries = 0;
            while g(lo) > 0.0 {
                hi = lo;
                lo -= (s - lo).abs().max(1.0);
                tries += 1;
                if tries > 200 {
                    return Err(Error::InverseFailed(level));
                }
            }
        }
        s = 0.5 * (lo + hi);
        for _ in 0..200 {
            let val = g(s);
            if val == 0.0 {
                return Ok(s.exp());
            }
            if val < 0.0 {
                lo = s;
            } else {
                hi = s;
            }
            let y = s.exp();
            let slope = y * self.log_deriv(y);
            let mut next = s - val / slope;
            if !next.is_finite() || next <= lo || next >= hi {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 1e-16 * s.abs().max(1.0) || hi - lo <= 1e-16 * s.abs().max(1.0)
            {
                return Ok(next.exp());
            }
            s = next;
        }
        Ok(s.exp())
    }

    /// `f(y)` in extended precision.
    pub fn eval_hp(&self, y: &Real) -> Real {
        let bits = hp::bits_of(y);
        if *y <= hp::from_i64(0, bits) {
            return hp::from_i64(0, bits);
        }
        match &self.kind {
            ReparamKind::Monomial(p) => y.powi((*p as usize).into()),
            ReparamKind::Polynomial(c) => horner_hp(c, y, bits),
            ReparamKind::NamedFlat(which) => {
                let level = self.flat_log_hp(*which, y);
                // below e^{-10⁶} the value is zero at any working precision
                if level < hp::from_i64(-1_000_000, bits) {
                    hp::from_i64(0, bits)
                } else {
                    level.exp()
                }
            }
            ReparamKind::Custom(_) => hp::from_f64(self.eval(hp::to_f64(y)), bits),
        }
    }

    /// `(f/f′)(y)` in extended precision.
    pub fn ratio_hp(&self, y: &Real) -> Real {
        let bits = hp::bits_of(y);
        match &self.kind {
            ReparamKind::Monomial(p) => y.clone() / hp::from_i64(*p as i64, bits),
            ReparamKind::Polynomial(c) => {
                horner_hp(c, y, bits) / horner_hp(&derivative_coefficients(c), y, bits)
            }
            ReparamKind::NamedFlat(which) => {
                let one = hp::from_i64(1, bits);
                let mut d = flat_power_hp(*which, y, bits, true);
                let glue = hp::from_f64(FLAT_GLUE, bits);
                if *y > glue {
                    let s = y.clone() - glue;
                    d += (-(one.clone() / s.clone())).exp() * (one.clone() + one.clone() / s);
                }
                one / d
            }
            ReparamKind::Custom(_) => hp::from_f64(self.ratio(hp::to_f64(y)), bits),
        }
    }

    fn flat_log_hp(&self, which: FlatExample, y: &Real) -> Real {
        let bits = hp::bits_of(y);
        let mut v = -flat_power_hp(which, y, bits, false);
        let glue = hp::from_f64(FLAT_GLUE, bits);
        if *y > glue {
            let s = y.clone() - glue;
            let one = hp::from_i64(1, bits);
            v += s.clone() * (-(one / s)).exp();
        }
        v
    }

    /// Precision the extended evaluators actually deliver.
    pub fn hp_bits(&self, requested: usize) -> usize {
        match self.kind {
            ReparamKind::Custom(_) => 53,
            _ => requested,
        }
    }
}

/// `y^{−α}` (or its derivative factor `α·y^{−α−1}` when `derivative`).
fn flat_power_hp(which: FlatExample, y: &Real, bits: usize, derivative: bool) -> Real {
    let one = hp::from_i64(1, bits);
    match (which, derivative) {
        (FlatExample::F1, false) => one / y.powi(2.into()),
        (FlatExample::F1, true) => hp::from_i64(2, bits) / y.powi(3.into()),
        (FlatExample::F2, false) => one / (y.clone() * hp::sqrt(y)),
        (FlatExample::F2, true) => {
            hp::ratio(3, 2, bits) / (y.powi(2.into()) * hp::sqrt(y))
        }
    }
}

fn lowest_degree(c: &[f64]) -> usize {
    c.iter().position(|v| *v != 0.0).expect("validated non-zero")
}

fn horner(c: &[f64], y: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, ci| acc * y + ci)
}

fn horner_hp(c: &[f64], y: &Real, bits: usize) -> Real {
    c.iter()
        .rev()
        .fold(hp::from_i64(0, bits), |acc, ci| acc * y + hp::from_f64(*ci, bits))
}

fn derivative_coefficients(c: &[f64]) -> Vec<f64> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(i, v)| i as f64 * v)
        .collect()
}
