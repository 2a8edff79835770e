use std::collections::BTreeMap;
use std::fmt;

use num_rational::Rational64;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lorentz::GeneratorKind;

/// One monomial term of a field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    /// `1..=n−1` for `∂/∂x_i`, `n` for `∂/∂y`.
    pub component: usize,
    pub coeff: Rational64,
    /// Exponents of `x₁,…,x_{n−1}`.
    pub a: Vec<u32>,
    /// Exponent of `y`.
    pub b: Rational64,
}

type Key = (usize, Vec<u32>, Rational64);

/// A finite sum of monomial terms, kept normalized: one entry per
/// `(component, a, b)` and no zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyVectorField {
    n: usize,
    terms: BTreeMap<Key, Rational64>,
}

fn overflow<T>(v: Option<T>) -> Result<T> {
    v.ok_or(Error::Overflow)
}

impl PolyVectorField {
    pub fn zero(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self {
            n,
            terms: BTreeMap::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `coeff · xᵃ yᵇ ∂_component`, merging with an existing term.
    pub fn add_term(&mut self, component: usize, coeff: Rational64, a: Vec<u32>, b: Rational64) -> Result<()> {
        if component == 0 || component > self.n {
            return Err(Error::InvalidArgument(format!(
                "component {component} is out of range 1..={}",
                self.n
            )));
        }
        if a.len() != self.n - 1 {
            return Err(Error::DimensionMismatch {
                expected: self.n - 1,
                got: a.len(),
            });
        }
        if coeff.is_zero() {
            return Ok(());
        }
        let key = (component, a, b);
        let sum = match self.terms.get(&key) {
            Some(c) => overflow(c.checked_add(&coeff))?,
            None => coeff,
        };
        if sum.is_zero() {
            self.terms.remove(&key);
        } else {
            self.terms.insert(key, sum);
        }
        Ok(())
    }

    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|((component, a, b), coeff)| Term {
            component: *component,
            coeff: *coeff,
            a: a.clone(),
            b: *b,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let mut out = self.clone();
        for t in other.terms() {
            out.add_term(t.component, t.coeff, t.a, t.b)?;
        }
        Ok(out)
    }

    pub fn scale(&self, c: Rational64) -> Result<Self> {
        let mut out = Self::zero(self.n)?;
        for t in self.terms() {
            out.add_term(t.component, overflow(t.coeff.checked_mul(&c))?, t.a, t.b)?;
        }
        Ok(out)
    }

    /// Pullback by `(x, y) ↦ (x, yᵖ)`.
    ///
    /// `∂/∂x_i` terms get `y`-exponent `p·b`; `∂/∂y` terms get coefficient
    /// `c/p` and exponent `p·b + 1 − p`.
    pub fn pullback_monomial(&self, p: i64) -> Result<Self> {
        if p <= 0 {
            return Err(Error::InvalidArgument(format!("pullback degree {p} must be positive")));
        }
        let pr = Rational64::from_integer(p);
        let mut out = Self::zero(self.n)?;
        for t in self.terms() {
            let pb = overflow(t.b.checked_mul(&pr))?;
            if t.component < self.n {
                out.add_term(t.component, t.coeff, t.a, pb)?;
            } else {
                let b = overflow(
                    pb.checked_add(&Rational64::one())
                        .and_then(|v| v.checked_sub(&pr)),
                )?;
                let c = overflow(t.coeff.checked_div(&pr))?;
                out.add_term(t.component, c, t.a, b)?;
            }
        }
        Ok(out)
    }

    /// Every `∂/∂y` term vanishes on `y = 0`.
    pub fn is_boundary_tangent(&self) -> bool {
        self.terms()
            .filter(|t| t.component == self.n)
            .all(|t| t.b.is_positive())
    }

    /// Every term has a non-negative integer `y`-exponent.
    pub fn is_analytic(&self) -> bool {
        self.first_non_analytic().is_none()
    }

    pub fn first_non_analytic(&self) -> Option<Term> {
        self.terms()
            .find(|t| !t.b.is_integer() || t.b.is_negative())
    }

    /// Evaluates at `(x₁,…,x_{n−1}, y)`.
    pub fn evaluate(&self, point: &[f64]) -> Result<Vec<f64>> {
        if point.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: point.len(),
            });
        }
        let y = point[self.n - 1];
        let mut out = vec![0.0; self.n];
        for t in self.terms() {
            let mut v = ratio_to_f64(t.coeff);
            for (x, e) in point.iter().zip(&t.a) {
                v *= x.powi(*e as i32);
            }
            v *= y_power(y, t.b)?;
            out[t.component - 1] += v;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_wire()).expect("fields always serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: WireField =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        Self::from_wire(wire)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_wire()).expect("fields always serialize")
    }

    fn to_wire(&self) -> WireField {
        WireField {
            n: self.n,
            terms: self
                .terms()
                .map(|t| WireTerm {
                    component: t.component,
                    coeff: [*t.coeff.numer(), *t.coeff.denom()],
                    a: t.a,
                    b: [*t.b.numer(), *t.b.denom()],
                })
                .collect(),
        }
    }

    fn from_wire(w: WireField) -> Result<Self> {
        let mut out = Self::zero(w.n)?;
        let frac = |r: [i64; 2]| {
            if r[1] == 0 {
                Err(Error::InvalidArgument("zero denominator".into()))
            } else {
                Ok(Rational64::new(r[0], r[1]))
            }
        };
        for t in w.terms {
            out.add_term(t.component, frac(t.coeff)?, t.a, frac(t.b)?)?;
        }
        Ok(out)
    }
}

fn ratio_to_f64(r: Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn y_power(y: f64, b: Rational64) -> Result<f64> {
    if b.is_zero() {
        return Ok(1.0);
    }
    if y == 0.0 && b.is_negative() {
        return Err(Error::SingularAtBoundary);
    }
    if b.is_integer() {
        let e = i32::try_from(*b.numer()).map_err(|_| Error::Overflow)?;
        return Ok(y.powi(e));
    }
    if y < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "y = {y} has no real power {b}"
        )));
    }
    Ok(y.powf(ratio_to_f64(b)))
}

#[derive(Serialize, Deserialize)]
struct WireTerm {
    component: usize,
    coeff: [i64; 2],
    a: Vec<u32>,
    b: [i64; 2],
}

#[derive(Serialize, Deserialize)]
struct WireField {
    n: usize,
    terms: Vec<WireTerm>,
}

impl Term {
    /// The term without its coefficient, e.g. `x1 y^-1 d/dy`.
    pub fn monomial_string(&self, n: usize) -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, e) in self.a.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("x{}", i + 1)),
                e => parts.push(format!("x{}^{e}", i + 1)),
            }
        }
        if !self.b.is_zero() {
            parts.push(if self.b.is_one() {
                "y".to_string()
            } else if self.b.is_integer() {
                format!("y^{}", self.b.numer())
            } else {
                format!("y^({}/{})", self.b.numer(), self.b.denom())
            });
        }
        parts.push(if self.component == n {
            "d/dy".to_string()
        } else {
            format!("d/dx{}", self.component)
        });
        parts.join(" ")
    }

    fn write_unsigned(&self, n: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.coeff.abs();
        if !c.is_one() {
            if c.is_integer() {
                write!(f, "{} ", c.numer())?;
            } else {
                write!(f, "({}/{}) ", c.numer(), c.denom())?;
            }
        }
        f.write_str(&self.monomial_string(n))
    }
}

impl fmt::Display for PolyVectorField {
    /// Canonical text form; parsing it gives back the same field.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms().enumerate() {
            match (i, t.coeff.is_negative()) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            t.write_unsigned(self.n, f)?;
        }
        Ok(())
    }
}

/// The exact fields of the generators in chart `KC`.
pub fn generator_field(kind: GeneratorKind, n: usize) -> Result<PolyVectorField> {
    kind.validate(n)?;
    let m = n - 1;
    let mut out = PolyVectorField::zero(n)?;
    let int = Rational64::from_integer;
    let zero_b = Rational64::zero();
    let mono = |pairs: &[(usize, u32)]| {
        let mut a = vec![0u32; m];
        for (i, e) in pairs {
            a[*i] += e;
        }
        a
    };
    match kind {
        GeneratorKind::H => {
            for i in 0..m {
                out.add_term(i + 1, int(2), mono(&[(i, 1)]), zero_b)?;
            }
            out.add_term(n, int(4), mono(&[]), int(1))?;
        }
        GeneratorKind::X(i) => out.add_term(i, int(1), mono(&[]), zero_b)?,
        GeneratorKind::Y(i) => {
            let k = i - 1;
            // δ_ij (y + |x|²) − 2 x_i x_j along ∂/∂x_j, and −4 x_i y ∂/∂y
            out.add_term(i, int(1), mono(&[]), int(1))?;
            for j in 0..m {
                out.add_term(i, int(1), mono(&[(j, 2)]), zero_b)?;
                out.add_term(j + 1, int(-2), mono(&[(k, 1), (j, 1)]), zero_b)?;
            }
            out.add_term(n, int(-4), mono(&[(k, 1)]), int(1))?;
        }
        GeneratorKind::R(j, k) => {
            out.add_term(j, int(-1), mono(&[(k - 1, 1)]), zero_b)?;
            out.add_term(k, int(1), mono(&[(j - 1, 1)]), zero_b)?;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn normalization_merges_and_drops() {
        let mut f = PolyVectorField::zero(2).unwrap();
        f.add_term(2, r(1, 2), vec![0], r(1, 1)).unwrap();
        f.add_term(2, r(1, 2), vec![0], r(1, 1)).unwrap();
        assert_eq!(f.len(), 1);
        f.add_term(2, r(-1, 1), vec![0], r(1, 1)).unwrap();
        assert!(f.is_zero());
        assert!(f.add_term(3, r(1, 1), vec![0], r(0, 1)).is_err());
        assert!(f.add_term(1, r(1, 1), vec![0, 0], r(0, 1)).is_err());
    }

    #[test]
    fn printing_forms() {
        let mut f = PolyVectorField::zero(2).unwrap();
        f.add_term(2, r(1, 3), vec![0], r(1, 1)).unwrap();
        assert_eq!(f.to_string(), "(1/3) y d/dy");
        let mut g = PolyVectorField::zero(2).unwrap();
        g.add_term(2, r(-4, 1), vec![1], r(1, 1)).unwrap();
        assert_eq!(g.to_string(), "-4 x1 y d/dy");
        let mut h = PolyVectorField::zero(3).unwrap();
        h.add_term(3, r(1, 1), vec![0, 0], r(-1, 1)).unwrap();
        h.add_term(3, r(-1, 2), vec![0, 2], r(1, 2)).unwrap();
        assert_eq!(h.to_string(), "y^-1 d/dy - (1/2) x2^2 y^(1/2) d/dy");
        assert_eq!(PolyVectorField::zero(2).unwrap().to_string(), "0");
    }

    #[test]
    fn pullback_exponent_law() {
        let mut f = PolyVectorField::zero(2).unwrap();
        f.add_term(2, r(1, 1), vec![0], r(1, 1)).unwrap();
        let g = f.pullback_monomial(3).unwrap();
        assert_eq!(g.to_string(), "(1/3) y d/dy");
        let mut d = PolyVectorField::zero(2).unwrap();
        d.add_term(2, r(1, 1), vec![0], r(0, 1)).unwrap();
        let e = d.pullback_monomial(2).unwrap();
        assert!(!e.is_analytic());
        assert_eq!(e.first_non_analytic().unwrap().monomial_string(2), "y^-1 d/dy");
        assert!(f.pullback_monomial(0).is_err());
        assert_eq!(f.pullback_monomial(1).unwrap(), f);
    }

    #[test]
    fn generator_fields_evaluate() {
        let y1 = generator_field(GeneratorKind::Y(1), 3).unwrap();
        assert!(y1.is_boundary_tangent());
        let v = y1.evaluate(&[0.2, 0.3, 0.5]).unwrap();
        let expected = [0.5 + 0.09 - 0.04, -0.12, -0.4];
        assert!(v.iter().zip(expected).all(|(a, b)| (a - b).abs() < 1e-15));
        let h = generator_field(GeneratorKind::H, 2).unwrap();
        assert_eq!(h.to_string(), "2 x1 d/dx1 + 4 y d/dy");
    }

    #[test]
    fn json_shape() {
        let h = generator_field(GeneratorKind::H, 2).unwrap();
        let s = h.to_json();
        assert_eq!(
            s,
            r#"{"n":2,"terms":[{"component":1,"coeff":[2,1],"a":[1],"b":[0,1]},{"component":2,"coeff":[4,1],"a":[0],"b":[1,1]}]}"#
        );
        assert_eq!(PolyVectorField::from_json(&s).unwrap(), h);
    }

    #[test]
    fn evaluate_rejects_singular() {
        let mut f = PolyVectorField::zero(2).unwrap();
        f.add_term(2, r(1, 1), vec![0], r(-1, 1)).unwrap();
        assert!(matches!(f.evaluate(&[0.0, 0.0]), Err(Error::SingularAtBoundary)));
        assert_eq!(f.evaluate(&[0.0, 2.0]).unwrap(), vec![0.0, 0.5]);
    }
}
