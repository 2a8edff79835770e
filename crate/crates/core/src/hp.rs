//! Binary floating point with a configurable number of bits.
//!
//! Finite differences of order five at `y = 10⁻⁷` with step `y/10` cancel
//! about forty decimal digits, so the smoothness classifiers evaluate their
//! probes here rather than in `f64`.

use dashu_float::ops::{Abs, SquareRoot};
use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;

pub type Real = FBig<HalfEven, 2>;

/// Working precision of the diagnostics, in bits.
pub const DEFAULT_BITS: usize = 256;

/// Exact conversion of `x`, then rounded to `bits`.
pub fn from_f64(x: f64, bits: usize) -> Real {
    Real::try_from(x)
        .expect("finite input")
        .with_precision(bits)
        .value()
}

pub fn from_i64(x: i64, bits: usize) -> Real {
    Real::from(x).with_precision(bits).value()
}

/// `num/den` rounded to `bits`.
pub fn ratio(num: i64, den: i64, bits: usize) -> Real {
    from_i64(num, bits) / from_i64(den, bits)
}

/// `10^e` for integer `e`, rounded to `bits`.
pub fn pow10(e: i32, bits: usize) -> Real {
    let ten = from_i64(10, bits);
    let p = ten.powi(e.unsigned_abs().into());
    if e >= 0 {
        p
    } else {
        from_i64(1, bits) / p
    }
}

/// `x^e` for `x > 0`.
pub fn powf(x: &Real, e: &Real) -> Real {
    (x.ln() * e).exp()
}

pub fn abs(x: &Real) -> Real {
    x.clone().abs()
}

pub fn sqrt(x: &Real) -> Real {
    x.sqrt()
}

pub fn to_f64(x: &Real) -> f64 {
    x.to_f64().value()
}

pub fn bits_of(x: &Real) -> usize {
    x.precision()
}
