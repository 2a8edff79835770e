//! Exact polynomial vector fields on the half-space `{y ≥ 0}`.
//!
//! A field is a finite sum of terms `c · x₁^{a₁}⋯x_{n−1}^{a_{n−1}} · y^b · ∂`,
//! where `∂` is one of `∂/∂x_i` or `∂/∂y`, `c` is an exact rational and `b` is
//! a rational exponent. Pulling back by `(x, y) ↦ (x, yᵖ)` keeps the
//! `∂/∂x_i` terms polynomial and sends `y^b ∂/∂y` to `(1/p)·y^{pb+1−p} ∂/∂y`,
//! so the pullback extends analytically to `y = 0` exactly when every
//! `∂/∂y` term vanishes on the boundary.
//!
//! The text form is read by [`parse_field`]:
//!
//! ```text
//! field    = "0" | [ sign ] term { sign term } ;
//! sign     = "+" | "-" | "−" ;
//! term     = { factor [ "*" ] } deriv ;
//! factor   = coeff | var ;
//! coeff    = number | "(" [ sign ] number ")" ;
//! number   = digits [ "." digits ] [ "/" digits ] ;
//! var      = ( "x" digits | "y" ) [ "^" exponent ] ;
//! exponent = [ "-" ] digits | "(" [ sign ] digits [ "/" digits ] ")" ;
//! deriv    = "d/dx" digits | "d/dy" ;
//! ```
//!
//! Whitespace is ignored between tokens. `x` exponents must be non-negative
//! integers; `y` exponents may be any rational.

mod field;
mod parser;

pub use field::{generator_field, PolyVectorField, Term};
pub use parser::{parse_field, ParseError};
