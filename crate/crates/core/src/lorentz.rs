//! Lorentz linear algebra.
//!
//! Coordinates on `ℝⁿ⁺¹` are ordered `(x₁, …, x_{n−1}, y, τ)`: spatial indices
//! `1…n` come first and the timelike index `n+1` is last, so that the spatial
//! index `n` is the chart coordinate `y`. The quadratic form is
//! `Q = x₁² + … + x_n² − τ²`.
//!
//! Generator normalisation is fixed by the chart-`KC` vector fields they
//! induce (see [`crate::fields`]):
//!
//! | generator | matrix                                   | field in `KC`                         |
//! |-----------|------------------------------------------|---------------------------------------|
//! | `H`       | `2(E_{n,τ} + E_{τ,n})`                   | `(2x₁, …, 2x_{n−1}, 4y)`              |
//! | `X_i`     | `E_{i,τ} + E_{τ,i} − E_{i,n} + E_{n,i}`  | `∂/∂x_i`                              |
//! | `Y_i`     | `E_{i,τ} + E_{τ,i} + E_{i,n} − E_{n,i}`  | `(y + Σ_{j≠i}x_j² − x_i², −2x_ix_j, −4x_iy)` |
//! | `R_jk`    | `E_{k,j} − E_{j,k}`                      | rotation from `x_j` towards `x_k`     |
//!
//! With these choices `[H, X_i] = 2 X_i` ([`H_X_WEIGHT`]).

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The constant `c` in `[H, X_i] = c·X_i`.
pub const H_X_WEIGHT: f64 = 2.0;

/// Default relative tolerance for group and algebra membership.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// The form `Q = x₁² + … + x_n² − τ²` on `ℝⁿ⁺¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LorentzForm {
    n: usize,
}

impl LorentzForm {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self { n })
    }

    /// Spatial dimension `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Size `n + 1` of the ambient space.
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// The signature matrix `J = diag(1, …, 1, −1)`.
    pub fn matrix(&self) -> DMatrix<f64> {
        signature(self.n)
    }

    pub fn minkowski(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        check_len(u, self.dim())?;
        check_len(v, self.dim())?;
        Ok(minkowski_unchecked(u, v))
    }

    /// `Q(u) = ⟨u, u⟩`.
    pub fn quadratic(&self, u: &[f64]) -> Result<f64> {
        self.minkowski(u, u)
    }
}

fn check_len(u: &[f64], expected: usize) -> Result<()> {
    if u.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: u.len(),
        });
    }
    Ok(())
}

/// `uᵀJv` with the last coordinate timelike.
pub fn minkowski(u: &[f64], v: &[f64]) -> Result<f64> {
    check_len(v, u.len())?;
    if u.len() < 3 {
        return Err(Error::InvalidDimension(u.len().saturating_sub(1)));
    }
    Ok(minkowski_unchecked(u, v))
}

pub(crate) fn minkowski_unchecked(u: &[f64], v: &[f64]) -> f64 {
    let last = u.len() - 1;
    let spatial: f64 = u[..last].iter().zip(&v[..last]).map(|(a, b)| a * b).sum();
    spatial - u[last] * v[last]
}

pub(crate) fn signature(n: usize) -> DMatrix<f64> {
    let mut j = DMatrix::identity(n + 1, n + 1);
    j[(n, n)] = -1.0;
    j
}

/// Named basis elements of `so(n,1)`. Indices are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorKind {
    /// Hyperbolic element translating along the chart `y`-axis.
    H,
    /// Parabolic element fixing the chart point at infinity.
    X(usize),
    /// Parabolic element fixing the chart origin.
    Y(usize),
    /// Rotation in the `(x_j, x_k)` plane, `j < k ≤ n−1`.
    R(usize, usize),
}

impl GeneratorKind {
    /// Checks that the indices make sense in dimension `n`.
    pub fn validate(&self, n: usize) -> Result<()> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        let ok = match *self {
            GeneratorKind::H => true,
            GeneratorKind::X(i) | GeneratorKind::Y(i) => (1..n).contains(&i),
            GeneratorKind::R(j, k) => j >= 1 && j < k && k < n,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::GeneratorOutOfRange(self.to_string()))
        }
    }

    /// The basis `H, X_1…X_{n−1}, Y_1…Y_{n−1}, R_jk` of `so(n,1)`.
    pub fn basis(n: usize) -> Vec<GeneratorKind> {
        let mut out = vec![GeneratorKind::H];
        out.extend((1..n).map(GeneratorKind::X));
        out.extend((1..n).map(GeneratorKind::Y));
        for j in 1..n {
            for k in (j + 1)..n {
                out.push(GeneratorKind::R(j, k));
            }
        }
        out
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorKind::H => write!(f, "H"),
            GeneratorKind::X(i) => write!(f, "X{i}"),
            GeneratorKind::Y(i) => write!(f, "Y{i}"),
            GeneratorKind::R(j, k) => write!(f, "R{j}_{k}"),
        }
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    /// Accepts `H`, `X3`, `Y1`, `R12` (single-digit indices) or `R1_12`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownGenerator(s.to_string());
        let s = s.trim();
        let (head, rest) = s.split_at(s.chars().next().map_or(0, char::len_utf8));
        let index = |t: &str| t.parse::<usize>().map_err(|_| bad());
        match head {
            "H" if rest.is_empty() => Ok(GeneratorKind::H),
            "X" => Ok(GeneratorKind::X(index(rest)?)),
            "Y" => Ok(GeneratorKind::Y(index(rest)?)),
            "R" => {
                if let Some((j, k)) = rest.split_once('_') {
                    Ok(GeneratorKind::R(index(j)?, index(k)?))
                } else if rest.len() == 2 && rest.is_ascii() {
                    Ok(GeneratorKind::R(index(&rest[..1])?, index(&rest[1..])?))
                } else {
                    Err(bad())
                }
            }
            _ => Err(bad()),
        }
    }
}

/// Element of `so(n,1)`: `xᵀJ + Jx = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    matrix: DMatrix<f64>,
    tag: Option<GeneratorKind>,
}

impl AlgebraElement {
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        let residual = algebra_residual(&matrix)?;
        let scale = matrix.norm().max(1.0);
        if residual > MEMBERSHIP_TOL * scale {
            return Err(Error::NotInAlgebra(residual));
        }
        Ok(Self { matrix, tag: None })
    }

    pub fn zero(n: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(n + 1, n + 1),
            tag: None,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn tag(&self) -> Option<GeneratorKind> {
        self.tag
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// `c·x`; a tag survives only for `c = 1`.
    pub fn scale(&self, c: f64) -> Self {
        Self {
            matrix: &self.matrix * c,
            tag: if c == 1.0 { self.tag } else { None },
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix + &other.matrix,
            tag: None,
        }
    }

    /// Matrix commutator `[x, y] = xy − yx`.
    pub fn bracket(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
            tag: None,
        }
    }

    /// Linear combination `Σ cᵢ·basis[i]` over [`GeneratorKind::basis`].
    pub fn combination(n: usize, coefficients: &[f64]) -> Result<Self> {
        let basis = GeneratorKind::basis(n);
        if coefficients.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                got: coefficients.len(),
            });
        }
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (kind, c) in basis.iter().zip(coefficients) {
            m += generator(*kind, n)?.matrix * *c;
        }
        Ok(Self {
            matrix: m,
            tag: None,
        })
    }
}

/// `‖xᵀJ + Jx‖` (Frobenius).
pub fn algebra_residual(x: &DMatrix<f64>) -> Result<f64> {
    if x.nrows() != x.ncols() || x.nrows() < 3 {
        return Err(Error::InvalidDimension(x.nrows().saturating_sub(1)));
    }
    let j = signature(x.nrows() - 1);
    Ok((x.transpose() * &j + &j * x).norm())
}

/// `‖mᵀJm − J‖` (Frobenius).
pub fn group_residual(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() || m.nrows() < 3 {
        return Err(Error::InvalidDimension(m.nrows().saturating_sub(1)));
    }
    let j = signature(m.nrows() - 1);
    Ok((m.transpose() * &j * m - &j).norm())
}

/// Element of the identity component `SO₀(n,1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    matrix: DMatrix<f64>,
}

impl GroupElement {
    /// Validates with the default relative tolerance.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(matrix, MEMBERSHIP_TOL)
    }

    /// Validates `‖mᵀJm − J‖ ≤ tol·‖m‖²`, `det m > 0` and `m[τ][τ] > 0`.
    pub fn with_tolerance(matrix: DMatrix<f64>, tol: f64) -> Result<Self> {
        let residual = group_residual(&matrix)?;
        let scale = matrix.norm_squared().max(1.0);
        if residual > tol * scale {
            return Err(Error::NotInGroup(format!("residual {residual:e}")));
        }
        let n = matrix.nrows() - 1;
        if matrix[(n, n)] <= 0.0 {
            return Err(Error::NotInGroup("reverses time orientation".into()));
        }
        if matrix.determinant() <= 0.0 {
            return Err(Error::NotInGroup("determinant is not positive".into()));
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_matrix_unchecked(matrix: DMatrix<f64>) -> Self {
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            matrix: DMatrix::identity(n + 1, n + 1),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.nrows() - 1
    }

    /// `self · other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            matrix: &self.matrix * &other.matrix,
        }
    }

    /// `g⁻¹ = J gᵀ J`.
    pub fn inverse(&self) -> Self {
        let j = signature(self.n());
        Self {
            matrix: &j * self.matrix.transpose() * &j,
        }
    }

    pub fn apply(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.matrix * v
    }

    pub fn residual(&self) -> f64 {
        group_residual(&self.matrix).unwrap_or(f64::INFINITY)
    }
}

fn unit(n: usize, row: usize, col: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m[(row, col)] = 1.0;
    m
}

/// Matrix of a named generator.
pub fn generator(kind: GeneratorKind, n: usize) -> Result<AlgebraElement> {
    kind.validate(n)?;
    // 0-based: x_i -> i-1, y -> n-1, τ -> n
    let y = n - 1;
    let t = n;
    let e = |r, c| unit(n, r, c);
    let matrix = match kind {
        GeneratorKind::H => (e(y, t) + e(t, y)) * 2.0,
        GeneratorKind::X(i) => e(i - 1, t) + e(t, i - 1) - e(i - 1, y) + e(y, i - 1),
        GeneratorKind::Y(i) => e(i - 1, t) + e(t, i - 1) + e(i - 1, y) - e(y, i - 1),
        GeneratorKind::R(j, k) => e(k - 1, j - 1) - e(j - 1, k - 1),
    };
    Ok(AlgebraElement {
        matrix,
        tag: Some(kind),
    })
}

/// Matrix exponential by scaling and squaring.
///
/// The argument is scaled by `2⁻ˢ` until its 1-norm is below 0.5, the Taylor
/// series is summed until the geometric tail bound drops below machine
/// precision, and the result is squared `s` times.
pub fn group_exp(x: &AlgebraElement) -> GroupElement {
    GroupElement::from_matrix_unchecked(expm(&x.matrix))
}

pub(crate) fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    let mut scaled_norm = norm;
    while scaled_norm >= 0.5 {
        scaled_norm *= 0.5;
        squarings += 1;
    }
    let scaled = a * 0.5f64.powi(squarings as i32);

    let mut sum = DMatrix::identity(dim, dim);
    let mut term = DMatrix::identity(dim, dim);
    for k in 1..64u32 {
        term = &term * &scaled / k as f64;
        sum += &term;
        // remaining terms are bounded by ‖term‖·r/(1−r), r = ‖A‖/(k+1)
        let r = scaled_norm / (k + 1) as f64;
        let tail = one_norm(&term) * r / (1.0 - r);
        if tail <= f64::EPSILON * 0.25 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Lorentz-orthogonal projection onto the plane spanned by two null vectors.
fn null_plane_projector(a: &DVector<f64>, b: &DVector<f64>) -> DMatrix<f64> {
    let j = signature(a.len() - 1);
    let t = a + b;
    let s = a - b;
    let tt = minkowski_unchecked(t.as_slice(), t.as_slice());
    let ss = minkowski_unchecked(s.as_slice(), s.as_slice());
    // v ↦ ⟨v,t⟩t/⟨t,t⟩ + ⟨v,s⟩s/⟨s,s⟩, with ⟨v,w⟩ = wᵀJv
    (&t * (t.transpose() * &j)) / tt + (&s * (s.transpose() * &j)) / ss
}

/// Spacelike vectors orthonormal for `Q`, orthogonal to the range of `proj`.
fn orthonormal_complement(proj: &DMatrix<f64>, count: usize) -> Vec<DVector<f64>> {
    let dim = proj.nrows();
    let j = signature(dim - 1);
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(count);
    for c in 0..dim {
        if out.len() == count {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[c] = 1.0;
        v -= proj * &v;
        for e in &out {
            let coeff = (e.transpose() * &j * &v)[(0, 0)];
            v -= e * coeff;
        }
        let q = minkowski_unchecked(v.as_slice(), v.as_slice());
        if q > 1e-6 {
            out.push(v / q.sqrt());
        }
    }
    out
}

/// Involutions of `SO₀(n,1)` whose common fixed set in the closed Klein ball
/// is the chord joining two boundary points.
///
/// For odd `n` this is the half-turn about the geodesic (identity on its
/// timelike plane `P`, minus identity on `P^⊥`). For even `n` that map has
/// determinant −1, so two commuting half-turns about totally geodesic planes
/// through the geodesic are returned instead; each keeps `P` and one extra
/// spacelike direction fixed.
pub fn symmetry_through_geodesic(a: &[f64], b: &[f64]) -> Result<Vec<GroupElement>> {
    check_len(b, a.len())?;
    let n = a.len();
    if n < 3 {
        return Err(Error::InvalidArgument(
            "geodesic symmetries in SO0(n,1) need n >= 3".into(),
        ));
    }
    for p in [a, b] {
        let r = p.iter().map(|x| x * x).sum::<f64>().sqrt();
        if (r - 1.0).abs() > 1e-9 {
            return Err(Error::NotOnBoundary(r));
        }
    }
    let gap: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
    if gap < 1e-12 {
        return Err(Error::CoincidentEndpoints);
    }
    let lift = |p: &[f64]| DVector::from_row_slice(p).insert_row(n, 1.0);
    let pa = lift(a);
    let pb = lift(b);
    let proj = null_plane_projector(&pa, &pb);
    let id = DMatrix::<f64>::identity(n + 1, n + 1);
    let j = signature(n);
    if n % 2 == 1 {
        let sigma = &proj * 2.0 - &id;
        return Ok(vec![GroupElement::from_matrix_unchecked(sigma)]);
    }
    let extra = orthonormal_complement(&proj, 2);
    debug_assert_eq!(extra.len(), 2);
    Ok(extra
        .iter()
        .map(|e| {
            let keep = &proj + e * (e.transpose() * &j);
            GroupElement::from_matrix_unchecked(keep * 2.0 - &id)
        })
        .collect())
}
