//! Hölder exponents of boundary maps by log-log regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{klein_to_poincare_coords, poincare_to_klein_coords};
use crate::numeric::{dist, fit_line};

/// Fewest sample pairs accepted by [`holder_exponent`].
pub const MIN_PAIRS: usize = 100;

/// Least spread of `log10|u − v|` accepted, in decades.
pub const MIN_DECADES: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    /// Slope of `log10|φ(u) − φ(v)|` against `log10|u − v|`.
    pub exponent: f64,
    pub intercept: f64,
    /// RMS residual of the fit, in decades.
    pub residual: f64,
    pub pairs: usize,
    /// Spread of `log10|u − v|` over the sample.
    pub decades: f64,
}

/// Fits `|φ(u) − φ(v)| ≈ C·|u − v|^α` over `pairs`.
pub fn holder_exponent<F>(map: F, pairs: &[(Vec<f64>, Vec<f64>)]) -> Result<HolderFit>
where
    F: Fn(&[f64]) -> Result<Vec<f64>>,
{
    if pairs.len() < MIN_PAIRS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_PAIRS} pairs, got {}",
            pairs.len()
        )));
    }
    let mut xs = Vec::with_capacity(pairs.len());
    let mut ys = Vec::with_capacity(pairs.len());
    for (u, v) in pairs {
        let d_in = dist(u, v);
        let d_out = dist(&map(u)?, &map(v)?);
        if d_in > 0.0 && d_out > 0.0 {
            xs.push(d_in.log10());
            ys.push(d_out.log10());
        }
    }
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let decades = if xs.is_empty() { 0.0 } else { hi - lo };
    if decades < MIN_DECADES {
        return Err(Error::DegenerateSpread(decades));
    }
    let fit = fit_line(&xs, &ys).ok_or(Error::DegenerateSpread(decades))?;
    Ok(HolderFit {
        exponent: fit.slope,
        intercept: fit.intercept,
        residual: fit.residual,
        pairs: xs.len(),
        decades,
    })
}

/// Ambient model of a ball action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActionModel {
    Proj,
    Conf,
}

impl std::str::FromStr for ActionModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "proj" => Ok(Self::Proj),
            "conf" => Ok(Self::Conf),
            _ => Err(Error::InvalidArgument(format!(
                "expected proj or conf, got {s:?}"
            ))),
        }
    }
}

/// The boundary conjugacy between the half-space charts of two ball actions.
///
/// `KC = φ₂ ∘ PC`, so conf to proj is `(u, w) ↦ (u, w²)` and proj to conf is
/// `(u, v) ↦ (u, √v)`.
pub fn chart_conjugacy(from: ActionModel, to: ActionModel, q: &[f64]) -> Vec<f64> {
    let n = q.len();
    let mut out = q.to_vec();
    match (from, to) {
        (ActionModel::Conf, ActionModel::Proj) => out[n - 1] = q[n - 1] * q[n - 1],
        (ActionModel::Proj, ActionModel::Conf) => out[n - 1] = q[n - 1].max(0.0).sqrt(),
        _ => {}
    }
    out
}

/// The same conjugacy in the balls, Klein to Poincaré or back.
pub fn ball_conjugacy(from: ActionModel, to: ActionModel, p: &[f64]) -> Vec<f64> {
    match (from, to) {
        (ActionModel::Proj, ActionModel::Conf) => klein_to_poincare_coords(p),
        (ActionModel::Conf, ActionModel::Proj) => poincare_to_klein_coords(p),
        _ => p.to_vec(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyHolder {
    pub from: ActionModel,
    pub to: ActionModel,
    pub forward: HolderFit,
    pub inverse: HolderFit,
    /// `min(forward, inverse)`: the Hölder class of the conjugacy as a pair
    /// of mutually inverse maps.
    pub exponent: f64,
    pub residual: f64,
}

/// Exponent of the chart conjugacy `from → to`. Both the map and its inverse
/// are fitted on the same boundary-neighbourhood pairs of the half-space.
pub fn conjugacy_exponent(
    from: ActionModel,
    to: ActionModel,
    pairs: &[(Vec<f64>, Vec<f64>)],
) -> Result<ConjugacyHolder> {
    let forward = holder_exponent(|q| Ok(chart_conjugacy(from, to, q)), pairs)?;
    let inverse = holder_exponent(|q| Ok(chart_conjugacy(to, from, q)), pairs)?;
    let (exponent, residual) = if forward.exponent <= inverse.exponent {
        (forward.exponent, forward.residual)
    } else {
        (inverse.exponent, inverse.residual)
    };
    Ok(ConjugacyHolder {
        from,
        to,
        forward,
        inverse,
        exponent,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn radial_pairs(count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
        (0..count)
            .map(|i| {
                let s = 1.0 + 4.0 * i as f64 / (count - 1) as f64;
                let d = 10f64.powf(-s);
                (vec![0.3, 0.0], vec![0.3 + 0.2 * d, d])
            })
            .collect()
    }

    #[test]
    fn identity_and_powers() {
        let pairs = radial_pairs(120);
        let id = holder_exponent(|q| Ok(q.to_vec()), &pairs).unwrap();
        assert!((id.exponent - 1.0).abs() < 1e-12);
        let cube_root = holder_exponent(|q| Ok(vec![q[0] * 0.0, q[1].cbrt()]), &pairs).unwrap();
        assert!((cube_root.exponent - 1.0 / 3.0).abs() < 0.05);
    }

    #[test]
    fn proj_conf_is_half() {
        let pairs = radial_pairs(150);
        let h = conjugacy_exponent(ActionModel::Conf, ActionModel::Proj, &pairs).unwrap();
        assert!((h.exponent - 0.5).abs() < 0.05, "{h:?}");
        assert!(h.residual < 0.1);
        assert!((h.forward.exponent - 1.0).abs() < 0.05);
    }

    #[test]
    fn rejects_small_samples() {
        let pairs = radial_pairs(10);
        assert!(holder_exponent(|q| Ok(q.to_vec()), &pairs).is_err());
        let narrow: Vec<_> = (0..100)
            .map(|i| (vec![0.0, 0.0], vec![0.0, 1e-3 * (1.0 + i as f64 / 100.0)]))
            .collect();
        assert!(matches!(
            holder_exponent(|q| Ok(q.to_vec()), &narrow),
            Err(Error::DegenerateSpread(_))
        ));
    }
}
