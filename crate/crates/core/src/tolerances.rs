//! Named numeric tolerances.
//!
//! Every threshold used by the checks in this crate lives here under a stable
//! name so that the command line can override it with `--tol.<name>`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default values, in the order they are reported.
pub const DEFAULTS: &[(&str, f64)] = &[
    // relative residual of mᵀJm − J for group membership
    ("group", 1e-9),
    // residual of xᵀJ + Jx for algebra membership
    ("algebra", 1e-9),
    // closed-ball snapping band: |p| in (1, 1 + band] is pulled onto the sphere
    ("boundary_band", 1e-9),
    // action axioms (identity, composition)
    ("action", 1e-9),
    // boundary preservation
    ("boundary", 1e-10),
    // closed-form field vs numeric differentiation
    ("field", 1e-7),
    // Cauchy criterion for geodesic endpoint limits
    ("endpoint", 1e-6),
    // minimal boundary angle for transversality (radians)
    ("transversal", 1e-3),
    // relative Cauchy spread for derivative convergence
    ("smooth_cauchy", 1e-3),
    // growth factor over the last three grid levels for divergence
    ("smooth_growth", 10.0),
    // magnitude threshold for a non-vanishing derivative at 0
    ("flat_threshold", 1e-6),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tolerances {
    values: BTreeMap<String, f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            values: DEFAULTS.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

impl Tolerances {
    pub fn get(&self, name: &str) -> f64 {
        match self.values.get(name) {
            Some(v) => *v,
            None => panic!("tolerance {name:?} is not registered"),
        }
    }

    /// Overrides a registered tolerance.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        if !self.values.contains_key(name) {
            return Err(Error::UnknownTolerance(name.to_string()));
        }
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::NonPositiveTolerance {
                name: name.to_string(),
                value,
            });
        }
        self.values.insert(name.to_string(), value);
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.values.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_and_reject() {
        let mut t = Tolerances::default();
        t.set("action", 1e-6).unwrap();
        assert_eq!(t.get("action"), 1e-6);
        assert!(matches!(t.set("nope", 1.0), Err(Error::UnknownTolerance(_))));
        assert!(matches!(
            t.set("action", 0.0),
            Err(Error::NonPositiveTolerance { .. })
        ));
        assert!(t.set("action", f64::NAN).is_err());
    }
}
