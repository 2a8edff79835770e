//! Seeded random inputs for the property suites and the command line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::diagnostics::Geodesic;
use crate::lorentz::{group_exp, AlgebraElement, GroupElement};
use crate::models::{Model, ModelPoint};
use crate::numeric::norm;

/// Deterministic sampler over `ℍⁿ` and its boundary.
#[derive(Debug, Clone)]
pub struct Sampler {
    rng: ChaCha8Rng,
    n: usize,
}

impl Sampler {
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            n,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    /// A combination of the basis generators with coefficients in `[−1, 1]`.
    pub fn algebra_element(&mut self) -> AlgebraElement {
        let dim = self.n * (self.n + 1) / 2;
        let c: Vec<f64> = (0..dim).map(|_| self.rng.random_range(-1.0..=1.0)).collect();
        AlgebraElement::combination(self.n, &c).expect("basis dimension")
    }

    /// `exp` of [`Sampler::algebra_element`].
    pub fn group_element(&mut self) -> GroupElement {
        group_exp(&self.algebra_element())
    }

    /// Uniform on the unit sphere `Sⁿ⁻¹`.
    pub fn sphere_point(&mut self) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..self.n).map(|_| self.rng.sample(StandardNormal)).collect();
            let r = norm(&v);
            if r > 1e-8 {
                return v.into_iter().map(|x| x / r).collect();
            }
        }
    }

    /// A point of the open ball with radius at most `r_max`, uniform in volume.
    pub fn ball_point(&mut self, r_max: f64) -> Vec<f64> {
        let dir = self.sphere_point();
        let r = r_max * self.rng.random::<f64>().powf(1.0 / self.n as f64);
        dir.into_iter().map(|x| x * r).collect()
    }

    /// A Klein or Poincaré point: on the sphere when `boundary`, else inside
    /// the ball of radius 0.99.
    pub fn ball_model_point(&mut self, model: Model, boundary: bool) -> ModelPoint {
        let c = if boundary {
            self.sphere_point()
        } else {
            self.ball_point(0.99)
        };
        ModelPoint::new(model, c).expect("valid ball point")
    }

    /// A chart point with `u ∈ [−2, 2]ⁿ⁻¹` and `v ∈ (0, 2]`, or `v = 0`.
    pub fn chart_point(&mut self, model: Model, boundary: bool) -> ModelPoint {
        let mut c: Vec<f64> = (0..self.n - 1)
            .map(|_| self.rng.random_range(-2.0..=2.0))
            .collect();
        c.push(if boundary {
            0.0
        } else {
            2.0 - self.rng.random_range(0.0..2.0)
        });
        ModelPoint::new(model, c).expect("valid chart point")
    }

    pub fn hyperboloid_point(&mut self) -> ModelPoint {
        let k = self.ball_model_point(Model::KleinClosed, false);
        k.to_model(Model::Hyperboloid).expect("interior point")
    }

    /// A chord between two independent uniform boundary points.
    pub fn geodesic(&mut self) -> Geodesic {
        loop {
            let a = self.sphere_point();
            let b = self.sphere_point();
            if let Ok(g) = Geodesic::new(a, b) {
                return g;
            }
        }
    }

    /// Two geodesics with one common endpoint.
    pub fn asymptotic_pair(&mut self) -> (Geodesic, Geodesic) {
        loop {
            let e = self.sphere_point();
            let o1 = self.sphere_point();
            let o2 = self.sphere_point();
            if let (Ok(g1), Ok(g2)) = (Geodesic::new(e.clone(), o1), Geodesic::new(e, o2)) {
                return (g1, g2);
            }
        }
    }

    /// Pairs `(b, b + δ·d)` near the boundary of the half-space: `b = (u, 0)`
    /// with `u ∈ [−1, 1]ⁿ⁻¹`, `δ = 10^{−s}` with `s ∈ [1, 5]`, and `d` a unit
    /// vector within 30° of the inward normal.
    pub fn boundary_pairs(&mut self, count: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
        let n = self.n;
        let max_tilt = 30f64.to_radians();
        (0..count)
            .map(|_| {
                let mut base: Vec<f64> = (0..n - 1).map(|_| self.rng.random_range(-1.0..=1.0)).collect();
                base.push(0.0);
                let delta = 10f64.powf(-self.rng.random_range(1.0..=5.0));
                let tilt = self.rng.random_range(0.0..max_tilt);
                let mut side: Vec<f64> = (0..n - 1).map(|_| self.rng.sample(StandardNormal)).collect();
                let r = norm(&side).max(f64::MIN_POSITIVE);
                side.iter_mut().for_each(|x| *x *= tilt.sin() / r);
                side.push(tilt.cos());
                let other = base.iter().zip(&side).map(|(b, d)| b + delta * d).collect();
                (base, other)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_a_seed() {
        let mut a = Sampler::new(3, 7);
        let mut b = Sampler::new(3, 7);
        assert_eq!(a.sphere_point(), b.sphere_point());
        assert_eq!(a.group_element(), b.group_element());
        let mut c = Sampler::new(3, 8);
        assert_ne!(a.sphere_point(), c.sphere_point());
    }

    #[test]
    fn samples_are_valid() {
        let mut s = Sampler::new(4, 1);
        for _ in 0..50 {
            assert!((norm(&s.sphere_point()) - 1.0).abs() < 1e-15);
            assert!(norm(&s.ball_point(0.5)) <= 0.5);
            assert!(s.group_element().residual() < 1e-9);
            let q = s.chart_point(Model::ChartKC, true);
            assert!(q.is_boundary(0.0));
        }
        let pairs = s.boundary_pairs(20);
        for (b, o) in pairs {
            assert_eq!(b[3], 0.0);
            assert!(o[3] > 0.0);
        }
    }
}
