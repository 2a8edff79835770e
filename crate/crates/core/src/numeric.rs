//! Small numerical kernels shared by the field and diagnostic modules.

/// Central difference of a vector-valued function at 0 with one Richardson
/// level: `(4·D(h/2) − D(h))/3`, `D(h) = (F(h) − F(−h))/2h`.
pub fn richardson_derivative<F>(f: F, h: f64) -> Vec<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    let central = |step: f64| -> Vec<f64> {
        let plus = f(step);
        let minus = f(-step);
        plus.iter()
            .zip(&minus)
            .map(|(p, m)| (p - m) / (2.0 * step))
            .collect()
    };
    let coarse = central(h);
    let fine = central(h / 2.0);
    fine.iter()
        .zip(&coarse)
        .map(|(a, b)| (4.0 * a - b) / 3.0)
        .collect()
}

/// Jacobian `∂V_i/∂q_j` of a vector field by Richardson central differences.
pub fn jacobian<V>(field: V, q: &[f64], h: f64) -> Vec<Vec<f64>>
where
    V: Fn(&[f64]) -> Vec<f64>,
{
    let dim = q.len();
    let mut cols = Vec::with_capacity(dim);
    for j in 0..dim {
        let col = richardson_derivative(
            |t| {
                let mut p = q.to_vec();
                p[j] += t;
                field(&p)
            },
            h,
        );
        cols.push(col);
    }
    let rows = cols.first().map_or(0, Vec::len);
    (0..rows)
        .map(|i| (0..dim).map(|j| cols[j][i]).collect())
        .collect()
}

/// Lie bracket `[V, W] = DW·V − DV·W` at `q`, by numerical Jacobians.
pub fn lie_bracket<V, W>(v: V, w: W, q: &[f64], h: f64) -> Vec<f64>
where
    V: Fn(&[f64]) -> Vec<f64>,
    W: Fn(&[f64]) -> Vec<f64>,
{
    let dv = jacobian(&v, q, h);
    let dw = jacobian(&w, q, h);
    let vq = v(q);
    let wq = w(q);
    (0..q.len())
        .map(|i| {
            let a: f64 = dw[i].iter().zip(&vq).map(|(d, x)| d * x).sum();
            let b: f64 = dv[i].iter().zip(&wq).map(|(d, x)| d * x).sum();
            a - b
        })
        .collect()
}

/// Settings for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-12,
            max_steps: 100_000,
        }
    }
}

/// Integrates the autonomous system `ẏ = f(y)` from 0 to `t_end` with the
/// Dormand–Prince 5(4) pair and step-size control. Returns `None` if the step
/// budget runs out or the state stops being finite.
pub fn integrate<F>(f: F, y0: &[f64], t_end: f64, opts: OdeOptions) -> Option<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    if t_end == 0.0 {
        return Some(y0.to_vec());
    }
    let dir = t_end.signum();
    let span = t_end.abs();
    let dim = y0.len();
    let mut y = y0.to_vec();
    let mut t = 0.0;
    let mut h = (span * 1e-3).max(1e-8);
    for _ in 0..opts.max_steps {
        if t >= span {
            return Some(y);
        }
        h = h.min(span - t);
        let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
        for stage in 0..7 {
            let mut ys = y.clone();
            for (prev, a) in k.iter().zip(A[stage].iter()) {
                for i in 0..dim {
                    ys[i] += dir * h * a * prev[i];
                }
            }
            k.push(f(&ys));
        }
        let mut y5 = y.clone();
        let mut err = 0.0f64;
        for i in 0..dim {
            let mut s5 = 0.0;
            let mut s4 = 0.0;
            for s in 0..7 {
                s5 += B5[s] * k[s][i];
                s4 += B4[s] * k[s][i];
            }
            y5[i] += dir * h * s5;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (s5 - s4)).abs() / scale);
        }
        if !err.is_finite() || y5.iter().any(|v| !v.is_finite()) {
            h *= 0.25;
            if h < 1e-14 * span {
                return None;
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y = y5;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    None
}

/// Aitken Δ² extrapolation of three successive terms, if well conditioned.
pub fn aitken(x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let d1 = x1 - x0;
    let d2 = x2 - x1;
    let denom = d2 - d1;
    let scale = x0.abs().max(x1.abs()).max(x2.abs()).max(f64::MIN_POSITIVE);
    if denom.abs() <= 1e-14 * scale {
        return None;
    }
    let r = d2 / d1;
    // only accelerate monotone geometric convergence
    if !(0.0..1.0).contains(&r) {
        return None;
    }
    Some(x2 - d2 * d2 / denom)
}

/// Ordinary least-squares fit `y ≈ slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Some(LineFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
    })
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_on_polynomial() {
        let d = richardson_derivative(|t| vec![(1.0 + t).powi(5), t.sin()], 1e-3);
        assert!((d[0] - 5.0).abs() < 1e-9);
        assert!((d[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bracket_of_coordinate_fields() {
        // [x ∂x, ∂x] = −∂x
        let v = |q: &[f64]| vec![q[0], 0.0];
        let w = |_: &[f64]| vec![1.0, 0.0];
        let b = lie_bracket(v, w, &[0.3, 0.4], 1e-4);
        assert!((b[0] + 1.0).abs() < 1e-9 && b[1].abs() < 1e-12);
    }

    #[test]
    fn dormand_prince_exponential_and_rotation() {
        let y = integrate(|y| vec![y[0]], &[1.0], 1.0, OdeOptions::default()).unwrap();
        assert!((y[0] - 1f64.exp()).abs() < 1e-9);
        let y = integrate(|y| vec![-y[1], y[0]], &[1.0, 0.0], -2.0, OdeOptions::default()).unwrap();
        assert!((y[0] - 2f64.cos()).abs() < 1e-9 && (y[1] + 2f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn aitken_geometric() {
        let xs: Vec<f64> = (0..3).map(|k| 2.0 + 0.5f64.powi(k)).collect();
        assert!((aitken(xs[0], xs[1], xs[2]).unwrap() - 2.0).abs() < 1e-14);
        assert!(aitken(1.0, 1.0, 1.0).is_none());
    }

    #[test]
    fn line_fit_exact() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 1.0).collect();
        let fit = fit_line(&xs, &ys).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-15 && (fit.intercept + 1.0).abs() < 1e-15);
        assert!(fit.residual < 1e-15);
        assert!(fit_line(&[1.0, 1.0], &[0.0, 1.0]).is_none());
    }
}
