//! Numerical solution of `S(q, q′, q″) = 0` for the `α(u) = u⁻²` score.
//!
//! With `u = q′/q` the equation reduces to `u′ = u²/2`. Integrating `u`
//! together with `log q` (whose derivative is `u`) and normalizing recovers
//! the prior density.

use super::grid::{uniform, DensityGrid};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ScoreZeroSolution {
    /// `q`, `q′ = u·q` and `q″ = (u′ + u²)·q` on `[0, x_max]`.
    pub grid: DensityGrid,
    /// `u = q′/q` at the grid points.
    pub u: Vec<f64>,
}

impl ScoreZeroSolution {
    /// Linear interpolation of `u` at `x`.
    pub fn u_at(&self, x: f64) -> f64 {
        interpolate(self.grid.x(), &self.u, x)
    }

    pub fn q_at(&self, x: f64) -> f64 {
        interpolate(self.grid.x(), self.grid.q(), x)
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let h = xs[1] - xs[0];
    let pos = ((x - xs[0]) / h).clamp(0.0, (xs.len() - 1) as f64);
    let i = (pos.floor() as usize).min(xs.len() - 2);
    let w = pos - i as f64;
    ys[i] * (1.0 - w) + ys[i + 1] * w
}

/// Solves `u′ = u²/2`, `u(0) = −2/a` with classical RK4 and step `h`, then
/// normalizes `q = exp(∫u)` on `(0, ∞)`.
///
/// The mass beyond `x_max` is `−2q(x_max)/u(x_max)`, the tail integral of the
/// solution family `q ∝ (c + x)⁻²` matched to the terminal state.
pub fn solve_score_zero(a: f64, x_max: f64, h: f64) -> Result<ScoreZeroSolution> {
    if !(a > 0.0) {
        return Err(Error::Domain {
            what: "a",
            value: a,
            domain: "(0, inf)".into(),
        });
    }
    if !(h > 0.0) || !(x_max > 0.0) {
        return Err(Error::Contract("x_max and h must be positive".into()));
    }
    if h > x_max / 100.0 {
        return Err(Error::Resolution { step: h, range: x_max });
    }
    let x = uniform(0.0, x_max, h);
    let rhs = |u: f64| [0.5 * u * u, u];
    let mut state = [-2.0 / a, 0.0];
    let mut u = Vec::with_capacity(x.len());
    let mut log_q = Vec::with_capacity(x.len());
    u.push(state[0]);
    log_q.push(state[1]);
    for _ in 1..x.len() {
        let k1 = rhs(state[0]);
        let k2 = rhs(state[0] + 0.5 * h * k1[0]);
        let k3 = rhs(state[0] + 0.5 * h * k2[0]);
        let k4 = rhs(state[0] + h * k3[0]);
        for c in 0..2 {
            state[c] += h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
        }
        u.push(state[0]);
        log_q.push(state[1]);
    }
    let unnorm: Vec<f64> = log_q.iter().map(|l| l.exp()).collect();
    let last = x.len() - 1;
    let tail = -2.0 * unnorm[last] / u[last];
    let body = super::grid::trapezoid(&unnorm, h);
    let z = body + tail;
    let q: Vec<f64> = unnorm.iter().map(|v| v / z).collect();
    let q1: Vec<f64> = q.iter().zip(&u).map(|(qi, ui)| ui * qi).collect();
    let q2: Vec<f64> = q.iter().zip(&u).map(|(qi, ui)| 1.5 * ui * ui * qi).collect();
    let grid = DensityGrid::new(x, vec![q, q1, q2])?;
    Ok(ScoreZeroSolution { grid, u })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_follows_closed_form() {
        let sol = solve_score_zero(1.0, 20.0, 1e-3).unwrap();
        assert!((sol.u_at(1.0) + 1.0).abs() < 1e-9);
    }

    #[test]
    fn density_matches_lomax() {
        let sol = solve_score_zero(1.0, 20.0, 1e-3).unwrap();
        let sup = sol
            .grid
            .x()
            .iter()
            .zip(sol.grid.q())
            .map(|(x, q)| (q - 1.0 / ((1.0 + x) * (1.0 + x))).abs())
            .fold(0.0, f64::max);
        assert!(sup <= 1e-6, "{sup}");
    }

    #[test]
    fn density_at_origin_is_inverse_scale() {
        let sol = solve_score_zero(2.0, 40.0, 1e-3).unwrap();
        assert!((sol.q_at(0.0) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn coarse_step_rejected() {
        assert!(matches!(solve_score_zero(1.0, 20.0, 0.5), Err(Error::Resolution { .. })));
        assert!(solve_score_zero(0.0, 20.0, 1e-3).is_err());
    }
}
