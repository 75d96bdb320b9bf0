//! Numerical checks of propriety and of the Euler–Lagrange identity.

use super::grid::{DensityGrid, GridValues};
use super::score::ScoreFunction;
use crate::error::{Error, Result};

/// Slack allowed when comparing expected scores.
pub const PROPRIETY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ProprietyReport {
    pub proper: bool,
    /// `∫ p·S(p)`.
    pub baseline: f64,
    /// `∫ p·S(q)` for each perturbation, in input order.
    pub expected: Vec<f64>,
    /// Index of the first perturbation that beat the baseline.
    pub violation: Option<usize>,
}

/// Checks `∫ p·S(p) ≤ ∫ p·S(q) + 1e-6` for every perturbation `q`.
pub fn propriety_check(score: &ScoreFunction, p: &DensityGrid, perturbations: &[DensityGrid]) -> Result<ProprietyReport> {
    let baseline = p.expect(&score.eval_grid(p)?);
    let mut expected = Vec::with_capacity(perturbations.len());
    let mut violation = None;
    for (k, q) in perturbations.iter().enumerate() {
        p.same_support(q)?;
        let e = p.expect(&score.eval_grid(q)?);
        if violation.is_none() && !(baseline <= e + PROPRIETY_SLACK) {
            violation = Some(k);
        }
        expected.push(e);
    }
    Ok(ProprietyReport {
        proper: violation.is_none(),
        baseline,
        expected,
        violation,
    })
}

/// Pointwise residual of the Euler–Lagrange identity for a proper local score
///
/// ```text
/// q ∂S/∂q − d/dx(q ∂S/∂q′) + d²/dx²(q ∂S/∂q″)
/// ```
///
/// The slot partials of `S` use a five-point stencil with step
/// `3e-3·max(|q_j|, 1e-3·q)` in slot `j`; the `x` derivatives are central differences along the grid, so
/// the result is reported on interior points only. `q` must carry `q′` and `q″`.
pub fn euler_lagrange_residual(score: &ScoreFunction, q: &DensityGrid) -> Result<GridValues> {
    if !score.is_pointwise() {
        return Err(Error::Contract("Euler-Lagrange residual needs a closed-form score".into()));
    }
    if score.order() > 2 {
        return Err(Error::Contract("Euler-Lagrange residual is implemented for order <= 2".into()));
    }
    q.require_order(2)?;
    let n = q.len();
    if n < 3 {
        return Err(Error::Stencil { points: n, needed: 3 });
    }
    let mut terms = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let state = q.state(i, 2);
        for slot in 0..=score.order() {
            terms[slot][i] = state[0] * slot_partial(score, &state, slot)?;
        }
    }
    let h = q.step();
    let [a, b, c] = &terms;
    let values = (1..n - 1)
        .map(|i| {
            let db = (b[i + 1] - b[i - 1]) / (2.0 * h);
            let d2c = (c[i + 1] - 2.0 * c[i] + c[i - 1]) / (h * h);
            a[i] - db + d2c
        })
        .collect();
    Ok(GridValues { lo: 1, hi: n - 1, values })
}

fn slot_partial(score: &ScoreFunction, state: &[f64], slot: usize) -> Result<f64> {
    let step = 3e-3 * state[slot].abs().max(1e-3 * state[0].abs());
    let mut shifted = state.to_vec();
    let mut at = |k: f64| -> Result<f64> {
        shifted[slot] = state[slot] + k * step;
        score.eval(&shifted)
    };
    let (m2, m1, p1, p2) = (at(-2.0)?, at(-1.0)?, at(1.0)?, at(2.0)?);
    Ok((m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * step))
}

/// Largest absolute value among `values`.
pub fn max_abs(values: &GridValues) -> f64 {
    values.values.iter().fold(0.0, |m, v| m.max(v.abs()))
}
