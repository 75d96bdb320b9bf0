//! Local scoring rules.

use std::fmt;
use std::sync::Arc;

use num_traits::{Num, ToPrimitive};

use super::generator::{ConvexGenerator, PhiGenerator};
use super::grid::{nested_derivative, restrict, DensityGrid, GridValues};
use crate::error::{Error, Result};

type PointFn = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;
type GridFn = Arc<dyn Fn(&DensityGrid) -> Result<GridValues> + Send + Sync>;

#[derive(Clone)]
enum Eval {
    /// Closed-form in `(q, q′, …)` at a single point.
    Pointwise(PointFn),
    /// Needs derivatives along the grid (finite differences).
    Grid(GridFn),
}

/// A local score `S(q, q′, …, q⁽ᵒʳᵈᵉʳ⁾)`.
#[derive(Clone)]
pub struct ScoreFunction {
    order: usize,
    provenance: String,
    experimental: bool,
    eval: Eval,
}

impl fmt::Debug for ScoreFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScoreFunction")
            .field("order", &self.order)
            .field("provenance", &self.provenance)
            .field("pointwise", &self.is_pointwise())
            .finish()
    }
}

impl ScoreFunction {
    /// A score given in closed form. `f` receives `(q, q′, …, q⁽ᵒʳᵈᵉʳ⁾)`.
    pub fn pointwise(
        order: usize,
        provenance: impl Into<String>,
        f: impl Fn(&[f64]) -> Result<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            order,
            provenance: provenance.into(),
            experimental: false,
            eval: Eval::Pointwise(Arc::new(f)),
        }
    }

    /// The log score `−log q`.
    pub fn log_score() -> Self {
        Self::pointwise(0, "log score", |s| {
            require_positive(s[0])?;
            Ok(-s[0].ln())
        })
    }

    /// The Hyvärinen score `2q″/q − (q′/q)²`.
    pub fn hyvarinen() -> Self {
        Self::pointwise(2, "Hyvarinen", |s| hyvarinen_score(s[0], s[1], s[2]))
    }

    /// The score of the `α(u) = u⁻²` generator, `3(q/q′)²{2qq″/(q′)² − 3}`.
    pub fn inverse_square() -> Self {
        Self::pointwise(2, "u^-2 score", |s| new_prior_score(s[0], s[1], s[2]))
    }

    /// Highest derivative of `q` the score depends on.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    /// Set for order-`m` scores with `m > 2`, which have not been validated.
    pub fn is_experimental(&self) -> bool {
        self.experimental
    }

    pub fn is_pointwise(&self) -> bool {
        matches!(self.eval, Eval::Pointwise(_))
    }

    /// Evaluates a closed-form score at one state `(q, q′, …)`.
    pub fn eval(&self, state: &[f64]) -> Result<f64> {
        match &self.eval {
            Eval::Pointwise(f) => {
                if state.len() <= self.order {
                    return Err(Error::Shape(format!(
                        "score of order {} needs {} state values, got {}",
                        self.order,
                        self.order + 1,
                        state.len()
                    )));
                }
                f(state)
            }
            Eval::Grid(_) => Err(Error::Contract(format!(
                "{} needs grid derivatives; use eval_grid",
                self.provenance
            ))),
        }
    }

    /// Evaluates the score along a density grid.
    pub fn eval_grid(&self, q: &DensityGrid) -> Result<GridValues> {
        match &self.eval {
            Eval::Pointwise(f) => {
                q.require_order(self.order)?;
                let values = (0..q.len())
                    .map(|i| f(&q.state(i, self.order)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GridValues::full(values))
            }
            Eval::Grid(f) => f(q),
        }
    }
}

fn require_positive(q: f64) -> Result<()> {
    if q > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "q",
            value: q,
            domain: "(0, inf)".into(),
        })
    }
}

/// Score generated by a convex `α` through `φ(u, v) = u·α(v/u)`:
///
/// ```text
/// S = α″(r)·(q″/q − r²) − α(r) + r·α′(r),   r = q′/q
/// ```
///
/// which is `d/dx α′(q′/q) − α(q′/q) + (q′/q)·α′(q′/q)` with the derivative
/// expanded by the chain rule.
pub fn score_order2(gen: ConvexGenerator) -> ScoreFunction {
    let provenance = format!("order-2 score of alpha = {}", gen.name());
    ScoreFunction::pointwise(2, provenance, move |s| {
        let (q, q1, q2) = (s[0], s[1], s[2]);
        require_positive(q)?;
        let r = q1 / q;
        gen.require("q'/q", r)?;
        Ok(gen.alpha_d2(r) * (q2 / q - r * r) - gen.alpha(r) + r * gen.alpha_d1(r))
    })
}

/// `2q″/q − (q′/q)²`.
pub fn hyvarinen_score(q: f64, q1: f64, q2: f64) -> Result<f64> {
    require_positive(q)?;
    let r = q1 / q;
    Ok(2.0 * q2 / q - r * r)
}

/// `3(q/q′)²{2qq″/(q′)² − 3}`, the score of `α(u) = u⁻²`.
///
/// Generic over the number type so the identity `S = 0` on `a/(a + x)²` can be
/// checked in exact rational arithmetic.
pub fn new_prior_score<T: Num + Clone + PartialOrd + ToPrimitive>(q: T, q1: T, q2: T) -> Result<T> {
    if !(q > T::zero()) {
        return Err(Error::Domain {
            what: "q",
            value: q.to_f64().unwrap_or(f64::NAN),
            domain: "(0, inf)".into(),
        });
    }
    if q1.is_zero() {
        return Err(Error::Singularity("q' = 0 (stationary point)".into()));
    }
    let two = T::one() + T::one();
    let three = two.clone() + T::one();
    let ratio = q.clone() / q1.clone();
    let inner = two * q * q2 / (q1.clone() * q1) - three.clone();
    Ok(three * ratio.clone() * ratio * inner)
}

type VecFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A function `φ(u₀, …, u_m)` of a density and its first `m` derivatives.
#[derive(Clone)]
pub struct OrderMPhi {
    m: usize,
    name: String,
    value: VecFn,
    grad: GradFn,
}

impl fmt::Debug for OrderMPhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrderMPhi").field("m", &self.m).field("name", &self.name).finish()
    }
}

impl OrderMPhi {
    pub fn new(
        m: usize,
        name: impl Into<String>,
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    ) -> Self {
        Self {
            m,
            name: name.into(),
            value: Arc::new(value),
            grad: Arc::new(grad),
        }
    }

    /// `φ(u) = u log u − u`, whose score is the log score.
    pub fn log_entropy() -> Self {
        Self::new(0, "u log u - u", |u| u[0] * u[0].ln() - u[0], |u| vec![u[0].ln()])
    }

    /// `φ = Σ_{j<m} u_j·α_j(u_{j+1}/u_j)` with `m = gens.len()`.
    pub fn from_generators(gens: &[ConvexGenerator]) -> Self {
        let m = gens.len();
        let name = gens.iter().map(ConvexGenerator::name).collect::<Vec<_>>().join(", ");
        let gv = gens.to_vec();
        let gg = gens.to_vec();
        Self::new(
            m,
            format!("sum of perspectives [{name}]"),
            move |u| {
                gv.iter()
                    .enumerate()
                    .map(|(j, a)| u[j] * a.alpha(u[j + 1] / u[j]))
                    .sum()
            },
            move |u| {
                let mut g = vec![0.0; m + 1];
                for (j, a) in gg.iter().enumerate() {
                    let r = u[j + 1] / u[j];
                    g[j] += a.alpha(r) - r * a.alpha_d1(r);
                    g[j + 1] += a.alpha_d1(r);
                }
                g
            },
        )
    }

    /// A two-argument `φ(u, v)` viewed as an order-1 function.
    pub fn from_phi(phi: &PhiGenerator) -> Self {
        let pv = phi.clone();
        let pg = phi.clone();
        Self::new(
            1,
            phi.name().to_string(),
            move |u| pv.value(u[0], u[1]),
            move |u| vec![pg.partial_u(u[0], u[1]), pg.partial_v(u[0], u[1])],
        )
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        (self.value)(u)
    }

    pub fn grad(&self, u: &[f64]) -> Vec<f64> {
        (self.grad)(u)
    }
}

/// Order-`m` score `S = Σ_{j=0}^{m} (−1)^{j+1} dʲ/dxʲ ∂φ/∂q_j`.
///
/// The derivatives along `x` are nested central differences on the grid, so
/// `m` points are lost at each edge. The grid must carry `q` up to order `m`.
/// Scores with `m > 2` are flagged experimental.
pub fn score_order_m(phi: OrderMPhi) -> ScoreFunction {
    let m = phi.m;
    let provenance = format!("order-{m} score of {}", phi.name);
    let f = move |q: &DensityGrid| -> Result<GridValues> {
        q.require_order(m)?;
        let n = q.len();
        if n < 2 * m + 1 {
            return Err(Error::Stencil {
                points: n,
                needed: 2 * m + 1,
            });
        }
        let grads: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let s = q.state(i, m);
                if s[0] > 0.0 {
                    Ok(phi.grad(&s))
                } else {
                    Err(Error::Domain {
                        what: "q",
                        value: s[0],
                        domain: "(0, inf)".into(),
                    })
                }
            })
            .collect::<Result<_>>()?;
        let (lo, hi) = (m, n - m);
        let mut total = vec![0.0; hi - lo];
        for j in 0..=m {
            let g = GridValues::full(grads.iter().map(|v| v[j]).collect());
            let dj = restrict(&nested_derivative(&g, j, q.step())?, lo, hi);
            let sign = if j % 2 == 0 { -1.0 } else { 1.0 };
            for (t, d) in total.iter_mut().zip(&dj.values) {
                *t += sign * d;
            }
        }
        Ok(GridValues { lo, hi, values: total })
    };
    ScoreFunction {
        order: 2 * m,
        provenance,
        experimental: m > 2,
        eval: Eval::Grid(Arc::new(f)),
    }
}
