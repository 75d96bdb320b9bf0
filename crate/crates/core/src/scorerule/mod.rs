//! Proper local scoring rules built from convex generators.
//!
//! A convex `α` seeds `φ(u, v) = u·α(v/u)`; the Bregman divergence of `φ`
//! between `(p, p′)` and `(q, q′)` splits into an information term in `p` and
//! the expected score `∫ p·S(q)`, with
//!
//! ```text
//! S(q, q′, q″) = d/dx α′(q′/q) − α(q′/q) + (q′/q)·α′(q′/q)
//! ```
//!
//! `α(u) = u²` gives the Hyvärinen score. `α(u) = u⁻²` gives a score whose
//! zero set is the family `a/(a + x)²`.

mod checks;
mod divergence;
mod generator;
mod grid;
mod ode;
mod score;

pub use checks::{euler_lagrange_residual, max_abs, propriety_check, ProprietyReport, PROPRIETY_SLACK};
pub use divergence::{
    bregman_div_1d, bregman_div_2d, decomposition_check, fisher_quadrature, kl_quadrature, Decomposition,
    BOUNDARY_DENSITY,
};
pub use generator::{check_convexity, ConvexGenerator, Interval, PhiGenerator};
pub use grid::{uniform, DensityGrid, GridValues};
pub use ode::{solve_score_zero, ScoreZeroSolution};
pub use score::{hyvarinen_score, new_prior_score, score_order2, score_order_m, OrderMPhi, ScoreFunction};
