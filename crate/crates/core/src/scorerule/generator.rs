//! Convex generators and the two-argument functions they seed.
//!
//! A [`ConvexGenerator`] is a convex `α: ℝ → ℝ` with its first two
//! derivatives, registered on an open interval. The perspective
//! `φ(u, v) = u·α(v/u)` of such a generator is convex on `u > 0` and
//! satisfies the locality condition `φ = u·φ_u + v·φ_v`, which is what turns
//! a Bregman divergence built from `φ` into a local score.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
type PairFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };
    pub const POSITIVE: Interval = Interval {
        lo: 0.0,
        hi: f64::INFINITY,
    };
    pub const NEGATIVE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: 0.0,
    };

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A convex function of one variable together with its first two derivatives.
#[derive(Clone)]
pub struct ConvexGenerator {
    name: String,
    alpha: RealFn,
    alpha_d1: RealFn,
    alpha_d2: RealFn,
    domain: Interval,
}

impl fmt::Debug for ConvexGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConvexGenerator")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ConvexGenerator {
    pub fn new(
        name: impl Into<String>,
        domain: Interval,
        alpha: impl Fn(f64) -> f64 + Send + Sync + 'static,
        alpha_d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        alpha_d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            name: name.into(),
            alpha: Arc::new(alpha),
            alpha_d1: Arc::new(alpha_d1),
            alpha_d2: Arc::new(alpha_d2),
            domain,
        }
    }

    /// `α(u) = u²`, the generator of the Hyvärinen score. Also serves as
    /// `φ(t) = t²` for the one-dimensional L₂ Bregman divergence.
    pub fn square() -> Self {
        Self::new("u^2", Interval::REAL, |u| u * u, |u| 2.0 * u, |_| 2.0)
    }

    /// `α(u) = u⁻²` on `u < 0`, the branch used for decreasing densities.
    pub fn inverse_square() -> Self {
        Self::inverse_square_on(Interval::NEGATIVE)
    }

    /// `α(u) = u⁻²` on `u > 0`.
    pub fn inverse_square_positive() -> Self {
        Self::inverse_square_on(Interval::POSITIVE)
    }

    fn inverse_square_on(domain: Interval) -> Self {
        Self::new(
            "u^-2",
            domain,
            |u| u.powi(-2),
            |u| -2.0 * u.powi(-3),
            |u| 6.0 * u.powi(-4),
        )
    }

    /// `φ(t) = t log t` on `t > 0`; its Bregman divergence is Kullback–Leibler.
    pub fn entropy() -> Self {
        Self::new(
            "t log t",
            Interval::POSITIVE,
            |t| t * t.ln(),
            |t| t.ln() + 1.0,
            |t| 1.0 / t,
        )
    }

    /// `α(u) = −u²`. Concave; useful as a negative control.
    pub fn negative_square() -> Self {
        Self::new("-u^2", Interval::REAL, |u| -u * u, |u| -2.0 * u, |_| -2.0)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn alpha(&self, u: f64) -> f64 {
        (self.alpha)(u)
    }

    pub fn alpha_d1(&self, u: f64) -> f64 {
        (self.alpha_d1)(u)
    }

    pub fn alpha_d2(&self, u: f64) -> f64 {
        (self.alpha_d2)(u)
    }

    pub(crate) fn require(&self, what: &'static str, u: f64) -> Result<()> {
        if self.domain.contains(u) {
            Ok(())
        } else {
            Err(Error::Domain {
                what,
                value: u,
                domain: format!("{} of generator {}", self.domain, self.name),
            })
        }
    }

    /// Checks convexity and derivative consistency on the given sample points.
    ///
    /// `alpha_d1` is compared with a central difference of `alpha` and
    /// `alpha_d2` with a central difference of `alpha_d1`, both to within
    /// `1e-6` relative.
    pub fn validate(&self, points: &[f64]) -> Result<()> {
        const REL_TOL: f64 = 1e-6;
        for &u in points {
            self.require("generator sample point", u)?;
            let d2 = self.alpha_d2(u);
            if !(d2 > 0.0) {
                return Err(Error::Contract(format!(
                    "{} is not strictly convex at u = {u}: alpha'' = {d2}",
                    self.name
                )));
            }
            let h = 1e-5 * u.abs().max(1e-3);
            if !self.domain.contains(u - h) || !self.domain.contains(u + h) {
                continue;
            }
            let fd1 = (self.alpha(u + h) - self.alpha(u - h)) / (2.0 * h);
            let fd2 = (self.alpha_d1(u + h) - self.alpha_d1(u - h)) / (2.0 * h);
            for (label, exact, approx) in [("alpha'", self.alpha_d1(u), fd1), ("alpha''", d2, fd2)]
            {
                let scale = exact.abs().max(1.0);
                if (exact - approx).abs() > REL_TOL * scale {
                    return Err(Error::Contract(format!(
                        "{label} of {} disagrees with finite differences at u = {u}: {exact} vs {approx}",
                        self.name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A function `φ(u, v)` of a density value and its first derivative.
#[derive(Clone)]
pub enum PhiGenerator {
    /// `φ(u, v) = u·α(v/u)`.
    Perspective(ConvexGenerator),
    /// Any other `φ` with explicit partial derivatives.
    Direct {
        name: String,
        phi: PairFn,
        partial_u: PairFn,
        partial_v: PairFn,
    },
}

impl fmt::Debug for PhiGenerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiGenerator::Perspective(g) => f.debug_tuple("Perspective").field(g).finish(),
            PhiGenerator::Direct { name, .. } => f.debug_struct("Direct").field("name", name).finish(),
        }
    }
}

impl PhiGenerator {
    pub fn from_generator(gen: ConvexGenerator) -> Self {
        PhiGenerator::Perspective(gen)
    }

    pub fn direct(
        name: impl Into<String>,
        phi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        partial_u: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        partial_v: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PhiGenerator::Direct {
            name: name.into(),
            phi: Arc::new(phi),
            partial_u: Arc::new(partial_u),
            partial_v: Arc::new(partial_v),
        }
    }

    /// `φ(u, v) = v²/u`, written out directly. Its divergence is the Fisher divergence.
    pub fn fisher() -> Self {
        Self::direct(
            "v^2/u",
            |u, v| v * v / u,
            |u, v| -(v * v) / (u * u),
            |u, v| 2.0 * v / u,
        )
    }

    pub fn name(&self) -> &str {
        match self {
            PhiGenerator::Perspective(g) => g.name(),
            PhiGenerator::Direct { name, .. } => name,
        }
    }

    pub fn generator(&self) -> Option<&ConvexGenerator> {
        match self {
            PhiGenerator::Perspective(g) => Some(g),
            PhiGenerator::Direct { .. } => None,
        }
    }

    pub fn value(&self, u: f64, v: f64) -> f64 {
        match self {
            PhiGenerator::Perspective(g) => u * g.alpha(v / u),
            PhiGenerator::Direct { phi, .. } => phi(u, v),
        }
    }

    pub fn partial_u(&self, u: f64, v: f64) -> f64 {
        match self {
            PhiGenerator::Perspective(g) => {
                let r = v / u;
                g.alpha(r) - r * g.alpha_d1(r)
            }
            PhiGenerator::Direct { partial_u, .. } => partial_u(u, v),
        }
    }

    pub fn partial_v(&self, u: f64, v: f64) -> f64 {
        match self {
            PhiGenerator::Perspective(g) => g.alpha_d1(v / u),
            PhiGenerator::Direct { partial_v, .. } => partial_v(u, v),
        }
    }

    /// Largest relative violation of `φ = u·φ_u + v·φ_v` over `points`.
    pub fn locality_defect(&self, points: &[(f64, f64)]) -> f64 {
        points
            .iter()
            .map(|&(u, v)| {
                let phi = self.value(u, v);
                let euler = u * self.partial_u(u, v) + v * self.partial_v(u, v);
                (phi - euler).abs() / phi.abs().max(1.0)
            })
            .fold(0.0, f64::max)
    }

    /// Largest relative violation of `φ(λu, λv) = λ·φ(u, v)` over `points × lambdas`.
    pub fn homogeneity_defect(&self, points: &[(f64, f64)], lambdas: &[f64]) -> f64 {
        let mut worst = 0.0_f64;
        for &(u, v) in points {
            let phi = self.value(u, v);
            for &lam in lambdas {
                let scaled = self.value(lam * u, lam * v);
                let err = (scaled - lam * phi).abs() / (lam * phi).abs().max(1.0);
                worst = worst.max(err);
            }
        }
        worst
    }

    /// Finite-difference Hessian of `φ` at `(u, v)`, built from central
    /// differences of the analytic partials and symmetrized.
    pub fn hessian(&self, u: f64, v: f64) -> [[f64; 2]; 2] {
        let hu = 1e-5 * u.abs().max(1e-3);
        let hv = 1e-5 * v.abs().max(1e-3);
        let uu = (self.partial_u(u + hu, v) - self.partial_u(u - hu, v)) / (2.0 * hu);
        let vv = (self.partial_v(u, v + hv) - self.partial_v(u, v - hv)) / (2.0 * hv);
        let uv = (self.partial_u(u, v + hv) - self.partial_u(u, v - hv)) / (2.0 * hv);
        let vu = (self.partial_v(u + hu, v) - self.partial_v(u - hu, v)) / (2.0 * hu);
        let off = 0.5 * (uv + vu);
        [[uu, off], [off, vv]]
    }
}

/// True iff the finite-difference Hessian of `φ` is positive semidefinite at
/// every point, i.e. both eigenvalues are at least `−1e-8·max(1, ‖H‖)`.
pub fn check_convexity(phi: &PhiGenerator, points: &[(f64, f64)]) -> bool {
    points.iter().all(|&(u, v)| {
        let [[a, b], [_, d]] = phi.hessian(u, v);
        let (lo, hi) = symmetric_eigenvalues(a, b, d);
        let tol = 1e-8 * hi.abs().max(lo.abs()).max(1.0);
        lo.is_finite() && lo >= -tol
    })
}

fn symmetric_eigenvalues(a: f64, b: f64, d: f64) -> (f64, f64) {
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    (mean - radius, mean + radius)
}
