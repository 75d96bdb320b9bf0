//! Smooth reference densities with closed-form derivatives.

use num_traits::Num;
use std::f64::consts::PI;

/// A smooth density with analytic derivatives.
pub trait Density {
    /// The `order`-th derivative of the density at `x` (`order = 0` is the density).
    fn deriv(&self, x: f64, order: usize) -> f64;
}

/// Gaussian density `N(mean, sd²)`. Derivatives up to order 4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mean: f64,
    pub sd: f64,
}

impl Normal {
    pub fn new(mean: f64, sd: f64) -> Self {
        Self { mean, sd }
    }

    pub fn standard() -> Self {
        Self::new(0.0, 1.0)
    }
}

impl Density for Normal {
    fn deriv(&self, x: f64, order: usize) -> f64 {
        let z = (x - self.mean) / self.sd;
        let pdf = (-0.5 * z * z).exp() / (self.sd * (2.0 * PI).sqrt());
        // probabilists' Hermite polynomials
        let he = match order {
            0 => 1.0,
            1 => z,
            2 => z * z - 1.0,
            3 => z * z * z - 3.0 * z,
            4 => z.powi(4) - 6.0 * z * z + 3.0,
            _ => panic!("normal derivatives implemented up to order 4"),
        };
        let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
        sign * he * pdf / self.sd.powi(order as i32)
    }
}

/// Exponential density with the given rate on `x ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponential {
    pub rate: f64,
}

impl Density for Exponential {
    fn deriv(&self, x: f64, order: usize) -> f64 {
        (-self.rate).powi(order as i32) * self.rate * (-self.rate * x).exp()
    }
}

/// Lomax density `a/(a + x)²` on `x ≥ 0`, optionally with a general tail
/// exponent: `c·(a + x)^(−power)` normalized on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lomax {
    pub a: f64,
    pub power: f64,
}

impl Lomax {
    pub fn new(a: f64) -> Self {
        Self { a, power: 2.0 }
    }

    pub fn with_power(a: f64, power: f64) -> Self {
        Self { a, power }
    }
}

impl Density for Lomax {
    fn deriv(&self, x: f64, order: usize) -> f64 {
        let k = self.power;
        // ∫₀^∞ (a+x)^-k dx = a^(1-k)/(k-1)
        let norm = (k - 1.0) * self.a.powf(k - 1.0);
        let mut coef = norm;
        for i in 0..order {
            coef *= -(k + i as f64);
        }
        coef * (self.a + x).powf(-(k + order as f64))
    }
}

/// `(q, q′, q″)` of `a/(a + x)²`, generic so the score identity can be
/// checked in exact arithmetic.
pub fn lomax_state<T: Num + Clone>(a: T, x: T) -> [T; 3] {
    let two = T::one() + T::one();
    let six = two.clone() + two.clone() + two.clone();
    let t = a.clone() + x;
    let t2 = t.clone() * t.clone();
    let t3 = t2.clone() * t;
    [
        a.clone() / t2.clone(),
        (T::zero() - two * a.clone()) / t3,
        six * a / (t2.clone() * t2),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn central(d: &impl Density, x: f64, order: usize) -> f64 {
        let h = 1e-4 * x.abs().max(1.0);
        (d.deriv(x + h, order - 1) - d.deriv(x - h, order - 1)) / (2.0 * h)
    }

    #[test]
    fn analytic_derivatives_match_central_differences() {
        let normal = Normal::new(0.5, 1.5);
        let expo = Exponential { rate: 1.3 };
        let lomax = Lomax::new(2.0);
        let heavier = Lomax::with_power(1.0, 2.1);
        for &x in &[0.3, 1.0, 2.7, 6.0] {
            for order in 1..=4 {
                for (name, exact, fd) in [
                    ("normal", normal.deriv(x, order), central(&normal, x, order)),
                    ("exp", expo.deriv(x, order), central(&expo, x, order)),
                    ("lomax", lomax.deriv(x, order), central(&lomax, x, order)),
                    ("lomax2.1", heavier.deriv(x, order), central(&heavier, x, order)),
                ] {
                    let rel = (exact - fd).abs() / exact.abs().max(1e-12);
                    assert!(rel < 1e-5, "{name} order {order} at {x}: {exact} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn lomax_closed_form() {
        let l = Lomax::new(3.0);
        assert!((l.deriv(0.0, 0) - 1.0 / 3.0).abs() < 1e-15);
        let [q, q1, q2] = lomax_state(3.0, 2.0);
        assert!((q - l.deriv(2.0, 0)).abs() < 1e-15);
        assert!((q1 - l.deriv(2.0, 1)).abs() < 1e-15);
        assert!((q2 - l.deriv(2.0, 2)).abs() < 1e-15);
    }
}
