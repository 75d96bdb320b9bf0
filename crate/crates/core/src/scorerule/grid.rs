//! Densities tabulated on uniform grids.

use crate::error::{Error, Result};

/// A density and some of its derivatives on a uniform, ascending grid.
///
/// `derivs[j]` holds the `j`-th derivative; `derivs[0]` is the density itself.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    x: Vec<f64>,
    h: f64,
    derivs: Vec<Vec<f64>>,
}

/// Values defined on the index range `lo..hi` of some grid.
///
/// Finite-difference operators lose points at the grid edges; this records
/// where the values are valid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridValues {
    pub lo: usize,
    pub hi: usize,
    pub values: Vec<f64>,
}

impl GridValues {
    pub fn full(values: Vec<f64>) -> Self {
        Self {
            lo: 0,
            hi: values.len(),
            values,
        }
    }

    pub fn get(&self, i: usize) -> Option<f64> {
        (self.lo..self.hi).contains(&i).then(|| self.values[i - self.lo])
    }
}

/// Uniform grid `x_i = start + i·h` for `i = 0..n`.
pub fn uniform(start: f64, end: f64, h: f64) -> Vec<f64> {
    let n = ((end - start) / h).round() as usize + 1;
    (0..n).map(|i| start + i as f64 * h).collect()
}

impl DensityGrid {
    /// Wraps precomputed derivative arrays; `derivs[0]` is the density.
    pub fn new(x: Vec<f64>, derivs: Vec<Vec<f64>>) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::Stencil { points: x.len(), needed: 2 });
        }
        if derivs.is_empty() || derivs.iter().any(|d| d.len() != x.len()) {
            return Err(Error::Shape("every derivative array must match the grid length".into()));
        }
        let h = check_uniform(&x)?;
        Ok(Self { x, h, derivs })
    }

    /// Tabulates `f(x, j)` for `j = 0..=order` on `[start, end]` with step `h`.
    pub fn from_analytic(start: f64, end: f64, h: f64, order: usize, f: impl Fn(f64, usize) -> f64) -> Self {
        let x = uniform(start, end, h);
        let derivs = (0..=order)
            .map(|j| x.iter().map(|&xi| f(xi, j)).collect())
            .collect();
        Self { x, h, derivs }
    }

    /// Builds a grid from density values and derives `order` derivatives by
    /// finite differences.
    ///
    /// Second-order central differences give the first two derivatives and
    /// five-point stencils give the third and fourth. Edge points use
    /// one-sided differences of the next-lower derivative.
    pub fn from_values(x: Vec<f64>, q: Vec<f64>, order: usize) -> Result<Self> {
        if x.len() != q.len() {
            return Err(Error::Shape(format!("{} grid points but {} values", x.len(), q.len())));
        }
        let needed = if order >= 3 { 5 } else { 3 };
        if x.len() < needed {
            return Err(Error::Stencil { points: x.len(), needed });
        }
        let h = check_uniform(&x)?;
        let mut derivs = vec![q];
        for j in 1..=order {
            let d = match j {
                1 | 2 => {
                    let base = &derivs[0];
                    let mut out = if j == 1 { first_difference(base, h) } else { second_difference(base, h) };
                    // edges: differentiate the previous derivative one-sidedly
                    if j == 2 {
                        let prev = &derivs[1];
                        let n = prev.len();
                        out[0] = (prev[1] - prev[0]) / h;
                        out[n - 1] = (prev[n - 1] - prev[n - 2]) / h;
                    }
                    out
                }
                3 | 4 => {
                    let base = &derivs[0];
                    let prev = derivs[j - 1].clone();
                    let n = base.len();
                    let mut out = first_difference(&prev, h);
                    for i in 2..n - 2 {
                        out[i] = if j == 3 {
                            (-base[i - 2] + 2.0 * base[i - 1] - 2.0 * base[i + 1] + base[i + 2]) / (2.0 * h.powi(3))
                        } else {
                            (base[i - 2] - 4.0 * base[i - 1] + 6.0 * base[i] - 4.0 * base[i + 1] + base[i + 2]) / h.powi(4)
                        };
                    }
                    out
                }
                _ => first_difference(&derivs[j - 1], h),
            };
            derivs.push(d);
        }
        Ok(Self { x, h, derivs })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    /// Highest derivative order carried.
    pub fn order(&self) -> usize {
        self.derivs.len() - 1
    }

    pub fn q(&self) -> &[f64] {
        &self.derivs[0]
    }

    /// The `j`-th derivative, if carried.
    pub fn deriv(&self, j: usize) -> Option<&[f64]> {
        self.derivs.get(j).map(Vec::as_slice)
    }

    pub(crate) fn require_order(&self, order: usize) -> Result<()> {
        if self.order() < order {
            Err(Error::Shape(format!(
                "grid carries derivatives up to order {}, need {order}",
                self.order()
            )))
        } else {
            Ok(())
        }
    }

    /// `(q, q′, …, q⁽ᵐ⁾)` at grid index `i`.
    pub fn state(&self, i: usize, order: usize) -> Vec<f64> {
        (0..=order).map(|j| self.derivs[j][i]).collect()
    }

    /// Largest density value at either end of the grid.
    pub fn edge_density(&self) -> f64 {
        let q = self.q();
        q[0].abs().max(q[q.len() - 1].abs())
    }

    /// Trapezoid integral of values over the full grid.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        trapezoid(values, self.h)
    }

    /// Trapezoid integral of `self.q()` times `values`, over the valid range of `values`.
    pub fn expect(&self, values: &GridValues) -> f64 {
        let q = &self.q()[values.lo..values.hi];
        let prod: Vec<f64> = q.iter().zip(&values.values).map(|(a, b)| a * b).collect();
        trapezoid(&prod, self.h)
    }

    /// Total mass `∫ q`.
    pub fn mass(&self) -> f64 {
        self.integrate(self.q())
    }

    /// Whether `other` is tabulated on the same points.
    pub fn same_support(&self, other: &DensityGrid) -> Result<()> {
        if self.x.len() != other.x.len()
            || self.x.first() != other.x.first()
            || (self.h - other.h).abs() > 1e-15 * self.h.abs()
        {
            return Err(Error::Shape("density grids do not share abscissae".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_uniform(x: &[f64]) -> Result<f64> {
    let h = x[1] - x[0];
    if !(h > 0.0) {
        return Err(Error::Shape("grid must be strictly ascending".into()));
    }
    let tol = 1e-6 * h;
    for w in x.windows(2) {
        if ((w[1] - w[0]) - h).abs() > tol {
            return Err(Error::Shape("grid spacing must be uniform".into()));
        }
    }
    Ok(h)
}

pub(crate) fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values[1..n - 1].iter().sum::<f64>() + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Central first difference; one-sided at the ends.
pub(crate) fn first_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    }
    out[0] = (f[1] - f[0]) / h;
    out[n - 1] = (f[n - 1] - f[n - 2]) / h;
    out
}

fn second_difference(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut out = vec![0.0; n];
    for i in 1..n - 1 {
        out[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
    }
    out
}

/// Central derivative of order `j` of `values` (valid on `values.lo..values.hi`),
/// applied as `j` nested first differences. Each application drops one point
/// at each end.
pub(crate) fn nested_derivative(values: &GridValues, j: usize, h: f64) -> Result<GridValues> {
    let mut cur = values.clone();
    for _ in 0..j {
        let n = cur.values.len();
        if n < 3 {
            return Err(Error::Stencil { points: n, needed: 3 });
        }
        let next: Vec<f64> = (1..n - 1)
            .map(|i| (cur.values[i + 1] - cur.values[i - 1]) / (2.0 * h))
            .collect();
        cur = GridValues {
            lo: cur.lo + 1,
            hi: cur.hi - 1,
            values: next,
        };
    }
    Ok(cur)
}

/// Restrict `values` to the index range `lo..hi`, which must lie inside its valid range.
pub(crate) fn restrict(values: &GridValues, lo: usize, hi: usize) -> GridValues {
    GridValues {
        lo,
        hi,
        values: values.values[lo - values.lo..hi - values.lo].to_vec(),
    }
}
