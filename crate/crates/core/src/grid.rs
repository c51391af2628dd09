//! Uniform 1-D grids with the quadrature and interpolation helpers shared by
//! the continuous-variable modules.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GridError {
    #[error("grid needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("grid bounds [{min}, {max}] are not finite and increasing")]
    BadBounds { min: f64, max: f64 },
}

/// Uniform grid of `n` points spanning `[min, max]` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec1D {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl GridSpec1D {
    pub fn new(min: f64, max: f64, n: usize) -> Result<Self, GridError> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(GridError::BadBounds { min, max });
        }
        if n < 2 {
            return Err(GridError::TooFewPoints(n));
        }
        Ok(Self { min, max, n })
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.n - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        self.min + self.step() * i as f64
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.point(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.min && x <= self.max
    }

    /// Grid with the same point count spanning `[-b, b]` where
    /// `b = max(|min|, |max|)`. Used as the default momentum-space mirror.
    pub fn symmetric_mirror(&self) -> Self {
        let b = self.min.abs().max(self.max.abs());
        Self {
            min: -b,
            max: b,
            n: self.n,
        }
    }
}

/// Trapezoidal integral of uniformly sampled values.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let interior: f64 = values[1..values.len() - 1].iter().sum();
    step * (interior + 0.5 * (values[0] + values[values.len() - 1]))
}

pub fn trapezoid_complex(values: &[C64], step: f64) -> C64 {
    if values.len() < 2 {
        return C64::new(0.0, 0.0);
    }
    let mut acc = 0.5 * (values[0] + values[values.len() - 1]);
    for v in &values[1..values.len() - 1] {
        acc += v;
    }
    acc * step
}

/// L2 inner product `<a|b> = integral conj(a) b dx` by the trapezoidal rule.
pub fn inner_product(a: &[C64], b: &[C64], step: f64) -> C64 {
    assert_eq!(a.len(), b.len(), "inner_product: length mismatch");
    let products: Vec<C64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).collect();
    trapezoid_complex(&products, step)
}

/// Four-point Lagrange weights for the normalized offset `t` in `[0, 1]`
/// between the two central stencil nodes.
pub(crate) fn cubic_stencil_weights(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

/// Base index of the 4-point stencil for offset `s = (x - min)/h`, shifted
/// inward at the boundaries so all four nodes stay on the grid (requires
/// n >= 4).
pub(crate) fn cubic_stencil_indices(n: usize, s: f64) -> (usize, f64) {
    let i1 = (s.floor() as isize).clamp(1, n as isize - 3) as usize;
    (i1, s - i1 as f64)
}

/// Cubic (four-point Lagrange) interpolation of gridded samples at `x`;
/// zero outside the grid.
pub fn interp_cubic(grid: &GridSpec1D, values: &[f64], x: f64) -> f64 {
    debug_assert_eq!(values.len(), grid.n);
    debug_assert!(grid.n >= 4);
    if !grid.contains(x) {
        return 0.0;
    }
    let (i1, t) = cubic_stencil_indices(grid.n, (x - grid.min) / grid.step());
    let w = cubic_stencil_weights(t);
    w[0] * values[i1 - 1] + w[1] * values[i1] + w[2] * values[i1 + 1] + w[3] * values[i1 + 2]
}

pub fn interp_cubic_complex(grid: &GridSpec1D, values: &[C64], x: f64) -> C64 {
    debug_assert_eq!(values.len(), grid.n);
    debug_assert!(grid.n >= 4);
    if !grid.contains(x) {
        return C64::new(0.0, 0.0);
    }
    let (i1, t) = cubic_stencil_indices(grid.n, (x - grid.min) / grid.step());
    let w = cubic_stencil_weights(t);
    values[i1 - 1] * w[0] + values[i1] * w[1] + values[i1 + 1] * w[2] + values[i1 + 2] * w[3]
}

/// Values of the L2-normalized Hermite functions
/// `h_n(x) = H_n(x) e^{-x^2/2} / sqrt(2^n n! sqrt(pi))` for `n = 0..=n_max`,
/// computed with the stable three-term recurrence.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n_max + 1);
    let h0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(h0);
    if n_max == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * h0);
    for n in 2..=n_max {
        let nf = n as f64;
        let next = x * (2.0 / nf).sqrt() * out[n - 1] - ((nf - 1.0) / nf).sqrt() * out[n - 2];
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_hit_endpoints() {
        let g = GridSpec1D::new(-1.0, 1.0, 5).unwrap();
        let pts = g.points();
        assert_eq!(pts.len(), 5);
        assert_eq!(pts[0], -1.0);
        assert_eq!(pts[4], 1.0);
        assert!((g.step() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(GridSpec1D::new(1.0, -1.0, 10).is_err());
        assert!(GridSpec1D::new(0.0, 1.0, 1).is_err());
        assert!(GridSpec1D::new(f64::NAN, 1.0, 10).is_err());
    }

    #[test]
    fn trapezoid_integrates_gaussian() {
        let g = GridSpec1D::new(-8.0, 8.0, 513).unwrap();
        let vals: Vec<f64> = g.points().iter().map(|x| (-x * x).exp()).collect();
        let integral = trapezoid(&vals, g.step());
        assert!((integral - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cubic_interp_reproduces_cubic_polynomials() {
        let g = GridSpec1D::new(0.0, 4.0, 9).unwrap();
        let f = |x: f64| 2.0 - x + 0.5 * x * x - 0.125 * x * x * x;
        let vals: Vec<f64> = g.points().iter().map(|&x| f(x)).collect();
        for &x in &[0.7, 1.3, 2.25, 3.9] {
            assert!(
                (interp_cubic(&g, &vals, x) - f(x)).abs() < 1e-13,
                "cubic interp not exact at {x}"
            );
        }
        assert_eq!(interp_cubic(&g, &vals, 4.5), 0.0);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let g = GridSpec1D::new(-10.0, 10.0, 1001).unwrap();
        let table: Vec<Vec<f64>> = g
            .points()
            .iter()
            .map(|&x| hermite_functions(6, x))
            .collect();
        for n in 0..=6 {
            for k in 0..=6 {
                let prod: Vec<f64> = table.iter().map(|row| row[n] * row[k]).collect();
                let overlap = trapezoid(&prod, g.step());
                let expected = if n == k { 1.0 } else { 0.0 };
                assert!(
                    (overlap - expected).abs() < 1e-10,
                    "<h_{n}|h_{k}> = {overlap}"
                );
            }
        }
    }
}
