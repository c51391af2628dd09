//! Continuous-variable machinery on finite grids: Wigner functions from wave
//! functions, symplectic and optical tomograms, density-kernel reconstruction
//! and the inverse Radon transform.
//!
//! Units are dimensionless (hbar = m = 1). The symplectic tomogram
//! `w(X|mu, nu)` is the distribution of the observable `mu*q + nu*p`; the
//! optical tomogram is its slice along `mu = cos(theta)`, `nu = sin(theta)`.
//! Every produced tomogram is checked for nonnegativity and normalization;
//! a grid too coarse or too short to hold the state fails those checks and
//! surfaces as a diagnostic instead of silent garbage.

mod radon;
mod tomogram;
mod wigner;

pub use radon::{optical_sinogram, radon_tomogram_from_wigner, wigner_from_tomogram, OpticalSinogram};
pub use tomogram::{optical_tomogram, symplectic_tomogram_pure, suggested_tomogram_grid};
pub use wigner::{density_kernel_from_wigner, wigner_from_psi, DensityKernel};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{interp_cubic_complex, trapezoid, GridError, GridSpec1D};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum CvError {
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("amplitude array length {got} does not match grid size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite amplitude at index {0}")]
    NonFinite(usize),
    #[error("state norm differs from one by {residual:e}; grid too coarse or too short")]
    NotNormalized { residual: f64 },
    #[error("tomogram value {value:e} at X = {x} below the nonnegativity tolerance")]
    NegativeValue { x: f64, value: f64 },
    #[error("both mu = {mu} and nu = {nu} are numerically zero")]
    InvalidParameters { mu: f64, nu: f64 },
    #[error("angle theta = {0} outside [0, 2*pi)")]
    AngleOutOfRange(f64),
    #[error("momentum grid extent insufficient: boundary magnitude {boundary:e} of max {max:e}")]
    MomentumRangeTooSmall { boundary: f64, max: f64 },
    #[error("insufficient angular sampling: {n_theta} projection angles")]
    InsufficientAngles { n_theta: usize },
}

/// Numerical-accuracy knobs for the continuous-variable operations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CvConfig {
    /// Tolerance on quadrature-based normalization checks.
    pub quad_tol: f64,
    /// Below this |nu| the tomogram switches to the exact delta-function
    /// limit `w(X|mu, 0) = |psi(X/mu)|^2 / |mu|`.
    pub nu_eps: f64,
    /// Tolerance for marginals computed from gridded Wigner functions;
    /// matches the sup-norm accuracy class of that route, which is coarser
    /// than direct quadrature of the wave function.
    pub marginal_tol: f64,
    /// Accepted normalization drift for filtered back-projection output;
    /// larger drift indicates insufficient angular sampling.
    pub recon_norm_tol: f64,
}

impl Default for CvConfig {
    fn default() -> Self {
        Self {
            quad_tol: 1e-6,
            nu_eps: 1e-6,
            marginal_tol: 1e-4,
            recon_norm_tol: 1e-2,
        }
    }
}

impl CvConfig {
    /// Default position grid: resolves Hermite states through n = 6 with
    /// tails below 1e-8.
    pub fn default_x_grid() -> GridSpec1D {
        GridSpec1D {
            min: -8.0,
            max: 8.0,
            n: 512,
        }
    }

    /// Default phase-space grid, 256 x 256 over [-6, 6]^2.
    pub fn default_phase_grids() -> (GridSpec1D, GridSpec1D) {
        let g = GridSpec1D {
            min: -6.0,
            max: 6.0,
            n: 256,
        };
        (g, g)
    }

    pub const DEFAULT_N_THETA: usize = 180;
}

/// Complex amplitudes on a uniform position grid with unit L2 norm under
/// trapezoidal quadrature.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    grid: GridSpec1D,
    amplitudes: Vec<C64>,
}

impl WaveFunction {
    pub fn new(grid: GridSpec1D, amplitudes: Vec<C64>, quad_tol: f64) -> Result<Self, CvError> {
        if amplitudes.len() != grid.n {
            return Err(CvError::LengthMismatch {
                expected: grid.n,
                got: amplitudes.len(),
            });
        }
        if let Some(i) = amplitudes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CvError::NonFinite(i));
        }
        let wf = Self { grid, amplitudes };
        let residual = (wf.norm_sq() - 1.0).abs();
        if residual > quad_tol {
            return Err(CvError::NotNormalized { residual });
        }
        Ok(wf)
    }

    /// Samples `f` on the grid and rescales to unit L2 norm.
    pub fn from_fn_normalized(
        grid: GridSpec1D,
        f: impl Fn(f64) -> C64,
    ) -> Result<Self, CvError> {
        let amplitudes: Vec<C64> = grid.points().iter().map(|&x| f(x)).collect();
        if let Some(i) = amplitudes.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(CvError::NonFinite(i));
        }
        let probe = Self {
            grid,
            amplitudes,
        };
        let n = probe.norm_sq();
        if !(n.is_finite() && n > 0.0) {
            return Err(CvError::NotNormalized { residual: 1.0 });
        }
        let scale = 1.0 / n.sqrt();
        let amplitudes = probe.amplitudes.into_iter().map(|z| z * scale).collect();
        Ok(Self { grid, amplitudes })
    }

    /// Oscillator ground state `pi^{-1/4} exp(-x^2/2)`.
    pub fn ground(grid: GridSpec1D) -> Self {
        let norm = std::f64::consts::PI.powf(-0.25);
        let amplitudes = grid
            .points()
            .iter()
            .map(|&x| C64::new(norm * (-0.5 * x * x).exp(), 0.0))
            .collect();
        Self { grid, amplitudes }
    }

    /// n-th Hermite eigenfunction of the static oscillator.
    pub fn hermite(n: usize, grid: GridSpec1D) -> Self {
        let amplitudes = grid
            .points()
            .iter()
            .map(|&x| C64::new(crate::grid::hermite_functions(n, x)[n], 0.0))
            .collect();
        Self { grid, amplitudes }
    }

    /// Ground state displaced in position by `a`.
    pub fn displaced_ground(a: f64, grid: GridSpec1D) -> Self {
        let norm = std::f64::consts::PI.powf(-0.25);
        let amplitudes = grid
            .points()
            .iter()
            .map(|&x| C64::new(norm * (-0.5 * (x - a) * (x - a)).exp(), 0.0))
            .collect();
        Self { grid, amplitudes }
    }

    pub fn grid(&self) -> &GridSpec1D {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        let density: Vec<f64> = self.amplitudes.iter().map(|z| z.norm_sqr()).collect();
        trapezoid(&density, self.grid.step())
    }

    /// Cubic interpolation of the amplitudes at `x`; zero outside the grid.
    pub fn sample(&self, x: f64) -> C64 {
        interp_cubic_complex(&self.grid, &self.amplitudes, x)
    }

    /// Momentum-space wave function
    /// `psi_hat(p) = (2 pi)^{-1/2} integral psi(y) exp(-i p y) dy`
    /// on the given grid. Fails the normalization check if the grid does not
    /// cover the momentum support of the state.
    pub fn momentum_representation(
        &self,
        p_grid: GridSpec1D,
        quad_tol: f64,
    ) -> Result<Self, CvError> {
        let ys = self.grid.points();
        let h = self.grid.step();
        let scale = h / (2.0 * std::f64::consts::PI).sqrt();
        let amplitudes: Vec<C64> = p_grid
            .points()
            .iter()
            .map(|&p| {
                // incremental phase: exp(-i p y_k), y_k = y_0 + k h
                let step = C64::from_polar(1.0, -p * h);
                let mut phase = C64::from_polar(1.0, -p * ys[0]);
                let mut acc = C64::new(0.0, 0.0);
                for (k, amp) in self.amplitudes.iter().enumerate() {
                    let weight = if k == 0 || k == self.amplitudes.len() - 1 {
                        0.5
                    } else {
                        1.0
                    };
                    acc += amp * phase * weight;
                    phase *= step;
                }
                acc * scale
            })
            .collect();
        Self::new(p_grid, amplitudes, quad_tol)
    }
}

/// JSON form of a wave function:
/// `{"x_min": a, "x_max": b, "n": N, "re": [..], "im": [..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveFunctionJson {
    pub x_min: f64,
    pub x_max: f64,
    pub n: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl WaveFunctionJson {
    pub fn from_wavefunction(psi: &WaveFunction) -> Self {
        Self {
            x_min: psi.grid().min,
            x_max: psi.grid().max,
            n: psi.grid().n,
            re: psi.amplitudes().iter().map(|z| z.re).collect(),
            im: psi.amplitudes().iter().map(|z| z.im).collect(),
        }
    }

    pub fn to_wavefunction(&self, quad_tol: f64) -> Result<WaveFunction, CvError> {
        let grid = GridSpec1D::new(self.x_min, self.x_max, self.n)?;
        if self.re.len() != self.n || self.im.len() != self.n {
            return Err(CvError::LengthMismatch {
                expected: self.n,
                got: self.re.len().min(self.im.len()),
            });
        }
        let amplitudes = self
            .re
            .iter()
            .zip(&self.im)
            .map(|(&re, &im)| C64::new(re, im))
            .collect();
        WaveFunction::new(grid, amplitudes, quad_tol)
    }
}

/// Real-valued function on a phase-space grid; `values[(iq, ip)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpaceGrid {
    q: GridSpec1D,
    p: GridSpec1D,
    values: Array2<f64>,
    norm_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct WignerMetadata {
    pub q: GridSpec1D,
    pub p: GridSpec1D,
    pub norm_residual: f64,
}

impl PhaseSpaceGrid {
    pub(crate) fn from_values(q: GridSpec1D, p: GridSpec1D, values: Array2<f64>) -> Self {
        assert_eq!(values.dim(), (q.n, p.n));
        let mut grid = Self {
            q,
            p,
            values,
            norm_residual: 0.0,
        };
        grid.norm_residual = (grid.normalization() - 1.0).abs();
        grid
    }

    pub fn q_grid(&self) -> &GridSpec1D {
        &self.q
    }

    pub fn p_grid(&self) -> &GridSpec1D {
        &self.p
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn value(&self, iq: usize, ip: usize) -> f64 {
        self.values[(iq, ip)]
    }

    /// `(1/2 pi) * integral W dq dp` by the 2-D trapezoidal rule; equals one
    /// for the Wigner function of a normalized state.
    pub fn normalization(&self) -> f64 {
        let (nq, np) = self.values.dim();
        let mut acc = 0.0;
        for iq in 0..nq {
            let wq = if iq == 0 || iq == nq - 1 { 0.5 } else { 1.0 };
            for ip in 0..np {
                let wp = if ip == 0 || ip == np - 1 { 0.5 } else { 1.0 };
                acc += wq * wp * self.values[(iq, ip)];
            }
        }
        acc * self.q.step() * self.p.step() / (2.0 * std::f64::consts::PI)
    }

    pub fn norm_residual(&self) -> f64 {
        self.norm_residual
    }

    /// Bicubic interpolation at `(q, p)`; zero outside the grid.
    pub fn sample(&self, q: f64, p: f64) -> f64 {
        if !self.q.contains(q) || !self.p.contains(p) {
            return 0.0;
        }
        interp_bicubic(&self.q, &self.p, &self.values, q, p)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// CSV rows `q,p,value` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,p,value\n");
        for (iq, q) in self.q.points().iter().enumerate() {
            for (ip, p) in self.p.points().iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", q, p, self.values[(iq, ip)]));
            }
        }
        out
    }

    pub fn metadata(&self) -> WignerMetadata {
        WignerMetadata {
            q: self.q,
            p: self.p,
            norm_residual: self.norm_residual,
        }
    }
}

/// Separable bicubic interpolation on a 2-D grid: cubic along p for the four
/// q-stencil rows, then cubic across the results.
pub(crate) fn interp_bicubic(
    q_grid: &GridSpec1D,
    p_grid: &GridSpec1D,
    values: &Array2<f64>,
    q: f64,
    p: f64,
) -> f64 {
    let (iq, tq) = crate::grid::cubic_stencil_indices(q_grid.n, (q - q_grid.min) / q_grid.step());
    let (ip, tp) = crate::grid::cubic_stencil_indices(p_grid.n, (p - p_grid.min) / p_grid.step());
    let wq = crate::grid::cubic_stencil_weights(tq);
    let wp = crate::grid::cubic_stencil_weights(tp);
    let mut acc = 0.0;
    for (dq, wqv) in wq.iter().enumerate() {
        let row = iq - 1 + dq;
        let mut along_p = 0.0;
        for (dp, wpv) in wp.iter().enumerate() {
            along_p += wpv * values[(row, ip - 1 + dp)];
        }
        acc += wqv * along_p;
    }
    acc
}

/// Tomographic distribution of `mu*q + nu*p` on an X grid, nonnegative and
/// normalized within the quadrature tolerance used at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTomogram {
    pub mu: f64,
    pub nu: f64,
    x: GridSpec1D,
    values: Vec<f64>,
    norm_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct TomogramMetadata {
    pub mu: f64,
    pub nu: f64,
    pub x: GridSpec1D,
    pub norm_residual: f64,
}

impl SymplecticTomogram {
    pub fn new(
        mu: f64,
        nu: f64,
        x: GridSpec1D,
        values: Vec<f64>,
        quad_tol: f64,
    ) -> Result<Self, CvError> {
        assert_eq!(values.len(), x.n);
        if let Some(i) = values.iter().position(|v| *v < -quad_tol) {
            return Err(CvError::NegativeValue {
                x: x.point(i),
                value: values[i],
            });
        }
        let norm_residual = (trapezoid(&values, x.step()) - 1.0).abs();
        if norm_residual > quad_tol {
            return Err(CvError::NotNormalized {
                residual: norm_residual,
            });
        }
        Ok(Self {
            mu,
            nu,
            x,
            values,
            norm_residual,
        })
    }

    pub fn x_grid(&self) -> &GridSpec1D {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn norm_residual(&self) -> f64 {
        self.norm_residual
    }

    /// Mean of X under the tomogram.
    pub fn mean(&self) -> f64 {
        let weighted: Vec<f64> = self
            .values
            .iter()
            .zip(self.x.points())
            .map(|(w, x)| w * x)
            .collect();
        trapezoid(&weighted, self.x.step())
    }

    /// Variance of X under the tomogram.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let weighted: Vec<f64> = self
            .values
            .iter()
            .zip(self.x.points())
            .map(|(w, x)| w * (x - mean) * (x - mean))
            .collect();
        trapezoid(&weighted, self.x.step())
    }

    /// Sup-norm distance to another tomogram on the same grid.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.x, other.x, "tomograms live on different grids");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// CSV rows `X,value` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("X,value\n");
        for (x, v) in self.x.points().iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", x, v));
        }
        out
    }

    pub fn metadata(&self) -> TomogramMetadata {
        TomogramMetadata {
            mu: self.mu,
            nu: self.nu,
            x: self.x,
            norm_residual: self.norm_residual,
        }
    }
}
