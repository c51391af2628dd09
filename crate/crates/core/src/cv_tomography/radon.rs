//! Radon transform of a Wigner function and the filtered back-projection
//! that inverts it.
//!
//! The tomogram-to-Wigner reconstruction integral is reduced to standard
//! filtered back-projection over the optical circle `mu = cos(theta)`,
//! `nu = sin(theta)`: the homogeneity property
//! `w(X|lambda mu, lambda nu) = w(X/lambda|mu, nu)/|lambda|` collapses the
//! `(mu, nu)` plane onto the unit circle, and the remaining angular integral
//! is the classical inverse Radon transform of `W/2pi`.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::{CvConfig, CvError, PhaseSpaceGrid, SymplecticTomogram, WaveFunction};
use super::optical_tomogram;
use crate::grid::{interp_cubic, GridSpec1D};

/// Line-integral marginal of a Wigner function:
/// `w(X|mu,nu) = (1/2 pi) integral W(q,p) delta(X - mu q - nu p) dq dp`,
/// evaluated by sampling W along the line with bicubic interpolation.
pub fn radon_tomogram_from_wigner(
    w: &PhaseSpaceGrid,
    mu: f64,
    nu: f64,
    x_grid: GridSpec1D,
    cfg: &CvConfig,
) -> Result<SymplecticTomogram, CvError> {
    let lambda = mu.hypot(nu);
    if !(lambda.is_finite() && lambda > cfg.nu_eps) {
        return Err(CvError::InvalidParameters { mu, nu });
    }
    let e = (mu / lambda, nu / lambda);
    let perp = (-e.1, e.0);
    let h_t = 0.5 * w.q_grid().step().min(w.p_grid().step());
    let scale = h_t / (2.0 * std::f64::consts::PI * lambda);

    let values: Vec<f64> = x_grid
        .points()
        .iter()
        .map(|&x| {
            let s = x / lambda;
            let center = (s * e.0, s * e.1);
            match clip_line_to_box(center, perp, w.q_grid(), w.p_grid()) {
                None => 0.0,
                Some((t_lo, t_hi)) => {
                    let steps = ((t_hi - t_lo) / h_t).floor() as usize;
                    if steps < 2 {
                        return 0.0;
                    }
                    let mut acc = 0.0;
                    for k in 0..=steps {
                        let t = t_lo + k as f64 * h_t;
                        let weight = if k == 0 || k == steps { 0.5 } else { 1.0 };
                        acc += weight
                            * w.sample(center.0 + t * perp.0, center.1 + t * perp.1);
                    }
                    acc * scale
                }
            }
        })
        .collect();
    SymplecticTomogram::new(mu, nu, x_grid, values, cfg.marginal_tol.max(cfg.quad_tol))
}

/// Intersection of the line `center + t * dir` with the grid bounding box.
fn clip_line_to_box(
    center: (f64, f64),
    dir: (f64, f64),
    q: &GridSpec1D,
    p: &GridSpec1D,
) -> Option<(f64, f64)> {
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for (c, d, lo, hi) in [
        (center.0, dir.0, q.min, q.max),
        (center.1, dir.1, p.min, p.max),
    ] {
        if d.abs() < 1e-300 {
            if c < lo || c > hi {
                return None;
            }
        } else {
            let (a, b) = ((lo - c) / d, (hi - c) / d);
            t_lo = t_lo.max(a.min(b));
            t_hi = t_hi.min(a.max(b));
        }
    }
    (t_lo < t_hi).then_some((t_lo, t_hi))
}

/// Optical tomograms of one state collected over the half circle
/// `theta_k = k pi / n_theta`, `k = 0..n_theta`, all sharing one X grid.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalSinogram {
    x: GridSpec1D,
    /// row k holds `w(X|theta_k)`
    values: Array2<f64>,
}

impl OpticalSinogram {
    /// Builds a sinogram from per-angle tomogram values; rows are the
    /// uniformly spaced angles `k pi / rows`.
    pub fn new(x: GridSpec1D, values: Array2<f64>) -> Self {
        assert_eq!(values.dim().1, x.n, "sinogram row length mismatch");
        Self { x, values }
    }

    pub fn x_grid(&self) -> &GridSpec1D {
        &self.x
    }

    pub fn n_theta(&self) -> usize {
        self.values.dim().0
    }

    pub fn theta(&self, k: usize) -> f64 {
        k as f64 * std::f64::consts::PI / self.n_theta() as f64
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }
}

/// Forward helper: samples the optical tomogram of `psi` at `n_theta`
/// uniform angles on `[0, pi)`.
pub fn optical_sinogram(
    psi: &WaveFunction,
    n_theta: usize,
    x_grid: GridSpec1D,
    cfg: &CvConfig,
) -> Result<OpticalSinogram, CvError> {
    if n_theta < 2 {
        return Err(CvError::InsufficientAngles { n_theta });
    }
    let mut values = Array2::zeros((n_theta, x_grid.n));
    for k in 0..n_theta {
        let theta = k as f64 * std::f64::consts::PI / n_theta as f64;
        let tom = optical_tomogram(psi, theta, x_grid, cfg)?;
        for (i, v) in tom.values().iter().enumerate() {
            values[(k, i)] = *v;
        }
    }
    Ok(OpticalSinogram::new(x_grid, values))
}

/// Reconstructs the Wigner function from optical tomograms by filtered
/// back-projection with the band-limited ramp kernel.
///
/// Requires at least 8 projection angles; a reconstruction whose
/// normalization drifts beyond `recon_norm_tol` is rejected as
/// insufficiently sampled.
pub fn wigner_from_tomogram(
    sino: &OpticalSinogram,
    q_grid: GridSpec1D,
    p_grid: GridSpec1D,
    cfg: &CvConfig,
) -> Result<PhaseSpaceGrid, CvError> {
    let n_theta = sino.n_theta();
    if n_theta < 8 {
        return Err(CvError::InsufficientAngles { n_theta });
    }
    let x = *sino.x_grid();
    let m = x.n;
    let dx = x.step();
    let padded = (2 * m).next_power_of_two();

    // Band-limited ramp (spatial form): zero DC response by construction.
    let mut kernel = vec![C64::new(0.0, 0.0); padded];
    kernel[0] = C64::new(1.0 / (4.0 * dx * dx), 0.0);
    for n in (1..m).step_by(2) {
        let v = -1.0 / (std::f64::consts::PI * std::f64::consts::PI * (n * n) as f64 * dx * dx);
        kernel[n] = C64::new(v, 0.0);
        kernel[padded - n] = C64::new(v, 0.0);
    }
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(padded);
    let ifft = planner.plan_fft_inverse(padded);
    fft.process(&mut kernel);

    // filtered projections g_k = 2 pi dx (w_k * kernel)
    let mut filtered = Array2::zeros((n_theta, m));
    let mut buf = vec![C64::new(0.0, 0.0); padded];
    for k in 0..n_theta {
        buf.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
        for (b, v) in buf.iter_mut().zip(sino.values().row(k)) {
            *b = C64::new(*v, 0.0);
        }
        fft.process(&mut buf);
        for (b, h) in buf.iter_mut().zip(&kernel) {
            *b *= h;
        }
        ifft.process(&mut buf);
        let scale = 2.0 * std::f64::consts::PI * dx / padded as f64;
        for i in 0..m {
            filtered[(k, i)] = buf[i].re * scale;
        }
    }

    // back-projection over theta
    let d_theta = std::f64::consts::PI / n_theta as f64;
    let mut values = Array2::zeros((q_grid.n, p_grid.n));
    let trig: Vec<(f64, f64)> = (0..n_theta)
        .map(|k| {
            let theta = sino.theta(k);
            (theta.cos(), theta.sin())
        })
        .collect();
    for (iq, q) in q_grid.points().iter().enumerate() {
        for (ip, p) in p_grid.points().iter().enumerate() {
            let mut acc = 0.0;
            for (k, (c, s)) in trig.iter().enumerate() {
                let row = filtered.row(k);
                acc += interp_cubic(&x, row.as_slice().unwrap(), q * c + p * s);
            }
            values[(iq, ip)] = acc * d_theta;
        }
    }

    let grid = PhaseSpaceGrid::from_values(q_grid, p_grid, values);
    if grid.norm_residual() > cfg.recon_norm_tol {
        return Err(CvError::NotNormalized {
            residual: grid.norm_residual(),
        });
    }
    Ok(grid)
}
