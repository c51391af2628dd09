//! Oscillator states built from the epsilon trajectory, their overlaps
//! (Franck-Condon factors), and the Gaussian tomogram of the ground-like
//! state.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::{EpsilonTrajectory, ParoscError, FC_TRUNC_TOL, N_MAX_STATE};
use crate::cv_tomography::WaveFunction;
use crate::grid::{hermite_functions, trapezoid, GridSpec1D};

/// Norm tolerance for states built by iterated grid operators.
const FOCK_NORM_TOL: f64 = 1e-6;

/// Spectral derivative of periodically extendable samples; accurate for
/// amplitudes that decay below round-off at the grid boundary.
fn spectral_derivative(grid: &GridSpec1D, values: &[C64]) -> Vec<C64> {
    let n = grid.n;
    let period = grid.step() * n as f64;
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (j, z) in buf.iter_mut().enumerate() {
        let f = if 2 * j < n {
            j as f64
        } else if 2 * j == n {
            0.0 // drop the unpaired Nyquist mode
        } else {
            j as f64 - n as f64
        };
        let k = 2.0 * std::f64::consts::PI * f / period;
        *z *= C64::new(0.0, k);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.into_iter().map(|z| z * scale).collect()
}

/// Ground-like state
/// `psi_0(x,t) = pi^{-1/4} eps^{-1/2} exp(i eps' x^2 / (2 eps))`,
/// annihilated by the lowering integral of motion.
///
/// The branch of `eps^{-1/2}` is taken from the trajectory's continuously
/// unwound phase, never from the principal branch pointwise, so the state
/// stays phase-coherent along the evolution.
pub fn ground_state(
    traj: &EpsilonTrajectory,
    t: f64,
    grid: GridSpec1D,
    quad_tol: f64,
) -> Result<WaveFunction, ParoscError> {
    let (eps, eps_dot, phase) = traj.sample(t)?;
    let prefactor = std::f64::consts::PI.powf(-0.25) / eps.norm().sqrt();
    let root_phase = C64::from_polar(1.0, -0.5 * phase);
    let exponent_rate = C64::new(0.0, 0.5) * eps_dot / eps;
    let amplitudes = grid
        .points()
        .iter()
        .map(|&x| root_phase * prefactor * (exponent_rate * (x * x)).exp())
        .collect();
    Ok(WaveFunction::new(grid, amplitudes, quad_tol)?)
}

/// `|| A(t) psi ||` with the lowering integral of motion applied as a grid
/// operator, `A = (i/sqrt 2)(eps p - eps' q)`, `p = -i d/dx`. Vanishes on
/// the ground-like state.
pub fn annihilation_residual(
    traj: &EpsilonTrajectory,
    t: f64,
    psi: &WaveFunction,
) -> Result<f64, ParoscError> {
    let (eps, eps_dot, _) = traj.sample(t)?;
    let derivative = spectral_derivative(psi.grid(), psi.amplitudes());
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let density: Vec<f64> = psi
        .grid()
        .points()
        .iter()
        .zip(psi.amplitudes().iter().zip(&derivative))
        .map(|(&x, (amp, d))| {
            let lowered = eps * d * inv_sqrt2 - C64::new(0.0, inv_sqrt2) * eps_dot * x * amp;
            lowered.norm_sqr()
        })
        .collect();
    Ok(trapezoid(&density, psi.grid().step()).sqrt())
}

/// Zeroes all spectral modes with |k| above `k_cut`.
fn band_limit(grid: &GridSpec1D, values: &mut [C64], k_cut: f64) {
    let n = grid.n;
    let period = grid.step() * n as f64;
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(values);
    for (j, z) in values.iter_mut().enumerate() {
        let f = if 2 * j <= n {
            j as f64
        } else {
            j as f64 - n as f64
        };
        let k = 2.0 * std::f64::consts::PI * f / period;
        if k.abs() > k_cut {
            *z = C64::new(0.0, 0.0);
        }
    }
    planner.plan_fft_inverse(n).process(values);
    let scale = 1.0 / n as f64;
    values.iter_mut().for_each(|z| *z *= scale);
}

/// Fock state built by `n` iterated applications of the raising integral of
/// motion to the ground-like state, `psi_n = (A^dagger)^n psi_0 / sqrt(n!)`,
/// with the momentum operator realized as a spectral derivative.
///
/// The quadratic chirp `exp(i x^2 Re(eps'/eps)/2)` of the evolving states is
/// factored out first and the operator is applied to the slowly varying
/// envelope. Without this the repeated derivative amplifies round-off in
/// the empty top of the spectral band by roughly `k_max / sqrt(2k)` per
/// application and the norm check starts failing near n = 6. The envelope
/// is re-band-limited after each application to the bandwidth a
/// Hermite-like state of the current order can occupy.
///
/// Capped at [`N_MAX_STATE`]; higher orders accumulate differentiation error
/// faster than the norm check tolerates on default grids.
pub fn fock_state(
    traj: &EpsilonTrajectory,
    n: usize,
    t: f64,
    grid: GridSpec1D,
    quad_tol: f64,
) -> Result<WaveFunction, ParoscError> {
    if n > N_MAX_STATE {
        return Err(ParoscError::FockIndexTooLarge {
            n,
            max: N_MAX_STATE,
        });
    }
    let (eps, eps_dot, _) = traj.sample(t)?;
    let width = eps.norm();
    let chirp_rate = 0.5 * (eps_dot / eps).re;
    let psi0 = ground_state(traj, t, grid, quad_tol)?;
    let xs = grid.points();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    // raising operator in the envelope representation psi = exp(i b x^2) chi:
    // A^dagger -> c_d d/dx + c_x x
    let c_d = -eps.conj() * inv_sqrt2;
    let c_x = C64::new(0.0, inv_sqrt2) * (eps_dot.conj() - 2.0 * chirp_rate * eps.conj());
    let mut envelope: Vec<C64> = xs
        .iter()
        .zip(psi0.amplitudes())
        .map(|(&x, amp)| amp * C64::from_polar(1.0, -chirp_rate * x * x))
        .collect();
    for k in 0..n {
        let derivative = spectral_derivative(&grid, &envelope);
        let scale = 1.0 / ((k + 1) as f64).sqrt();
        envelope = xs
            .iter()
            .zip(envelope.iter().zip(&derivative))
            .map(|(&x, (amp, d))| (c_d * d + c_x * x * amp) * scale)
            .collect();
        // classical momentum radius of the new order plus the absolute
        // Gaussian-tail margin, all scaled by the envelope width
        let k_cut = ((2.0 * (k + 1) as f64 + 1.0).sqrt() + 6.0) / width;
        band_limit(&grid, &mut envelope, k_cut);
    }
    let amps: Vec<C64> = xs
        .iter()
        .zip(&envelope)
        .map(|(&x, chi)| chi * C64::from_polar(1.0, chirp_rate * x * x))
        .collect();
    let density: Vec<f64> = amps.iter().map(|z| z.norm_sqr()).collect();
    let residual = (trapezoid(&density, grid.step()) - 1.0).abs();
    if residual > FOCK_NORM_TOL {
        return Err(ParoscError::GridResolution { residual });
    }
    Ok(WaveFunction::new(grid, amps, FOCK_NORM_TOL.max(quad_tol))?)
}

/// Closed-form Fock state
/// `psi_n(x,t) = |eps|^{-1/2} h_n(x/|eps|) exp(-i (n + 1/2) phi)
///  exp(i x^2 Re(eps'/eps) / 2)`
/// with `h_n` the normalized Hermite functions and `phi` the unwound phase
/// of `eps`. Independent of the operator route in [`fock_state`] and
/// cross-checked against it in the tests.
pub fn fock_state_analytic(
    traj: &EpsilonTrajectory,
    n: usize,
    t: f64,
    grid: GridSpec1D,
    quad_tol: f64,
) -> Result<WaveFunction, ParoscError> {
    let (eps, eps_dot, phase) = traj.sample(t)?;
    let width = eps.norm();
    let chirp = 0.5 * (eps_dot / eps).re;
    let global = C64::from_polar(1.0, -(n as f64 + 0.5) * phase) / width.sqrt();
    let amplitudes = grid
        .points()
        .iter()
        .map(|&x| {
            let envelope = hermite_functions(n, x / width)[n];
            global * envelope * C64::from_polar(1.0, chirp * x * x)
        })
        .collect();
    Ok(WaveFunction::new(grid, amplitudes, quad_tol)?)
}

/// Franck-Condon factors `P_m(n,t) = |<m,0|n,t>|^2` for `n = 0..=n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct FranckCondonTable {
    pub m: usize,
    pub t: f64,
    probs: Vec<f64>,
    truncation_mass: f64,
}

impl FranckCondonTable {
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// Total captured probability; within [`FC_TRUNC_TOL`] of one when the
    /// truncation order is adequate.
    pub fn truncation_mass(&self) -> f64 {
        self.truncation_mass
    }

    /// CSV rows `m,n,t,P` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,t,P\n");
        for (n, p) in self.probs.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", self.m, n, self.t, p));
        }
        out
    }
}

/// Overlap probabilities between the initial `m`-th eigenstate and the
/// evolved Fock states, by grid quadrature on `grid`.
///
/// The evolved states are evaluated in closed form (the route validated
/// against the operator construction), which stays stable up to the default
/// truncation order `n_max = 64`.
pub fn franck_condon(
    traj: &EpsilonTrajectory,
    m: usize,
    t: f64,
    n_max: usize,
    grid: GridSpec1D,
) -> Result<FranckCondonTable, ParoscError> {
    if m > N_MAX_STATE {
        return Err(ParoscError::FockIndexTooLarge {
            n: m,
            max: N_MAX_STATE,
        });
    }
    let (eps, eps_dot, _) = traj.sample(t)?;
    let width = eps.norm();
    let chirp = 0.5 * (eps_dot / eps).re;
    let h = grid.step();

    // overlap_n = integral h_m(x) conj-free * psi_n(x,t) dx; the initial
    // state is real, and the n-dependent unit phase drops out of |.|^2.
    let mut overlaps = vec![C64::new(0.0, 0.0); n_max + 1];
    let prefactor = 1.0 / width.sqrt();
    for (i, &x) in grid.points().iter().enumerate() {
        let weight = if i == 0 || i == grid.n - 1 { 0.5 } else { 1.0 };
        let initial = hermite_functions(m, x)[m];
        let base = C64::from_polar(1.0, chirp * x * x) * (initial * weight * h * prefactor);
        let evolved = hermite_functions(n_max, x / width);
        for (overlap, env) in overlaps.iter_mut().zip(&evolved) {
            *overlap += base * *env;
        }
    }
    let probs: Vec<f64> = overlaps.iter().map(|z| z.norm_sqr()).collect();
    let truncation_mass: f64 = probs.iter().sum();
    if !(1.0 - FC_TRUNC_TOL..=1.0 + FC_TRUNC_TOL).contains(&truncation_mass) {
        return Err(ParoscError::Truncation {
            mass: truncation_mass,
            tol: FC_TRUNC_TOL,
        });
    }
    Ok(FranckCondonTable {
        m,
        t,
        probs,
        truncation_mass,
    })
}

/// Parameters of the (exactly Gaussian) symplectic tomogram of the
/// ground-like state: zero mean and variance
/// `sigma^2 = |eps|^2 mu^2 / 2 + |eps'|^2 nu^2 / 2 + mu nu Re(eps' conj(eps))`.
///
/// The cross term is signed; the Wronskian identity
/// `|eps' conj(eps)|^2 - 1 = (Re eps' conj(eps))^2` ties its magnitude to
/// the absolute-value form.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianTomogram {
    pub mu: f64,
    pub nu: f64,
    pub mean: f64,
    pub variance: f64,
}

impl GaussianTomogram {
    pub fn density(&self, x: f64) -> f64 {
        let d = x - self.mean;
        (-d * d / (2.0 * self.variance)).exp()
            / (2.0 * std::f64::consts::PI * self.variance).sqrt()
    }
}

pub fn gaussian_tomogram(
    traj: &EpsilonTrajectory,
    t: f64,
    mu: f64,
    nu: f64,
) -> Result<GaussianTomogram, ParoscError> {
    if mu == 0.0 && nu == 0.0 {
        return Err(ParoscError::Cv(
            crate::cv_tomography::CvError::InvalidParameters { mu, nu },
        ));
    }
    let (eps, eps_dot, _) = traj.sample(t)?;
    let cross = (eps_dot * eps.conj()).re;
    let variance =
        0.5 * eps.norm_sqr() * mu * mu + 0.5 * eps_dot.norm_sqr() * nu * nu + mu * nu * cross;
    Ok(GaussianTomogram {
        mu,
        nu,
        mean: 0.0,
        variance,
    })
}
