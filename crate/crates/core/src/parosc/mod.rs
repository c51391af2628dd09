//! Parametric oscillator evolution through the linear integrals of motion.
//!
//! The complex trajectory `eps(t)` solves `eps'' + omega(t)^2 eps = 0` with
//! `eps(0) = 1`, `eps'(0) = i`. Its Wronskian
//! `eps' conj(eps) - conj(eps') eps = 2i` is the commutator of the lowering
//! and raising integrals of motion and is conserved exactly; trajectory
//! integration treats it as the primary accuracy gauge on top of local error
//! control. Everything downstream (ground-like states, Fock states,
//! Franck-Condon factors, the Gaussian tomogram) is built from `eps` and
//! `eps'`.

mod states;

pub use states::{
    annihilation_residual, fock_state, fock_state_analytic, franck_condon, gaussian_tomogram,
    ground_state, FranckCondonTable, GaussianTomogram,
};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cv_tomography::CvError;
use crate::grid::GridSpec1D;

/// Conservation tolerance for the Wronskian invariant.
pub const WRONSKIAN_TOL: f64 = 1e-9;
/// Acceptable Franck-Condon truncation-mass deficit.
pub const FC_TRUNC_TOL: f64 = 1e-6;
/// Highest Fock index built by iterated operator application.
pub const N_MAX_STATE: usize = 12;
/// Default Franck-Condon truncation order.
pub const DEFAULT_FC_NMAX: usize = 64;

/// Default position grid for oscillator states.
pub fn default_state_grid() -> GridSpec1D {
    GridSpec1D {
        min: -10.0,
        max: 10.0,
        n: 1024,
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ParoscError {
    #[error("frequency profile invalid: {0}")]
    BadProfile(String),
    #[error("time {t} outside the trajectory range [0, {t_max}]")]
    TimeOutOfRange { t: f64, t_max: f64 },
    #[error("step size underflow at t = {t}; local error or Wronskian drift not controllable")]
    StepSizeRejection { t: f64 },
    #[error("phase unwinding failed near t = {t}: node spacing too coarse for branch tracking")]
    BranchTracking { t: f64 },
    #[error("Wronskian residual {residual:e} exceeds tolerance")]
    WronskianDrift { residual: f64 },
    #[error("Fock index {n} exceeds the operator-construction cap {max}")]
    FockIndexTooLarge { n: usize, max: usize },
    #[error("Fock state norm residual {residual:e}: grid too coarse for the differentiation order")]
    GridResolution { residual: f64 },
    #[error("truncation mass {mass} below 1 - {tol:e}; increase n_max")]
    Truncation { mass: f64, tol: f64 },
    #[error(transparent)]
    Cv(#[from] CvError),
}

/// Time-dependent oscillator frequency with `omega(0) = 1`.
///
/// `SmoothTabulated` holds samples on a uniform time grid starting at zero
/// and interpolates them cubically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FrequencyProfile {
    Constant,
    SuddenJump { jumps: Vec<Jump> },
    SmoothTabulated { times: Vec<f64>, omegas: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Jump {
    pub t: f64,
    pub omega: f64,
}

impl FrequencyProfile {
    /// Single frequency jump to `omega` at `t = 0+`.
    pub fn jump_at_zero(omega: f64) -> Self {
        Self::SuddenJump {
            jumps: vec![Jump { t: 0.0, omega }],
        }
    }

    pub fn validate(&self) -> Result<(), ParoscError> {
        match self {
            Self::Constant => Ok(()),
            Self::SuddenJump { jumps } => {
                if jumps.is_empty() {
                    return Err(ParoscError::BadProfile("no jumps given".into()));
                }
                let mut prev = -1.0;
                for j in jumps {
                    if !j.t.is_finite() || j.t < 0.0 || j.t <= prev {
                        return Err(ParoscError::BadProfile(format!(
                            "jump times must be nonnegative and strictly increasing, got {}",
                            j.t
                        )));
                    }
                    if !(j.omega.is_finite() && j.omega > 0.0) {
                        return Err(ParoscError::BadProfile(format!(
                            "frequency must stay positive, got {}",
                            j.omega
                        )));
                    }
                    prev = j.t;
                }
                Ok(())
            }
            Self::SmoothTabulated { times, omegas } => {
                if times.len() != omegas.len() {
                    return Err(ParoscError::BadProfile(
                        "times and omegas have different lengths".into(),
                    ));
                }
                if times.len() < 4 {
                    return Err(ParoscError::BadProfile(
                        "need at least 4 samples for cubic interpolation".into(),
                    ));
                }
                if times[0] != 0.0 {
                    return Err(ParoscError::BadProfile("times must start at 0".into()));
                }
                if omegas[0] != 1.0 {
                    return Err(ParoscError::BadProfile(
                        "omega(0) = 1 is required exactly".into(),
                    ));
                }
                let dt = times[1] - times[0];
                if !(dt.is_finite() && dt > 0.0) {
                    return Err(ParoscError::BadProfile("times must increase".into()));
                }
                for k in 1..times.len() {
                    if ((times[k] - times[k - 1]) - dt).abs() > 1e-9 * dt.max(1.0) {
                        return Err(ParoscError::BadProfile(
                            "tabulated times must be uniformly spaced".into(),
                        ));
                    }
                }
                if omegas.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
                    return Err(ParoscError::BadProfile(
                        "frequency must stay positive".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Latest time the profile can be evaluated at (infinite for piecewise
    /// profiles).
    pub fn t_max(&self) -> f64 {
        match self {
            Self::Constant | Self::SuddenJump { .. } => f64::INFINITY,
            Self::SmoothTabulated { times, .. } => *times.last().unwrap(),
        }
    }

    pub fn omega(&self, t: f64) -> f64 {
        match self {
            Self::Constant => 1.0,
            Self::SuddenJump { jumps } => {
                let mut w = 1.0;
                for j in jumps {
                    if t > j.t {
                        w = j.omega;
                    } else {
                        break;
                    }
                }
                w
            }
            Self::SmoothTabulated { times, omegas } => {
                let grid = GridSpec1D {
                    min: times[0],
                    max: *times.last().unwrap(),
                    n: times.len(),
                };
                crate::grid::interp_cubic(&grid, omegas, t.clamp(grid.min, grid.max))
            }
        }
    }

    fn is_piecewise_constant(&self) -> bool {
        matches!(self, Self::Constant | Self::SuddenJump { .. })
    }
}

/// Sampled solution of the classical oscillator equation together with its
/// derivative, the local frequency, and the continuously unwound phase of
/// `eps` used for branch tracking.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonTrajectory {
    times: Vec<f64>,
    eps: Vec<C64>,
    eps_dot: Vec<C64>,
    omega: Vec<f64>,
    phase: Vec<f64>,
}

impl EpsilonTrajectory {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn eps(&self) -> &[C64] {
        &self.eps
    }

    pub fn eps_dot(&self) -> &[C64] {
        &self.eps_dot
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    /// `|eps' conj(eps) - conj(eps') eps - 2i|` at node `i`.
    pub fn wronskian_residual(&self, i: usize) -> f64 {
        wronskian_residual(self.eps[i], self.eps_dot[i])
    }

    pub fn max_wronskian_residual(&self) -> f64 {
        (0..self.times.len())
            .map(|i| self.wronskian_residual(i))
            .fold(0.0, f64::max)
    }

    /// `(eps, eps', unwound phase)` at time `t`. Exact at stored nodes;
    /// cubic Hermite interpolation between them.
    pub fn sample(&self, t: f64) -> Result<(C64, C64, f64), ParoscError> {
        let t_end = self.t_end();
        if !(t.is_finite() && (0.0..=t_end + 1e-12).contains(&t)) {
            return Err(ParoscError::TimeOutOfRange { t, t_max: t_end });
        }
        let dt = self.times[1] - self.times[0];
        let i = ((t / dt).floor() as usize).min(self.times.len() - 2);
        let tau = t - self.times[i];
        if tau.abs() < 1e-14 {
            return Ok((self.eps[i], self.eps_dot[i], self.phase[i]));
        }
        if (tau - dt).abs() < 1e-14 {
            return Ok((self.eps[i + 1], self.eps_dot[i + 1], self.phase[i + 1]));
        }
        let s = tau / dt;
        let (h00, h10, h01, h11) = hermite_basis(s);
        let eps = self.eps[i] * h00
            + self.eps_dot[i] * (h10 * dt)
            + self.eps[i + 1] * h01
            + self.eps_dot[i + 1] * (h11 * dt);
        // second derivative from the equation of motion closes the Hermite
        // data for eps'
        let acc_i = -self.omega[i] * self.omega[i] * self.eps[i];
        let acc_ip = -self.omega[i + 1] * self.omega[i + 1] * self.eps[i + 1];
        let eps_dot = self.eps_dot[i] * h00
            + acc_i * (h10 * dt)
            + self.eps_dot[i + 1] * h01
            + acc_ip * (h11 * dt);
        let phase = self.phase[i] + (eps / self.eps[i]).arg();
        Ok((eps, eps_dot, phase))
    }

    /// CSV rows `t,re_eps,im_eps,re_eps_dot,im_eps_dot,wronskian_residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,re_eps,im_eps,re_eps_dot,im_eps_dot,wronskian_residual\n");
        for i in 0..self.times.len() {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                self.times[i],
                self.eps[i].re,
                self.eps[i].im,
                self.eps_dot[i].re,
                self.eps_dot[i].im,
                self.wronskian_residual(i)
            ));
        }
        out
    }
}

pub fn wronskian_residual(eps: C64, eps_dot: C64) -> f64 {
    (eps_dot * eps.conj() - eps_dot.conj() * eps - C64::new(0.0, 2.0)).norm()
}

fn hermite_basis(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}

/// Integrates the oscillator equation from the canonical initial data
/// `eps(0) = 1`, `eps'(0) = i` and stores the solution on a uniform grid of
/// step at most `dt` covering `[0, t_end]`.
///
/// Piecewise-constant profiles are propagated analytically segment by
/// segment, which is exact to machine precision. Smooth profiles use an
/// adaptive Dormand-Prince 5(4) pair whose step acceptance additionally
/// requires the Wronskian residual to stay below [`WRONSKIAN_TOL`].
pub fn integrate_epsilon(
    profile: &FrequencyProfile,
    t_end: f64,
    dt: f64,
) -> Result<EpsilonTrajectory, ParoscError> {
    profile.validate()?;
    if !(t_end.is_finite() && t_end > 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(ParoscError::BadProfile(format!(
            "bad integration window: t_end = {t_end}, dt = {dt}"
        )));
    }
    if t_end > profile.t_max() {
        return Err(ParoscError::TimeOutOfRange {
            t: t_end,
            t_max: profile.t_max(),
        });
    }
    let n = (t_end / dt).ceil().max(1.0) as usize;
    let step = t_end / n as f64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 * step).collect();

    let mut eps = Vec::with_capacity(n + 1);
    let mut eps_dot = Vec::with_capacity(n + 1);
    let mut state = (C64::new(1.0, 0.0), C64::new(0.0, 1.0));
    eps.push(state.0);
    eps_dot.push(state.1);

    if profile.is_piecewise_constant() {
        for i in 0..n {
            state = propagate_piecewise(profile, state, times[i], times[i + 1]);
            eps.push(state.0);
            eps_dot.push(state.1);
        }
    } else {
        let mut h = step.min(0.1);
        for i in 0..n {
            state = rk45_span(profile, state, times[i], times[i + 1], &mut h)?;
            eps.push(state.0);
            eps_dot.push(state.1);
        }
    }

    let omega: Vec<f64> = times.iter().map(|&t| profile.omega(t)).collect();
    let mut phase = Vec::with_capacity(n + 1);
    phase.push(0.0);
    for i in 1..=n {
        let delta = (eps[i] / eps[i - 1]).arg();
        if delta.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(ParoscError::BranchTracking { t: times[i] });
        }
        phase.push(phase[i - 1] + delta);
    }

    let traj = EpsilonTrajectory {
        times,
        eps,
        eps_dot,
        omega,
        phase,
    };
    let residual = traj.max_wronskian_residual();
    if residual > WRONSKIAN_TOL {
        return Err(ParoscError::WronskianDrift { residual });
    }
    Ok(traj)
}

/// Analytic constant-frequency propagation of `(eps, eps')` over `tau`.
fn advance_constant(state: (C64, C64), omega: f64, tau: f64) -> (C64, C64) {
    let (c, s) = ((omega * tau).cos(), (omega * tau).sin());
    (
        state.0 * c + state.1 * (s / omega),
        state.0 * (-omega * s) + state.1 * c,
    )
}

fn propagate_piecewise(
    profile: &FrequencyProfile,
    mut state: (C64, C64),
    t0: f64,
    t1: f64,
) -> (C64, C64) {
    let jumps: &[Jump] = match profile {
        FrequencyProfile::SuddenJump { jumps } => jumps,
        _ => &[],
    };
    let mut t = t0;
    for j in jumps {
        if j.t > t && j.t < t1 {
            state = advance_constant(state, profile.omega(0.5 * (t + j.t)), j.t - t);
            t = j.t;
        }
    }
    advance_constant(state, profile.omega(0.5 * (t + t1)), t1 - t)
}

// Dormand-Prince 5(4) coefficients.
const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const RK_TOL: f64 = 1e-12;
const H_MIN: f64 = 1e-10;

fn rhs(profile: &FrequencyProfile, t: f64, y: (C64, C64)) -> (C64, C64) {
    let w = profile.omega(t);
    (y.1, y.0 * (-w * w))
}

/// Adaptive RK5(4) from `t0` to `t1`. A step is accepted only if both the
/// embedded local error estimate and the Wronskian residual pass.
fn rk45_span(
    profile: &FrequencyProfile,
    mut y: (C64, C64),
    t0: f64,
    t1: f64,
    h: &mut f64,
) -> Result<(C64, C64), ParoscError> {
    let mut t = t0;
    while t < t1 - 1e-14 {
        let step = h.min(t1 - t);
        let mut k = [(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); 7];
        k[0] = rhs(profile, t, y);
        for stage in 1..7 {
            let mut acc = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
            if stage < 7 {
                for (j, kj) in k.iter().enumerate().take(stage) {
                    let a = if stage == 6 {
                        DP_B5[j]
                    } else {
                        DP_A[stage - 1][j]
                    };
                    acc.0 += kj.0 * a;
                    acc.1 += kj.1 * a;
                }
            }
            k[stage] = rhs(
                profile,
                t + DP_C[stage] * step,
                (y.0 + acc.0 * step, y.1 + acc.1 * step),
            );
        }
        let mut y5 = y;
        let mut y4 = y;
        for (j, kj) in k.iter().enumerate() {
            y5.0 += kj.0 * (DP_B5[j] * step);
            y5.1 += kj.1 * (DP_B5[j] * step);
            y4.0 += kj.0 * (DP_B4[j] * step);
            y4.1 += kj.1 * (DP_B4[j] * step);
        }
        let scale = 1.0 + y.0.norm().max(y.1.norm());
        let err = ((y5.0 - y4.0).norm().max((y5.1 - y4.1).norm())) / (RK_TOL * scale);
        let wr_ok = wronskian_residual(y5.0, y5.1) <= WRONSKIAN_TOL;
        if err <= 1.0 && wr_ok {
            t += step;
            y = y5;
            *h = (step * (0.9 * err.max(1e-10).powf(-0.2)).min(5.0)).min(t1 - t0 + 1e-30);
        } else {
            *h = step * if wr_ok { 0.9 * err.powf(-0.25) } else { 0.5 };
            if *h < H_MIN {
                return Err(ParoscError::StepSizeRejection { t });
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn smooth_profile(t_end: f64) -> FrequencyProfile {
        let dt = 0.01;
        let n = (t_end / dt).ceil() as usize + 1;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let omegas: Vec<f64> = times.iter().map(|&t| 1.0 + 0.3 * (0.5 * t).sin()).collect();
        FrequencyProfile::SmoothTabulated { times, omegas }
    }

    #[test]
    fn constant_profile_gives_circular_trajectory() {
        let traj = integrate_epsilon(&FrequencyProfile::Constant, 20.0, 0.01).unwrap();
        for (i, &t) in traj.times().iter().enumerate() {
            let expected = C64::new(t.cos(), t.sin());
            assert!(
                (traj.eps()[i] - expected).norm() < 1e-12,
                "eps({t}) off by {:e}",
                (traj.eps()[i] - expected).norm()
            );
            let expected_dot = C64::new(-t.sin(), t.cos());
            assert!((traj.eps_dot()[i] - expected_dot).norm() < 1e-12);
        }
    }

    #[test]
    fn sudden_jump_matches_closed_form() {
        let traj = integrate_epsilon(&FrequencyProfile::jump_at_zero(2.0), 10.0, 0.01).unwrap();
        for (i, &t) in traj.times().iter().enumerate() {
            let expected = C64::new((2.0 * t).cos(), 0.5 * (2.0 * t).sin());
            assert!(
                (traj.eps()[i] - expected).norm() < 1e-12,
                "eps({t}) mismatch"
            );
        }
    }

    #[test]
    fn wronskian_is_conserved_for_all_profiles() {
        let profiles = [
            FrequencyProfile::Constant,
            FrequencyProfile::jump_at_zero(2.0),
            FrequencyProfile::SuddenJump {
                jumps: vec![
                    Jump { t: 1.0, omega: 2.0 },
                    Jump { t: 3.5, omega: 0.5 },
                    Jump { t: 7.0, omega: 1.5 },
                ],
            },
            smooth_profile(100.0),
        ];
        for profile in &profiles {
            let traj = integrate_epsilon(profile, 100.0, 0.05).unwrap();
            let residual = traj.max_wronskian_residual();
            assert!(residual <= 1e-9, "{profile:?}: residual {residual:e}");
        }
    }

    #[test]
    fn cross_term_identity_follows_from_wronskian() {
        // |eps' conj(eps)|^2 - 1 = (Re eps' conj(eps))^2
        let traj = integrate_epsilon(&smooth_profile(50.0), 50.0, 0.05).unwrap();
        for i in 0..traj.times().len() {
            let z = traj.eps_dot()[i] * traj.eps()[i].conj();
            let lhs = z.norm_sqr() - 1.0;
            let rhs = z.re * z.re;
            assert!((lhs - rhs).abs() < 1e-9);
        }
    }

    #[test]
    fn smooth_integration_self_converges() {
        let profile = smooth_profile(20.0);
        let coarse = integrate_epsilon(&profile, 20.0, 0.1).unwrap();
        let fine = integrate_epsilon(&profile, 20.0, 0.025).unwrap();
        let (e1, _, _) = coarse.sample(20.0).unwrap();
        let (e2, _, _) = fine.sample(20.0).unwrap();
        assert!((e1 - e2).norm() < 1e-8, "integrations disagree");
    }

    #[test]
    fn phase_unwinds_beyond_principal_branch() {
        let traj = integrate_epsilon(&FrequencyProfile::Constant, 12.0, 0.01).unwrap();
        let (_, _, phase) = traj.sample(12.0).unwrap();
        // for omega = 1, eps = exp(i t): the unwound phase is t itself
        assert!((phase - 12.0).abs() < 1e-10, "phase = {phase}");
    }

    #[test]
    fn sampling_between_nodes_is_accurate() {
        let traj = integrate_epsilon(&FrequencyProfile::Constant, 5.0, 0.02).unwrap();
        for &t in &[0.013, 1.2345, 3.33333, 4.99] {
            let (eps, eps_dot, _) = traj.sample(t).unwrap();
            assert!((eps - C64::new(t.cos(), t.sin())).norm() < 1e-8);
            assert!((eps_dot - C64::new(-t.sin(), t.cos())).norm() < 1e-8);
        }
        assert!(traj.sample(5.2).is_err());
        assert!(traj.sample(-0.1).is_err());
    }

    #[test]
    fn profile_validation_rejects_bad_input() {
        assert!(FrequencyProfile::SuddenJump { jumps: vec![] }
            .validate()
            .is_err());
        assert!(FrequencyProfile::SuddenJump {
            jumps: vec![Jump { t: 1.0, omega: -2.0 }],
        }
        .validate()
        .is_err());
        assert!(FrequencyProfile::SmoothTabulated {
            times: vec![0.0, 0.1, 0.2, 0.3],
            omegas: vec![1.1, 1.0, 1.0, 1.0],
        }
        .validate()
        .is_err());
        assert!(FrequencyProfile::SmoothTabulated {
            times: vec![0.0, 0.1, 0.25, 0.3],
            omegas: vec![1.0, 1.0, 1.0, 1.0],
        }
        .validate()
        .is_err());
    }

    #[test]
    fn profile_json_round_trip() {
        let profile = FrequencyProfile::SuddenJump {
            jumps: vec![Jump { t: 0.5, omega: 2.0 }],
        };
        let text = serde_json::to_string(&profile).unwrap();
        assert!(text.contains("sudden-jump"));
        let back: FrequencyProfile = serde_json::from_str(&text).unwrap();
        assert_eq!(profile, back);
    }

    #[test]
    fn tabulated_profile_cannot_integrate_past_its_table() {
        let profile = smooth_profile(5.0);
        assert!(matches!(
            integrate_epsilon(&profile, 50.0, 0.05),
            Err(ParoscError::TimeOutOfRange { .. })
        ));
    }
}
