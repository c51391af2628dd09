//! Spin tomograms for arbitrary spin j.
//!
//! The tomogram `w(m|n)` is the diagonal of `u(n) rho u(n)^dagger` in the
//! basis ordered by descending projection `m = +j..-j`. The rotation matrix
//! convention is fixed as
//!
//! ```text
//! u(n) = exp(+i theta J_y) * exp(+i phi J_z)
//! ```
//!
//! i.e. Euler angles `(psi, theta, phi)` with `psi = 0`: a z-axis rotation by
//! `phi` applied first, then a y-axis rotation by `theta`. This is the unique
//! choice (up to unobservable phases) under which the qubit tomogram equals
//! the affine form `n . (p - p0) + 1/2`; the cross-check pinning it down is
//! part of the test suite. For `j = 1/2` it reduces to the standard
//! half-angle matrix.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::qudit_prob::QubitTriple;
use crate::statespace::{CMatrix, DensityMatrix, ProbabilityVector, StateError, ToleranceConfig};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpinError {
    #[error("angle out of range: theta = {theta}, phi = {phi}")]
    AngleOutOfRange { theta: f64, phi: f64 },
    #[error(transparent)]
    State(#[from] StateError),
}

/// Spin quantum number stored as 2j, so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Spin {
    two_j: u32,
}

impl Spin {
    pub fn from_two_j(two_j: u32) -> Self {
        Self { two_j }
    }

    /// Spin for a Hilbert-space dimension N = 2j + 1 >= 1.
    pub fn from_dim(dim: usize) -> Self {
        assert!(dim >= 1);
        Self {
            two_j: (dim - 1) as u32,
        }
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// Projection values in the fixed descending order `+j, j-1, ..., -j`.
    pub fn m_values(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|a| (self.two_j as f64 - 2.0 * a as f64) / 2.0)
            .collect()
    }
}

/// Quantization direction given by polar angle `theta` in `[0, pi]` and
/// azimuth `phi` in `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    theta: f64,
    phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Result<Self, SpinError> {
        let ok = theta.is_finite()
            && phi.is_finite()
            && (0.0..=std::f64::consts::PI).contains(&theta)
            && (0.0..std::f64::consts::TAU).contains(&phi);
        if !ok {
            return Err(SpinError::AngleOutOfRange { theta, phi });
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        [
            self.theta.sin() * self.phi.cos(),
            self.theta.sin() * self.phi.sin(),
            self.theta.cos(),
        ]
    }
}

fn factorials(up_to: usize) -> Vec<f64> {
    let mut f = Vec::with_capacity(up_to + 1);
    f.push(1.0);
    for k in 1..=up_to {
        f.push(f[k - 1] * k as f64);
    }
    f
}

/// Wigner small-d matrix `d^j_{m'm}(beta) = <j m'| exp(-i beta J_y) |j m>`
/// via the factorial sum, rows and columns ordered by descending projection.
/// Double precision is adequate through j = 15/2.
fn wigner_small_d(spin: Spin, beta: f64) -> Vec<Vec<f64>> {
    let dim = spin.dim();
    let tj = spin.two_j() as i64;
    let fact = factorials(2 * spin.two_j() as usize);
    let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
    let mut d = vec![vec![0.0; dim]; dim];
    for (a, row) in d.iter_mut().enumerate() {
        let tm1 = tj - 2 * a as i64; // 2m'
        for (b, elem) in row.iter_mut().enumerate() {
            let tm2 = tj - 2 * b as i64; // 2m
            let jpm1 = ((tj + tm1) / 2) as usize;
            let jmm1 = ((tj - tm1) / 2) as usize;
            let jpm2 = ((tj + tm2) / 2) as usize;
            let jmm2 = ((tj - tm2) / 2) as usize;
            let dm = (tm1 - tm2) / 2; // m' - m
            let prefactor =
                (fact[jpm1] * fact[jmm1] * fact[jpm2] * fact[jmm2]).sqrt();
            let s_min = 0.max(-dm);
            let s_max = (jpm2 as i64).min(jmm1 as i64);
            let mut sum = 0.0;
            for t in s_min..=s_max {
                let t = t as usize;
                let denom = fact[jpm2 - t]
                    * fact[t]
                    * fact[(dm + t as i64) as usize]
                    * fact[jmm1 - t];
                let sign = if (dm + t as i64) % 2 == 0 { 1.0 } else { -1.0 };
                let c_pow = (tj - dm - 2 * t as i64) as i32;
                let s_pow = (dm + 2 * t as i64) as i32;
                sum += sign * c.powi(c_pow) * s.powi(s_pow) / denom;
            }
            *elem = prefactor * sum;
        }
    }
    d
}

/// Rotation matrix `u(n) = exp(i theta J_y) exp(i phi J_z)` for spin j,
/// unitary, basis ordered by descending projection.
pub fn rotation_matrix(spin: Spin, direction: &Direction) -> CMatrix {
    let dim = spin.dim();
    let tj = spin.two_j() as f64;
    // exp(i theta J_y) has elements d^j_{m'm}(-theta)
    let d = wigner_small_d(spin, -direction.theta());
    CMatrix::from_fn(dim, dim, |a, b| {
        let m = (tj - 2.0 * b as f64) / 2.0;
        let phase = C64::from_polar(1.0, m * direction.phi());
        phase * d[a][b]
    })
}

/// Tomographic probability distribution of spin projections onto a
/// direction, in descending-m order.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinTomogram {
    pub spin: Spin,
    pub direction: Direction,
    pub w: ProbabilityVector,
}

impl SpinTomogram {
    /// CSV row `j, theta, phi, w(+j), ..., w(-j)`.
    pub fn to_csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{}",
            self.spin.j(),
            self.direction.theta(),
            self.direction.phi()
        );
        for v in self.w.values() {
            row.push(',');
            row.push_str(&v.to_string());
        }
        row
    }
}

/// `w(m|n) = (u rho u^dagger)_mm`; normalized over m for every direction and
/// nonnegative for positive semidefinite input.
pub fn spin_tomogram(
    rho: &DensityMatrix,
    direction: &Direction,
    cfg: &ToleranceConfig,
) -> Result<SpinTomogram, SpinError> {
    let spin = Spin::from_dim(rho.dim());
    let u = rotation_matrix(spin, direction);
    let rotated = &u * rho.entries() * u.adjoint();
    let w: Vec<f64> = (0..rho.dim()).map(|m| rotated[(m, m)].re).collect();
    let w = ProbabilityVector::new(w, cfg.tol_norm.max(cfg.tol_psd))?;
    Ok(SpinTomogram {
        spin,
        direction: *direction,
        w,
    })
}

/// Qubit tomogram in affine form: the probability of projection +1/2 onto
/// `n` is `n . (p - p0) + 1/2` with `p0 = (1/2, 1/2, 1/2)`. Equals the
/// leading entry of [`spin_tomogram`] on the reconstructed density matrix.
pub fn qubit_tomogram_affine(t: &QubitTriple, direction: &Direction) -> f64 {
    let n = direction.unit_vector();
    n[0] * (t.p1 - 0.5) + n[1] * (t.p2 - 0.5) + n[2] * (t.p3 - 0.5) + 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qudit_prob::qubit_to_density;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn random_direction(rng: &mut ChaCha8Rng) -> Direction {
        // uniform on the sphere
        let u: f64 = rng.random_range(-1.0..1.0);
        Direction::new(u.acos(), rng.random_range(0.0..std::f64::consts::TAU)).unwrap()
    }

    fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let mut m = &a * a.adjoint();
        let tr: f64 = (0..n).map(|j| m[(j, j)].re).sum();
        m /= C64::new(tr, 0.0);
        DensityMatrix::new(m, &cfg()).unwrap()
    }

    #[test]
    fn identity_at_zero_angles_for_all_spins() {
        let d = Direction::new(0.0, 0.0).unwrap();
        for two_j in 1..=7 {
            let u = rotation_matrix(Spin::from_two_j(two_j), &d);
            for a in 0..u.nrows() {
                for b in 0..u.ncols() {
                    let expected = if a == b { 1.0 } else { 0.0 };
                    assert!(
                        (u[(a, b)] - C64::new(expected, 0.0)).norm() < 1e-14,
                        "2j={two_j} entry ({a},{b})"
                    );
                }
            }
        }
    }

    #[test]
    fn half_spin_equatorial_rotation_has_uniform_magnitudes() {
        let d = Direction::new(FRAC_PI_2, 0.0).unwrap();
        let u = rotation_matrix(Spin::from_two_j(1), &d);
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        for a in 0..2 {
            for b in 0..2 {
                assert!((u[(a, b)].norm() - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rotation_matrices_are_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for two_j in 1..=7 {
            let spin = Spin::from_two_j(two_j);
            for _ in 0..20 {
                let d = random_direction(&mut rng);
                let u = rotation_matrix(spin, &d);
                let gram = &u * u.adjoint();
                for a in 0..spin.dim() {
                    for b in 0..spin.dim() {
                        let expected = if a == b { 1.0 } else { 0.0 };
                        assert!(
                            (gram[(a, b)] - C64::new(expected, 0.0)).norm() < 1e-12,
                            "2j={two_j}: u u^dagger not identity"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn y_rotations_compose_additively() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for two_j in 1..=5 {
            let spin = Spin::from_two_j(two_j);
            for _ in 0..10 {
                let t1: f64 = rng.random_range(0.0..FRAC_PI_2);
                let t2: f64 = rng.random_range(0.0..FRAC_PI_2);
                let u1 = rotation_matrix(spin, &Direction::new(t1, 0.0).unwrap());
                let u2 = rotation_matrix(spin, &Direction::new(t2, 0.0).unwrap());
                let u12 = rotation_matrix(spin, &Direction::new(t1 + t2, 0.0).unwrap());
                let err = (&u1 * &u2 - &u12)
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max);
                assert!(err < 1e-12, "2j={two_j}: composition error {err:e}");
            }
        }
    }

    #[test]
    fn tomogram_of_maximally_mixed_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for dim in 2..=6 {
            let rho = DensityMatrix::maximally_mixed(dim);
            let d = random_direction(&mut rng);
            let tom = spin_tomogram(&rho, &d, &cfg()).unwrap();
            for &v in tom.w.values() {
                assert!((v - 1.0 / dim as f64).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn spin_up_tomograms() {
        let rho = DensityMatrix::pure(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        let along_z = spin_tomogram(&rho, &Direction::new(0.0, 0.0).unwrap(), &cfg()).unwrap();
        assert!((along_z.w.values()[0] - 1.0).abs() < 1e-14);
        assert!(along_z.w.values()[1].abs() < 1e-14);

        let equator =
            spin_tomogram(&rho, &Direction::new(FRAC_PI_2, 0.0).unwrap(), &cfg()).unwrap();
        assert!((equator.w.values()[0] - 0.5).abs() < 1e-14);
        assert!((equator.w.values()[1] - 0.5).abs() < 1e-14);
    }

    #[test]
    fn affine_form_examples() {
        let mixed = QubitTriple::new(0.5, 0.5, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(73);
        for _ in 0..10 {
            let d = random_direction(&mut rng);
            assert!((qubit_tomogram_affine(&mixed, &d) - 0.5).abs() < 1e-15);
        }

        let up = QubitTriple::new(0.5, 0.5, 1.0).unwrap();
        let z = Direction::new(0.0, 0.0).unwrap();
        assert!((qubit_tomogram_affine(&up, &z) - 1.0).abs() < 1e-15);

        let tilted = Direction::new(FRAC_PI_3, 0.0).unwrap();
        assert!((qubit_tomogram_affine(&up, &tilted) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn affine_form_matches_rotated_matrix_form() {
        // central cross-check pinning down the Euler convention
        let mut rng = ChaCha8Rng::seed_from_u64(79);
        for _ in 0..300 {
            let t = loop {
                let t = QubitTriple::new(
                    rng.random_range(0.0..1.0),
                    rng.random_range(0.0..1.0),
                    rng.random_range(0.0..1.0),
                )
                .unwrap();
                if t.ball_margin() <= 0.25 {
                    break t;
                }
            };
            let rho = DensityMatrix::new(qubit_to_density(&t), &cfg()).unwrap();
            let d = random_direction(&mut rng);
            let matrix_form = spin_tomogram(&rho, &d, &cfg()).unwrap().w.values()[0];
            let affine_form = qubit_tomogram_affine(&t, &d);
            assert!(
                (matrix_form - affine_form).abs() <= 1e-12,
                "conventions disagree: {matrix_form} vs {affine_form}"
            );
        }
    }

    #[test]
    fn tomograms_normalize_for_all_tested_spins() {
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        for two_j in 1..=7 {
            let dim = two_j as usize + 1;
            for _ in 0..100 {
                let rho = random_density(dim, &mut rng);
                let d = random_direction(&mut rng);
                let tom = spin_tomogram(&rho, &d, &cfg()).unwrap();
                let sum: f64 = tom.w.values().iter().sum();
                assert!((sum - 1.0).abs() <= 1e-10, "2j={two_j}: sum {sum}");
            }
        }
    }

    #[test]
    fn direction_validation() {
        assert!(Direction::new(-0.1, 0.0).is_err());
        assert!(Direction::new(PI + 0.1, 0.0).is_err());
        assert!(Direction::new(0.5, std::f64::consts::TAU).is_err());
        let d = Direction::new(FRAC_PI_2, PI).unwrap();
        let n = d.unit_vector();
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        assert!((norm - 1.0).abs() < 1e-14);
    }
}
