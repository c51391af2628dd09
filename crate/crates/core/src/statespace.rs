//! Core state containers shared by every other module: validated density
//! matrices, probability vectors, and the tolerance configuration used in all
//! admissibility checks.
//!
//! Values are immutable after construction and every operation is a pure
//! function, so everything here is safe to share across threads.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense complex matrix used for quantum states throughout the crate.
pub type CMatrix = DMatrix<C64>;

/// Tolerances for the state-validation invariants. All computations are
/// small dense double-precision, so the defaults are tight: looser bounds
/// would mask genuine admissibility violations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ToleranceConfig {
    pub tol_herm: f64,
    pub tol_trace: f64,
    pub tol_psd: f64,
    pub tol_norm: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            tol_herm: 1e-9,
            tol_trace: 1e-9,
            tol_psd: 1e-9,
            tol_norm: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), StateError> {
        let ok = [self.tol_herm, self.tol_trace, self.tol_psd, self.tol_norm]
            .iter()
            .all(|t| t.is_finite() && *t > 0.0);
        if ok {
            Ok(())
        } else {
            Err(StateError::BadTolerance)
        }
    }
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum StateError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("non-finite entry at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("Hermiticity violated at ({row},{col}): asymmetry magnitude {magnitude:e}")]
    NotHermitian {
        row: usize,
        col: usize,
        magnitude: f64,
    },
    #[error("trace differs from one by {magnitude:e}")]
    TraceNotOne { magnitude: f64 },
    #[error("not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositiveSemidefinite { min_eigenvalue: f64 },
    #[error("probability {value} at index {index} outside [0,1]")]
    ProbabilityOutOfRange { index: usize, value: f64 },
    #[error("probabilities sum to {sum}, off by {magnitude:e}")]
    NotNormalized { sum: f64, magnitude: f64 },
    #[error("tolerances must be finite and strictly positive")]
    BadTolerance,
}

/// Real eigenvalues of a Hermitian matrix, sorted in descending order.
///
/// The input is checked for Hermiticity (within `tol_herm`) but not for trace
/// or positivity, so this is usable on candidate matrices that may fail the
/// density-matrix invariants.
pub fn hermitian_eigenvalues(m: &CMatrix, cfg: &ToleranceConfig) -> Result<Vec<f64>, StateError> {
    check_square(m)?;
    check_finite(m)?;
    check_hermitian(m, cfg.tol_herm)?;
    let mut ev: Vec<f64> = m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(ev)
}

fn check_square(m: &CMatrix) -> Result<usize, StateError> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(StateError::NotSquare { rows, cols });
    }
    Ok(rows)
}

fn check_finite(m: &CMatrix) -> Result<(), StateError> {
    for row in 0..m.nrows() {
        for col in 0..m.ncols() {
            let z = m[(row, col)];
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(StateError::NonFinite { row, col });
            }
        }
    }
    Ok(())
}

fn check_hermitian(m: &CMatrix, tol: f64) -> Result<(), StateError> {
    let n = m.nrows();
    for row in 0..n {
        for col in row..n {
            let magnitude = (m[(row, col)] - m[(col, row)].conj()).norm();
            if magnitude > tol {
                return Err(StateError::NotHermitian {
                    row,
                    col,
                    magnitude,
                });
            }
        }
    }
    Ok(())
}

/// A validated N x N density matrix: Hermitian, unit trace, positive
/// semidefinite, all within the tolerances supplied at construction.
///
/// Validation never repairs the input; a matrix outside the tolerances is
/// rejected with a diagnostic naming the first violated invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates `m` against the three density-matrix invariants in the
    /// order Hermiticity, trace, positive semidefiniteness.
    pub fn new(m: CMatrix, cfg: &ToleranceConfig) -> Result<Self, StateError> {
        cfg.validate()?;
        let dim = check_square(&m)?;
        if dim < 2 {
            return Err(StateError::DimensionTooSmall(dim));
        }
        check_finite(&m)?;
        check_hermitian(&m, cfg.tol_herm)?;
        let trace: C64 = (0..dim).map(|j| m[(j, j)]).sum();
        let magnitude = (trace - C64::new(1.0, 0.0)).norm();
        if magnitude > cfg.tol_trace {
            return Err(StateError::TraceNotOne { magnitude });
        }
        let ev = hermitian_eigenvalues(&m, cfg)?;
        let min_eigenvalue = *ev.last().expect("dim >= 2");
        if min_eigenvalue < -cfg.tol_psd {
            return Err(StateError::NotPositiveSemidefinite { min_eigenvalue });
        }
        Ok(Self { dim, entries: m })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    /// Entry by 0-based indices.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// The maximally mixed state `I/N`.
    pub fn maximally_mixed(dim: usize) -> Self {
        assert!(dim >= 2);
        let entries = CMatrix::from_diagonal_element(dim, dim, C64::new(1.0 / dim as f64, 0.0));
        Self { dim, entries }
    }

    /// Projector onto the given (not necessarily normalized) state vector.
    pub fn pure(amplitudes: &[C64]) -> Result<Self, StateError> {
        let dim = amplitudes.len();
        if dim < 2 {
            return Err(StateError::DimensionTooSmall(dim));
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if !(norm_sq.is_finite() && norm_sq > 0.0) {
            return Err(StateError::NonFinite { row: 0, col: 0 });
        }
        let entries = CMatrix::from_fn(dim, dim, |j, k| {
            amplitudes[j] * amplitudes[k].conj() / norm_sq
        });
        Ok(Self { dim, entries })
    }

    /// Real eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self
            .entries
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
        ev
    }

    /// Von Neumann entropy `-sum lambda ln lambda` in nats.
    pub fn von_neumann_entropy(&self) -> f64 {
        self.eigenvalues()
            .iter()
            .filter(|&&l| l > 0.0)
            .map(|&l| -l * l.ln())
            .sum()
    }
}

/// Normalized probability vector. Entries within `-tol` of zero are clamped
/// to exactly zero so downstream entropy code never sees round-off negatives;
/// anything more negative is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(values: Vec<f64>, tol: f64) -> Result<Self, StateError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() || value < -tol || value > 1.0 + tol {
                return Err(StateError::ProbabilityOutOfRange { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        let magnitude = (sum - 1.0).abs();
        if magnitude > tol {
            return Err(StateError::NotNormalized { sum, magnitude });
        }
        let clamped = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        Ok(Self(clamped))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// JSON form of a complex matrix: `{"dim": N, "re": [[..]], "im": [[..]]}`,
/// row-major. Shared by the CLI and all file I/O.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexMatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Error)]
pub enum MatrixJsonError {
    #[error("re/im arrays must be dim x dim = {dim} x {dim}")]
    ShapeMismatch { dim: usize },
}

impl ComplexMatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let dim = m.nrows();
        let re = (0..dim)
            .map(|j| (0..dim).map(|k| m[(j, k)].re).collect())
            .collect();
        let im = (0..dim)
            .map(|j| (0..dim).map(|k| m[(j, k)].im).collect())
            .collect();
        Self { dim, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix, MatrixJsonError> {
        let dim = self.dim;
        let shape_ok = self.re.len() == dim
            && self.im.len() == dim
            && self.re.iter().all(|row| row.len() == dim)
            && self.im.iter().all(|row| row.len() == dim);
        if !shape_ok {
            return Err(MatrixJsonError::ShapeMismatch { dim });
        }
        Ok(CMatrix::from_fn(dim, dim, |j, k| {
            C64::new(self.re[j][k], self.im[j][k])
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn maximally_mixed_qubit_is_valid() {
        let m = CMatrix::from_diagonal_element(2, 2, C64::new(0.5, 0.0));
        let rho = DensityMatrix::new(m, &cfg()).unwrap();
        let ev = rho.eigenvalues();
        assert!((ev[0] - 0.5).abs() < 1e-15);
        assert!((ev[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn projector_is_valid_pure_state() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        let rho = DensityMatrix::new(m, &cfg()).unwrap();
        assert_eq!(rho.eigenvalues(), vec![1.0, 0.0]);
    }

    #[test]
    fn psd_violation_is_rejected_with_diagnostic() {
        // trace 1 and Hermitian, but det = 0.24 - 0.36 < 0.
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.6, 0.0),
                C64::new(0.6, 0.0),
                C64::new(0.6, 0.0),
                C64::new(0.4, 0.0),
            ],
        );
        let err = DensityMatrix::new(m, &cfg()).unwrap_err();
        match err {
            StateError::NotPositiveSemidefinite { min_eigenvalue } => {
                // closed form: (1 - sqrt(1 - 4 det)) / 2 with det = -0.12
                let expected = 0.5 * (1.0 - (1.0f64 - 4.0 * (-0.12)).sqrt());
                assert!((min_eigenvalue - expected).abs() < 1e-12);
            }
            other => panic!("expected PSD violation, got {other:?}"),
        }
    }

    #[test]
    fn hermiticity_violation_detected_first() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.3, 0.1),
                C64::new(0.3, 0.1),
                C64::new(0.5, 0.0),
            ],
        );
        assert!(matches!(
            DensityMatrix::new(m, &cfg()).unwrap_err(),
            StateError::NotHermitian { .. }
        ));
    }

    #[test]
    fn non_square_and_nan_rejected() {
        let m = CMatrix::from_element(2, 3, C64::new(0.1, 0.0));
        assert!(matches!(
            DensityMatrix::new(m, &cfg()).unwrap_err(),
            StateError::NotSquare { rows: 2, cols: 3 }
        ));
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(f64::NAN, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            DensityMatrix::new(m, &cfg()).unwrap_err(),
            StateError::NonFinite { .. }
        ));
    }

    #[test]
    fn eigenvalues_descending_and_normalized() {
        let m = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        let rho = DensityMatrix::new(m, &cfg()).unwrap();
        assert_eq!(rho.eigenvalues(), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn qubit_eigenvalues_match_bloch_radius_closed_form() {
        // rho from probabilities (p1,p2,p3): eigenvalues 1/2 +- r.
        let (p1, p2, p3) = (0.7, 0.4, 0.55);
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(p3, 0.0),
                C64::new(p1 - 0.5, -(p2 - 0.5)),
                C64::new(p1 - 0.5, p2 - 0.5),
                C64::new(1.0 - p3, 0.0),
            ],
        );
        let r = ((p1 - 0.5f64).powi(2) + (p2 - 0.5f64).powi(2) + (p3 - 0.5f64).powi(2)).sqrt();
        let ev = hermitian_eigenvalues(&m, &cfg()).unwrap();
        assert!((ev[0] - (0.5 + r)).abs() < 1e-14);
        assert!((ev[1] - (0.5 - r)).abs() < 1e-14);
        assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_decomposition_reconstructs_matrix() {
        // deterministic pseudo-random Hermitian PSD matrices up to N = 8
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for n in 2..=8 {
            let a = CMatrix::from_fn(n, n, |_, _| C64::new(next(), next()));
            let mut m = &a * a.adjoint();
            let tr: f64 = (0..n).map(|j| m[(j, j)].re).sum();
            m /= C64::new(tr, 0.0);
            let eig = m.clone().symmetric_eigen();
            let recon = &eig.eigenvectors
                * CMatrix::from_diagonal(&eig.eigenvalues.map(|x| C64::new(x, 0.0)))
                * eig.eigenvectors.adjoint();
            let err = (&m - &recon).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(err < 1e-10, "N={n}: reconstruction error {err:e}");
            let rho = DensityMatrix::new(m, &cfg()).unwrap();
            let ev = rho.eigenvalues();
            assert!((ev.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
            assert!(ev.iter().all(|&l| (-1e-9..=1.0 + 1e-9).contains(&l)));
        }
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5], 1e-9).is_ok());
        assert!(ProbabilityVector::new(vec![0.6, 0.6], 1e-9).is_err());
        assert!(ProbabilityVector::new(vec![-0.1, 1.1], 1e-9).is_err());
        // tiny round-off negatives are clamped to zero
        let p = ProbabilityVector::new(vec![1.0 + 1e-12, -1e-12], 1e-9).unwrap();
        assert_eq!(p.values()[1], 0.0);
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.1, -0.2),
                C64::new(0.1, 0.2),
                C64::new(0.5, 0.0),
            ],
        );
        let json = ComplexMatrixJson::from_matrix(&m);
        let back = json.to_matrix().unwrap();
        assert_eq!(m, back);
        let text = serde_json::to_string(&json).unwrap();
        let parsed: ComplexMatrixJson = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.to_matrix().unwrap(), m);
    }
}
