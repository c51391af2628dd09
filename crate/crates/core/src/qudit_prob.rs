//! Bijection between qudit density matrices and classical-coin probabilities.
//!
//! An N x N density matrix is parametrized by N^2 - 1 probabilities: one pair
//! `(p1, p2)` per off-diagonal position `(j, k)` with `j > k`, read from the
//! real and imaginary parts of `rho_jk`, and one `p3` per diagonal position
//! `j >= 2`, read from `1 - rho_jj`. Each probability is the chance of a
//! positive spin-1/2 projection of an "artificial qubit" obtained from the
//! state by embedding and partial tracing. Indices are 1-based in the public
//! API and in all file formats.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::statespace::{CMatrix, DensityMatrix, StateError, ToleranceConfig};

/// Slack for rejecting probabilities outside [0,1]: inputs off by more than
/// this are rejected rather than clamped, so admissibility tests stay honest.
pub const PROB_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TableError {
    #[error("probability {name} = {value} outside [0,1]")]
    OutOfRange { name: String, value: f64 },
    #[error("dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("expected {expected} {kind} entries for dim {dim}, got {got}")]
    ShapeMismatch {
        kind: &'static str,
        dim: usize,
        expected: usize,
        got: usize,
    },
    #[error("missing {kind} entry for index ({j},{k})")]
    MissingEntry { kind: &'static str, j: usize, k: usize },
    #[error("implied rho_11 = {0} outside [0,1]")]
    ImpliedCornerOutOfRange(f64),
    #[error(transparent)]
    State(#[from] StateError),
}

fn check_prob(name: &str, value: f64) -> Result<f64, TableError> {
    if !value.is_finite() || !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&value) {
        return Err(TableError::OutOfRange {
            name: name.to_string(),
            value,
        });
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Probabilities of spin projection +1/2 along the x, y and z axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QubitTriple {
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl QubitTriple {
    pub fn new(p1: f64, p2: f64, p3: f64) -> Result<Self, TableError> {
        Ok(Self {
            p1: check_prob("p1", p1)?,
            p2: check_prob("p2", p2)?,
            p3: check_prob("p3", p3)?,
        })
    }

    /// Squared distance of the probability vector from the center (1/2,1/2,1/2).
    pub fn ball_margin(&self) -> f64 {
        (self.p1 - 0.5).powi(2) + (self.p2 - 0.5).powi(2) + (self.p3 - 0.5).powi(2)
    }
}

/// Result of the qubit Bloch-ball admissibility check: the triple is a valid
/// quantum state iff `margin <= 1/4` (within `tol_psd`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BallCheck {
    pub margin: f64,
    pub admissible: bool,
}

/// Checks the quantum admissibility condition
/// `sum_k (p_k - 1/2)^2 <= 1/4`, equivalent to positivity of the
/// reconstructed 2x2 density matrix.
pub fn check_qubit_ball(t: &QubitTriple, cfg: &ToleranceConfig) -> BallCheck {
    let margin = t.ball_margin();
    BallCheck {
        margin,
        admissible: margin <= 0.25 + cfg.tol_psd,
    }
}

/// The 2x2 matrix determined by a probability triple:
///
/// ```text
/// [ p3                    p1 - i p2 - (1-i)/2 ]
/// [ p1 + i p2 - (1+i)/2   1 - p3              ]
/// ```
///
/// Hermitian with unit trace by construction; positive semidefinite exactly
/// when the triple passes [`check_qubit_ball`].
pub fn qubit_to_density(t: &QubitTriple) -> CMatrix {
    let off = C64::new(t.p1 - 0.5, t.p2 - 0.5);
    CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(t.p3, 0.0),
            off.conj(),
            off,
            C64::new(1.0 - t.p3, 0.0),
        ],
    )
}

/// Inverts [`qubit_to_density`]: `p3 = Re rho_11`, `p1 = Re rho_21 + 1/2`,
/// `p2 = Im rho_21 + 1/2`.
pub fn density_to_qubit(rho: &DensityMatrix) -> Result<QubitTriple, TableError> {
    if rho.dim() != 2 {
        return Err(TableError::ShapeMismatch {
            kind: "qubit",
            dim: rho.dim(),
            expected: 2,
            got: rho.dim(),
        });
    }
    QubitTriple::new(
        rho.entry(1, 0).re + 0.5,
        rho.entry(1, 0).im + 0.5,
        rho.entry(0, 0).re,
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct OffdiagEntryJson {
    j: usize,
    k: usize,
    p1: f64,
    p2: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DiagEntryJson {
    j: usize,
    p3: f64,
}

/// JSON form of a probability table:
/// `{"dim": N, "offdiag": [{"j","k","p1","p2"}...], "diag": [{"j","p3"}...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableJson {
    dim: usize,
    offdiag: Vec<OffdiagEntryJson>,
    diag: Vec<DiagEntryJson>,
}

/// The N^2 - 1 coin probabilities parametrizing an N x N density matrix.
///
/// `offdiag` maps 1-based pairs `(j, k)` with `j > k` to `(p1, p2)`; `diag`
/// maps `j` in `2..=N` to `p3`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuditProbabilityTable {
    dim: usize,
    offdiag: BTreeMap<(usize, usize), (f64, f64)>,
    diag: BTreeMap<usize, f64>,
}

impl QuditProbabilityTable {
    pub fn new(
        dim: usize,
        offdiag: BTreeMap<(usize, usize), (f64, f64)>,
        diag: BTreeMap<usize, f64>,
    ) -> Result<Self, TableError> {
        if dim < 2 {
            return Err(TableError::DimensionTooSmall(dim));
        }
        let expected_off = dim * (dim - 1) / 2;
        if offdiag.len() != expected_off {
            return Err(TableError::ShapeMismatch {
                kind: "offdiag",
                dim,
                expected: expected_off,
                got: offdiag.len(),
            });
        }
        if diag.len() != dim - 1 {
            return Err(TableError::ShapeMismatch {
                kind: "diag",
                dim,
                expected: dim - 1,
                got: diag.len(),
            });
        }
        let mut off_checked = BTreeMap::new();
        for j in 2..=dim {
            for k in 1..j {
                let &(p1, p2) = offdiag
                    .get(&(j, k))
                    .ok_or(TableError::MissingEntry { kind: "offdiag", j, k })?;
                off_checked.insert(
                    (j, k),
                    (
                        check_prob(&format!("p1({j},{k})"), p1)?,
                        check_prob(&format!("p2({j},{k})"), p2)?,
                    ),
                );
            }
        }
        let mut diag_checked = BTreeMap::new();
        for j in 2..=dim {
            let &p3 = diag
                .get(&j)
                .ok_or(TableError::MissingEntry { kind: "diag", j, k: j })?;
            diag_checked.insert(j, check_prob(&format!("p3({j},{j})"), p3)?);
        }
        // rho_11 implied by the diagonal probabilities must itself be a
        // sensible population.
        let rho11 = 1.0 - diag_checked.values().map(|p3| 1.0 - p3).sum::<f64>();
        if !(-PROB_SLACK..=1.0 + PROB_SLACK).contains(&rho11) {
            return Err(TableError::ImpliedCornerOutOfRange(rho11));
        }
        Ok(Self {
            dim,
            offdiag: off_checked,
            diag: diag_checked,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(p1, p2)` for the 1-based pair `(j, k)`, `j > k`.
    pub fn offdiag(&self, j: usize, k: usize) -> Option<(f64, f64)> {
        self.offdiag.get(&(j, k)).copied()
    }

    /// `p3` for the 1-based diagonal index `j >= 2`.
    pub fn diag(&self, j: usize) -> Option<f64> {
        self.diag.get(&j).copied()
    }

    pub fn offdiag_entries(&self) -> impl Iterator<Item = (&(usize, usize), &(f64, f64))> {
        self.offdiag.iter()
    }

    pub fn diag_entries(&self) -> impl Iterator<Item = (&usize, &f64)> {
        self.diag.iter()
    }

    pub fn to_json(&self) -> TableJson {
        TableJson {
            dim: self.dim,
            offdiag: self
                .offdiag
                .iter()
                .map(|(&(j, k), &(p1, p2))| OffdiagEntryJson { j, k, p1, p2 })
                .collect(),
            diag: self
                .diag
                .iter()
                .map(|(&j, &p3)| DiagEntryJson { j, p3 })
                .collect(),
        }
    }

    pub fn from_json(json: &TableJson) -> Result<Self, TableError> {
        let offdiag = json
            .offdiag
            .iter()
            .map(|e| ((e.j, e.k), (e.p1, e.p2)))
            .collect();
        let diag = json.diag.iter().map(|e| (e.j, e.p3)).collect();
        Self::new(json.dim, offdiag, diag)
    }
}

/// Builds the density-matrix candidate determined by a probability table:
/// `rho_jk = (p1 - 1/2) + i (p2 - 1/2)` for `j > k`, `rho_jj = 1 - p3` for
/// `j >= 2`, and `rho_11` fixed by the unit trace. Hermitian and unit-trace
/// by construction; positivity is NOT guaranteed and callers validate.
pub fn table_to_density(t: &QuditProbabilityTable) -> CMatrix {
    let n = t.dim;
    let mut m = CMatrix::zeros(n, n);
    for (&(j, k), &(p1, p2)) in &t.offdiag {
        let z = C64::new(p1 - 0.5, p2 - 0.5);
        m[(j - 1, k - 1)] = z;
        m[(k - 1, j - 1)] = z.conj();
    }
    let mut rho11 = 1.0;
    for (&j, &p3) in &t.diag {
        let pop = 1.0 - p3;
        m[(j - 1, j - 1)] = C64::new(pop, 0.0);
        rho11 -= pop;
    }
    m[(0, 0)] = C64::new(rho11, 0.0);
    m
}

/// Reads the probability table off a density matrix; exact inverse of
/// [`table_to_density`].
pub fn density_to_table(rho: &DensityMatrix) -> Result<QuditProbabilityTable, TableError> {
    let n = rho.dim();
    let mut offdiag = BTreeMap::new();
    let mut diag = BTreeMap::new();
    for j in 2..=n {
        for k in 1..j {
            let z = rho.entry(j - 1, k - 1);
            offdiag.insert((j, k), (z.re + 0.5, z.im + 0.5));
        }
        diag.insert(j, 1.0 - rho.entry(j - 1, j - 1).re);
    }
    QuditProbabilityTable::new(n, offdiag, diag)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Corner {
    TopLeft,
    BottomRight,
}

/// Embeds `rho` into an `(N+pad) x (N+pad)` matrix with zeros elsewhere.
/// The result is still Hermitian, unit-trace and positive semidefinite.
pub fn embed_corner(rho: &DensityMatrix, pad: usize, corner: Corner) -> DensityMatrix {
    assert!(pad >= 1, "padding must be at least 1");
    let n = rho.dim();
    let total = n + pad;
    let offset = match corner {
        Corner::TopLeft => 0,
        Corner::BottomRight => pad,
    };
    let mut m = CMatrix::zeros(total, total);
    for j in 0..n {
        for k in 0..n {
            m[(j + offset, k + offset)] = rho.entry(j, k);
        }
    }
    DensityMatrix::new(m, &ToleranceConfig::default())
        .expect("embedding preserves the density-matrix invariants")
}

/// Which tensor factor of a bipartite system to trace out.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceOut {
    First,
    Second,
}

/// Partial trace of an `(n1*n2) x (n1*n2)` matrix over one factor, with the
/// flat index `s = a*n2 + b` for the pair `(a, b)`.
pub fn partial_trace(m: &CMatrix, n1: usize, n2: usize, out: TraceOut) -> CMatrix {
    assert_eq!(m.nrows(), n1 * n2, "partial_trace: shape mismatch");
    assert_eq!(m.ncols(), n1 * n2, "partial_trace: shape mismatch");
    match out {
        TraceOut::Second => DMatrix::from_fn(n1, n1, |a, a2| {
            (0..n2).map(|b| m[(a * n2 + b, a2 * n2 + b)]).sum()
        }),
        TraceOut::First => DMatrix::from_fn(n2, n2, |b, b2| {
            (0..n1).map(|a| m[(a * n2 + b, a * n2 + b2)]).sum()
        }),
    }
}

/// The 2x2 artificial-qubit density matrix for the 1-based pair `(j, k)`,
/// `j > k`:
///
/// ```text
/// [ 1 - rho_jj   rho_kj ]
/// [ rho_jk       rho_jj ]
/// ```
///
/// This canonical convention reproduces the qutrit matrices obtained by
/// embedding and partial tracing for the pairs anchored at the first basis
/// state, and makes `p3 = 1 - rho_jj` match the table parametrization
/// exactly. Each returned matrix is Hermitian and unit-trace, and positive
/// semidefinite whenever `rho` is.
pub fn artificial_qubits(
    rho: &DensityMatrix,
) -> BTreeMap<(usize, usize), DensityMatrix> {
    let n = rho.dim();
    let cfg = ToleranceConfig::default();
    let mut out = BTreeMap::new();
    for j in 2..=n {
        for k in 1..j {
            let pop = rho.entry(j - 1, j - 1);
            let m = CMatrix::from_row_slice(
                2,
                2,
                &[
                    C64::new(1.0 - pop.re, 0.0),
                    rho.entry(k - 1, j - 1),
                    rho.entry(j - 1, k - 1),
                    C64::new(pop.re, 0.0),
                ],
            );
            let qubit = DensityMatrix::new(m, &cfg)
                .expect("artificial qubits inherit positivity from the parent state");
            out.insert((j, k), qubit);
        }
    }
    out
}

/// Probability triples of all artificial qubits, keyed by `(j, k)`.
pub fn artificial_qubit_triples(
    rho: &DensityMatrix,
) -> Result<BTreeMap<(usize, usize), QubitTriple>, TableError> {
    artificial_qubits(rho)
        .iter()
        .map(|(&jk, qubit)| Ok((jk, density_to_qubit(qubit)?)))
        .collect()
}

/// One entry-bound violation: an off-diagonal element whose real or
/// imaginary part escapes the band implied by its probability origin.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryBoundViolation {
    pub j: usize,
    pub k: usize,
    pub component: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryBoundsReport {
    pub pass: bool,
    pub violations: Vec<EntryBoundViolation>,
}

/// Verifies that every off-diagonal entry lies in the probability band:
/// `Re rho_jk + 1/2` and `Im rho_jk + 1/2` must both be in `[0, 1]` (within
/// `tol_psd`), since both are coin probabilities of an artificial qubit.
pub fn check_entry_bounds(m: &CMatrix, cfg: &ToleranceConfig) -> EntryBoundsReport {
    let n = m.nrows();
    let mut violations = Vec::new();
    for j in 1..=n {
        for k in 1..=n {
            if j == k {
                continue;
            }
            let z = m[(j - 1, k - 1)];
            for (component, value) in [("re", z.re), ("im", z.im)] {
                if value + 0.5 < -cfg.tol_psd || value + 0.5 > 1.0 + cfg.tol_psd {
                    violations.push(EntryBoundViolation {
                        j,
                        k,
                        component,
                        value,
                    });
                }
            }
        }
    }
    EntryBoundsReport {
        pass: violations.is_empty(),
        violations,
    }
}
