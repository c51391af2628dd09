//! Shannon entropies, the index-partition tool, mutual information for
//! Franck-Condon tables, and the entry-wise entropic inequalities of qudit
//! density matrices.
//!
//! All entropies are in nats. The zero-probability convention `0 ln 0 = 0`
//! is applied before any ratio; a relative-entropy term with zero
//! denominator and nonzero numerator evaluates to `+inf` and is reported as
//! such rather than treated as an error, since pure states legitimately
//! produce it.

use serde::Serialize;
use thiserror::Error;

use crate::parosc::{FranckCondonTable, FC_TRUNC_TOL};
use crate::qudit_prob::QubitTriple;
use crate::statespace::{DensityMatrix, ProbabilityVector};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InfoError {
    #[error("negative probability {value} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("distribution mass {sum} differs from one by more than {tol:e}")]
    NotNormalized { sum: f64, tol: f64 },
    #[error("distribution of {got} outcomes does not fit the partition of {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("operation requires a bipartite joint distribution, got {0} factors")]
    NotBipartite(usize),
    #[error("partition factors must be nonzero")]
    ZeroFactor,
    #[error("Franck-Condon truncation mass {mass} inadequate for entropy evaluation")]
    InadequateTruncation { mass: f64 },
    #[error("probability triple is outside the admissible ball: margin {margin}")]
    InadmissibleTriple { margin: f64 },
}

const NORM_TOL: f64 = 1e-9;

fn xlnx(p: f64) -> f64 {
    if p > 0.0 {
        p * p.ln()
    } else {
        0.0
    }
}

/// `p ln(p/q)` with the conventions `0 ln(0/q) = 0` and
/// `p ln(p/0) = +inf` for `p > 0`.
fn rel_term(p: f64, q: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else if q <= 0.0 {
        f64::INFINITY
    } else {
        p * (p / q).ln()
    }
}

/// Shannon entropy `-sum p ln p` in nats.
pub fn shannon_entropy(p: &ProbabilityVector) -> f64 {
    -p.values().iter().map(|&v| xlnx(v)).sum::<f64>()
}

/// Binary Shannon entropy of `(p, 1-p)`.
pub fn binary_entropy(p: f64) -> f64 {
    -xlnx(p) - xlnx(1.0 - p)
}

/// Mapping between a flat outcome index and a tuple of sub-indices, in
/// row-major order: the last factor varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionSpec {
    factors: Vec<usize>,
}

impl PartitionSpec {
    pub fn new(factors: Vec<usize>) -> Result<Self, InfoError> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(InfoError::ZeroFactor);
        }
        Ok(Self { factors })
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn total(&self) -> usize {
        self.factors.iter().product()
    }

    pub fn flat_to_tuple(&self, mut s: usize) -> Vec<usize> {
        assert!(s < self.total());
        let mut tuple = vec![0; self.factors.len()];
        for (slot, &n) in tuple.iter_mut().zip(&self.factors).rev() {
            *slot = s % n;
            s /= n;
        }
        tuple
    }

    pub fn tuple_to_flat(&self, tuple: &[usize]) -> usize {
        assert_eq!(tuple.len(), self.factors.len());
        let mut s = 0;
        for (&j, &n) in tuple.iter().zip(&self.factors) {
            assert!(j < n);
            s = s * n + j;
        }
        s
    }
}

/// Joint probability distribution over a product of finite outcome sets,
/// stored flat in row-major order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointDistribution {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl JointDistribution {
    pub fn new(shape: Vec<usize>, values: Vec<f64>) -> Result<Self, InfoError> {
        let total: usize = shape.iter().product();
        if shape.is_empty() || total == 0 {
            return Err(InfoError::ZeroFactor);
        }
        if values.len() != total {
            return Err(InfoError::SizeMismatch {
                expected: total,
                got: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(InfoError::NegativeProbability { index, value });
            }
        }
        let sum: f64 = values.iter().sum();
        if (sum - 1.0).abs() > NORM_TOL {
            return Err(InfoError::NotNormalized { sum, tol: NORM_TOL });
        }
        Ok(Self { shape, values })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn entropy(&self) -> f64 {
        -self.values.iter().map(|&v| xlnx(v)).sum::<f64>()
    }

    /// Marginal distribution of one factor of a bipartite joint.
    pub fn marginal(&self, axis: usize) -> Result<Vec<f64>, InfoError> {
        if self.shape.len() != 2 {
            return Err(InfoError::NotBipartite(self.shape.len()));
        }
        let (rows, cols) = (self.shape[0], self.shape[1]);
        let mut out = vec![0.0; self.shape[axis]];
        for r in 0..rows {
            for c in 0..cols {
                let idx = if axis == 0 { r } else { c };
                out[idx] += self.values[r * cols + c];
            }
        }
        Ok(out)
    }
}

/// Reshapes a flat distribution into a joint distribution by the partition
/// bijection; flat distributions shorter than the partition size are padded
/// with zero-probability outcomes.
pub fn partition(p: &[f64], spec: &PartitionSpec) -> Result<JointDistribution, InfoError> {
    let total = spec.total();
    if p.len() > total {
        return Err(InfoError::SizeMismatch {
            expected: total,
            got: p.len(),
        });
    }
    let mut values = p.to_vec();
    values.resize(total, 0.0);
    JointDistribution::new(spec.factors().to_vec(), values)
}

/// Shannon information `I = H(1) + H(2) - H(1,2)` of a bipartite joint;
/// nonnegative, and zero exactly when the joint factorizes.
pub fn mutual_information(jd: &JointDistribution) -> Result<f64, InfoError> {
    let m1 = jd.marginal(0)?;
    let m2 = jd.marginal(1)?;
    let h1 = -m1.iter().map(|&v| xlnx(v)).sum::<f64>();
    let h2 = -m2.iter().map(|&v| xlnx(v)).sum::<f64>();
    Ok(h1 + h2 - jd.entropy())
}

/// Shannon information carried by a Franck-Condon table under the even/odd
/// partition `n = 2k + j`, `j` in `{0, 1}`: renormalizes the table by its
/// truncation mass, reshapes it into the joint distribution `P(k, j)` and
/// returns the mutual information between `k` and `j`.
pub fn fc_information(table: &FranckCondonTable) -> Result<f64, InfoError> {
    let mass = table.truncation_mass();
    if (mass - 1.0).abs() > FC_TRUNC_TOL {
        return Err(InfoError::InadequateTruncation { mass });
    }
    let renormalized: Vec<f64> = table.probs().iter().map(|p| p / mass).collect();
    let pairs = renormalized.len().div_ceil(2);
    let spec = PartitionSpec::new(vec![pairs, 2])?;
    let joint = partition(&renormalized, &spec)?;
    mutual_information(&joint)
}

/// One evaluated inequality: `value >= 0` within tolerance means `pass`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityRecord {
    pub name: &'static str,
    /// 1-based matrix indices the record refers to.
    pub indices: Vec<usize>,
    pub value: f64,
    pub pass: bool,
}

/// Entry-wise entropic inequalities of a qudit density matrix.
///
/// Every off-diagonal entry defines the binary distribution
/// `(1/2 - Im rho_jk, 1/2 + Im rho_jk)`; the report evaluates
///
/// - the relative entropy between those distributions for every ordered
///   pair of distinct off-diagonal positions,
/// - the relative entropy between each diagonal population pair
///   `(rho_jj, 1 - rho_jj)` and each off-diagonal binary distribution, in
///   both sign conventions,
/// - the binary-entropy window `0 <= H <= ln 2` for every off-diagonal
///   entry.
pub fn qudit_entry_inequalities(rho: &DensityMatrix, tol: f64) -> Vec<InequalityRecord> {
    let n = rho.dim();
    let mut records = Vec::new();
    let offdiag: Vec<(usize, usize)> = (1..=n)
        .flat_map(|j| (1..=n).filter(move |&k| k != j).map(move |k| (j, k)))
        .collect();

    for &(j, k) in &offdiag {
        let im = rho.entry(j - 1, k - 1).im;
        for &(j2, k2) in &offdiag {
            if (j, k) == (j2, k2) {
                continue;
            }
            let im2 = rho.entry(j2 - 1, k2 - 1).im;
            let value = rel_term(0.5 - im, 0.5 - im2) + rel_term(0.5 + im, 0.5 + im2);
            records.push(InequalityRecord {
                name: "imag_pair_relative_entropy",
                indices: vec![j, k, j2, k2],
                value,
                pass: value >= -tol,
            });
        }
    }

    for j in 1..=n {
        let pop = rho.entry(j - 1, j - 1).re;
        for &(j2, k2) in &offdiag {
            let im = rho.entry(j2 - 1, k2 - 1).im;
            for (sign, name) in [
                (1.0, "population_vs_imag_relative_entropy_plus"),
                (-1.0, "population_vs_imag_relative_entropy_minus"),
            ] {
                let value =
                    rel_term(pop, 0.5 - sign * im) + rel_term(1.0 - pop, 0.5 + sign * im);
                records.push(InequalityRecord {
                    name,
                    indices: vec![j, j2, k2],
                    value,
                    pass: value >= -tol,
                });
            }
        }
    }

    for &(j, k) in &offdiag {
        let im = rho.entry(j - 1, k - 1).im;
        let h = binary_entropy(0.5 - im);
        records.push(InequalityRecord {
            name: "imag_binary_entropy_lower",
            indices: vec![j, k],
            value: h,
            pass: h >= -tol,
        });
        records.push(InequalityRecord {
            name: "imag_binary_entropy_upper",
            indices: vec![j, k],
            value: std::f64::consts::LN_2 - h,
            pass: std::f64::consts::LN_2 - h >= -tol,
        });
    }

    records
}

/// Sum of the three coin entropies of a qubit probability triple,
/// `H = sum_k [-p_k ln p_k - (1-p_k) ln(1-p_k)]`, between 0 and `3 ln 2`.
pub fn qubit_coin_entropy(t: &QubitTriple) -> f64 {
    binary_entropy(t.p1) + binary_entropy(t.p2) + binary_entropy(t.p3)
}

/// Von Neumann entropy of the qubit state in closed form,
/// `S = -(1/2 + r) ln(1/2 + r) - (1/2 - r) ln(1/2 - r)` with
/// `r = sqrt(sum_k (p_k - 1/2)^2)`. Rejects inadmissible triples.
pub fn qubit_von_neumann(t: &QubitTriple, tol: f64) -> Result<f64, InfoError> {
    let margin = t.ball_margin();
    if margin > 0.25 + tol {
        return Err(InfoError::InadmissibleTriple { margin });
    }
    let r = margin.sqrt().min(0.5);
    Ok(binary_entropy(0.5 + r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parosc::{franck_condon, integrate_epsilon, FrequencyProfile};
    use crate::qudit_prob::qubit_to_density;
    use crate::statespace::{CMatrix, ToleranceConfig};
    use num_complex::Complex64 as C64;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::LN_2;

    fn pv(values: Vec<f64>) -> ProbabilityVector {
        ProbabilityVector::new(values, 1e-9).unwrap()
    }

    fn random_density(n: usize, rng: &mut ChaCha8Rng) -> DensityMatrix {
        let a = CMatrix::from_fn(n, n, |_, _| {
            C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
        });
        let mut m = &a * a.adjoint();
        let tr: f64 = (0..n).map(|j| m[(j, j)].re).sum();
        m /= C64::new(tr, 0.0);
        DensityMatrix::new(m, &ToleranceConfig::default()).unwrap()
    }

    #[test]
    fn shannon_entropy_reference_values() {
        assert_eq!(shannon_entropy(&pv(vec![1.0, 0.0])), 0.0);
        assert!((shannon_entropy(&pv(vec![0.5, 0.5])) - LN_2).abs() < 1e-15);
        assert!((shannon_entropy(&pv(vec![0.25; 4])) - 2.0 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn partition_row_major_layout() {
        let spec = PartitionSpec::new(vec![2, 2]).unwrap();
        let joint = partition(&[0.1, 0.2, 0.3, 0.4], &spec).unwrap();
        assert_eq!(joint.values(), &[0.1, 0.2, 0.3, 0.4]);
        assert_eq!(joint.marginal(0).unwrap(), vec![0.1 + 0.2, 0.3 + 0.4]);
        assert_eq!(joint.marginal(1).unwrap(), vec![0.1 + 0.3, 0.2 + 0.4]);

        // trivial N x 1 partition leaves the distribution unchanged
        let spec = PartitionSpec::new(vec![4, 1]).unwrap();
        let joint = partition(&[0.1, 0.2, 0.3, 0.4], &spec).unwrap();
        assert_eq!(joint.values(), &[0.1, 0.2, 0.3, 0.4]);
    }

    #[test]
    fn partition_pads_and_rejects() {
        let spec = PartitionSpec::new(vec![3, 2]).unwrap();
        let joint = partition(&[0.5, 0.5], &spec).unwrap();
        assert_eq!(joint.values().len(), 6);
        assert_eq!(joint.values()[2..], [0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            partition(&[0.1; 10], &spec),
            Err(InfoError::SizeMismatch { .. })
        ));
    }

    #[test]
    fn partition_bijectivity_round_trip() {
        let spec = PartitionSpec::new(vec![3, 4, 2]).unwrap();
        for s in 0..spec.total() {
            assert_eq!(spec.tuple_to_flat(&spec.flat_to_tuple(s)), s);
        }
    }

    #[test]
    fn mutual_information_reference_values() {
        // product distribution
        let joint = JointDistribution::new(vec![2, 2], vec![0.06, 0.14, 0.24, 0.56]).unwrap();
        assert!(mutual_information(&joint).unwrap().abs() < 1e-12);

        // perfectly correlated diagonal
        let joint = JointDistribution::new(vec![2, 2], vec![0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!((mutual_information(&joint).unwrap() - LN_2).abs() < 1e-12);

        // uniform
        let joint = JointDistribution::new(vec![2, 2], vec![0.25; 4]).unwrap();
        assert!(mutual_information(&joint).unwrap().abs() < 1e-12);
    }

    #[test]
    fn mutual_information_nonnegative_on_random_joints() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..500 {
            let rows = rng.random_range(2..5);
            let cols = rng.random_range(2..5);
            let mut values: Vec<f64> =
                (0..rows * cols).map(|_| rng.random_range(0.0..1.0)).collect();
            let total: f64 = values.iter().sum();
            values.iter_mut().for_each(|v| *v /= total);
            let joint = JointDistribution::new(vec![rows, cols], values).unwrap();
            assert!(mutual_information(&joint).unwrap() >= -1e-12);
        }
    }

    #[test]
    fn fc_information_is_zero_for_static_evolution() {
        let traj = integrate_epsilon(&FrequencyProfile::Constant, 5.0, 0.01).unwrap();
        let table =
            franck_condon(&traj, 2, 4.0, 32, crate::parosc::default_state_grid()).unwrap();
        let info = fc_information(&table).unwrap();
        assert!(info.abs() < 1e-12, "I = {info}");
    }

    #[test]
    fn fc_information_nonnegative_and_definitionally_consistent() {
        let traj = integrate_epsilon(&FrequencyProfile::jump_at_zero(2.0), 8.0, 0.01).unwrap();
        for &t in &[0.4, 1.1, 2.9] {
            let table =
                franck_condon(&traj, 0, t, 64, crate::parosc::default_state_grid()).unwrap();
            let info = fc_information(&table).unwrap();
            assert!(info >= -1e-9, "t={t}: I = {info}");

            // definitional equality with mutual_information . partition
            let mass = table.truncation_mass();
            let renorm: Vec<f64> = table.probs().iter().map(|p| p / mass).collect();
            let spec = PartitionSpec::new(vec![renorm.len().div_ceil(2), 2]).unwrap();
            let direct = mutual_information(&partition(&renorm, &spec).unwrap()).unwrap();
            assert!((info - direct).abs() <= 1e-12);
        }
    }

    #[test]
    fn entry_inequalities_hold_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for &n in &[2usize, 3, 4] {
            for _ in 0..60 {
                let rho = random_density(n, &mut rng);
                for record in qudit_entry_inequalities(&rho, 1e-9) {
                    assert!(
                        record.pass,
                        "N={n}: {} at {:?} = {}",
                        record.name, record.indices, record.value
                    );
                }
            }
        }
    }

    #[test]
    fn entry_inequalities_reference_cases() {
        // identity/N: zero imaginary parts make the binary entropies ln 2
        // exactly and the pair relative entropies zero
        let rho = DensityMatrix::maximally_mixed(3);
        for record in qudit_entry_inequalities(&rho, 1e-9) {
            match record.name {
                "imag_binary_entropy_lower" => assert_eq!(record.value, LN_2),
                "imag_binary_entropy_upper" => assert_eq!(record.value, 0.0),
                "imag_pair_relative_entropy" => assert_eq!(record.value, 0.0),
                _ => assert!(record.pass),
            }
        }

        // pure state with empty populations: some diagonal relative
        // entropies hit +inf and still count as satisfied
        let rho = DensityMatrix::pure(&[C64::new(0.5, 0.0), C64::new(0.0, 0.5)]).unwrap();
        let records = qudit_entry_inequalities(&rho, 1e-9);
        assert!(records.iter().all(|r| r.pass));
        assert!(records.iter().any(|r| r.value.is_infinite()));
    }

    #[test]
    fn coin_entropy_reference_values() {
        let t = QubitTriple::new(0.5, 0.5, 0.5).unwrap();
        assert!((qubit_coin_entropy(&t) - 3.0 * LN_2).abs() < 1e-15);
        let t = QubitTriple::new(0.5, 0.5, 1.0).unwrap();
        assert!((qubit_coin_entropy(&t) - 2.0 * LN_2).abs() < 1e-15);
        let t = QubitTriple::new(1.0, 0.5, 0.5).unwrap();
        assert!((qubit_coin_entropy(&t) - 2.0 * LN_2).abs() < 1e-15);
    }

    #[test]
    fn von_neumann_closed_form_reference_values() {
        let t = QubitTriple::new(0.5, 0.5, 0.5).unwrap();
        assert!((qubit_von_neumann(&t, 1e-9).unwrap() - LN_2).abs() < 1e-15);
        let t = QubitTriple::new(0.5, 0.5, 1.0).unwrap();
        assert!(qubit_von_neumann(&t, 1e-9).unwrap().abs() < 1e-15);
        // r = 1/4
        let t = QubitTriple::new(0.75, 0.5, 0.5).unwrap();
        let expected = -(0.75f64) * 0.75f64.ln() - 0.25 * 0.25f64.ln();
        assert!((qubit_von_neumann(&t, 1e-9).unwrap() - expected).abs() < 1e-15);
        // inadmissible corner
        let t = QubitTriple::new(1.0, 1.0, 1.0).unwrap();
        assert!(qubit_von_neumann(&t, 1e-9).is_err());
    }

    #[test]
    fn von_neumann_matches_eigenvalue_entropy() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let cfg = ToleranceConfig::default();
        for _ in 0..500 {
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
            let closed = qubit_von_neumann(&t, 1e-9).unwrap();
            let spectral = DensityMatrix::new(qubit_to_density(&t), &cfg)
                .unwrap()
                .von_neumann_entropy();
            assert!(
                (closed - spectral).abs() <= 1e-12,
                "triple {t:?}: {closed} vs {spectral}"
            );
        }
    }

    #[test]
    fn coin_entropy_dominates_von_neumann_empirically() {
        // explored numerically; not asserted as a theorem anywhere else
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        for _ in 0..2000 {
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
            let h = qubit_coin_entropy(&t);
            let s = qubit_von_neumann(&t, 1e-9).unwrap();
            assert!(
                s <= h + 1e-12,
                "counterexample found: {t:?} gives S = {s} > H = {h}"
            );
        }
    }
}
