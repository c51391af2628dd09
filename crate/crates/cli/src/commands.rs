//! Subcommand implementations: load inputs, call the library, write
//! canonical output.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use tomoprob::cv_tomography::{
    optical_tomogram, symplectic_tomogram_pure, suggested_tomogram_grid, SymplecticTomogram,
    WaveFunction, WaveFunctionJson,
};
use tomoprob::grid::GridSpec1D;
use tomoprob::infotheory::{
    fc_information, qubit_coin_entropy, qubit_von_neumann, qudit_entry_inequalities,
    InequalityRecord,
};
use tomoprob::parosc::{
    franck_condon, gaussian_tomogram, integrate_epsilon, FrequencyProfile,
};
use tomoprob::qudit_prob::{
    artificial_qubit_triples, check_entry_bounds, check_qubit_ball, density_to_qubit,
    density_to_table, table_to_density, EntryBoundsReport, QuditProbabilityTable, TableJson,
};
use tomoprob::statespace::{ComplexMatrixJson, DensityMatrix, ToleranceConfig};
use tomoprob::suprematism::{
    render_svg, triads_from_density, MosaicMetadata, MosaicMode, StyleConfig,
};

use crate::io::{
    load_json, map_cv_error, map_parosc_error, map_state_error, map_table_error,
    to_canonical_json, write_output, CliError,
};
use crate::{RunConfig, WaveInput};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MosaicModeArg {
    Pairwise,
    Disjoint,
}

impl From<MosaicModeArg> for MosaicMode {
    fn from(value: MosaicModeArg) -> Self {
        match value {
            MosaicModeArg::Pairwise => MosaicMode::Pairwise,
            MosaicModeArg::Disjoint => MosaicMode::Disjoint,
        }
    }
}

fn load_density(cfg: &RunConfig, path: &Path) -> Result<DensityMatrix, CliError> {
    let json: ComplexMatrixJson = load_json(path)?;
    let matrix = json.to_matrix().map_err(|e| CliError::Schema(e.to_string()))?;
    DensityMatrix::new(matrix, &cfg.tolerances).map_err(map_state_error)
}

fn load_table(path: &Path) -> Result<QuditProbabilityTable, CliError> {
    let json: TableJson = load_json(path)?;
    QuditProbabilityTable::from_json(&json).map_err(map_table_error)
}

/// Accepts either a density file or a table file; tables are rebuilt into
/// matrices and fully validated.
fn load_state(
    cfg: &RunConfig,
    density: Option<&PathBuf>,
    table: Option<&PathBuf>,
) -> Result<DensityMatrix, CliError> {
    match (density, table) {
        (Some(path), None) => load_density(cfg, path),
        (None, Some(path)) => {
            let table = load_table(path)?;
            DensityMatrix::new(table_to_density(&table), &cfg.tolerances).map_err(map_state_error)
        }
        _ => Err(CliError::Usage(
            "exactly one of --density or --table is required".into(),
        )),
    }
}

pub fn qudit_encode(cfg: &RunConfig, table_path: &Path) -> Result<(), CliError> {
    let table = load_table(table_path)?;
    let matrix = table_to_density(&table);
    let json = ComplexMatrixJson::from_matrix(&matrix);
    write_output(cfg.out.as_ref(), &to_canonical_json(&json)?)
}

pub fn qudit_decode(cfg: &RunConfig, density_path: &Path) -> Result<(), CliError> {
    let rho = load_density(cfg, density_path)?;
    let table = density_to_table(&rho).map_err(map_table_error)?;
    write_output(cfg.out.as_ref(), &to_canonical_json(&table.to_json())?)
}

#[derive(Serialize)]
struct BallRecord {
    j: usize,
    k: usize,
    margin: f64,
    admissible: bool,
}

#[derive(Serialize)]
struct CheckReport {
    dim: usize,
    valid_density: bool,
    violation: Option<String>,
    eigenvalues: Option<Vec<f64>>,
    ball_checks: Vec<BallRecord>,
    entry_bounds: Option<EntryBoundsReport>,
    inequalities: Vec<InequalityRecord>,
    pass: bool,
}

pub fn qudit_check(
    cfg: &RunConfig,
    density: Option<&PathBuf>,
    table: Option<&PathBuf>,
) -> Result<(), CliError> {
    // build the candidate matrix without insisting on positivity, so the
    // report can name the violation instead of dying on load
    let (dim, matrix) = match (density, table) {
        (Some(path), None) => {
            let json: ComplexMatrixJson = load_json(path)?;
            let m = json.to_matrix().map_err(|e| CliError::Schema(e.to_string()))?;
            (json.dim, m)
        }
        (None, Some(path)) => {
            let t = load_table(path)?;
            (t.dim(), table_to_density(&t))
        }
        _ => {
            return Err(CliError::Usage(
                "exactly one of --density or --table is required".into(),
            ))
        }
    };

    let report = match DensityMatrix::new(matrix.clone(), &cfg.tolerances) {
        Ok(rho) => {
            let ball_checks: Vec<BallRecord> = artificial_qubit_triples(&rho)
                .map_err(map_table_error)?
                .into_iter()
                .map(|((j, k), triple)| {
                    let check = check_qubit_ball(&triple, &cfg.tolerances);
                    BallRecord {
                        j,
                        k,
                        margin: check.margin,
                        admissible: check.admissible,
                    }
                })
                .collect();
            let entry_bounds = check_entry_bounds(rho.entries(), &cfg.tolerances);
            let inequalities = qudit_entry_inequalities(&rho, cfg.tolerances.tol_psd);
            let pass = ball_checks.iter().all(|b| b.admissible)
                && entry_bounds.pass
                && inequalities.iter().all(|r| r.pass);
            CheckReport {
                dim: rho.dim(),
                valid_density: true,
                violation: None,
                eigenvalues: Some(rho.eigenvalues()),
                ball_checks,
                entry_bounds: Some(entry_bounds),
                inequalities,
                pass,
            }
        }
        Err(e) => CheckReport {
            dim,
            valid_density: false,
            violation: Some(e.to_string()),
            eigenvalues: None,
            ball_checks: Vec::new(),
            entry_bounds: None,
            inequalities: Vec::new(),
            pass: false,
        },
    };

    let pass = report.pass;
    write_output(cfg.out.as_ref(), &to_canonical_json(&report)?)?;
    if pass {
        Ok(())
    } else {
        Err(CliError::Physics(
            report
                .violation
                .unwrap_or_else(|| "admissibility checks failed".into()),
        ))
    }
}

pub fn triad_render(
    cfg: &RunConfig,
    density: Option<&PathBuf>,
    table: Option<&PathBuf>,
    mode: MosaicModeArg,
    style: Option<&PathBuf>,
    meta: Option<&PathBuf>,
) -> Result<(), CliError> {
    let rho = load_state(cfg, density, table)?;
    let style: StyleConfig = match style {
        Some(path) => load_json(path)?,
        None => StyleConfig::default(),
    };
    let mosaic =
        triads_from_density(&rho, mode.into()).map_err(|e| CliError::Usage(e.to_string()))?;
    let svg = render_svg(&mosaic, &style);
    write_output(cfg.out.as_ref(), &svg)?;
    if let Some(meta_path) = meta {
        let metadata = MosaicMetadata::from_mosaic(&mosaic);
        write_output(Some(meta_path), &to_canonical_json(&metadata)?)?;
    }
    Ok(())
}

pub fn triad_stats(
    cfg: &RunConfig,
    density: Option<&PathBuf>,
    table: Option<&PathBuf>,
    mode: MosaicModeArg,
) -> Result<(), CliError> {
    let rho = load_state(cfg, density, table)?;
    let mosaic =
        triads_from_density(&rho, mode.into()).map_err(|e| CliError::Usage(e.to_string()))?;
    let metadata = MosaicMetadata::from_mosaic(&mosaic);
    write_output(cfg.out.as_ref(), &to_canonical_json(&metadata)?)
}

pub fn tomogram_spin(
    cfg: &RunConfig,
    density: &Path,
    theta: &[f64],
    phi: &[f64],
    random_directions: Option<usize>,
) -> Result<(), CliError> {
    let rho = load_density(cfg, density)?;
    let directions: Vec<(f64, f64)> = if let Some(count) = random_directions {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        (0..count)
            .map(|_| {
                let u: f64 = rng.random_range(-1.0..1.0);
                (u.acos(), rng.random_range(0.0..std::f64::consts::TAU))
            })
            .collect()
    } else {
        if theta.len() != phi.len() || theta.is_empty() {
            return Err(CliError::Usage(
                "--theta and --phi need the same nonzero number of values \
                 (or use --random-directions)"
                    .into(),
            ));
        }
        theta.iter().copied().zip(phi.iter().copied()).collect()
    };

    let dim = rho.dim();
    let mut csv = String::from("j,theta,phi");
    for i in 0..dim {
        let two_m = (dim - 1) as i64 - 2 * i as i64;
        csv.push_str(&format!(",w_{}", format_half(two_m)));
    }
    csv.push('\n');
    for &(th, ph) in &directions {
        let direction = tomoprob::spin_tomography::Direction::new(th, ph)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let tomogram = tomoprob::spin_tomography::spin_tomogram(&rho, &direction, &cfg.tolerances)
            .map_err(|e| CliError::Physics(e.to_string()))?;
        csv.push_str(&tomogram.to_csv_row());
        csv.push('\n');
    }
    write_output(cfg.out.as_ref(), &csv)
}

/// Renders 2m as a half-integer label: 3 -> "3over2", 2 -> "1".
fn format_half(two_m: i64) -> String {
    let sign = if two_m < 0 { "m" } else { "" };
    let a = two_m.abs();
    if a % 2 == 0 {
        format!("{sign}{}", a / 2)
    } else {
        format!("{sign}{a}over2")
    }
}

fn resolve_wave(cfg: &RunConfig, input: &WaveInput) -> Result<WaveFunction, CliError> {
    let grid = tomoprob::cv_tomography::CvConfig::default_x_grid();
    match (&input.state, input.ground, input.hermite, input.displaced) {
        (Some(path), false, None, None) => {
            let json: WaveFunctionJson = load_json(path)?;
            json.to_wavefunction(cfg.cv.quad_tol).map_err(map_cv_error)
        }
        (None, true, None, None) => Ok(WaveFunction::ground(grid)),
        (None, false, Some(n), None) => Ok(WaveFunction::hermite(n, grid)),
        (None, false, None, Some(a)) => Ok(WaveFunction::displaced_ground(a, grid)),
        _ => Err(CliError::Usage(
            "exactly one of --state, --ground, --hermite, --displaced is required".into(),
        )),
    }
}

fn resolve_x_grid(
    spec: (Option<f64>, Option<f64>, Option<usize>),
    fallback: GridSpec1D,
) -> Result<GridSpec1D, CliError> {
    GridSpec1D::new(
        spec.0.unwrap_or(fallback.min),
        spec.1.unwrap_or(fallback.max),
        spec.2.unwrap_or(fallback.n),
    )
    .map_err(|e| CliError::Usage(e.to_string()))
}

fn emit_tomogram(
    cfg: &RunConfig,
    tomogram: &SymplecticTomogram,
    meta: Option<&PathBuf>,
) -> Result<(), CliError> {
    write_output(cfg.out.as_ref(), &tomogram.to_csv())?;
    if let Some(meta_path) = meta {
        write_output(Some(meta_path), &to_canonical_json(&tomogram.metadata())?)?;
    }
    Ok(())
}

pub fn tomogram_optical(
    cfg: &RunConfig,
    state: &WaveInput,
    theta: Option<f64>,
    sweep: Option<usize>,
    grid_spec: (Option<f64>, Option<f64>, Option<usize>),
    meta: Option<&PathBuf>,
) -> Result<(), CliError> {
    let psi = resolve_wave(cfg, state)?;
    match (theta, sweep) {
        (Some(theta), None) => {
            let fallback = suggested_tomogram_grid(theta.cos(), theta.sin(), &psi);
            let x_grid = resolve_x_grid(grid_spec, fallback)?;
            let tomogram = optical_tomogram(&psi, theta, x_grid, &cfg.cv).map_err(map_cv_error)?;
            emit_tomogram(cfg, &tomogram, meta)
        }
        (None, Some(count)) => {
            if count == 0 {
                return Err(CliError::Usage("sweep needs at least one angle".into()));
            }
            let fallback = suggested_tomogram_grid(1.0, 1.0, &psi);
            let x_grid = resolve_x_grid(grid_spec, fallback)?;
            let mut csv = String::from("theta,X,value\n");
            for k in 0..count {
                let theta = k as f64 * std::f64::consts::PI / count as f64;
                let tomogram =
                    optical_tomogram(&psi, theta, x_grid, &cfg.cv).map_err(map_cv_error)?;
                for (x, v) in x_grid.points().iter().zip(tomogram.values()) {
                    csv.push_str(&format!("{theta},{x},{v}\n"));
                }
            }
            write_output(cfg.out.as_ref(), &csv)
        }
        _ => Err(CliError::Usage(
            "exactly one of --theta or --sweep is required".into(),
        )),
    }
}

pub fn tomogram_symplectic(
    cfg: &RunConfig,
    state: &WaveInput,
    mu: f64,
    nu: f64,
    grid_spec: (Option<f64>, Option<f64>, Option<usize>),
    meta: Option<&PathBuf>,
) -> Result<(), CliError> {
    let psi = resolve_wave(cfg, state)?;
    let fallback = suggested_tomogram_grid(mu, nu, &psi);
    let x_grid = resolve_x_grid(grid_spec, fallback)?;
    let tomogram =
        symplectic_tomogram_pure(&psi, mu, nu, x_grid, &cfg.cv).map_err(map_cv_error)?;
    emit_tomogram(cfg, &tomogram, meta)
}

pub fn oscillator_evolve(
    cfg: &RunConfig,
    profile_path: &Path,
    t_end: f64,
    dt: f64,
) -> Result<(), CliError> {
    let profile: FrequencyProfile = load_json(profile_path)?;
    let trajectory = integrate_epsilon(&profile, t_end, dt).map_err(map_parosc_error)?;
    write_output(cfg.out.as_ref(), &trajectory.to_csv())
}

pub fn oscillator_fc(
    cfg: &RunConfig,
    profile_path: &Path,
    m: usize,
    t: f64,
    n_max: usize,
) -> Result<(), CliError> {
    let profile: FrequencyProfile = load_json(profile_path)?;
    let dt = 0.01;
    let trajectory =
        integrate_epsilon(&profile, t.max(dt), dt).map_err(map_parosc_error)?;
    let table = franck_condon(
        &trajectory,
        m,
        t,
        n_max,
        tomoprob::parosc::default_state_grid(),
    )
    .map_err(map_parosc_error)?;
    let information = fc_information(&table).map_err(|e| CliError::Physics(e.to_string()))?;
    let mut csv = table.to_csv();
    csv.push_str(&format!("# information = {information}\n"));
    write_output(cfg.out.as_ref(), &csv)
}

pub fn oscillator_tomogram(
    cfg: &RunConfig,
    profile_path: &Path,
    t: f64,
    mu: f64,
    nu: f64,
) -> Result<(), CliError> {
    let profile: FrequencyProfile = load_json(profile_path)?;
    let dt = 0.01;
    let trajectory =
        integrate_epsilon(&profile, t.max(dt), dt).map_err(map_parosc_error)?;
    let tomogram = gaussian_tomogram(&trajectory, t, mu, nu).map_err(map_parosc_error)?;
    let csv = format!(
        "t,mu,nu,mean,variance\n{},{},{},{},{}\n",
        t, mu, nu, tomogram.mean, tomogram.variance
    );
    write_output(cfg.out.as_ref(), &csv)
}

#[derive(Serialize)]
struct CoinEntropyRecord {
    j: usize,
    k: usize,
    value: f64,
}

#[derive(Serialize)]
struct QubitEntropies {
    coin_entropy: f64,
    von_neumann_closed_form: f64,
}

#[derive(Serialize)]
struct EntropyReport {
    dim: usize,
    von_neumann: f64,
    coin_entropies: Vec<CoinEntropyRecord>,
    coin_entropy_total: f64,
    qubit: Option<QubitEntropies>,
    inequalities: Vec<InequalityRecord>,
}

pub fn entropy_report(
    cfg: &RunConfig,
    density: Option<&PathBuf>,
    table: Option<&PathBuf>,
) -> Result<(), CliError> {
    let rho = load_state(cfg, density, table)?;
    let coin_entropies: Vec<CoinEntropyRecord> = artificial_qubit_triples(&rho)
        .map_err(map_table_error)?
        .into_iter()
        .map(|((j, k), triple)| CoinEntropyRecord {
            j,
            k,
            value: qubit_coin_entropy(&triple),
        })
        .collect();
    let qubit = if rho.dim() == 2 {
        let triple = density_to_qubit(&rho).map_err(map_table_error)?;
        Some(QubitEntropies {
            coin_entropy: qubit_coin_entropy(&triple),
            von_neumann_closed_form: qubit_von_neumann(&triple, cfg.tolerances.tol_psd)
                .map_err(|e| CliError::Physics(e.to_string()))?,
        })
    } else {
        None
    };
    let report = EntropyReport {
        dim: rho.dim(),
        von_neumann: rho.von_neumann_entropy(),
        coin_entropy_total: coin_entropies.iter().map(|r| r.value).sum(),
        coin_entropies,
        qubit,
        inequalities: qudit_entry_inequalities(&rho, cfg.tolerances.tol_psd),
    };
    write_output(cfg.out.as_ref(), &to_canonical_json(&report)?)
}

/// Default tolerance set used by tests and docs examples.
#[allow(dead_code)]
pub fn default_tolerances() -> ToleranceConfig {
    ToleranceConfig::default()
}
