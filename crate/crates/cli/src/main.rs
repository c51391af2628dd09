//! Command-line front end for the tomographic-probability toolkit.
//!
//! All numerics live in the library; subcommands only parse arguments, move
//! files and format output. Outputs are deterministic given the inputs and
//! flags (sampling commands take an explicit seed), with floats serialized
//! in their shortest round-trip form.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use io::CliError;
use tomoprob::cv_tomography::CvConfig;
use tomoprob::statespace::ToleranceConfig;

#[derive(Parser)]
#[command(
    name = "tomoprob",
    version,
    about = "Tomographic-probability representation of quantum states",
    disable_help_subcommand = true
)]
struct Cli {
    /// JSON config with tolerance and grid overrides
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Output path (defaults to stdout)
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Seed for sampling commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Tolerance override key=value (repeatable); keys: tol_herm,
    /// tol_trace, tol_psd, tol_norm, quad_tol, nu_eps, marginal_tol,
    /// recon_norm_tol
    #[arg(long = "tol-override", global = true, value_name = "KEY=VALUE")]
    tol_override: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Density-matrix <-> probability-table conversions and admissibility checks
    Qudit {
        #[command(subcommand)]
        action: QuditAction,
    },
    /// Malevich-square triads: SVG rendering and statistics
    Triad {
        #[command(subcommand)]
        action: TriadAction,
    },
    /// Spin, optical and symplectic tomograms
    Tomogram {
        #[command(subcommand)]
        action: TomogramAction,
    },
    /// Parametric-oscillator evolution, Franck-Condon tables, Gaussian tomograms
    Oscillator {
        #[command(subcommand)]
        action: OscillatorAction,
    },
    /// Entropies and entropic-inequality reports for a state
    Entropy(StateInput),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct StateInput {
    /// Density-matrix JSON file
    #[arg(long, value_name = "PATH")]
    density: Option<PathBuf>,
    /// Probability-table JSON file
    #[arg(long, value_name = "PATH")]
    table: Option<PathBuf>,
}

#[derive(Subcommand)]
enum QuditAction {
    /// Probability table -> density matrix JSON
    Encode {
        #[arg(long, value_name = "PATH")]
        table: PathBuf,
    },
    /// Density matrix -> probability table JSON
    Decode {
        #[arg(long, value_name = "PATH")]
        density: PathBuf,
    },
    /// Admissibility report: validation, Bloch-ball margins, entry bounds,
    /// entropic inequalities
    Check(StateInput),
}

#[derive(Subcommand)]
enum TriadAction {
    /// Render the triad mosaic as SVG
    Render {
        #[command(flatten)]
        state: StateInput,
        #[arg(long, value_enum, default_value = "pairwise")]
        mode: commands::MosaicModeArg,
        /// Style-config JSON file
        #[arg(long, value_name = "PATH")]
        style: Option<PathBuf>,
        /// Metadata sidecar path
        #[arg(long, value_name = "PATH")]
        meta: Option<PathBuf>,
    },
    /// Sides, areas and area entropy as JSON
    Stats {
        #[command(flatten)]
        state: StateInput,
        #[arg(long, value_enum, default_value = "pairwise")]
        mode: commands::MosaicModeArg,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct WaveInput {
    /// Wave-function JSON file
    #[arg(long, value_name = "PATH")]
    state: Option<PathBuf>,
    /// Oscillator ground state
    #[arg(long)]
    ground: bool,
    /// Hermite eigenstate of the given order
    #[arg(long, value_name = "N")]
    hermite: Option<usize>,
    /// Ground state displaced in position
    #[arg(long, value_name = "A")]
    displaced: Option<f64>,
}

#[derive(Args)]
struct XGridArgs {
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    x_min: Option<f64>,
    #[arg(long, value_name = "X", allow_hyphen_values = true)]
    x_max: Option<f64>,
    #[arg(long, value_name = "N")]
    n_points: Option<usize>,
}

#[derive(Subcommand)]
enum TomogramAction {
    /// Spin tomogram CSV for one or more directions
    Spin {
        #[arg(long, value_name = "PATH")]
        density: PathBuf,
        /// Polar angles in radians (comma separated, paired with --phi)
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        theta: Vec<f64>,
        /// Azimuths in radians (comma separated, paired with --theta)
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        phi: Vec<f64>,
        /// Sample this many random directions instead (seeded by --seed)
        #[arg(long, value_name = "K")]
        random_directions: Option<usize>,
    },
    /// Optical tomogram CSV at one angle or a sweep
    Optical {
        #[command(flatten)]
        state: WaveInput,
        /// Quadrature angle in radians
        #[arg(long, conflicts_with = "sweep")]
        theta: Option<f64>,
        /// Sweep this many uniform angles over [0, pi)
        #[arg(long, value_name = "K")]
        sweep: Option<usize>,
        #[command(flatten)]
        grid: XGridArgs,
        /// Metadata sidecar path (single-angle only)
        #[arg(long, value_name = "PATH")]
        meta: Option<PathBuf>,
    },
    /// Symplectic tomogram CSV at (mu, nu)
    Symplectic {
        #[command(flatten)]
        state: WaveInput,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
        #[command(flatten)]
        grid: XGridArgs,
        /// Metadata sidecar path
        #[arg(long, value_name = "PATH")]
        meta: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum OscillatorAction {
    /// Integrate the epsilon trajectory and dump it as CSV
    Evolve {
        #[arg(long, value_name = "PATH")]
        profile: PathBuf,
        #[arg(long)]
        t_end: f64,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
    },
    /// Franck-Condon table CSV with the even/odd Shannon information appended
    Fc {
        #[arg(long, value_name = "PATH")]
        profile: PathBuf,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = tomoprob::parosc::DEFAULT_FC_NMAX)]
        n_max: usize,
    },
    /// Gaussian tomogram parameters of the evolved ground-like state
    Tomogram {
        #[arg(long, value_name = "PATH")]
        profile: PathBuf,
        #[arg(long)]
        t: f64,
        #[arg(long, allow_hyphen_values = true)]
        mu: f64,
        #[arg(long, allow_hyphen_values = true)]
        nu: f64,
    },
}

/// Tolerances and grids every command runs under.
pub struct RunConfig {
    pub tolerances: ToleranceConfig,
    pub cv: CvConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FileConfig {
    tolerances: ToleranceConfig,
    cv: CvConfig,
}

fn build_run_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let file: FileConfig = match &cli.config {
        Some(path) => io::load_json(path)?,
        None => FileConfig::default(),
    };
    let mut tolerances = file.tolerances;
    let mut cv = file.cv;
    for entry in &cli.tol_override {
        let (key, value) = entry
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected KEY=VALUE, got '{entry}'")))?;
        let value: f64 = value
            .parse()
            .map_err(|_| CliError::Usage(format!("'{value}' is not a number")))?;
        match key {
            "tol_herm" => tolerances.tol_herm = value,
            "tol_trace" => tolerances.tol_trace = value,
            "tol_psd" => tolerances.tol_psd = value,
            "tol_norm" => tolerances.tol_norm = value,
            "quad_tol" => cv.quad_tol = value,
            "nu_eps" => cv.nu_eps = value,
            "marginal_tol" => cv.marginal_tol = value,
            "recon_norm_tol" => cv.recon_norm_tol = value,
            other => {
                return Err(CliError::Usage(format!("unknown tolerance key '{other}'")));
            }
        }
    }
    tolerances
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    Ok(RunConfig {
        tolerances,
        cv,
        seed: cli.seed,
        out: cli.out.clone(),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let run_config = build_run_config(&cli)?;
    match cli.command {
        Command::Qudit { action } => match action {
            QuditAction::Encode { table } => commands::qudit_encode(&run_config, &table),
            QuditAction::Decode { density } => commands::qudit_decode(&run_config, &density),
            QuditAction::Check(input) => {
                commands::qudit_check(&run_config, input.density.as_ref(), input.table.as_ref())
            }
        },
        Command::Triad { action } => match action {
            TriadAction::Render {
                state,
                mode,
                style,
                meta,
            } => commands::triad_render(
                &run_config,
                state.density.as_ref(),
                state.table.as_ref(),
                mode,
                style.as_ref(),
                meta.as_ref(),
            ),
            TriadAction::Stats { state, mode } => commands::triad_stats(
                &run_config,
                state.density.as_ref(),
                state.table.as_ref(),
                mode,
            ),
        },
        Command::Tomogram { action } => match action {
            TomogramAction::Spin {
                density,
                theta,
                phi,
                random_directions,
            } => commands::tomogram_spin(&run_config, &density, &theta, &phi, random_directions),
            TomogramAction::Optical {
                state,
                theta,
                sweep,
                grid,
                meta,
            } => commands::tomogram_optical(
                &run_config,
                &state,
                theta,
                sweep,
                (grid.x_min, grid.x_max, grid.n_points),
                meta.as_ref(),
            ),
            TomogramAction::Symplectic {
                state,
                mu,
                nu,
                grid,
                meta,
            } => commands::tomogram_symplectic(
                &run_config,
                &state,
                mu,
                nu,
                (grid.x_min, grid.x_max, grid.n_points),
                meta.as_ref(),
            ),
        },
        Command::Oscillator { action } => match action {
            OscillatorAction::Evolve { profile, t_end, dt } => {
                commands::oscillator_evolve(&run_config, &profile, t_end, dt)
            }
            OscillatorAction::Fc {
                profile,
                m,
                t,
                n_max,
            } => commands::oscillator_fc(&run_config, &profile, m, t, n_max),
            OscillatorAction::Tomogram { profile, t, mu, nu } => {
                commands::oscillator_tomogram(&run_config, &profile, t, mu, nu)
            }
        },
        Command::Entropy(input) => {
            commands::entropy_report(&run_config, input.density.as_ref(), input.table.as_ref())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version through the error path too
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
