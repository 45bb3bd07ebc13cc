use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use steadyent::ReservoirModel;
use steadyent_cli::config::parse_number;
use steadyent_cli::initial::parse_initial_list;
use steadyent_cli::{run, ConfigFile, Experiment, ExperimentConfig, Grid, Overrides, Preset};

/// Steady-state entanglement of driven, coupled qubits: every experiment
/// writes a CSV table with the resolved configuration in its `#` header.
///
/// Rates are in units of the reference decay rate, times in its inverse.
#[derive(Parser, Debug)]
#[command(name = "steadyent", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Time evolution of concurrence, Bell fidelities and purity
    /// [defaults: Omega=2, omega_xx=5, separate reservoirs, Werner f=0.3,0.5,0.7,0.9,1,
    /// t-final=15, samples=500; --preset fig2: Omega=1.5, omega_xx=10, common reservoir,
    /// Yu-Eberly, Werner and eg-ge families].
    Evolve(Shared),
    /// Numerical steady state in one row [defaults as evolve].
    Steady(Shared),
    /// Steady-state concurrence over (omega, coupling) with boundary curves
    /// [default grid omega=0:6:61,coupling=0:30:61; boundary curves go to
    /// --boundary, or next to --output as NAME_boundary.csv].
    PhaseDiagram(Shared),
    /// Closed-form and numerical Bell fidelities over omega
    /// [defaults: coupling=7, grid omega=0:6:61].
    Fidelities(Shared),
    /// Photon concurrence after outcoupling the steady state
    /// [defaults: Omega=2, coupling=20, grid g_tau=0:pi:181].
    TransferScan(Shared),
    /// Single-qubit steady state and Bloch vector over Omega/Gamma
    /// [default grid omega=0:8:161].
    SingleQubit(Shared),
}

#[derive(Args, Debug, Default)]
struct Shared {
    /// Rabi frequency of both qubits (of qubit 1 when --omega2 is given).
    #[arg(long, value_parser = number)]
    omega: Option<f64>,
    /// Rabi frequency of qubit 2.
    #[arg(long, value_parser = number)]
    omega2: Option<f64>,
    /// Detuning of both qubits (of qubit 1 when --delta2 is given) [default 0].
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    delta: Option<f64>,
    /// Detuning of qubit 2.
    #[arg(long, value_parser = number, allow_hyphen_values = true)]
    delta2: Option<f64>,
    /// Exchange coupling omega_xx.
    #[arg(long, value_parser = number)]
    coupling: Option<f64>,
    /// Decay rate of both qubits (of qubit 1 when --gamma2 is given) [default 1].
    #[arg(long, value_parser = number)]
    gamma: Option<f64>,
    /// Decay rate of qubit 2.
    #[arg(long, value_parser = number)]
    gamma2: Option<f64>,
    /// separate | common.
    #[arg(long, value_parser = reservoir)]
    reservoir: Option<ReservoirModel>,
    /// ';'-separated initial states: werner:f=X, ye:alpha=X, egge:a=X,
    /// bell:psi+|psi-|phi+|phi-.
    #[arg(long)]
    initial: Option<String>,
    /// Final time of the evolution.
    #[arg(long, value_parser = number)]
    t_final: Option<f64>,
    /// Number of uniformly spaced samples, including t=0 and t-final.
    #[arg(long)]
    samples: Option<usize>,
    /// Scan axes as name=start:stop:steps, comma separated; `pi` is accepted.
    #[arg(long, value_parser = grid)]
    grid: Option<Grid>,
    /// Single coupling phase g*tau for transfer-scan.
    #[arg(long, value_parser = number)]
    g_tau: Option<f64>,
    /// Number of phase-diagram points integrated to t=1000 as a check [default 4].
    #[arg(long)]
    spot_checks: Option<usize>,
    /// fig1 | fig2 (evolve and steady).
    #[arg(long, value_parser = preset)]
    preset: Option<Preset>,
    /// Config file with key = value lines and [experiment] sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path [default stdout].
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Boundary-curve CSV path for phase-diagram.
    #[arg(long)]
    boundary: Option<PathBuf>,
}

fn number(s: &str) -> Result<f64, String> {
    parse_number(s).ok_or_else(|| format!("`{s}` is not a finite number"))
}

fn reservoir(s: &str) -> Result<ReservoirModel, String> {
    s.parse()
}

fn grid(s: &str) -> Result<Grid, String> {
    s.parse().map_err(|e: steadyent_cli::CliError| e.to_string())
}

fn preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: steadyent_cli::CliError| e.to_string())
}

impl Shared {
    fn overrides(&self) -> anyhow::Result<Overrides> {
        let initial = self.initial.as_deref().map(parse_initial_list).transpose()?;
        Ok(Overrides {
            omega: self.omega,
            omega2: self.omega2,
            delta: self.delta,
            delta2: self.delta2,
            coupling: self.coupling,
            gamma: self.gamma,
            gamma2: self.gamma2,
            reservoir: self.reservoir,
            initial,
            t_final: self.t_final,
            samples: self.samples,
            grid: self.grid.clone(),
            g_tau: self.g_tau,
            spot_checks: self.spot_checks,
            preset: self.preset,
            output: self.output.clone(),
            boundary: self.boundary.clone(),
        })
    }
}

fn execute(cli: Cli) -> anyhow::Result<()> {
    let (experiment, shared) = match cli.command {
        Command::Evolve(s) => (Experiment::Evolve, s),
        Command::Steady(s) => (Experiment::Steady, s),
        Command::PhaseDiagram(s) => (Experiment::PhaseDiagram, s),
        Command::Fidelities(s) => (Experiment::Fidelities, s),
        Command::TransferScan(s) => (Experiment::TransferScan, s),
        Command::SingleQubit(s) => (Experiment::SingleQubit, s),
    };
    let from_file = match &shared.config {
        Some(path) => ConfigFile::load(path)?.for_experiment(experiment),
        None => Overrides::default(),
    };
    let overrides = from_file.merge(shared.overrides()?);
    let cfg = ExperimentConfig::resolve(experiment, overrides)?;
    for out in run(&cfg)? {
        out.table
            .write_to(out.path.as_deref())
            .with_context(|| format!("writing {} output", experiment.name()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
