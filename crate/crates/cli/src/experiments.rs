use std::path::{Path, PathBuf};

use rayon::prelude::*;

use steadyent::closed_form::{
    crossover_coupling, detuned_summary, max_concurrence, optimal_coupling, semicircle_residual, single_qubit_steady,
};
use steadyent::liouville::{evolve, liouvillian, steady_state, EvolveOptions, SteadyState, SystemParams};
use steadyent::state::{bell_fidelities, bloch_vector, concurrence, concurrence_signed};
use steadyent::transfer::transfer;
use steadyent::{BellKind, DensityMatrix, ReservoirModel, TransferSettings};

use crate::config::{Experiment, ExperimentConfig};
use crate::table::{fmt_float, Table};
use crate::CliError;

/// Time of the integrated phase-diagram spot checks.
pub const SPOT_CHECK_TIME: f64 = 1e3;
/// Largest accepted max-norm gap between an integrated spot check and the
/// steady state.
pub const SPOT_CHECK_TOLERANCE: f64 = 1e-6;

/// A table and where to write it; `None` means stdout.
#[derive(Debug, Clone)]
pub struct Output {
    pub table: Table,
    pub path: Option<PathBuf>,
}

/// Runs the configured experiment. The first output is the main table; the
/// phase diagram adds the boundary curves when a path for them is known
/// (explicitly, or derived from the main output path).
pub fn run(cfg: &ExperimentConfig) -> Result<Vec<Output>, CliError> {
    let main = |table: Table| vec![Output { table, path: cfg.output.clone() }];
    Ok(match cfg.experiment {
        Experiment::Evolve => main(run_evolve(cfg)?),
        Experiment::Steady => main(run_steady(cfg)?),
        Experiment::PhaseDiagram => {
            let (grid, boundary) = run_phase_diagram(cfg)?;
            let mut out = main(grid);
            let path = cfg.boundary.clone().or_else(|| cfg.output.as_deref().map(boundary_path));
            if path.is_some() {
                out.push(Output { table: boundary, path });
            }
            out
        }
        Experiment::Fidelities => main(run_fidelities(cfg)?),
        Experiment::TransferScan => main(run_transfer_scan(cfg)?),
        Experiment::SingleQubit => main(run_single_qubit(cfg)?),
    })
}

/// `dir/name.csv` -> `dir/name_boundary.csv`.
pub fn boundary_path(main: &Path) -> PathBuf {
    let stem = main.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match main.extension() {
        Some(ext) => format!("{stem}_boundary.{}", ext.to_string_lossy()),
        None => format!("{stem}_boundary"),
    };
    main.with_file_name(name)
}

fn header_table<S: Into<String>>(cfg: &ExperimentConfig, columns: impl IntoIterator<Item = S>) -> Table {
    let mut t = Table::new(columns);
    for line in cfg.header() {
        t.comment(line);
    }
    t
}

const FIDELITY_COLUMNS: [&str; 4] = ["fidelity_psi_plus", "fidelity_psi_minus", "fidelity_phi_plus", "fidelity_phi_minus"];

fn with_omega(p: &SystemParams, omega: f64) -> SystemParams {
    SystemParams { omega1: omega, omega2: omega, ..*p }
}

fn identical_qubits(p: &SystemParams) -> bool {
    p.omega1 == p.omega2 && p.delta1 == p.delta2 && p.gamma1 == p.gamma2 && p.gamma1 > 0.0
}

fn solve(p: &SystemParams, model: ReservoirModel) -> Result<SteadyState, CliError> {
    Ok(steady_state(&liouvillian(p, model)?)?)
}

/// Concurrence, Bell fidelities and purity along each trajectory.
pub fn run_evolve(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let l = liouvillian(&cfg.params, cfg.reservoir)?;
    let blocks: Vec<Vec<Vec<String>>> = cfg
        .initial
        .par_iter()
        .map(|init| -> Result<Vec<Vec<String>>, CliError> {
            let rho0 = init.density_matrix()?;
            let traj = evolve(&rho0, &l, cfg.t_final, cfg.samples, &EvolveOptions::default())?;
            let label = init.to_string();
            traj.samples
                .iter()
                .map(|(t, rho)| {
                    let f = bell_fidelities(rho)?;
                    let mut row = vec![label.clone(), fmt_float(*t), fmt_float(concurrence(rho)?)];
                    row.extend(f.iter().map(|&x| fmt_float(x)));
                    row.push(fmt_float(rho.purity()));
                    Ok(row)
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let mut columns = vec!["initial", "t", "concurrence"];
    columns.extend(FIDELITY_COLUMNS);
    columns.push("purity");
    let mut table = header_table(cfg, columns);
    table.rows = blocks.into_iter().flatten().collect();
    Ok(table)
}

fn bits_label(index: usize) -> String {
    // Index 0 is |11>, index 3 is |00>.
    format!("{}{}", 1 - index / 2, 1 - index % 2)
}

/// Steady state with its entanglement figures and all matrix elements, in
/// one row.
pub fn run_steady(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let ss = solve(&cfg.params, cfg.reservoir)?;
    let rho = &ss.rho;
    let p = &cfg.params;
    let closed = if cfg.reservoir == ReservoirModel::Separate && identical_qubits(p) {
        detuned_summary(p.omega1, p.gamma1, p.coupling, p.delta1).map(|s| s.concurrence_signed).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    let mut columns: Vec<String> =
        ["null_dim", "residual", "concurrence", "concurrence_signed"].iter().map(|s| s.to_string()).collect();
    columns.extend(FIDELITY_COLUMNS.iter().map(|s| s.to_string()));
    columns.push("purity".into());
    columns.push("closed_form_concurrence_signed".into());
    let mut row = vec![
        ss.null_dim.to_string(),
        fmt_float(ss.residual),
        fmt_float(concurrence(rho)?),
        fmt_float(concurrence_signed(rho)?),
    ];
    row.extend(bell_fidelities(rho)?.iter().map(|&x| fmt_float(x)));
    row.push(fmt_float(rho.purity()));
    row.push(fmt_float(closed));
    for i in 0..4 {
        for j in 0..4 {
            let (a, b) = (bits_label(i), bits_label(j));
            columns.push(format!("re_{a}_{b}"));
            columns.push(format!("im_{a}_{b}"));
            row.push(fmt_float(rho.get(i, j).re));
            row.push(fmt_float(rho.get(i, j).im));
        }
    }
    let mut table = header_table(cfg, columns);
    if !ss.is_unique() {
        table.comment(format!("steady state not unique (null space dimension {}); one representative shown", ss.null_dim));
    }
    table.rows.push(row);
    Ok(table)
}

/// Steady-state concurrence over the `(omega, coupling)` grid, plus the
/// crossover and optimum curves.
pub fn run_phase_diagram(cfg: &ExperimentConfig) -> Result<(Table, Table), CliError> {
    let omegas = cfg.grid.values("omega");
    let couplings = cfg.grid.values("coupling");
    let points: Vec<(f64, f64)> = omegas.iter().flat_map(|&w| couplings.iter().map(move |&c| (w, c))).collect();
    let solved: Vec<(f64, usize)> = points
        .par_iter()
        .map(|&(omega, coupling)| -> Result<(f64, usize), CliError> {
            let p = SystemParams { coupling, ..with_omega(&cfg.params, omega) };
            let ss = solve(&p, cfg.reservoir)?;
            Ok((concurrence_signed(&ss.rho)?, ss.null_dim))
        })
        .collect::<Result<_, _>>()?;

    let mut table = header_table(cfg, ["omega", "coupling", "concurrence", "concurrence_signed"]);
    for (&(omega, coupling), &(signed, _)) in points.iter().zip(&solved) {
        table.push_floats(&[omega, coupling, signed.max(0.0), signed]);
    }
    let degenerate = solved.iter().filter(|(_, d)| *d != 1).count();
    if degenerate > 0 {
        table.comment(format!("{degenerate} grid points have a non-unique steady state"));
    }

    let n = cfg.spot_checks.min(points.len());
    let picks: Vec<usize> = (1..=n).map(|k| k * (points.len() - 1) / (n + 1)).collect();
    let initial = cfg.initial[0].density_matrix()?;
    let checks: Vec<String> = picks
        .par_iter()
        .map(|&k| -> Result<String, CliError> {
            let (omega, coupling) = points[k];
            let p = SystemParams { coupling, ..with_omega(&cfg.params, omega) };
            let l = liouvillian(&p, cfg.reservoir)?;
            let ss = steady_state(&l)?;
            let traj = evolve(&initial, &l, SPOT_CHECK_TIME, 2, &EvolveOptions::default())?;
            let deviation = traj.last().matrix().max_abs_diff(ss.rho.matrix());
            let dc = (concurrence_signed(traj.last())? - solved[k].0).abs();
            if ss.is_unique() && deviation > SPOT_CHECK_TOLERANCE {
                return Err(CliError::SpotCheck { omega, coupling, deviation });
            }
            Ok(format!(
                "spot check omega = {omega}, coupling = {coupling}: |rho(t={SPOT_CHECK_TIME}) - rho_inf| = {}, |dC| = {}",
                fmt_float(deviation),
                fmt_float(dc)
            ))
        })
        .collect::<Result<_, _>>()?;
    for line in checks {
        table.comment(line);
    }

    let gamma = cfg.params.gamma1;
    let mut boundary =
        header_table(cfg, ["omega", "crossover_coupling", "optimal_coupling", "max_concurrence"]);
    boundary.comment("curves for identical resonant qubits with the gamma1 decay rate");
    for &omega in &omegas {
        boundary.push_floats(&[
            omega,
            crossover_coupling(omega, gamma)?,
            optimal_coupling(omega, gamma)?,
            max_concurrence(omega, gamma)?,
        ]);
    }
    Ok((table, boundary))
}

/// Closed-form and numerical Bell fidelities over an `omega` sweep.
pub fn run_fidelities(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let omegas = cfg.grid.values("omega");
    let applicable = cfg.reservoir == ReservoirModel::Separate && identical_qubits(&cfg.params);
    let rows: Vec<Vec<f64>> = omegas
        .par_iter()
        .map(|&omega| -> Result<Vec<f64>, CliError> {
            let p = with_omega(&cfg.params, omega);
            let numeric = bell_fidelities(&solve(&p, cfg.reservoir)?.rho)?;
            let closed = if applicable {
                detuned_summary(omega, p.gamma1, p.coupling, p.delta1)?.fidelities.as_array()
            } else {
                [f64::NAN; 4]
            };
            let diff = closed.iter().zip(&numeric).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let mut row = vec![omega];
            row.extend(closed);
            row.extend(numeric);
            row.push(if applicable { diff } else { f64::NAN });
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    let mut columns = vec!["omega".to_string()];
    for kind in BellKind::ALL {
        columns.push(format!("F_{}", label(kind)));
    }
    for kind in BellKind::ALL {
        columns.push(format!("numeric_F_{}", label(kind)));
    }
    columns.push("max_abs_diff".into());
    let mut table = header_table(cfg, columns);
    if !applicable {
        table.comment("closed-form fidelities need identical qubits and separate reservoirs; columns left as NaN");
    }
    for r in rows {
        table.push_floats(&r);
    }
    Ok(table)
}

fn label(kind: BellKind) -> &'static str {
    match kind {
        BellKind::PsiPlus => "psi_plus",
        BellKind::PsiMinus => "psi_minus",
        BellKind::PhiPlus => "phi_plus",
        BellKind::PhiMinus => "phi_minus",
    }
}

/// Photon concurrence after outcoupling the numerical steady state.
pub fn run_transfer_scan(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let ss = solve(&cfg.params, cfg.reservoir)?;
    let taus = cfg.grid.values("g_tau");
    let values: Vec<f64> = taus
        .par_iter()
        .map(|&g| -> Result<f64, CliError> { Ok(concurrence(&transfer(&ss.rho, TransferSettings::new(g))?)?) })
        .collect::<Result<_, _>>()?;
    let mut table = header_table(cfg, ["g_tau", "photon_concurrence"]);
    table.comment(format!("qubit steady-state concurrence = {}", fmt_float(concurrence(&ss.rho)?)));
    if !ss.is_unique() {
        table.comment(format!("steady state not unique (null space dimension {})", ss.null_dim));
    }
    for (g, c) in taus.iter().zip(values) {
        table.push_floats(&[*g, c]);
    }
    Ok(table)
}

/// Single-qubit steady state and Bloch vector over `Omega / Gamma`.
pub fn run_single_qubit(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let gamma = cfg.params.gamma1;
    let mut table = header_table(
        cfg,
        ["omega_over_gamma", "rho00", "rho11", "im_rho01", "r_x", "r_y", "r_z", "semicircle_residual"],
    );
    table.comment("rho00 is the excited-state population, im_rho01 the imaginary part of <1|rho|0>");
    for x in cfg.grid.values("omega") {
        let rho: DensityMatrix = single_qubit_steady(x * gamma, gamma)?;
        let b = bloch_vector(&rho)?;
        table.push_floats(&[x, rho.get(0, 0).re, rho.get(1, 1).re, rho.get(0, 1).im, b[0], b[1], b[2], semicircle_residual(b)]);
    }
    Ok(table)
}
