use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use steadyent::closed_form::max_concurrence;
use steadyent::liouville::{liouvillian, steady_state, SystemParams};
use steadyent::state::concurrence;
use steadyent::ReservoirModel;
use steadyent_cli::experiments::{run_fidelities, run_phase_diagram, run_single_qubit, run_transfer_scan};
use steadyent_cli::{run, ConfigFile, Experiment, ExperimentConfig, Overrides, Table};

fn config(experiment: Experiment, settings: &[(&str, &str)]) -> ExperimentConfig {
    let mut o = Overrides::default();
    for (k, v) in settings {
        o.set(k, v).unwrap();
    }
    ExperimentConfig::resolve(experiment, o).unwrap()
}

fn col(t: &Table, name: &str) -> Vec<f64> {
    t.floats(name).unwrap_or_else(|| panic!("column {name}"))
}

#[test]
fn every_experiment_runs_with_defaults_except_the_big_grid() {
    for exp in Experiment::ALL {
        let settings: &[(&str, &str)] = match exp {
            Experiment::PhaseDiagram => &[("grid", "omega=0:2:3,coupling=0:4:3"), ("spot_checks", "1")],
            Experiment::Evolve => &[("samples", "20")],
            _ => &[],
        };
        let outputs = run(&config(exp, settings)).unwrap();
        assert_eq!(outputs.len(), 1, "{}", exp.name());
        let t = &outputs[0].table;
        assert!(!t.rows.is_empty());
        assert!(t.comments.iter().any(|c| c == &format!("experiment = {}", exp.name())));
        assert!(t.rows.iter().all(|r| r.len() == t.columns.len()));
    }
}

#[test]
fn output_is_byte_deterministic() {
    let cfg = config(Experiment::PhaseDiagram, &[("grid", "omega=0:4:9,coupling=0:8:9"), ("spot_checks", "2")]);
    let a: Vec<String> = run(&cfg).unwrap().iter().map(|o| o.table.render()).collect();
    let b: Vec<String> = run(&cfg).unwrap().iter().map(|o| o.table.render()).collect();
    assert_eq!(a, b);
    let cfg = config(Experiment::Evolve, &[("samples", "30"), ("initial", "werner:f=0.3;ye:alpha=0.5")]);
    assert_eq!(run(&cfg).unwrap()[0].table.render(), run(&cfg).unwrap()[0].table.render());
}

#[test]
fn evolve_times_increase_per_initial_state() {
    let cfg = config(Experiment::Evolve, &[("samples", "40"), ("t_final", "3")]);
    let t = &run(&cfg).unwrap()[0].table;
    let k = t.column("initial").unwrap();
    let times = col(t, "t");
    assert_eq!(t.rows.len(), 5 * 40);
    for (i, chunk) in times.chunks(40).enumerate() {
        assert_eq!(chunk[0], 0.0);
        assert!((chunk[39] - 3.0).abs() < 1e-12);
        assert!(chunk.windows(2).all(|w| w[1] > w[0]));
        assert!(t.rows[i * 40..(i + 1) * 40].iter().all(|r| r[k] == t.rows[i * 40][k]));
    }
}

#[test]
fn evolve_defaults_reach_the_steady_concurrence() {
    let cfg = config(Experiment::Evolve, &[("samples", "3"), ("t_final", "60"), ("initial", "werner:f=1")]);
    let t = &run(&cfg).unwrap()[0].table;
    let c = col(t, "concurrence");
    assert!((c[2] - 48.0 / 181.0).abs() < 1e-8, "{}", c[2]);
}

#[test]
fn fig2_preset_uses_common_reservoir_and_three_families() {
    let cfg = config(Experiment::Evolve, &[("preset", "fig2")]);
    assert_eq!(cfg.reservoir, ReservoirModel::Common);
    assert_eq!(cfg.params.coupling, 10.0);
    assert_eq!(cfg.params.omega1, 1.5);
    let names: Vec<String> = cfg.initial.iter().map(|s| s.to_string()).collect();
    for family in ["ye:", "werner:", "egge:"] {
        assert!(names.iter().any(|n| n.starts_with(family)), "{family} missing from {names:?}");
    }
}

#[test]
fn phase_diagram_sign_change_at_the_parabola() {
    let cfg = config(Experiment::PhaseDiagram, &[("grid", "omega=2:4:2,coupling=0:30:61"), ("spot_checks", "0")]);
    let (t, _) = run_phase_diagram(&cfg).unwrap();
    let omega = col(&t, "omega");
    let coupling = col(&t, "coupling");
    let signed = col(&t, "concurrence_signed");
    let row: Vec<(f64, f64)> =
        omega.iter().zip(&coupling).zip(&signed).filter(|((w, _), _)| **w == 2.0).map(|((_, c), s)| (*c, *s)).collect();
    let step = 0.5;
    let first_positive = row.iter().find(|(_, s)| *s > 0.0).unwrap().0;
    assert!((first_positive - 2.0).abs() <= step + 1e-12, "{first_positive}");
    let last_negative = row.iter().rfind(|(_, s)| *s < 0.0).unwrap().0;
    assert!((last_negative - 2.0).abs() <= step + 1e-12, "{last_negative}");
}

#[test]
fn phase_diagram_full_grid_max_and_clipping() {
    let cfg = config(Experiment::PhaseDiagram, &[("spot_checks", "2")]);
    let (t, boundary) = run_phase_diagram(&cfg).unwrap();
    assert_eq!(t.rows.len(), 61 * 61);
    let c = col(&t, "concurrence");
    let signed = col(&t, "concurrence_signed");
    for (a, s) in c.iter().zip(&signed) {
        assert!(*a >= 0.0);
        assert_eq!(*a, s.max(0.0));
    }
    let best = c.iter().cloned().fold(f64::MIN, f64::max);
    let target = max_concurrence(6.0, 1.0).unwrap();
    assert!((best - target).abs() < 0.01, "{best} vs {target}");
    assert_eq!(t.comments.iter().filter(|l| l.starts_with("spot check")).count(), 2);

    let omegas = col(&boundary, "omega");
    let crossover = col(&boundary, "crossover_coupling");
    for (w, x) in omegas.iter().zip(&crossover) {
        assert!((x - w * w / 2.0).abs() < 1e-9);
    }
}

#[test]
fn fidelities_closed_form_matches_numerics() {
    let cfg = config(Experiment::Fidelities, &[]);
    assert_eq!(cfg.params.coupling, 7.0);
    let t = run_fidelities(&cfg).unwrap();
    assert_eq!(t.rows.len(), 61);
    let diff = col(&t, "max_abs_diff");
    assert!(diff.iter().all(|d| *d < 1e-6), "{:?}", diff.iter().cloned().fold(0.0, f64::max));
    assert_eq!(col(&t, "F_psi_plus")[0], 0.0);
    assert_eq!(col(&t, "F_psi_minus")[0], 0.0);
    assert!(col(&t, "numeric_F_psi_plus")[0] < 1e-6);
    assert!(col(&t, "numeric_F_psi_minus")[0] < 1e-6);
}

#[test]
fn fidelities_with_detuning_still_agree() {
    let cfg = config(Experiment::Fidelities, &[("delta", "0.7"), ("grid", "omega=0.5:4:8")]);
    let t = run_fidelities(&cfg).unwrap();
    assert!(col(&t, "max_abs_diff").iter().all(|d| *d < 1e-6));
}

#[test]
fn transfer_scan_endpoints() {
    let cfg = config(Experiment::TransferScan, &[]);
    assert_eq!(cfg.params.coupling, 20.0);
    let t = run_transfer_scan(&cfg).unwrap();
    let g = col(&t, "g_tau");
    let c = col(&t, "photon_concurrence");
    assert_eq!(c[0], 0.0);
    let k = g.iter().position(|x| (x - FRAC_PI_2).abs() < 1e-9).unwrap();

    let p = SystemParams::symmetric(2.0, 0.0, 20.0, 1.0);
    let rho = steady_state(&liouvillian(&p, ReservoirModel::Separate).unwrap()).unwrap().rho;
    let qubit = concurrence(&rho).unwrap();
    assert!((c[k] - qubit).abs() < 1e-9, "{} vs {qubit}", c[k]);
    assert!(c.iter().all(|x| (0.0..=qubit + 1e-9).contains(x)));
}

#[test]
fn transfer_scan_single_phase() {
    let cfg = config(Experiment::TransferScan, &[("g_tau", "pi/2")]);
    let t = run_transfer_scan(&cfg).unwrap();
    let g = col(&t, "g_tau");
    assert_eq!(g.len(), 1);
    assert!((g[0] - FRAC_PI_2).abs() < 1e-11);
}

#[test]
fn single_qubit_sweep() {
    let cfg = config(Experiment::SingleQubit, &[("grid", "omega=0:2:2001")]);
    let t = run_single_qubit(&cfg).unwrap();
    assert!(col(&t, "semicircle_residual").iter().all(|r| r.abs() < 1e-10));
    assert!(col(&t, "r_x").iter().all(|x| *x == 0.0));
    let x = col(&t, "omega_over_gamma");
    let coherence = col(&t, "im_rho01");
    let (k, peak) = coherence.iter().map(|c| c.abs()).enumerate().fold((0, 0.0), |a, (i, c)| if c > a.1 { (i, c) } else { a });
    assert!((x[k] - FRAC_1_SQRT_2).abs() <= 1e-3, "{}", x[k]);
    assert!((peak - 0.5 * FRAC_1_SQRT_2).abs() < 1e-6);
    for ((a, b), z) in col(&t, "rho00").iter().zip(col(&t, "rho11")).zip(col(&t, "r_z")) {
        assert!((a + b - 1.0).abs() < 1e-12);
        assert!((a - b - z).abs() < 1e-10);
    }
}

#[test]
fn steady_row_matches_closed_form() {
    let t = &run(&config(Experiment::Steady, &[])).unwrap()[0].table;
    assert_eq!(t.rows.len(), 1);
    assert_eq!(col(t, "null_dim"), vec![1.0]);
    let c = col(t, "concurrence")[0];
    assert!((c - 48.0 / 181.0).abs() < 1e-10);
    assert!((col(t, "closed_form_concurrence_signed")[0] - c).abs() < 1e-10);
    let trace: f64 = ["re_11_11", "re_10_10", "re_01_01", "re_00_00"].iter().map(|n| col(t, n)[0]).sum();
    assert!((trace - 1.0).abs() < 1e-10);
}

#[test]
fn config_file_sections_and_precedence() {
    let text = "\
# shared settings
omega = 3
coupling = 4

[steady]
coupling = 6
reservoir = common
";
    let file = ConfigFile::parse(text).unwrap();
    let steady = file.for_experiment(Experiment::Steady);
    assert_eq!(steady.omega, Some(3.0));
    assert_eq!(steady.coupling, Some(6.0));
    assert_eq!(file.for_experiment(Experiment::Evolve).coupling, Some(4.0));

    let mut cli = Overrides::default();
    cli.set("coupling", "8").unwrap();
    let cfg = ExperimentConfig::resolve(Experiment::Steady, steady.merge(cli)).unwrap();
    assert_eq!(cfg.params.coupling, 8.0);
    assert_eq!(cfg.params.omega1, 3.0);
    assert_eq!(cfg.reservoir, ReservoirModel::Common);
}

#[test]
fn invalid_settings_are_rejected() {
    let mut o = Overrides::default();
    assert!(o.set("initial", "werner:f=1.5").is_err());
    assert!(o.set("grid", "omega=0:1:1").is_err());
    assert!(o.set("samples", "many").is_err());
    assert!(o.set("colour", "red").is_err());
    assert!(ConfigFile::parse("omega 3").is_err());
    let mut o = Overrides::default();
    o.set("gamma", "-1").unwrap();
    assert!(ExperimentConfig::resolve(Experiment::Steady, o).is_err());
    let mut o = Overrides::default();
    o.set("g_tau", "1").unwrap();
    assert!(ExperimentConfig::resolve(Experiment::Steady, o).is_err());
}
