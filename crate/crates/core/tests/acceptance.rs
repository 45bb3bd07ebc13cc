//! Acceptance suite: ten end-to-end checks of the numerical engine against
//! the analytic results, each reported as a PASS/FAIL line.
//!
//! Runs without the libtest harness so the report is always printed.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::SeedableRng;

use steadyent::closed_form::{
    bloch_dynamics, detuned_summary, max_concurrence, optimal_coupling, perturbative_correction,
    product_steady_state, resonant_concurrence_signed, semicircle_residual, DampingRegime, GOLDEN_CONCURRENCE,
};
use steadyent::liouville::{
    evolve, liouvillian, single_qubit_liouvillian, steady_state, EvolveOptions, SystemParams,
};
use steadyent::numerics::eig_general_small;
use steadyent::state::{
    bell_fidelities, bell_state, bloch_vector, concurrence, concurrence_signed, egge_state, werner_state, ye_state,
};
use steadyent::transfer::{phase_correction, transfer, transmitted_elements};
use steadyent::{BellKind, ComplexMatrix, DensityMatrix, ReservoirModel, TransferSettings, C64};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn numeric_rho(p: SystemParams, model: ReservoirModel) -> DensityMatrix {
    let l = liouvillian(&p, model).expect("valid parameters");
    steady_state(&l).expect("steady state").rho
}

fn numeric_signed_c(omega: f64, coupling: f64) -> f64 {
    concurrence_signed(&numeric_rho(SystemParams::resonant(omega, coupling), ReservoirModel::Separate)).unwrap()
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = f(x1);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

fn criterion_1() -> Outcome {
    let l = single_qubit_liouvillian(0.25, 1.0).map_err(|e| e.to_string())?;
    let ss = steady_state(&l).map_err(|e| e.to_string())?;
    let expected = ComplexMatrix::from_rows(&[
        [C64::new(1.0 / 18.0, 0.0), C64::new(0.0, -2.0 / 9.0)],
        [C64::new(0.0, 2.0 / 9.0), C64::new(17.0 / 18.0, 0.0)],
    ]);
    let err = ss.rho.matrix().max_abs_diff(&expected);
    check(err < 1e-10 && ss.is_unique(), format!("max elementwise error {err:.2e}, null_dim {}", ss.null_dim))
}

fn criterion_2() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut negatives = 0;
    for omega in [0.5, 1.0, 2.0, 4.0, 6.0] {
        for coupling in [0.25, 1.0, 5.0, 10.0, 20.0, 30.0] {
            let formula = resonant_concurrence_signed(omega, 1.0, coupling).unwrap();
            if formula < 0.0 {
                negatives += 1;
            }
            worst = worst.max((formula - numeric_signed_c(omega, coupling)).abs());
        }
    }
    check(worst < 1e-6, format!("30 points, {negatives} below the parabola, max |dC| = {worst:.2e}"))
}

fn criterion_3() -> Outcome {
    let (mut lo, mut hi) = (1.0, 3.0);
    let (f_lo, f_hi) = (numeric_signed_c(2.0, lo), numeric_signed_c(2.0, hi));
    if f_lo.signum() == f_hi.signum() {
        return Err(format!("no sign change on [{lo}, {hi}]"));
    }
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if numeric_signed_c(2.0, mid).signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    check((root - 2.0).abs() < 1e-6, format!("numeric root at coupling {root:.10}"))
}

fn criterion_4() -> Outcome {
    let omega = 200.0;
    let w_max = optimal_coupling(omega, 1.0).unwrap();
    let (arg, best) = golden_max(|w| numeric_signed_c(omega, w), 0.5 * w_max, 1.5 * w_max, 1e-4 * w_max);
    let gap = (best - GOLDEN_CONCURRENCE).abs();
    check(
        gap < 0.005,
        format!(
            "max C = {best:.7} at coupling {arg:.1} (closed form {w_max:.1}); 1/(1+sqrt5) = {GOLDEN_CONCURRENCE:.5}, C_max(200) = {:.7}",
            max_concurrence(omega, 1.0).unwrap()
        ),
    )
}

fn criterion_5() -> Outcome {
    let p = SystemParams::resonant(2.0, 5.0);
    let l = liouvillian(&p, ReservoirModel::Separate).unwrap();
    let target = steady_state(&l).unwrap().rho;
    let inputs = [
        ("werner f=0.3", werner_state(0.3).unwrap()),
        ("werner f=0.6", werner_state(0.6).unwrap()),
        ("werner f=1", werner_state(1.0).unwrap()),
        ("ye alpha=0.5", ye_state(0.5).unwrap()),
        ("egge a=0.2", egge_state(0.2).unwrap()),
    ];
    let mut worst: f64 = 0.0;
    let mut worst_c: f64 = 0.0;
    for (_, rho0) in &inputs {
        let traj = evolve(rho0, &l, 1e3, 2, &EvolveOptions::default()).map_err(|e| e.to_string())?;
        let end = traj.last();
        worst = worst.max(end.matrix().max_abs_diff(target.matrix()));
        worst_c = worst_c.max((concurrence(end).unwrap() - 48.0 / 181.0).abs());
    }
    let c_solver = concurrence(&target).unwrap();
    let c_formula = resonant_concurrence_signed(2.0, 1.0, 5.0).unwrap();
    let ok = worst < 1e-6
        && worst_c < 1e-5
        && (c_solver - 48.0 / 181.0).abs() < 1e-5
        && (c_formula - 48.0 / 181.0).abs() < 1e-12;
    check(
        ok,
        format!(
            "5 inputs, max |rho(1000) - rho_inf| = {worst:.2e}, max |C - 48/181| = {worst_c:.2e}, solver C = {c_solver:.8}"
        ),
    )
}

fn criterion_6() -> Outcome {
    let p = SystemParams::resonant(1.5, 10.0);
    let l = liouvillian(&p, ReservoirModel::Common).unwrap();
    let singlet = bell_state(BellKind::PsiMinus).projector();
    let residual = l.apply(singlet.matrix()).max_abs();
    let families = [
        ("werner f=0.5", werner_state(0.5).unwrap()),
        ("ye alpha=0.5", ye_state(0.5).unwrap()),
        ("egge a=0.2", egge_state(0.2).unwrap()),
    ];
    let mut finals = Vec::new();
    for (name, rho0) in &families {
        let traj = evolve(rho0, &l, 1e3, 2, &EvolveOptions::default()).map_err(|e| e.to_string())?;
        finals.push((*name, concurrence(traj.last()).unwrap()));
    }
    let mut spread: f64 = 0.0;
    for a in &finals {
        for b in &finals {
            spread = spread.max((a.1 - b.1).abs());
        }
    }
    let listing: Vec<String> = finals.iter().map(|(n, c)| format!("{n}: {c:.4}")).collect();
    check(
        residual < 1e-12 && spread > 0.05,
        format!("|L[Psi-]| = {residual:.1e}; asymptotic C {}; spread {spread:.3}", listing.join(", ")),
    )
}

fn criterion_7() -> Outcome {
    let (omega, gamma) = (1.0, 1.0);
    let remainder = |coupling: f64| {
        let rho = numeric_rho(SystemParams::resonant(omega, coupling), ReservoirModel::Separate);
        let first_order =
            &product_steady_state(omega, gamma).unwrap().into_matrix() + &perturbative_correction(omega, gamma, coupling);
        rho.matrix().max_abs_diff(&first_order)
    };
    let (r1, r2) = (remainder(0.01), remainder(0.02));
    let ratio = r2 / r1;
    check((3.5..=4.5).contains(&ratio), format!("remainders {r1:.3e}, {r2:.3e}, ratio {ratio:.4}"))
}

fn criterion_8() -> Outcome {
    let mut worst_c: f64 = 0.0;
    let mut worst_f: f64 = 0.0;
    let mut worst_printed: f64 = 0.0;
    for delta in [0.5, 1.0, 2.0] {
        let rho = numeric_rho(SystemParams::symmetric(2.0, delta, 5.0, 1.0), ReservoirModel::Separate);
        let s = detuned_summary(2.0, 1.0, 5.0, delta).map_err(|e| e.to_string())?;
        worst_c = worst_c.max((concurrence_signed(&rho).unwrap() - s.concurrence_signed).abs());
        let num = bell_fidelities(&rho).unwrap();
        for (a, b) in num.iter().zip(s.fidelities.as_array()) {
            worst_f = worst_f.max((a - b).abs());
        }
        if let Some(printed) = s.phi_minus_printed {
            worst_printed = worst_printed.max((printed - num[3]).abs());
        }
    }
    check(
        worst_c < 1e-6 && worst_f < 1e-6,
        format!(
            "max |dC| = {worst_c:.2e}, max |dF| = {worst_f:.2e}; literature Phi- form deviates by up to {worst_printed:.3}"
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst_c: f64 = 0.0;
    let mut worst_el: f64 = 0.0;
    for k in 0..100 {
        let rho = common::random_two_qubit(&mut rng, 1 + k % 4);
        let out = transfer(&rho, TransferSettings::full_swap()).unwrap();
        worst_c = worst_c.max((concurrence(&out).unwrap() - concurrence(&rho).unwrap()).abs());
        for g in [0.0, 0.7, FRAC_PI_2, 2.3, PI] {
            let a = transfer(&rho, TransferSettings::new(g)).unwrap();
            let b = transmitted_elements(&rho, TransferSettings::new(g)).unwrap();
            worst_el = worst_el.max(a.matrix().max_abs_diff(b.matrix()));
        }
    }
    let psi = bell_state(BellKind::PsiPlus).projector();
    let mut worst_sin: f64 = 0.0;
    for k in 0..=100 {
        let g = PI * k as f64 / 100.0;
        let c = concurrence(&transfer(&psi, TransferSettings::new(g)).unwrap()).unwrap();
        worst_sin = worst_sin.max((c - g.sin().powi(2)).abs());
    }
    let rho_inf = numeric_rho(SystemParams::resonant(2.0, 5.0), ReservoirModel::Separate);
    let restored = phase_correction(&transfer(&rho_inf, TransferSettings::full_swap()).unwrap()).unwrap();
    let phase_err = restored.matrix().max_abs_diff(rho_inf.matrix());
    check(
        worst_c < 1e-9 && worst_el < 1e-10 && worst_sin < 1e-10 && phase_err < 1e-10,
        format!(
            "|dC| {worst_c:.1e}, elements {worst_el:.1e}, sin^2 {worst_sin:.1e}, phase recovery {phase_err:.1e}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let mut worst_circle: f64 = 0.0;
    let mut worst_rx: f64 = 0.0;
    let mut worst_eig: f64 = 0.0;
    for k in 1..=800 {
        let omega = k as f64 * 0.01;
        let rho = steady_state(&single_qubit_liouvillian(omega, 1.0).unwrap()).unwrap().rho;
        let b = bloch_vector(&rho).unwrap();
        worst_circle = worst_circle.max(semicircle_residual(b).abs());
        worst_rx = worst_rx.max(b[0].abs());
        let dynamics = bloch_dynamics(omega, 1.0).unwrap();
        let numeric = eig_general_small(&dynamics.matrix).unwrap();
        for l in dynamics.eigenvalues {
            let d = numeric.iter().map(|z| (z - l).norm()).fold(f64::INFINITY, f64::min);
            worst_eig = worst_eig.max(d);
        }
    }
    let coherence = |omega: f64| {
        let rho = steady_state(&single_qubit_liouvillian(omega, 1.0).unwrap()).unwrap().rho;
        rho.get(1, 0).norm()
    };
    let (arg, peak) = golden_max(coherence, 0.1, 2.0, 1e-9);
    let peak_ok = (arg - FRAC_1_SQRT_2).abs() < 1e-6 && (peak - 0.5 * FRAC_1_SQRT_2).abs() < 1e-6;
    let regimes = [
        bloch_dynamics(0.25 - 1e-6, 1.0).unwrap().regime,
        bloch_dynamics(0.25, 1.0).unwrap().regime,
        bloch_dynamics(0.25 + 1e-6, 1.0).unwrap().regime,
    ];
    let regime_ok = regimes == [DampingRegime::Overdamped, DampingRegime::Critical, DampingRegime::Underdamped];
    check(
        worst_circle < 1e-10 && worst_rx < 1e-10 && peak_ok && worst_eig < 1e-10 && regime_ok,
        format!(
            "semicircle {worst_circle:.1e}, r_x {worst_rx:.1e}, |rho01| max {peak:.9} at {arg:.9}, eigenvalues {worst_eig:.1e}, regimes {regimes:?}"
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("single-qubit critical point", criterion_1),
        ("analytic vs numeric concurrence grid", criterion_2),
        ("parabola crossover", criterion_3),
        ("universal maximum", criterion_4),
        ("initial-state independence, separate reservoirs", criterion_5),
        ("initial-state dependence, common reservoir", criterion_6),
        ("perturbative scaling", criterion_7),
        ("detuned formulas", criterion_8),
        ("photon transfer", criterion_9),
        ("single-qubit Bloch geometry", criterion_10),
    ];
    let mut failures = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("[{:>2}] PASS {name} ({elapsed:.2}s): {detail}", k + 1),
            Err(detail) => {
                failures += 1;
                println!("[{:>2}] FAIL {name} ({elapsed:.2}s): {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
