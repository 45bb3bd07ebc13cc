//! Analytic steady-state results for driven, coupled qubits with separate
//! reservoirs, plus the single-qubit Bloch dynamics.
//!
//! These are evaluated directly from their formulas and serve as oracles for
//! the numerical engine in [`crate::liouville`]. All functions take rates in
//! the same units; nothing assumes `gamma = 1`.
//!
//! Sign convention: with `H = Omega/2 sx` and the `(|1>, |0>)` basis the
//! single-qubit coherence is `rho_{10} = -i Omega Gamma / (Gamma^2 + 2 Omega^2)`,
//! and the first-order exchange correction has `rho^xx_{10,00} < 0` for
//! `Omega, omega_xx > 0`.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::ComplexMatrix;
use crate::pauli::index_of_bits;
use crate::state::DensityMatrix;

/// Largest steady-state concurrence reachable with separate reservoirs,
/// `1/(1 + sqrt 5)`.
pub const GOLDEN_CONCURRENCE: f64 = 0.309_016_994_374_947_4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClosedFormError {
    #[error("decay rate must be positive, got {0}")]
    NonPositiveGamma(f64),
    #[error("N^4 = {0} is not positive; the detuned formulas do not apply")]
    OutOfValidity(f64),
}

fn check_gamma(gamma: f64) -> Result<(), ClosedFormError> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(ClosedFormError::NonPositiveGamma(gamma))
    }
}

/// Steady state of a single resonantly driven, damped qubit:
/// `[[W^2, -i W G], [i W G, G^2 + W^2]] / (G^2 + 2 W^2)`.
pub fn single_qubit_steady(omega: f64, gamma: f64) -> Result<DensityMatrix, ClosedFormError> {
    check_gamma(gamma)?;
    let d = gamma * gamma + 2.0 * omega * omega;
    let coh = omega * gamma / d;
    let m = ComplexMatrix::from_rows(&[
        [C64::new(omega * omega / d, 0.0), C64::new(0.0, -coh)],
        [C64::new(0.0, coh), C64::new((gamma * gamma + omega * omega) / d, 0.0)],
    ]);
    Ok(DensityMatrix::new_unchecked(vec![2], m))
}

/// Stationary Bloch vector `(0, 2 W G, -G^2) / (G^2 + 2 W^2)`.
pub fn single_qubit_bloch(omega: f64, gamma: f64) -> Result<[f64; 3], ClosedFormError> {
    check_gamma(gamma)?;
    let d = gamma * gamma + 2.0 * omega * omega;
    Ok([0.0, 2.0 * omega * gamma / d, -gamma * gamma / d])
}

/// `(r_z + 1/2)^2 + r_y^2 / 2 - 1/4`, zero on the stationary semicircle.
pub fn semicircle_residual(bloch: [f64; 3]) -> f64 {
    (bloch[2] + 0.5).powi(2) + bloch[1] * bloch[1] / 2.0 - 0.25
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingRegime {
    Underdamped,
    Critical,
    Overdamped,
}

/// Linear part of the `(r_z, r_y)` Bloch equations.
#[derive(Debug, Clone)]
pub struct BlochDynamics {
    /// `[[-G, W], [-W, -G/2]]`.
    pub matrix: ComplexMatrix,
    /// `(-3G - sqrt(G^2 - 16 W^2))/4` and `(-3G + sqrt(G^2 - 16 W^2))/4`.
    pub eigenvalues: [C64; 2],
    pub regime: DampingRegime,
}

pub fn bloch_dynamics(omega: f64, gamma: f64) -> Result<BlochDynamics, ClosedFormError> {
    check_gamma(gamma)?;
    let matrix = ComplexMatrix::from_real_rows(&[[-gamma, omega], [-omega, -gamma / 2.0]]);
    let disc = gamma * gamma - 16.0 * omega * omega;
    let root = C64::new(disc, 0.0).sqrt();
    let base = C64::new(-3.0 * gamma, 0.0);
    let eigenvalues = [(base - root) / 4.0, (base + root) / 4.0];
    let regime = if disc.abs() <= 1e-12 * gamma * gamma {
        DampingRegime::Critical
    } else if disc < 0.0 {
        DampingRegime::Underdamped
    } else {
        DampingRegime::Overdamped
    };
    Ok(BlochDynamics { matrix, eigenvalues, regime })
}

/// `rho_1 ⊗ rho_2` for two identical uncoupled qubits.
pub fn product_steady_state(omega: f64, gamma: f64) -> Result<DensityMatrix, ClosedFormError> {
    let single = single_qubit_steady(omega, gamma)?;
    Ok(single.tensor(&single))
}

/// First-order (in `omega_xx`) traceless correction to the product state.
///
/// Nonzero entries: `rho_{11,00} = 2i W^2 G w / (G^2+2W^2)^2` and
/// `rho_{10,00} = rho_{01,00} = -2 W G^2 w / (G^2+2W^2)^2`, plus Hermitian
/// partners.
pub fn perturbative_correction(omega: f64, gamma: f64, coupling: f64) -> ComplexMatrix {
    let d2 = (gamma * gamma + 2.0 * omega * omega).powi(2);
    let two_photon = C64::new(0.0, 2.0 * omega * omega * gamma * coupling / d2);
    let one_photon = C64::new(-2.0 * omega * gamma * gamma * coupling / d2, 0.0);
    let mut m = ComplexMatrix::zeros(4, 4);
    let gg = index_of_bits(&[0, 0]);
    let ee = index_of_bits(&[1, 1]);
    m[(ee, gg)] = two_photon;
    m[(gg, ee)] = two_photon.conj();
    for k in [index_of_bits(&[1, 0]), index_of_bits(&[0, 1])] {
        m[(k, gg)] = one_photon;
        m[(gg, k)] = one_photon.conj();
    }
    m
}

/// Exact resonant steady state with separate reservoirs and identical qubits:
/// `P (rho_1 ⊗ rho_2 + rho^xx) + (G^2 w^2 / X) (1 - sz) ⊗ (1 - sz)` with
/// `P = (G^2 + 2W^2)^2 / X` and `X = (G^2 + 2W^2)^2 + 4 w^2 G^2`.
pub fn resonant_steady_state(omega: f64, gamma: f64, coupling: f64) -> Result<DensityMatrix, ClosedFormError> {
    let d2 = (gamma * gamma + 2.0 * omega * omega).powi(2);
    let x = d2 + 4.0 * coupling * coupling * gamma * gamma;
    let product = product_steady_state(omega, gamma)?.into_matrix();
    let body = &product + &perturbative_correction(omega, gamma, coupling);
    let mut m = body.scale_real(d2 / x);
    // (1 - sz) ⊗ (1 - sz) = 4 |00><00|
    let gg = index_of_bits(&[0, 0]);
    m[(gg, gg)] += 4.0 * gamma * gamma * coupling * coupling / x;
    Ok(DensityMatrix::new_unchecked(vec![2, 2], m))
}

/// Resonant `C = 2 W^2 (2 w G - W^2) / ((G^2 + 2 W^2)^2 + 4 w^2 G^2)`,
/// before clamping at zero.
pub fn resonant_concurrence_signed(omega: f64, gamma: f64, coupling: f64) -> Result<f64, ClosedFormError> {
    check_gamma(gamma)?;
    let w2 = omega * omega;
    let d2 = (gamma * gamma + 2.0 * w2).powi(2);
    Ok(2.0 * w2 * (2.0 * coupling * gamma - w2) / (d2 + 4.0 * coupling * coupling * gamma * gamma))
}

/// Perturbative `C = 2 W^2 (2 w G - W^2) / (G^2 + 2 W^2)^2`, valid for `w << G`.
pub fn perturbative_concurrence_signed(omega: f64, gamma: f64, coupling: f64) -> Result<f64, ClosedFormError> {
    check_gamma(gamma)?;
    let w2 = omega * omega;
    Ok(2.0 * w2 * (2.0 * coupling * gamma - w2) / (gamma * gamma + 2.0 * w2).powi(2))
}

/// Coupling at which the steady-state concurrence switches on, `W^2 / 2G`.
pub fn crossover_coupling(omega: f64, gamma: f64) -> Result<f64, ClosedFormError> {
    check_gamma(gamma)?;
    Ok(omega * omega / (2.0 * gamma))
}

/// Coupling that maximizes the resonant concurrence,
/// `W^2/2G + sqrt((2W^2 + G^2)^2 + W^4) / 2G`.
pub fn optimal_coupling(omega: f64, gamma: f64) -> Result<f64, ClosedFormError> {
    check_gamma(gamma)?;
    let w2 = omega * omega;
    Ok(w2 / (2.0 * gamma) + ((2.0 * w2 + gamma * gamma).powi(2) + w2 * w2).sqrt() / (2.0 * gamma))
}

/// Maximum resonant concurrence `W^2 / (W^2 + sqrt(W^4 + (G^2 + 2W^2)^2))`.
pub fn max_concurrence(omega: f64, gamma: f64) -> Result<f64, ClosedFormError> {
    check_gamma(gamma)?;
    let w2 = omega * omega;
    Ok(w2 / (w2 + (w2 * w2 + (gamma * gamma + 2.0 * w2).powi(2)).sqrt()))
}

/// Limit of [`resonant_steady_state`] at `coupling = optimal_coupling` as
/// `omega / gamma -> infinity`.
///
/// Term by term: the prefactor `P -> 2/(5 + sqrt 5)`, the product state
/// tends to `I/4`, `rho^xx_{11,00} -> i (1 + sqrt 5)/4`, the one-photon
/// corrections vanish as `1/omega`, and the ground-state completion tends to
/// `(3 + sqrt 5)/(5 + sqrt 5)`.
pub fn asymptotic_rho_max() -> DensityMatrix {
    let s5 = 5.0_f64.sqrt();
    let prefactor = 2.0 / (5.0 + s5);
    let two_photon = C64::new(0.0, (1.0 + s5) / 4.0);
    let completion = (3.0 + s5) / (5.0 + s5);
    let mut m = ComplexMatrix::identity(4).scale_real(0.25);
    let gg = index_of_bits(&[0, 0]);
    let ee = index_of_bits(&[1, 1]);
    m[(ee, gg)] = two_photon;
    m[(gg, ee)] = two_photon.conj();
    let mut m = m.scale_real(prefactor);
    m[(gg, gg)] += completion;
    DensityMatrix::new_unchecked(vec![2, 2], m)
}

/// Fidelities with the four Bell states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellFidelities {
    pub psi_plus: f64,
    pub psi_minus: f64,
    pub phi_plus: f64,
    pub phi_minus: f64,
}

impl BellFidelities {
    pub fn as_array(&self) -> [f64; 4] {
        [self.psi_plus, self.psi_minus, self.phi_plus, self.phi_minus]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self { psi_plus: a[0], psi_minus: a[1], phi_plus: a[2], phi_minus: a[3] }
    }
}

/// Closed-form steady-state quantities with detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyStateSummary {
    pub concurrence_signed: f64,
    pub concurrence: f64,
    pub fidelities: BellFidelities,
    /// `N^4 = (|G~|^2 + 2W^2)^2 + 4 w |G~|^2 (w + 2 delta)`.
    pub n4: f64,
    /// `|G~| = |G + 2 i delta|`.
    pub gamma_tilde_mag: f64,
    /// `sqrt(1/2 - W^2 N^-4 (2G^2 + W^2 + 4 delta w))`, the form of the
    /// `Phi-` fidelity that appears in the literature. It disagrees with the
    /// master equation away from resonance (and breaks `sum F^2 = 1` even at
    /// resonance); kept for comparison only. `None` if the radicand is
    /// negative.
    pub phi_minus_printed: Option<f64>,
}

/// Detuned steady-state concurrence and Bell fidelities for identical qubits
/// (`Omega_j = omega`, `delta_j = delta`, `Gamma_j = gamma`).
///
/// The `Phi-` fidelity uses `sqrt(1/2 - W^2 N^-4 (W^2 + 4 delta w + 8 delta^2))`,
/// which is what completeness of the Bell basis requires given the other
/// three fidelities.
pub fn detuned_summary(omega: f64, gamma: f64, coupling: f64, delta: f64) -> Result<SteadyStateSummary, ClosedFormError> {
    check_gamma(gamma)?;
    let w2 = omega * omega;
    let gt = C64::new(gamma, 2.0 * delta).norm();
    let gt2 = gt * gt;
    let n4 = (gt2 + 2.0 * w2).powi(2) + 4.0 * coupling * gt2 * (coupling + 2.0 * delta);
    if !(n4 > 0.0) {
        return Err(ClosedFormError::OutOfValidity(n4));
    }
    let n2 = n4.sqrt();
    let concurrence_signed = 2.0 * w2 / n4 * (2.0 * coupling * gt - w2);
    let psi_plus = omega.abs() / n2 * (2.0 * gt2 + w2).sqrt();
    let psi_minus = w2 / n2;
    let phi_plus = (0.5 - w2 / n4 * (2.0 * gamma * gamma + w2 - 4.0 * delta * coupling)).max(0.0).sqrt();
    let phi_minus = (0.5 - w2 / n4 * (w2 + 4.0 * delta * coupling + 8.0 * delta * delta)).max(0.0).sqrt();
    let printed = 0.5 - w2 / n4 * (2.0 * gamma * gamma + w2 + 4.0 * delta * coupling);
    Ok(SteadyStateSummary {
        concurrence_signed,
        concurrence: concurrence_signed.max(0.0),
        fidelities: BellFidelities { psi_plus, psi_minus, phi_plus, phi_minus },
        n4,
        gamma_tilde_mag: gt,
        phi_minus_printed: (printed >= 0.0).then(|| printed.sqrt()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{concurrence, concurrence_signed};
    use approx::assert_abs_diff_eq;

    #[test]
    fn single_qubit_limits() {
        let crit = single_qubit_steady(0.25, 1.0).unwrap();
        assert_abs_diff_eq!(crit.get(0, 0).re, 1.0 / 18.0, epsilon = 1e-15);
        assert_abs_diff_eq!(crit.get(0, 1).im, -2.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(crit.get(1, 0).im, 2.0 / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(crit.get(1, 1).re, 17.0 / 18.0, epsilon = 1e-15);

        let strong = single_qubit_steady(1e3, 1.0).unwrap();
        assert_abs_diff_eq!(strong.get(0, 0).re, 0.5, epsilon = 1e-6);
        assert_abs_diff_eq!(strong.get(0, 1).im, -1.0 / 2e3, epsilon = 1e-8);

        let undriven = single_qubit_steady(0.0, 1.0).unwrap();
        assert!(undriven.matrix().approx_eq(DensityMatrix::basis_projector(&[0]).matrix(), 0.0));

        assert_eq!(single_qubit_steady(1.0, 0.0).unwrap_err(), ClosedFormError::NonPositiveGamma(0.0));
    }

    #[test]
    fn bloch_eigenvalues_and_regimes() {
        let b = bloch_dynamics(0.0, 1.0).unwrap();
        assert_eq!(b.regime, DampingRegime::Overdamped);
        assert_abs_diff_eq!(b.eigenvalues[0].re, -1.0);
        assert_abs_diff_eq!(b.eigenvalues[1].re, -0.5);

        let b = bloch_dynamics(0.25, 1.0).unwrap();
        assert_eq!(b.regime, DampingRegime::Critical);
        assert_abs_diff_eq!(b.eigenvalues[0].re, -0.75);
        assert_abs_diff_eq!(b.eigenvalues[1].re, -0.75);

        let b = bloch_dynamics(1.0, 1.0).unwrap();
        assert_eq!(b.regime, DampingRegime::Underdamped);
        let r = 15.0_f64.sqrt() / 4.0;
        assert_abs_diff_eq!(b.eigenvalues[0].im, -r, epsilon = 1e-15);
        assert_abs_diff_eq!(b.eigenvalues[1].im, r, epsilon = 1e-15);
        let num = crate::numerics::eig_general_small(&b.matrix).unwrap();
        for l in b.eigenvalues {
            assert!(num.iter().any(|z| (z - l).norm() < 1e-12));
        }
    }

    #[test]
    fn perturbative_correction_values() {
        assert_eq!(perturbative_correction(1.0, 1.0, 0.0).max_abs(), 0.0);
        let m = perturbative_correction(1.0, 1.0, 0.01);
        let ee = index_of_bits(&[1, 1]);
        let gg = index_of_bits(&[0, 0]);
        assert_abs_diff_eq!(m[(ee, gg)].im, 0.02 / 9.0, epsilon = 1e-17);
        assert_abs_diff_eq!(m.trace().norm(), 0.0);
        let doubled = perturbative_correction(1.0, 1.0, 0.02);
        assert!(doubled.approx_eq(&m.scale_real(2.0), 1e-17));
        assert!(m.hermitian_deviation() == 0.0);
    }

    #[test]
    fn resonant_concurrence_values() {
        assert_abs_diff_eq!(resonant_concurrence_signed(2.0, 1.0, 5.0).unwrap(), 48.0 / 181.0, epsilon = 1e-15);
        assert_abs_diff_eq!(resonant_concurrence_signed(1.0, 1.0, 1.0).unwrap(), 2.0 / 13.0, epsilon = 1e-15);
        let w0 = crossover_coupling(1.7, 1.0).unwrap();
        assert_abs_diff_eq!(resonant_concurrence_signed(1.7, 1.0, w0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn crossover_and_optimum() {
        assert_abs_diff_eq!(crossover_coupling(2.0, 1.0).unwrap(), 2.0);
        assert_abs_diff_eq!(crossover_coupling(0.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(optimal_coupling(1.0, 1.0).unwrap(), (1.0 + 10.0_f64.sqrt()) / 2.0, epsilon = 1e-15);
        for omega in [0.3, 1.0, 2.0, 6.0] {
            let at_opt = resonant_concurrence_signed(omega, 1.0, optimal_coupling(omega, 1.0).unwrap()).unwrap();
            assert_abs_diff_eq!(at_opt, max_concurrence(omega, 1.0).unwrap(), epsilon = 1e-12);
        }
        assert_abs_diff_eq!(max_concurrence(1e3, 1.0).unwrap(), GOLDEN_CONCURRENCE, epsilon = 1e-6);
        assert_abs_diff_eq!(GOLDEN_CONCURRENCE, 1.0 / (1.0 + 5.0_f64.sqrt()), epsilon = 1e-16);
    }

    #[test]
    fn optimum_by_dense_scan() {
        let (omega, gamma) = (2.0, 1.0);
        let step = 1e-3;
        let best = (0..20_000)
            .map(|k| k as f64 * step)
            .max_by(|a, b| {
                let ca = resonant_concurrence_signed(omega, gamma, *a).unwrap();
                let cb = resonant_concurrence_signed(omega, gamma, *b).unwrap();
                ca.total_cmp(&cb)
            })
            .unwrap();
        assert!((best - optimal_coupling(omega, gamma).unwrap()).abs() <= step);
    }

    #[test]
    fn rho_max_properties() {
        let rho = asymptotic_rho_max();
        assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(concurrence(&rho).unwrap(), GOLDEN_CONCURRENCE, epsilon = 1e-6);
        let s5 = 5.0_f64.sqrt();
        assert_abs_diff_eq!(rho.get(0, 0).re, 1.0 / (2.0 * s5 * (s5 + 1.0)), epsilon = 1e-15);
        assert_abs_diff_eq!(rho.get(0, 3).im, 1.0 / (2.0 * s5), epsilon = 1e-15);
        assert!(DensityMatrix::two_qubit(rho.matrix().clone()).is_ok());
    }

    #[test]
    fn resonant_state_reproduces_scalar_formula() {
        for (omega, coupling) in [(2.0, 5.0), (1.0, 1.0), (0.5, 10.0), (4.0, 20.0)] {
            let rho = resonant_steady_state(omega, 1.0, coupling).unwrap();
            let c = concurrence_signed(&rho).unwrap();
            assert_abs_diff_eq!(c, resonant_concurrence_signed(omega, 1.0, coupling).unwrap(), epsilon = 1e-10);
        }
    }

    #[test]
    fn detuned_reduces_at_resonance() {
        let s = detuned_summary(2.0, 1.0, 5.0, 0.0).unwrap();
        assert_eq!(s.concurrence_signed, resonant_concurrence_signed(2.0, 1.0, 5.0).unwrap());
        assert_abs_diff_eq!(s.fidelities.psi_minus, 4.0 / 181.0_f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(s.n4, 181.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.gamma_tilde_mag, 1.0);
    }

    #[test]
    fn bell_fidelities_resolve_identity() {
        for (o, w, d) in [(2.0, 5.0, 0.0), (2.0, 5.0, 1.0), (1.3, 0.7, -0.4), (0.0, 3.0, 0.2)] {
            let s = detuned_summary(o, 1.0, w, d).unwrap();
            let total: f64 = s.fidelities.as_array().iter().map(|f| f * f).sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn detuned_rejects_bad_input() {
        assert!(matches!(detuned_summary(1.0, 1.0, f64::NAN, 0.0), Err(ClosedFormError::OutOfValidity(_))));
        assert!(matches!(detuned_summary(1.0, -1.0, 1.0, 0.0), Err(ClosedFormError::NonPositiveGamma(_))));
    }

    #[test]
    fn semicircle_identity_holds() {
        for k in 1..=80 {
            let x = k as f64 * 0.1;
            let b = single_qubit_bloch(x, 1.0).unwrap();
            assert!(semicircle_residual(b).abs() < 1e-15);
        }
    }
}
