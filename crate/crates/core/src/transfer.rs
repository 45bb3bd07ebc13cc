//! Jaynes-Cummings outcoupling of a two-qubit state into two cavity modes.
//!
//! Qubit 1 couples to mode `a`, qubit 2 to mode `b`, each for a phase `g tau`,
//! starting from empty cavities. Each cavity is truncated to `{0, 1}` photons
//! and photon states are ordered like qubit states: `|1_a 1_b>, |1_a 0_b>,
//! |0_a 1_b>, |0_a 0_b>`.

use num_complex::Complex64 as C64;

use crate::numerics::{kron, ComplexMatrix};
use crate::pauli::index_of_bits;
use crate::state::{partial_trace, DensityMatrix, StateError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferSettings {
    pub g_tau: f64,
}

impl TransferSettings {
    pub fn new(g_tau: f64) -> Self {
        Self { g_tau }
    }

    /// `g tau = pi/2`, a complete swap up to local phases.
    pub fn full_swap() -> Self {
        Self { g_tau: std::f64::consts::FRAC_PI_2 }
    }
}

/// Unitary on one qubit and one cavity mode, basis `|q, n>`:
/// `|1,0> -> cos|1,0> - i sin|0,1>`, `|0,1> -> cos|0,1> - i sin|1,0>`,
/// with `|0,0>` and `|1,1>` left unchanged.
pub fn jc_rotation(g_tau: f64) -> ComplexMatrix {
    let (s, c) = g_tau.sin_cos();
    let mut u = ComplexMatrix::identity(4);
    let e = index_of_bits(&[1, 0]);
    let p = index_of_bits(&[0, 1]);
    u[(e, e)] = C64::new(c, 0.0);
    u[(p, p)] = C64::new(c, 0.0);
    u[(p, e)] = C64::new(0.0, -s);
    u[(e, p)] = C64::new(0.0, -s);
    u
}

fn check_two_qubit(rho: &DensityMatrix) -> Result<(), StateError> {
    if rho.dims() == [2, 2] {
        Ok(())
    } else {
        Err(StateError::DimensionMismatch { expected: 4, found: rho.dim() })
    }
}

/// Runs the outcoupling on `rho ⊗ |0_a 0_b><0_a 0_b|` and traces out the qubits.
pub fn transfer(rho: &DensityMatrix, settings: TransferSettings) -> Result<DensityMatrix, StateError> {
    check_two_qubit(rho)?;
    let u = jc_rotation(settings.g_tau);
    // `pair` is ordered (q1, a, q2, b); the full space is (q1, q2, a, b).
    let pair = kron(&u, &u);
    let mut w = ComplexMatrix::zeros(16, 16);
    let to_full = |q1: usize, a: usize, q2: usize, b: usize| ((q1 * 2 + q2) * 2 + a) * 2 + b;
    for r in 0..16 {
        let (q1, a, q2, b) = (r >> 3 & 1, r >> 2 & 1, r >> 1 & 1, r & 1);
        for col in 0..16 {
            let (q1c, ac, q2c, bc) = (col >> 3 & 1, col >> 2 & 1, col >> 1 & 1, col & 1);
            w[(to_full(q1, a, q2, b), to_full(q1c, ac, q2c, bc))] = pair[(r, col)];
        }
    }
    let vacuum = DensityMatrix::basis_projector(&[0, 0]);
    let full = DensityMatrix::new_unchecked(vec![2, 2, 2, 2], rho.tensor(&vacuum).into_matrix());
    let evolved = full.evolve_unitary(&w);
    partial_trace(&evolved, &[2, 3])
}

/// The photon density matrix assembled from nine independent transmitted
/// elements, completed by Hermiticity and unit trace.
pub fn transmitted_elements(rho: &DensityMatrix, settings: TransferSettings) -> Result<DensityMatrix, StateError> {
    check_two_qubit(rho)?;
    let (s, c) = settings.g_tau.sin_cos();
    let (s2, c2) = (s * s, c * c);
    let mi = C64::new(0.0, -1.0);
    let r = |a: [u8; 2], b: [u8; 2]| rho.elem(&a, &b);
    let idx = |bits: [u8; 2]| index_of_bits(&bits);

    let entries = [
        ([1, 1], [1, 1], r([1, 1], [1, 1]) * s2 * s2),
        ([1, 1], [1, 0], mi * s2 * s * r([1, 1], [1, 0])),
        ([1, 1], [0, 1], mi * s2 * s * r([1, 1], [0, 1])),
        ([1, 1], [0, 0], -s2 * r([1, 1], [0, 0])),
        ([1, 0], [1, 0], s2 * r([1, 0], [1, 0]) + s2 * c2 * r([1, 1], [1, 1])),
        ([1, 0], [0, 1], s2 * r([1, 0], [0, 1])),
        ([1, 0], [0, 0], mi * s * r([1, 0], [0, 0]) + mi * s * c2 * r([1, 1], [0, 1])),
        ([0, 1], [0, 1], s2 * r([0, 1], [0, 1]) + s2 * c2 * r([1, 1], [1, 1])),
        ([0, 1], [0, 0], mi * s * r([0, 1], [0, 0]) + mi * s * c2 * r([1, 1], [1, 0])),
    ];
    let mut m = ComplexMatrix::zeros(4, 4);
    for (row, col, value) in entries {
        m[(idx(row), idx(col))] = value;
        m[(idx(col), idx(row))] = value.conj();
    }
    // Diagonal entries must be real; drop rounding residue from the conj pass.
    for k in 0..3 {
        m[(k, k)] = C64::new(m[(k, k)].re, 0.0);
    }
    let vac = idx([0, 0]);
    let occupied: f64 = (0..4).filter(|&k| k != vac).map(|k| m[(k, k)].re).sum();
    m[(vac, vac)] = C64::new(1.0 - occupied, 0.0);
    Ok(DensityMatrix::new_unchecked(vec![2, 2], m))
}

/// Undoes the local phases left by a `g tau = pi/2` transfer:
/// `|1> -> i|1>` on each mode.
pub fn phase_correction(rho_photon: &DensityMatrix) -> Result<DensityMatrix, StateError> {
    check_two_qubit(rho_photon)?;
    let gate = ComplexMatrix::from_diag(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
    Ok(rho_photon.evolve_unitary(&kron(&gate, &gate)))
}
