//! Driven, coupled qubits under separate or common dissipative reservoirs.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: a small dense complex-matrix kernel (Kronecker products,
//!   Hermitian and general eigenvalues, SVD, constrained null-space solves).
//! * [`state`]: density matrices, the Werner / Yu-Eberly / eg-ge families,
//!   partial traces, Bloch vectors, concurrence and Bell fidelities.
//! * [`liouville`]: rotating-frame Hamiltonians, Lindblad superoperators,
//!   time evolution and numerical steady states.
//! * [`closed_form`]: analytic steady-state expressions, used as oracles
//!   against the numerical engine.
//! * [`transfer`]: the Jaynes-Cummings map that swaps the qubit state onto
//!   two single-photon cavity modes.
//!
//! Conventions used throughout: the single-qubit basis is ordered
//! `(|1>, |0>)` with `|1>` the excited state, `sigma_z |1> = +|1>` and
//! `sigma_minus |1> = |0>`. Two-qubit matrices use the ordering
//! `|11>, |10>, |01>, |00>` with the first label belonging to qubit 1.
//! Rates are measured in units of a reference decay rate and times in its
//! inverse.

pub mod closed_form;
pub mod integrate;
pub mod liouville;
pub mod numerics;
pub mod pauli;
pub mod state;
pub mod transfer;

pub use num_complex::Complex64 as C64;

pub use closed_form::{BellFidelities, DampingRegime, SteadyStateSummary};
pub use liouville::{DriveComponent, ReservoirModel, Superoperator, SystemParams};
pub use numerics::ComplexMatrix;
pub use state::{BellKind, DensityMatrix, PureState};
pub use transfer::TransferSettings;
