//! Rotating-frame Hamiltonians, Lindblad superoperators, time evolution and
//! numerical steady states.
//!
//! # Vectorization
//!
//! Density matrices are vectorized by stacking columns, so entry `(i, j)` of
//! a `D x D` matrix sits at position `i + D j` and
//! `vec(A rho B) = (B^T ⊗ A) vec(rho)`. With that convention
//!
//! * `-i [H, rho]` is `-i (I ⊗ H - H^T ⊗ I)`,
//! * `c rho c^dagger` is `c* ⊗ c`,
//! * `-1/2 {c^dagger c, rho}` is `-1/2 (I ⊗ c^dagger c + (c^dagger c)^T ⊗ I)`.
//!
//! The trace functional is the row with ones at positions `i + D i`.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::integrate::{integrate, DormandPrince, IntegrateError};
use crate::numerics::{kron, solve_constrained_null, ComplexMatrix, NumericsError};
use crate::pauli::{self, embed};
use crate::state::{DensityMatrix, StateError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LiouvilleError {
    #[error("common reservoir requires equal decay rates, got {gamma1} and {gamma2}")]
    UnequalCommonRates { gamma1: f64, gamma2: f64 },
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("state dimension {state} does not match superoperator dimension {superop}")]
    DimensionMismatch { state: usize, superop: usize },
    #[error("need at least two samples and t_final > 0")]
    BadSampling,
    #[error(transparent)]
    Integrate(#[from] IntegrateError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Rotating-frame rates of the two-qubit model, in units of the reference
/// decay rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub omega1: f64,
    pub omega2: f64,
    pub delta1: f64,
    pub delta2: f64,
    /// Exchange coupling `omega_xx`.
    pub coupling: f64,
    pub gamma1: f64,
    pub gamma2: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::symmetric(0.0, 0.0, 0.0, 1.0)
    }
}

impl SystemParams {
    /// Identical qubits: `Omega_j = omega`, `delta_j = delta`, `Gamma_j = gamma`.
    pub fn symmetric(omega: f64, delta: f64, coupling: f64, gamma: f64) -> Self {
        Self { omega1: omega, omega2: omega, delta1: delta, delta2: delta, coupling, gamma1: gamma, gamma2: gamma }
    }

    /// Resonant, identical qubits with unit decay rate.
    pub fn resonant(omega: f64, coupling: f64) -> Self {
        Self::symmetric(omega, 0.0, coupling, 1.0)
    }

    pub fn validate(&self) -> Result<(), LiouvilleError> {
        let finite = [
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("delta1", self.delta1),
            ("delta2", self.delta2),
            ("coupling", self.coupling),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
        ];
        for (name, value) in finite {
            if !value.is_finite() {
                return Err(LiouvilleError::InvalidParameter { name, value });
            }
        }
        for (name, value) in [("gamma1", self.gamma1), ("gamma2", self.gamma2)] {
            if value < 0.0 {
                return Err(LiouvilleError::InvalidParameter { name, value });
            }
        }
        Ok(())
    }
}

/// How the qubits couple to their environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReservoirModel {
    /// Each qubit decays into its own bath through `sigma_j^-`.
    #[default]
    Separate,
    /// Both qubits decay into one bath through `S^- = sigma_1^- + sigma_2^-`.
    Common,
}

impl std::str::FromStr for ReservoirModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "separate" => Ok(Self::Separate),
            "common" => Ok(Self::Common),
            other => Err(format!("unknown reservoir '{other}', expected separate or common")),
        }
    }
}

impl std::fmt::Display for ReservoirModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Separate => "separate",
            Self::Common => "common",
        })
    }
}

/// Linear map on column-stacked `D x D` density matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct Superoperator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Superoperator {
    /// Wraps a `D^2 x D^2` matrix.
    pub fn from_matrix(dim: usize, matrix: ComplexMatrix) -> Self {
        assert!(matrix.rows() == dim * dim && matrix.cols() == dim * dim, "superoperator must be D^2 x D^2");
        Self { dim, matrix }
    }

    pub fn zero(dim: usize) -> Self {
        Self { dim, matrix: ComplexMatrix::zeros(dim * dim, dim * dim) }
    }

    /// `-i [H, .]`.
    pub fn hamiltonian(h: &ComplexMatrix) -> Self {
        let d = h.rows();
        let id = ComplexMatrix::identity(d);
        let comm = &kron(&id, h) - &kron(&h.transpose(), &id);
        Self { dim: d, matrix: comm.scale(C64::new(0.0, -1.0)) }
    }

    /// `c . c^dagger - 1/2 {c^dagger c, .}`.
    pub fn dissipator(c: &ComplexMatrix) -> Self {
        let d = c.rows();
        let id = ComplexMatrix::identity(d);
        let cdc = c.adjoint().matmul(c);
        let jump = kron(&c.conj(), c);
        let anti = &kron(&id, &cdc) + &kron(&cdc.transpose(), &id);
        Self { dim: d, matrix: &jump - &anti.scale_real(0.5) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Applies the map to a `D x D` matrix.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::unvectorize(&self.matrix.matvec(&rho.vectorize()), self.dim)
    }

    /// Row vector `t` with `t . vec(rho) = Tr rho`.
    pub fn trace_row(&self) -> Vec<C64> {
        trace_row(self.dim)
    }

    /// `max_j |(t L)_j|`, zero for trace-preserving maps.
    pub fn trace_defect(&self) -> f64 {
        let t = self.trace_row();
        let n = self.dim * self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| t[i] * self.matrix[(i, j)]).sum::<C64>().norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Add for &Superoperator {
    type Output = Superoperator;
    fn add(self, rhs: &Superoperator) -> Superoperator {
        assert_eq!(self.dim, rhs.dim);
        Superoperator { dim: self.dim, matrix: &self.matrix + &rhs.matrix }
    }
}

fn trace_row(d: usize) -> Vec<C64> {
    let mut t = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        t[i + d * i] = C64::new(1.0, 0.0);
    }
    t
}

/// One incoherent drive component `amplitude * exp(i phase)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveComponent {
    pub amplitude: f64,
    pub phase: f64,
}

/// `|sum_k Omega_k exp(i phi_k)|`.
pub fn effective_rabi(components: &[DriveComponent]) -> f64 {
    components
        .iter()
        .map(|c| C64::from_polar(c.amplitude, c.phase))
        .sum::<C64>()
        .norm()
}

/// Free part `sum_j (delta_j/2 sz_j + Omega_j/2 sx_j)` of the rotating-frame
/// Hamiltonian.
pub fn free_hamiltonian(p: &SystemParams) -> ComplexMatrix {
    let z1 = embed(&pauli::sigma_z(), 0, 2);
    let z2 = embed(&pauli::sigma_z(), 1, 2);
    let x1 = embed(&pauli::sigma_x(), 0, 2);
    let x2 = embed(&pauli::sigma_x(), 1, 2);
    let mut h = z1.scale_real(p.delta1 / 2.0);
    h = &h + &z2.scale_real(p.delta2 / 2.0);
    h = &h + &x1.scale_real(p.omega1 / 2.0);
    &h + &x2.scale_real(p.omega2 / 2.0)
}

/// Exchange part `omega_xx/2 (sx sx + sy sy)`.
pub fn interaction_hamiltonian(p: &SystemParams) -> ComplexMatrix {
    let xx = kron(&pauli::sigma_x(), &pauli::sigma_x());
    let yy = kron(&pauli::sigma_y(), &pauli::sigma_y());
    (&xx + &yy).scale_real(p.coupling / 2.0)
}

/// Full rotating-frame Hamiltonian `H_0 + H_xx`.
pub fn rotating_hamiltonian(p: &SystemParams) -> ComplexMatrix {
    &free_hamiltonian(p) + &interaction_hamiltonian(p)
}

/// Two-qubit Liouvillian for the chosen reservoir model.
pub fn liouvillian(p: &SystemParams, model: ReservoirModel) -> Result<Superoperator, LiouvilleError> {
    p.validate()?;
    let mut l = Superoperator::hamiltonian(&rotating_hamiltonian(p));
    let m1 = embed(&pauli::sigma_minus(), 0, 2);
    let m2 = embed(&pauli::sigma_minus(), 1, 2);
    match model {
        ReservoirModel::Separate => {
            l = &l + &Superoperator::dissipator(&m1.scale_real(p.gamma1.sqrt()));
            l = &l + &Superoperator::dissipator(&m2.scale_real(p.gamma2.sqrt()));
        }
        ReservoirModel::Common => {
            if p.gamma1 != p.gamma2 {
                return Err(LiouvilleError::UnequalCommonRates { gamma1: p.gamma1, gamma2: p.gamma2 });
            }
            let s_minus = &m1 + &m2;
            l = &l + &Superoperator::dissipator(&s_minus.scale_real(p.gamma1.sqrt()));
        }
    }
    Ok(l)
}

/// Driven, damped single qubit on resonance:
/// `-i Omega/2 [sx, rho] + Gamma/2 (2 s- rho s+ - {s+ s-, rho})`.
pub fn single_qubit_liouvillian(omega: f64, gamma: f64) -> Result<Superoperator, LiouvilleError> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(LiouvilleError::InvalidParameter { name: "gamma", value: gamma });
    }
    if !omega.is_finite() {
        return Err(LiouvilleError::InvalidParameter { name: "omega", value: omega });
    }
    let h = pauli::sigma_x().scale_real(omega / 2.0);
    let d = Superoperator::dissipator(&pauli::sigma_minus().scale_real(gamma.sqrt()));
    Ok(&Superoperator::hamiltonian(&h) + &d)
}

/// Numerical steady state.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// Dimension of the Liouvillian's numerical null space; values above one
    /// mean `rho` is one representative of a family of steady states.
    pub null_dim: usize,
    /// `||L vec(rho)||_2`.
    pub residual: f64,
}

impl SteadyState {
    pub fn is_unique(&self) -> bool {
        self.null_dim == 1
    }
}

/// Trace-one null vector of `l`.
pub fn steady_state(l: &Superoperator) -> Result<SteadyState, LiouvilleError> {
    let d = l.dim();
    let sol = solve_constrained_null(l.matrix(), &l.trace_row(), C64::new(1.0, 0.0))?;
    let m = ComplexMatrix::unvectorize(&sol.x, d);
    // The null solution is Hermitian up to rounding; symmetrize before validation.
    let herm = (&m + &m.adjoint()).scale_real(0.5);
    let dims = if d == 4 { vec![2, 2] } else { vec![d] };
    let rho = DensityMatrix::new(dims, herm)?;
    Ok(SteadyState { rho, null_dim: sol.null_dim, residual: sol.residual })
}

/// Options for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvolveOptions {
    pub rel_tol: f64,
    /// Replace each sample by `(rho + rho^dagger)/2` before validation.
    /// Off by default so that integrator drift shows up as an error.
    pub project_hermitian: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-10, project_hermitian: false }
    }
}

/// Sampled trajectory `(t_k, rho(t_k))`.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub samples: Vec<(f64, DensityMatrix)>,
}

impl Trajectory {
    pub fn last(&self) -> &DensityMatrix {
        &self.samples.last().expect("trajectory has at least two samples").1
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|(t, _)| *t)
    }
}

/// Uniformly spaced sample times `0, t_final/(n-1), ..., t_final`.
pub fn uniform_times(t_final: f64, sample_count: usize) -> Vec<f64> {
    let last = (sample_count - 1) as f64;
    (0..sample_count)
        .map(|k| if k + 1 == sample_count { t_final } else { t_final * k as f64 / last })
        .collect()
}

/// Integrates `d rho/dt = L rho` and samples `sample_count` uniformly spaced
/// times in `[0, t_final]`.
pub fn evolve(
    rho0: &DensityMatrix,
    l: &Superoperator,
    t_final: f64,
    sample_count: usize,
    options: &EvolveOptions,
) -> Result<Trajectory, LiouvilleError> {
    if rho0.dim() != l.dim() {
        return Err(LiouvilleError::DimensionMismatch { state: rho0.dim(), superop: l.dim() });
    }
    if sample_count < 2 || !(t_final > 0.0) || !t_final.is_finite() {
        return Err(LiouvilleError::BadSampling);
    }
    let times = uniform_times(t_final, sample_count);
    let generator = l.matrix();
    // Keep h |lambda| well inside the stability region. Near its edge the
    // step controller settles where round-off is no longer damped and the
    // state carries tolerance-sized, non-Hermitian noise indefinitely.
    let norm = generator.norm_inf();
    let settings = DormandPrince {
        max_step: if norm > 0.0 { 1.0 / norm } else { f64::INFINITY },
        ..DormandPrince::with_tolerance(options.rel_tol)
    };
    let raw = integrate(
        |_, y, dy| generator.matvec_into(y, dy),
        &rho0.matrix().vectorize(),
        t_final,
        &times,
        &settings,
    )?;
    let d = l.dim();
    let mut samples = Vec::with_capacity(sample_count);
    for (t, v) in times.into_iter().zip(raw) {
        let mut m = ComplexMatrix::unvectorize(&v, d);
        if options.project_hermitian {
            m = (&m + &m.adjoint()).scale_real(0.5);
        }
        samples.push((t, DensityMatrix::new(rho0.dims().to_vec(), m)?));
    }
    Ok(Trajectory { samples })
}
