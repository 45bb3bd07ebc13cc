//! Density matrices, named two-qubit families and entanglement measures.

use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::numerics::{eig_general_small, eig_hermitian, kron, svd, ComplexMatrix, NumericsError};
use crate::pauli;

/// Allowed deviation of the trace from one.
pub const TRACE_TOLERANCE: f64 = 1e-10;
/// Allowed `max |rho - rho^dagger|`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;
/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD_SLACK: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("trace is {trace}, expected 1")]
    Trace { trace: C64 },
    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{name} = {value} is outside [0, 1]")]
    ParameterOutOfRange { name: &'static str, value: f64 },
    #[error("invalid subsystem selection {keep:?} for {count} subsystems")]
    InvalidSubsystems { keep: Vec<usize>, count: usize },
    #[error("state vector norm is {norm}, expected 1")]
    NotNormalized { norm: f64 },
    #[error("spin-flipped product has eigenvalue {value:e} below the clamping window")]
    NegativeSpectrum { value: f64 },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Unit-trace, Hermitian, positive semidefinite matrix over a tensor-product
/// space with subsystem dimensions `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates and wraps `matrix`.
    pub fn new(dims: Vec<usize>, matrix: ComplexMatrix) -> Result<Self, StateError> {
        let total: usize = dims.iter().product();
        if !matrix.is_square() || matrix.rows() != total {
            return Err(StateError::DimensionMismatch { expected: total, found: matrix.rows() });
        }
        let trace = matrix.trace();
        if (trace - C64::new(1.0, 0.0)).norm() > TRACE_TOLERANCE {
            return Err(StateError::Trace { trace });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITICITY_TOLERANCE {
            return Err(StateError::NotHermitian { deviation });
        }
        let min_eigenvalue = eig_hermitian(&matrix)?.values[0];
        if min_eigenvalue < -PSD_SLACK {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self { dims, matrix })
    }

    /// Two-qubit state (`dims = [2, 2]`).
    pub fn two_qubit(matrix: ComplexMatrix) -> Result<Self, StateError> {
        Self::new(vec![2, 2], matrix)
    }

    pub fn single_qubit(matrix: ComplexMatrix) -> Result<Self, StateError> {
        Self::new(vec![2], matrix)
    }

    pub(crate) fn new_unchecked(dims: Vec<usize>, matrix: ComplexMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self {
            dims: psi.dims.clone(),
            matrix: ComplexMatrix::outer(&psi.amplitudes, &psi.amplitudes),
        }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let n: usize = dims.iter().product();
        Self { dims, matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64) }
    }

    /// Computational basis projector `|b_1 ... b_n><b_1 ... b_n|` for qubits.
    pub fn basis_projector(bits: &[u8]) -> Self {
        let n = 1usize << bits.len();
        let mut m = ComplexMatrix::zeros(n, n);
        let k = pauli::index_of_bits(bits);
        m[(k, k)] = C64::new(1.0, 0.0);
        Self { dims: vec![2; bits.len()], matrix: m }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    /// Element `<b|rho|b'>` addressed by qubit labels, e.g. `elem(&[1,1], &[0,0])`.
    pub fn elem(&self, row_bits: &[u8], col_bits: &[u8]) -> C64 {
        self.matrix[(pauli::index_of_bits(row_bits), pauli::index_of_bits(col_bits))]
    }

    /// `Tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `rho_1 ⊗ rho_2`.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self { dims, matrix: kron(&self.matrix, &other.matrix) }
    }

    /// `U rho U^dagger` for a unitary `u` (not checked).
    pub fn evolve_unitary(&self, u: &ComplexMatrix) -> Self {
        Self { dims: self.dims.clone(), matrix: self.matrix.conjugate_by(u) }
    }

    /// Expectation value `Tr(rho A)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> C64 {
        self.matrix.matmul(op).trace()
    }
}

/// Normalized state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(dims: Vec<usize>, amplitudes: Vec<C64>) -> Result<Self, StateError> {
        let total: usize = dims.iter().product();
        if amplitudes.len() != total {
            return Err(StateError::DimensionMismatch { expected: total, found: amplitudes.len() });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix::from_pure(self)
    }
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [BellKind::PsiPlus, BellKind::PsiMinus, BellKind::PhiPlus, BellKind::PhiMinus];

    pub fn label(self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }
}

/// `Psi± = (|01> ± |10>)/sqrt 2`, `Phi± = (|00> ± |11>)/sqrt 2`.
pub fn bell_state(kind: BellKind) -> PureState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amp = vec![C64::new(0.0, 0.0); 4];
    let (first, second, sign) = match kind {
        BellKind::PsiPlus => ([0, 1], [1, 0], 1.0),
        BellKind::PsiMinus => ([0, 1], [1, 0], -1.0),
        BellKind::PhiPlus => ([0, 0], [1, 1], 1.0),
        BellKind::PhiMinus => ([0, 0], [1, 1], -1.0),
    };
    amp[pauli::index_of_bits(&first)] = C64::new(s, 0.0);
    amp[pauli::index_of_bits(&second)] = C64::new(sign * s, 0.0);
    PureState { dims: vec![2, 2], amplitudes: amp }
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<(), StateError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(StateError::ParameterOutOfRange { name, value })
    }
}

/// Werner state `(1-f)/3 I + (4f-1)/3 |Psi-><Psi-|`.
pub fn werner_state(f: f64) -> Result<DensityMatrix, StateError> {
    check_unit_interval("f", f)?;
    let singlet = bell_state(BellKind::PsiMinus).projector().into_matrix();
    let m = &ComplexMatrix::identity(4).scale_real((1.0 - f) / 3.0) + &singlet.scale_real((4.0 * f - 1.0) / 3.0);
    Ok(DensityMatrix::new_unchecked(vec![2, 2], m))
}

/// Yu-Eberly state `2/3 |Psi+><Psi+| + (1-a)/3 |11><11| + a/3 |00><00|`.
pub fn ye_state(alpha: f64) -> Result<DensityMatrix, StateError> {
    check_unit_interval("alpha", alpha)?;
    let mut m = bell_state(BellKind::PsiPlus).projector().into_matrix().scale_real(2.0 / 3.0);
    m[(pauli::index_of_bits(&[1, 1]), pauli::index_of_bits(&[1, 1]))] += (1.0 - alpha) / 3.0;
    m[(pauli::index_of_bits(&[0, 0]), pauli::index_of_bits(&[0, 0]))] += alpha / 3.0;
    Ok(DensityMatrix::new_unchecked(vec![2, 2], m))
}

/// One-excitation diagonal mixture `(1-a)|10><10| + a|01><01|`.
pub fn egge_state(a: f64) -> Result<DensityMatrix, StateError> {
    check_unit_interval("a", a)?;
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(pauli::index_of_bits(&[1, 0]), pauli::index_of_bits(&[1, 0]))] = C64::new(1.0 - a, 0.0);
    m[(pauli::index_of_bits(&[0, 1]), pauli::index_of_bits(&[0, 1]))] = C64::new(a, 0.0);
    Ok(DensityMatrix::new_unchecked(vec![2, 2], m))
}

fn require_two_qubit(rho: &DensityMatrix) -> Result<(), StateError> {
    if rho.dim() != 4 {
        return Err(StateError::DimensionMismatch { expected: 4, found: rho.dim() });
    }
    Ok(())
}

/// Wootters' `lambda_1 >= ... >= lambda_4`: the square roots of the
/// eigenvalues of `rho rho~`.
///
/// Computed as the singular values of `X^T (sy ⊗ sy) X` with `rho = X X^dagger`,
/// which has the same spectrum as `rho rho~` but stays well conditioned when
/// `rho rho~` is defective (product states).
pub fn wootters_lambdas(rho: &DensityMatrix) -> Result<[f64; 4], StateError> {
    require_two_qubit(rho)?;
    let eig = eig_hermitian(rho.matrix())?;
    if eig.values[0] < -PSD_SLACK {
        return Err(StateError::NotPositive { min_eigenvalue: eig.values[0] });
    }
    let mut x = eig.vectors.clone();
    for (k, &val) in eig.values.iter().enumerate() {
        let w = val.max(0.0).sqrt();
        for i in 0..4 {
            x[(i, k)] *= w;
        }
    }
    let yy = kron(&pauli::sigma_y(), &pauli::sigma_y());
    let tau = x.transpose().matmul(&yy).matmul(&x);
    let s = svd(&tau)?.singular_values;
    Ok([s[0], s[1], s[2], s[3]])
}

/// `lambda_1 - lambda_2 - lambda_3 - lambda_4`, before clamping at zero.
pub fn concurrence_signed(rho: &DensityMatrix) -> Result<f64, StateError> {
    let l = wootters_lambdas(rho)?;
    Ok(l[0] - l[1] - l[2] - l[3])
}

/// Wootters concurrence `max(0, lambda_1 - lambda_2 - lambda_3 - lambda_4)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64, StateError> {
    Ok(concurrence_signed(rho)?.max(0.0))
}

/// Spin-flipped state `(sy ⊗ sy) rho* (sy ⊗ sy)`.
pub fn spin_flip(rho: &DensityMatrix) -> Result<ComplexMatrix, StateError> {
    require_two_qubit(rho)?;
    let yy = kron(&pauli::sigma_y(), &pauli::sigma_y());
    Ok(yy.matmul(&rho.matrix().conj()).matmul(&yy))
}

/// Signed concurrence from the eigenvalues of the non-Hermitian product
/// `rho rho~`, negative values above `-PSD_SLACK` clamped to zero before
/// the square root.
///
/// Kept as an independent route to [`concurrence_signed`]; the eigenvalues
/// of a defective product are only accurate to `O(sqrt(eps))`.
pub fn concurrence_signed_via_product(rho: &DensityMatrix) -> Result<f64, StateError> {
    let prod = rho.matrix().matmul(&spin_flip(rho)?);
    let eigs = eig_general_small(&prod)?;
    let mut lambdas = Vec::with_capacity(4);
    for z in eigs {
        if z.re < -PSD_SLACK {
            return Err(StateError::NegativeSpectrum { value: z.re });
        }
        lambdas.push(z.re.max(0.0).sqrt());
    }
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok(lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3])
}

/// `sqrt(<psi|rho|psi>)`.
pub fn fidelity(psi: &PureState, rho: &DensityMatrix) -> Result<f64, StateError> {
    if psi.amplitudes.len() != rho.dim() {
        return Err(StateError::DimensionMismatch { expected: rho.dim(), found: psi.amplitudes.len() });
    }
    let v = rho.matrix().matvec(&psi.amplitudes);
    let overlap: C64 = psi.amplitudes.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    Ok(overlap.re.max(0.0).sqrt())
}

/// Bell fidelities in the order `Psi+, Psi-, Phi+, Phi-`.
pub fn bell_fidelities(rho: &DensityMatrix) -> Result<[f64; 4], StateError> {
    let mut out = [0.0; 4];
    for (slot, kind) in out.iter_mut().zip(BellKind::ALL) {
        *slot = fidelity(&bell_state(kind), rho)?;
    }
    Ok(out)
}

/// Reduced state on the subsystems listed in `keep` (in ascending order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix, StateError> {
    let count = rho.dims.len();
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep.is_empty() || keep_sorted.len() != keep.len() || keep_sorted.iter().any(|&k| k >= count) {
        return Err(StateError::InvalidSubsystems { keep: keep.to_vec(), count });
    }
    let dims = &rho.dims;
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let out_dim: usize = kept_dims.iter().product();
    let n = rho.dim();

    // For each full index: (index within the kept space, index within the traced space).
    let split: Vec<(usize, usize)> = (0..n)
        .map(|idx| {
            let mut digits = vec![0usize; count];
            let mut rem = idx;
            for k in (0..count).rev() {
                digits[k] = rem % dims[k];
                rem /= dims[k];
            }
            let (mut kept, mut traced) = (0usize, 0usize);
            for k in 0..count {
                if keep_sorted.binary_search(&k).is_ok() {
                    kept = kept * dims[k] + digits[k];
                } else {
                    traced = traced * dims[k] + digits[k];
                }
            }
            (kept, traced)
        })
        .collect();

    let mut out = ComplexMatrix::zeros(out_dim, out_dim);
    for (i, &(ki, ti)) in split.iter().enumerate() {
        for (j, &(kj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ki, kj)] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityMatrix::new_unchecked(kept_dims, out))
}

/// Bloch vector `r_k = Tr(rho sigma_k)`; `r_z = +1` for the excited state.
pub fn bloch_vector(rho: &DensityMatrix) -> Result<[f64; 3], StateError> {
    if rho.dim() != 2 {
        return Err(StateError::DimensionMismatch { expected: 2, found: rho.dim() });
    }
    Ok([
        rho.expectation(&pauli::sigma_x()).re,
        rho.expectation(&pauli::sigma_y()).re,
        rho.expectation(&pauli::sigma_z()).re,
    ])
}

/// True when every entry off the diagonal and anti-diagonal has magnitude
/// below `tol`.
pub fn is_x_form(rho: &DensityMatrix, tol: f64) -> bool {
    let n = rho.dim();
    (0..n).all(|i| (0..n).all(|j| i == j || i + j == n - 1 || rho.matrix[(i, j)].norm() < tol))
}
