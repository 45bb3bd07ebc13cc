//! Single-qubit operators in the `(|1>, |0>)` basis and their embeddings
//! into multi-qubit registers.

use num_complex::Complex64 as C64;

use crate::numerics::{kron_all, ComplexMatrix};

pub fn identity() -> ComplexMatrix {
    ComplexMatrix::identity(2)
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0], [1.0, 0.0]])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        [C64::new(0.0, 0.0), C64::new(0.0, -1.0)],
        [C64::new(0.0, 1.0), C64::new(0.0, 0.0)],
    ])
}

/// `+1` on the excited state `|1>` (index 0).
pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}

/// Lowering operator, `|1> -> |0>`.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 0.0], [1.0, 0.0]])
}

/// Raising operator, `|0> -> |1>`.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[[0.0, 1.0], [0.0, 0.0]])
}

/// Matrix index of a qubit label: `|1>` is index 0, `|0>` is index 1.
pub fn index_of_bit(bit: u8) -> usize {
    debug_assert!(bit <= 1);
    1 - bit as usize
}

/// Basis index of the product state `|b_1 b_2 ... b_n>`.
pub fn index_of_bits(bits: &[u8]) -> usize {
    bits.iter().fold(0, |acc, &b| acc * 2 + index_of_bit(b))
}

/// `op` acting on qubit `site` of an `n`-qubit register.
pub fn embed(op: &ComplexMatrix, site: usize, n: usize) -> ComplexMatrix {
    assert!(site < n, "site {site} out of range for {n} qubits");
    let id = identity();
    let factors: Vec<&ComplexMatrix> = (0..n).map(|k| if k == site { op } else { &id }).collect();
    kron_all(factors)
}
