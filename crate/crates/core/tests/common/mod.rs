#![allow(dead_code)]

use rand::Rng;
use steadyent::{ComplexMatrix, DensityMatrix, C64};

/// `G G^dagger / Tr` for a 4x4 `G` with entries uniform in the unit square;
/// `rank` columns of `G` are kept, the rest zeroed.
pub fn random_two_qubit<R: Rng>(rng: &mut R, rank: usize) -> DensityMatrix {
    let mut g = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..rank.min(4) {
            g[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    let mut m = m.scale_real(1.0 / tr);
    // Enforce exact Hermiticity of the diagonal after rounding.
    for k in 0..4 {
        m[(k, k)] = C64::new(m[(k, k)].re, 0.0);
    }
    DensityMatrix::two_qubit(m).expect("random state is valid")
}

pub fn random_unitary_2<R: Rng>(rng: &mut R) -> ComplexMatrix {
    let (a, b, c, d) = (
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(0.0..std::f64::consts::TAU),
        rng.gen_range(0.0..std::f64::consts::FRAC_PI_2),
    );
    let e = |x: f64| C64::from_polar(1.0, x);
    let (s, co) = d.sin_cos();
    ComplexMatrix::from_rows(&[[e(a) * co, e(b) * s], [-e(-b + a + c) * s, e(c) * co]])
}
