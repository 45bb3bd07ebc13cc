//! Dormand-Prince 5(4) integrator for complex vector ODEs with PI step-size
//! control and the Dormand-Prince fourth-order dense output.

use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IntegrateError {
    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepUnderflow { t: f64, h: f64 },
    #[error("exceeded {max_steps} steps before reaching t = {t_final}")]
    TooManySteps { max_steps: usize, t_final: f64 },
    #[error("sample times must be non-decreasing and lie in [0, t_final]")]
    BadSampleTimes,
    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },
}

/// Step-control settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DormandPrince {
    /// Relative tolerance per step.
    pub rel_tol: f64,
    /// Absolute floor of the error scale; defaults to `rel_tol`.
    pub abs_tol: f64,
    pub max_steps: usize,
    /// Upper bound on the step size, `f64::INFINITY` for none.
    pub max_step: f64,
}

impl Default for DormandPrince {
    fn default() -> Self {
        Self::with_tolerance(1e-10)
    }
}

impl DormandPrince {
    pub fn with_tolerance(rel_tol: f64) -> Self {
        Self { rel_tol, abs_tol: rel_tol, max_steps: 50_000_000, max_step: f64::INFINITY }
    }
}

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
// 5th minus 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output weights (Hairer, Norsett and Wanner).
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

fn axpy_into(out: &mut [C64], y: &[C64], h: f64, terms: &[(f64, &[C64])]) {
    for i in 0..out.len() {
        let mut acc = C64::new(0.0, 0.0);
        for (w, k) in terms {
            acc += k[i] * *w;
        }
        out[i] = y[i] + acc * h;
    }
}

fn max_abs(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Integrates `y' = f(t, y)` from `t = 0` to `t_final`, reporting the state
/// at each of `sample_times` (non-decreasing, within `[0, t_final]`).
///
/// Samples that fall inside a step come from the method's continuous
/// extension; a sample equal to `t_final` is the exact endpoint of the last
/// step.
pub fn integrate<F>(
    mut f: F,
    y0: &[C64],
    t_final: f64,
    sample_times: &[f64],
    settings: &DormandPrince,
) -> Result<Vec<Vec<C64>>, IntegrateError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if sample_times.windows(2).any(|w| w[1] < w[0])
        || sample_times.iter().any(|&t| !(0.0..=t_final).contains(&t))
    {
        return Err(IntegrateError::BadSampleTimes);
    }
    let n = y0.len();
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(sample_times.len());
    let mut next_sample = 0usize;
    while next_sample < sample_times.len() && sample_times[next_sample] <= 0.0 {
        out.push(y0.to_vec());
        next_sample += 1;
    }
    if next_sample == sample_times.len() || t_final <= 0.0 {
        while out.len() < sample_times.len() {
            out.push(y0.to_vec());
        }
        return Ok(out);
    }

    let mut t = 0.0;
    let mut y = y0.to_vec();
    let zero = C64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut k5 = vec![zero; n];
    let mut k6 = vec![zero; n];
    let mut k7 = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut y_new = vec![zero; n];
    f(t, &y, &mut k1);

    let mut h = initial_step(&mut f, &y, &k1, t_final, settings);
    let mut err_prev: f64 = 1e-4;
    let mut rejected_last = false;
    let mut steps = 0usize;

    while t < t_final {
        steps += 1;
        if steps > settings.max_steps {
            return Err(IntegrateError::TooManySteps { max_steps: settings.max_steps, t_final });
        }
        let min_step = 1e-13 * t.abs().max(1.0);
        if h < min_step {
            return Err(IntegrateError::StepUnderflow { t, h });
        }
        let last = t + h >= t_final;
        if last {
            h = t_final - t;
        }

        axpy_into(&mut tmp, &y, h, &[(A21, &k1)]);
        f(t + C2 * h, &tmp, &mut k2);
        axpy_into(&mut tmp, &y, h, &[(A31, &k1), (A32, &k2)]);
        f(t + C3 * h, &tmp, &mut k3);
        axpy_into(&mut tmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        f(t + C4 * h, &tmp, &mut k4);
        axpy_into(&mut tmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        f(t + C5 * h, &tmp, &mut k5);
        axpy_into(&mut tmp, &y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]);
        f(t + h, &tmp, &mut k6);
        axpy_into(&mut y_new, &y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let t_new = if last { t_final } else { t + h };
        f(t_new, &y_new, &mut k7);

        let mut err = 0.0_f64;
        for i in 0..n {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            let scale = settings.abs_tol + settings.rel_tol * y[i].norm().max(y_new[i].norm());
            err = err.max(e.norm() / scale);
        }
        if !err.is_finite() {
            return Err(IntegrateError::NonFinite { t });
        }

        if err <= 1.0 {
            // Emit samples in (t, t_new].
            while next_sample < sample_times.len() && sample_times[next_sample] <= t_new {
                let ts = sample_times[next_sample];
                if ts == t_new {
                    out.push(y_new.clone());
                } else {
                    let ks = [&k1[..], &k3, &k4, &k5, &k6, &k7];
                    out.push(dense_output(&y, &y_new, ks, h, (ts - t) / h));
                }
                next_sample += 1;
            }
            if max_abs(&y_new).is_nan() {
                return Err(IntegrateError::NonFinite { t: t_new });
            }
            t = t_new;
            std::mem::swap(&mut y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7);
            let err_c = err.max(1e-10);
            let mut fac = SAFETY * err_c.powf(-ALPHA) * err_prev.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if rejected_last {
                fac = fac.min(1.0);
            }
            h = (h * fac).min(settings.max_step);
            err_prev = err_c;
            rejected_last = false;
            if last {
                break;
            }
        } else {
            let fac = (SAFETY * err.powf(-ALPHA)).max(FAC_MIN);
            h *= fac;
            rejected_last = true;
        }
    }
    while out.len() < sample_times.len() {
        out.push(y.clone());
    }
    Ok(out)
}

/// Continuous extension at `theta = (t - t0)/h`; `ks` holds
/// `k1, k3, k4, k5, k6, k7` of the accepted step.
fn dense_output(y0: &[C64], y1: &[C64], ks: [&[C64]; 6], h: f64, theta: f64) -> Vec<C64> {
    let [k1, k3, k4, k5, k6, k7] = ks;
    let theta1 = 1.0 - theta;
    (0..y0.len())
        .map(|i| {
            let r2 = y1[i] - y0[i];
            let r3 = k1[i] * h - r2;
            let r4 = r2 - k7[i] * h - r3;
            let r5 = (k1[i] * D1 + k3[i] * D3 + k4[i] * D4 + k5[i] * D5 + k6[i] * D6 + k7[i] * D7) * h;
            y0[i] + (r2 + (r3 + (r4 + r5 * theta1) * theta) * theta1) * theta
        })
        .collect()
}

/// Starting step size heuristic (Hairer, Norsett and Wanner).
fn initial_step<F>(f: &mut F, y: &[C64], f0: &[C64], t_final: f64, s: &DormandPrince) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let scale: Vec<f64> = y.iter().map(|z| s.abs_tol + s.rel_tol * z.norm()).collect();
    let rms = |v: &[C64]| -> f64 {
        (v.iter().zip(&scale).map(|(z, sc)| (z.norm() / sc).powi(2)).sum::<f64>() / n.max(1) as f64).sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(f0);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1: Vec<C64> = y.iter().zip(f0).map(|(a, b)| a + b * h0).collect();
    let mut f1 = vec![C64::new(0.0, 0.0); n];
    f(h0, &y1, &mut f1);
    let diff: Vec<C64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(t_final).min(s.max_step)
}
