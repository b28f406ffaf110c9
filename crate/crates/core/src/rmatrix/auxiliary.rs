//! Gauge matrix `V(z)`, twist `F`, and the clock and shift matrices `g`, `h`.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;

use super::ModelParams;
use crate::error::{Error, Result};
use crate::special::LogComplex;
use crate::tensor::TensorOperator;

/// `V(z) = sum_i z^{(N+1-2i)/N} e_{ii}`.
pub fn build_v(params: &ModelParams, log_z: LogComplex) -> TensorOperator {
    let n = params.n as f64;
    let entries: Vec<Complex64> = (1..=params.n)
        .map(|i| log_z.pow_value((n + 1.0 - 2.0 * i as f64) / n))
        .collect();
    TensorOperator::diagonal(&entries)
}

/// `alpha_{ij} = 1/2 + (i-j)/N` for `i < j`, antisymmetric, zero on the diagonal.
pub fn alpha(n: usize, i: usize, j: usize) -> Result<Ratio<i64>> {
    if n < 2 || i == 0 || j == 0 || i > n || j > n {
        return Err(Error::Domain(format!("alpha indices ({i}, {j}) outside 1..={n}")));
    }
    let (n, i, j) = (n as i64, i as i64, j as i64);
    Ok(match i.cmp(&j) {
        std::cmp::Ordering::Equal => Ratio::from_integer(0),
        std::cmp::Ordering::Less => Ratio::new(1, 2) + Ratio::new(i - j, n),
        std::cmp::Ordering::Greater => -(Ratio::new(1, 2) + Ratio::new(j - i, n)),
    })
}

fn ratio_f64(r: Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `F_12 = sum_{ij} q^{alpha_{ij}} e_{ii} ⊗ e_{jj}`.
pub fn build_f(params: &ModelParams) -> TensorOperator {
    let n = params.n;
    let mut entries = Vec::with_capacity(n * n);
    for i in 1..=n {
        for j in 1..=n {
            let a = alpha(n, i, j).expect("indices in range");
            entries.push(params.log_q.pow_value(ratio_f64(a)));
        }
    }
    let diag = TensorOperator::diagonal(&entries);
    TensorOperator::new(n, 2, diag.into_matrix()).expect("N^2 entries")
}

/// `g = diag(omega^i)` with `omega = e^{2 pi i/N}`.
pub fn build_g(params: &ModelParams) -> TensorOperator {
    clock(params.n, 2.0)
}

/// `g^{1/2} = diag(e^{i pi i/N})`; this fixes the branch of `omega^{1/2}`.
pub fn build_g_half(params: &ModelParams) -> TensorOperator {
    clock(params.n, 1.0)
}

fn clock(n: usize, turns: f64) -> TensorOperator {
    let entries: Vec<Complex64> = (1..=n)
        .map(|i| Complex64::from_polar(1.0, turns * PI * i as f64 / n as f64))
        .collect();
    TensorOperator::diagonal(&entries)
}

/// Cyclic shift `h_{ij} = delta_{i+1,j}` (indices mod N).
pub fn build_h(params: &ModelParams) -> TensorOperator {
    let n = params.n;
    TensorOperator::from_fn(n, 1, |i, j| {
        if (i + 1) % n == j {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}
