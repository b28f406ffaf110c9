//! Quantum determinant in the fundamental evaluation representation.
//!
//! Three evaluations are compared: the operator product against the
//! antisymmetrizer followed by a partial trace, the closed-form `m_k(z)`, and
//! the signed permutation sum of evaluated Lax blocks.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{self, CompensatedSum};
use crate::properties::{identity_residual, relative_residual, Probe, PropertyReport};
use crate::rmatrix::scalars::{euler, theta_den, theta_num};
use crate::rmatrix::{build_r, s_hat, ModelParams, PoleTracker, RKind};
use crate::special::LogComplex;
use crate::tensor::{antisymmetrizer, TensorOperator};

/// Largest N for the dense product on `(C^N)^{⊗(N+1)}`.
pub const QDET_PRODUCT_MAX_N: usize = 4;
/// Largest N for the `N!`-term permutation sums.
pub const PERMUTATION_SUM_MAX_N: usize = 6;

const MAX_CONDITION: f64 = 1e12;

/// `z, z/q, ..., z q^{1-N}`.
pub fn shifted_points(params: &ModelParams, z: LogComplex) -> Vec<LogComplex> {
    (0..params.n)
        .map(|j| LogComplex::new(z.log() - params.log_q.log() * j as f64))
        .collect()
}

/// `M(z)` together with the residual of `X = A ⊗ M(z)`.
#[derive(Clone, Debug, Serialize)]
pub struct ProductOutcome {
    pub m: TensorOperator,
    pub consistency: f64,
}

fn check_product_size(n: usize) -> Result<()> {
    if n > QDET_PRODUCT_MAX_N {
        return Err(Error::Size(format!(
            "dense product on (C^{n})^(x{}) exceeds the cap N <= {QDET_PRODUCT_MAX_N}",
            n + 1
        )));
    }
    Ok(())
}

fn rhat_factors(params: &ModelParams, z: LogComplex) -> Result<Vec<TensorOperator>> {
    shifted_points(params, z)
        .into_iter()
        .map(|w| build_r(params, RKind::EllipticRhat, w))
        .collect()
}

fn antisymmetrizer_on_aux(n: usize) -> Result<TensorOperator> {
    let slots: Vec<usize> = (1..=n).collect();
    TensorOperator::embed(&antisymmetrizer(n, n)?, &slots, n + 1)
}

/// `X = R-hat_{1,0}(z) ... R-hat_{N,0}(z q^{1-N}) A_{1..N}` with slot `N+1` as `0`;
/// `M(z)` is the partial trace of `X` over slots `1..N` (the projector has unit trace).
pub fn qdet_product(params: &ModelParams, z: LogComplex) -> Result<ProductOutcome> {
    let n = params.n;
    check_product_size(n)?;
    let factors = rhat_factors(params, z)?;
    let a = antisymmetrizer_on_aux(n)?;
    let mut x = a.clone();
    for (j, r) in factors.iter().enumerate().rev() {
        x = x.apply_on_slots(r, &[j + 1, n + 1])?;
    }
    let slots: Vec<usize> = (1..=n).collect();
    let m = x.partial_trace(&slots)?;
    let a_n = antisymmetrizer(n, n)?;
    let expected = a_n.kron(&m)?;
    let consistency = (&x - &expected).frobenius_norm() / x.frobenius_norm();
    Ok(ProductOutcome { m, consistency })
}

/// `‖R-hat_{N,0}^{-1} ... R-hat_{1,0}^{-1} A - A‖ / ‖A‖`.
pub fn inverse_product_residual(params: &ModelParams, z: LogComplex) -> Result<f64> {
    let n = params.n;
    check_product_size(n)?;
    let factors = rhat_factors(params, z)?;
    let a = antisymmetrizer_on_aux(n)?;
    let mut y = a.clone();
    for (j, r) in factors.iter().enumerate() {
        y = y.apply_on_slots(&r.inverse(MAX_CONDITION)?, &[j + 1, n + 1])?;
    }
    Ok((&y - &a).frobenius_norm() / a.frobenius_norm())
}

/// Closed form `m_1(z), ..., m_N(z)`:
///
/// ```text
/// m_k = (-(p^N;p^N)/(p;p))^{3N} q^{2k-2N} Theta_p(q^2)^N Theta_p(z^2) / Theta_p(q^2 z^2)
///       * sum_sigma sgn(sigma) prod_l S-hat_{l, k + sum_{i<l} (i - sigma(i))}^{sigma(l)}(z q^{1-l})
/// ```
pub fn qdet_closed_form(params: &ModelParams, z: LogComplex) -> Result<Vec<Complex64>> {
    let n = params.n;
    if n > PERMUTATION_SUM_MAX_N {
        return Err(Error::Size(format!(
            "permutation sum capped at N <= {PERMUTATION_SUM_MAX_N}"
        )));
    }
    let (lq, lp, lz) = (params.log_q.log(), params.log_p.log(), z.log());
    let mut tracker = PoleTracker::new();
    let ratio = -euler(params, lp * n as f64)? / euler(params, lp)?;
    let prefactor = ratio.powi(3 * n as i32);
    let common = theta_num(params, lq * 2.0, lp)?.powi(n as i32) * theta_num(params, lz * 2.0, lp)?
        / theta_den(params, "qdet closed form", lq * 2.0 + lz * 2.0, lp, &mut tracker)?;
    tracker.check(params.pole_threshold)?;

    let points = shifted_points(params, z);
    let perms = perm::lexicographic(n);
    let mut out = Vec::with_capacity(n);
    for k in 1..=n as i64 {
        let mut sum = CompensatedSum::default();
        for sigma in &perms {
            let mut term = Complex64::new(perm::sign(sigma) as f64, 0.0);
            let mut shift = 0i64;
            for (l0, &s0) in sigma.iter().enumerate() {
                let (l, s) = (l0 as i64 + 1, s0 as i64 + 1);
                term *= s_hat(params, l, s, k + shift, points[l0])?;
                shift += l - s;
            }
            sum.add(term);
        }
        let power = (lq * (2.0 * k as f64 - 2.0 * n as f64)).exp();
        out.push(prefactor * power * common * sum.total());
    }
    Ok(out)
}

/// `sum_sigma sgn(sigma) E_{1,sigma(1)}(z) E_{2,sigma(2)}(z/q) ... E_{N,sigma(N)}(z q^{1-N})`,
/// with `E_ij(w)` the `(i, j)` block of the chosen R-matrix at `w`.
pub fn qdet_sum_formula(params: &ModelParams, kind: RKind, z: LogComplex) -> Result<TensorOperator> {
    let n = params.n;
    if !matches!(kind, RKind::EllipticRhat | RKind::NonElliptic) {
        return Err(Error::Kind(format!(
            "the permutation sum uses elliptic-hat or nonelliptic, not {kind}"
        )));
    }
    if n > PERMUTATION_SUM_MAX_N {
        return Err(Error::Size(format!(
            "permutation sum capped at N <= {PERMUTATION_SUM_MAX_N}"
        )));
    }
    let mut blocks = Vec::with_capacity(n);
    for w in shifted_points(params, z) {
        let r = build_r(params, kind, w)?;
        let mut row = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                row.push(r.slot1_block(i, j)?);
            }
        }
        blocks.push(row);
    }
    let mut sums = vec![CompensatedSum::default(); n * n];
    for sigma in perm::lexicographic(n) {
        let mut product = TensorOperator::identity(n, 1);
        for (l, &s) in sigma.iter().enumerate() {
            product = &product * &blocks[l][l * n + s];
        }
        let sign = perm::sign(&sigma) as f64;
        for (idx, acc) in sums.iter_mut().enumerate() {
            acc.add(product.get(idx / n, idx % n) * sign);
        }
    }
    Ok(TensorOperator::from_fn(n, 1, |i, j| sums[i * n + j].total()))
}

/// The three evaluations at one point and their pairwise deviations.
#[derive(Clone, Debug, Serialize)]
pub struct QdetResult {
    pub z_point: LogComplex,
    pub m_matrix: TensorOperator,
    pub m_k_values: Vec<Complex64>,
    pub sum_formula_matrix: TensorOperator,
    pub deviations: BTreeMap<String, f64>,
}

pub fn evaluate(params: &ModelParams, z: LogComplex) -> Result<QdetResult> {
    let n = params.n;
    let product = qdet_product(params, z)?;
    let m_k = qdet_closed_form(params, z)?;
    let sum = qdet_sum_formula(params, RKind::EllipticRhat, z)?;
    let id = TensorOperator::identity(n, 1);
    let closed = TensorOperator::diagonal(&m_k);

    let mut deviations = BTreeMap::new();
    deviations.insert("product_consistency".to_string(), product.consistency);
    deviations.insert("product_vs_identity".to_string(), identity_residual(&product.m, &id));
    deviations.insert("closed_form_vs_one".to_string(), closed_form_gap(&m_k));
    deviations.insert("k_spread".to_string(), spread(&m_k));
    deviations.insert("sum_vs_product".to_string(), relative_residual(&sum, &product.m));
    deviations.insert("closed_vs_product".to_string(), relative_residual(&closed, &product.m));
    deviations.insert("closed_vs_sum".to_string(), relative_residual(&closed, &sum));
    Ok(QdetResult {
        z_point: z,
        m_matrix: product.m,
        m_k_values: m_k,
        sum_formula_matrix: sum,
        deviations,
    })
}

fn closed_form_gap(m_k: &[Complex64]) -> f64 {
    m_k.iter().map(|m| (m - 1.0).norm()).fold(0.0, f64::max)
}

/// Largest pairwise distance relative to the largest modulus.
fn spread(values: &[Complex64]) -> f64 {
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for a in values {
        for b in values {
            worst = worst.max((a - b).norm());
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// `M(z) = I` from the operator product.
pub fn check_qdet_product(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("qdet_product", params);
    probe.point("z", z);
    let outcome = qdet_product(params, z)?;
    let id = TensorOperator::identity(params.n, 1);
    probe.number("consistency", outcome.consistency);
    let off_diagonal = (0..params.n)
        .flat_map(|i| (0..params.n).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| outcome.m.get(i, j).norm())
        .fold(0.0, f64::max);
    probe.number("off_diagonal", off_diagonal);
    let residual = identity_residual(&outcome.m, &id).max(outcome.consistency);
    Ok(probe.finish(residual, tolerance))
}

/// Closed-form `m_k = 1` for every `k`, and equal to each other.
pub fn check_closed_form(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("qdet_closed_form", params);
    probe.point("z", z);
    let m_k = qdet_closed_form(params, z)?;
    let gap = closed_form_gap(&m_k);
    let k_spread = spread(&m_k);
    probe.number("max_abs_m_minus_one", gap);
    probe.number("k_spread", k_spread);
    Ok(probe.finish(gap.max(k_spread), tolerance))
}

/// `m(z; q, p)` does not depend on `q`.
pub fn check_q_independence(
    params: &ModelParams,
    z: LogComplex,
    other_q: LogComplex,
    tolerance: f64,
) -> Result<PropertyReport> {
    let mut probe = Probe::new("q_independence", params);
    probe.point("z", z);
    probe.point("q2", other_q);
    let other = params.with_log_q(other_q)?;
    let a = qdet_closed_form(params, z)?;
    let b = qdet_closed_form(&other, z)?;
    let residual = a
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).norm() / x.norm().max(y.norm()))
        .fold(0.0, f64::max);
    Ok(probe.finish(residual, tolerance))
}

/// The three evaluations of the determinant agree pairwise.
pub fn check_three_way(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("qdet_three_way", params);
    probe.point("z", z);
    let result = evaluate(params, z)?;
    let mut worst = 0.0f64;
    for key in ["sum_vs_product", "closed_vs_product", "closed_vs_sum"] {
        let v = result.deviations[key];
        probe.number(key, v);
        worst = worst.max(v);
    }
    Ok(probe.finish(worst, tolerance))
}

/// The permutation sum built from `R'(z)` equals the identity.
pub fn check_nonelliptic_qdet(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("qdet_nonelliptic", params);
    probe.point("z", z);
    let sum = qdet_sum_formula(params, RKind::NonElliptic, z)?;
    let residual = identity_residual(&sum, &TensorOperator::identity(params.n, 1));
    Ok(probe.finish(residual, tolerance))
}

/// The inverse product returns the antisymmetrizer unchanged.
pub fn check_inverse_product(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("qdet_inverse_product", params);
    probe.point("z", z);
    Ok(probe.finish(inverse_product_residual(params, z)?, tolerance))
}

/// `m(z)` takes the same value at every listed point.
pub fn check_z_independence(params: &ModelParams, points: &[LogComplex], tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("z_independence", params);
    let mut values = Vec::with_capacity(points.len());
    for &z in points {
        probe.point("z", z);
        values.push(qdet_closed_form(params, z)?[0]);
    }
    Ok(probe.finish(spread(&values), tolerance))
}

/// Shadow of centrality in the evaluation representation: `M(z)` commutes with
/// every block of `R-hat(w)`.
pub fn centrality_witness(
    params: &ModelParams,
    z: LogComplex,
    w: LogComplex,
    tolerance: f64,
) -> Result<PropertyReport> {
    let n = params.n;
    let mut probe = Probe::new("centrality_witness", params);
    probe.point("z", z);
    probe.point("w", w);
    let m = qdet_product(params, z)?.m;
    let r = build_r(params, RKind::EllipticRhat, w)?;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let e = r.slot1_block(i, j)?;
            let scale = m.frobenius_norm() * e.frobenius_norm();
            if scale > 0.0 {
                worst = worst.max((&(&m * &e) - &(&e * &m)).frobenius_norm() / scale);
            }
        }
    }
    Ok(probe.finish(worst, tolerance))
}
