//! Trigonometric presentations: gauge, twist, spectrum of `R'(q)`, the `p -> 0`
//! limit and the exponent `n_sigma`.

use num_complex::Complex64;
use num_rational::Ratio;

use super::{relative_residual, Probe, PropertyReport};
use crate::error::{Error, Result};
use crate::perm;
use crate::rmatrix::{alpha, build_f, build_r, build_v, rho, swap_slots, trigonometric_bracket, ModelParams, RKind};
use crate::special::LogComplex;
use crate::tensor::TensorOperator;

pub const DEFAULT_P_SEQUENCE: [f64; 4] = [1e-2, 1e-4, 1e-6, 1e-8];

/// Eigenvalues of `R'(q)` against the closed-form factorization
/// `{rho(q^2) x N, 0 x N(N-1)/2, rho(q^2) Q (q^e + q^{-e})}`, `Q = q/(1+q^2)`,
/// `e = (2i-2j+N)/N` for `i < j`.
pub fn check_spectrum_nonelliptic(params: &ModelParams, tolerance: f64) -> Result<PropertyReport> {
    let n = params.n;
    let nf = n as f64;
    let mut probe = Probe::new("spectrum_nonelliptic", params);
    probe.point("z", params.log_q);
    let r = build_r(params, RKind::NonElliptic, params.log_q)?;
    let eigenvalues = r.eigenvalues()?;

    let q = params.q();
    let rho_q2 = rho(params, params.log_q.powf(2.0))?;
    let big_q = q / (1.0 + q * q);
    let mut expected = vec![rho_q2; n];
    expected.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), n * (n - 1) / 2));
    for i in 1..=n {
        for j in i + 1..=n {
            let e = (2.0 * i as f64 - 2.0 * j as f64 + nf) / nf;
            expected.push(rho_q2 * big_q * (params.log_q.pow_value(e) + params.log_q.pow_value(-e)));
        }
    }
    let distance = greedy_match(&expected, &eigenvalues);
    let scale = eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max);
    probe.number("max_match_distance", distance);
    Ok(probe.finish(distance / scale, tolerance))
}

/// Largest distance in a greedy nearest-neighbour bijection, visiting the
/// expected values by decreasing modulus.
fn greedy_match(expected: &[Complex64], found: &[Complex64]) -> f64 {
    let mut order: Vec<usize> = (0..expected.len()).collect();
    order.sort_by(|&a, &b| expected[b].norm().total_cmp(&expected[a].norm()).then(a.cmp(&b)));
    let mut used = vec![false; found.len()];
    let mut worst = 0.0f64;
    for i in order {
        let best = (0..found.len()).filter(|&k| !used[k]).min_by(|&a, &b| {
            (found[a] - expected[i])
                .norm()
                .total_cmp(&(found[b] - expected[i]).norm())
        });
        match best {
            Some(k) => {
                used[k] = true;
                worst = worst.max((found[k] - expected[i]).norm());
            }
            None => return f64::INFINITY,
        }
    }
    if used.iter().any(|u| !u) {
        return f64::INFINITY;
    }
    worst
}

/// Principal versus gauged homogeneous matrix:
/// `sR(z/w) = (V(z) ⊗ V(w)) R(z^2/w^2) (V(z) ⊗ V(w))^{-1}`.
///
/// At `z = w` both sides carry the pole of `rho_N(1)`; the scalar is then
/// dropped from both sides and the brackets are compared.
pub fn check_gauge_relation(
    params: &ModelParams,
    z: LogComplex,
    w: LogComplex,
    tolerance: f64,
) -> Result<PropertyReport> {
    let mut probe = Probe::new("gauge_relation", params);
    probe.point("z", z);
    probe.point("w", w);
    let g = build_v(params, z).kron(&build_v(params, w))?;
    let g_inv = build_v(params, z.recip()).kron(&build_v(params, w.recip()))?;
    let ratio = z / w;
    let (principal, homogeneous) = if ratio.log().norm() < 1e-14 {
        probe.flag("bracket_fallback", true);
        (
            trigonometric_bracket(params, RKind::Principal, ratio)?,
            trigonometric_bracket(params, RKind::Homogeneous, ratio.powf(2.0))?,
        )
    } else {
        (
            build_r(params, RKind::Principal, ratio)?,
            build_r(params, RKind::Homogeneous, ratio.powf(2.0))?,
        )
    };
    let rhs = &(&g * &homogeneous) * &g_inv;
    Ok(probe.finish(relative_residual(&principal, &rhs), tolerance))
}

/// `R'(z) = F_21 sR(z) F_12^{-1}`, plus the entrywise ratio `q^{alpha_ji - alpha_ij}`
/// on `e_ii ⊗ e_jj`.
pub fn check_twist_relation(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let n = params.n;
    let mut probe = Probe::new("twist_relation", params);
    probe.point("z", z);
    let f12 = build_f(params);
    let f21 = swap_slots(&f12);
    let f12_inv = TensorOperator::from_fn(n, 2, |i, j| {
        if i == j {
            1.0 / f12.get(i, i)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let principal = build_r(params, RKind::Principal, z)?;
    let twisted = build_r(params, RKind::NonElliptic, z)?;
    let rhs = &(&f21 * &principal) * &f12_inv;
    let matrix = relative_residual(&twisted, &rhs);

    let mut ratio_gap = 0.0f64;
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                continue;
            }
            let idx = (i - 1) * n + (j - 1);
            let a = alpha(n, j, i)? - alpha(n, i, j)?;
            let expected = params.log_q.pow_value(*a.numer() as f64 / *a.denom() as f64);
            let ratio = twisted.get(idx, idx) / principal.get(idx, idx);
            ratio_gap = ratio_gap.max((ratio - expected).norm() / expected.norm());
        }
    }
    probe.number("matrix", matrix);
    probe.number("diagonal_ratio", ratio_gap);
    Ok(probe.finish(matrix.max(ratio_gap), tolerance))
}

fn fit(target: &TensorOperator, model: &TensorOperator) -> (Complex64, f64) {
    let dot: Complex64 = model
        .matrix()
        .iter()
        .zip(target.matrix().iter())
        .map(|(m, t)| m.conj() * t)
        .sum();
    let norm2 = model.frobenius_norm().powi(2);
    let s = dot / norm2;
    let residual = (target - &model.scale(s)).frobenius_norm() / model.frobenius_norm();
    (s, residual)
}

/// Distance between the elliptic `R-hat(z; p)` and `s R'(z)` along a decreasing
/// sequence of real `p`, with `s` fitted by least squares at every step.
///
/// The residual is the last one when the sequence decreases strictly and the
/// largest one otherwise. The default tolerance is `10 p_last^{1/N}`, since
/// the fractional powers of `p` inside `S` make the approach algebraic.
pub fn check_p_to_zero(
    params: &ModelParams,
    z: LogComplex,
    p_sequence: &[f64],
    tolerance: Option<f64>,
) -> Result<PropertyReport> {
    if p_sequence.len() < 2 || p_sequence.iter().any(|&p| !(p > 0.0 && p < 1.0)) {
        return Err(Error::Config("p sequence needs at least two values in (0, 1)".into()));
    }
    if p_sequence.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config("p sequence must decrease".into()));
    }
    let mut probe = Probe::new("p_to_zero", params);
    probe.point("z", z);
    let target = build_r(params, RKind::NonElliptic, z)?;
    let mut residuals = Vec::with_capacity(p_sequence.len());
    let mut scalars = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    for &p in p_sequence {
        let at_p = params.with_log_p(LogComplex::from_parts(p.ln(), 0.0))?;
        let rhat = build_r(&at_p, RKind::EllipticRhat, z)?;
        let (s, residual) = fit(&rhat, &target);
        residuals.push(residual);
        let (s_r, _) = fit(&build_r(&at_p, RKind::EllipticR, z)?, &target);
        scalars = (s, s_r);
    }
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    let last = *residuals.last().expect("nonempty");
    let p_last = *p_sequence.last().expect("nonempty");
    let tolerance = tolerance.unwrap_or(10.0 * p_last.powf(1.0 / params.n as f64));
    probe.text("converging_matrix", "elliptic-hat");
    probe.series("residuals", residuals.clone());
    probe.series("p_sequence", p_sequence.to_vec());
    probe.flag("monotone", monotone);
    probe.number("fitted_s_re", scalars.0.re);
    probe.number("fitted_s_im", scalars.0.im);
    probe.number("fitted_s_plain_r_re", scalars.1.re);
    probe.number("fitted_s_plain_r_im", scalars.1.im);
    let residual = if monotone {
        last
    } else {
        residuals.iter().cloned().fold(0.0, f64::max)
    };
    Ok(probe.finish(residual, tolerance))
}

/// `n_sigma = l(sigma) + (2/N) sum_i i (sigma(i) - i) + sum_{i<j} (alpha_{sigma(i) sigma(j)} - alpha_{ij})`,
/// exactly; `sigma` lists 0-based images.
pub fn nsigma(n: usize, sigma: &[usize]) -> Result<Ratio<i64>> {
    if sigma.len() != n || !perm::is_permutation(sigma) {
        return Err(Error::Domain(format!("{sigma:?} is not a permutation of {n} letters")));
    }
    let mut total = Ratio::from_integer(perm::length(sigma) as i64);
    let mut weighted = 0i64;
    for (i, &s) in sigma.iter().enumerate() {
        weighted += (i as i64 + 1) * (s as i64 - i as i64);
    }
    total += Ratio::new(2 * weighted, n as i64);
    for i in 0..n {
        for j in i + 1..n {
            total += alpha(n, sigma[i] + 1, sigma[j] + 1)? - alpha(n, i + 1, j + 1)?;
        }
    }
    Ok(total)
}

fn magnitude(r: Ratio<i64>) -> Ratio<i64> {
    if r < Ratio::from_integer(0) {
        -r
    } else {
        r
    }
}

/// `n_sigma = 0` for every permutation of up to `n_max` letters, in exact arithmetic.
pub fn check_nsigma(n_max: usize) -> Result<PropertyReport> {
    if !(2..=6).contains(&n_max) {
        return Err(Error::Size(format!(
            "n_sigma is enumerated for 2 <= N <= 6, got {n_max}"
        )));
    }
    let dummy = ModelParams::new(
        n_max,
        LogComplex::from_parts(-0.5, 0.0),
        LogComplex::from_parts(-1.0, 0.0),
    )?;
    let mut probe = Probe::new("nsigma", &dummy);
    probe.text("params", "combinatorial, parameter free");
    let mut worst = Ratio::from_integer(0i64);
    let mut count = 0usize;
    for n in 2..=n_max {
        for sigma in perm::lexicographic(n) {
            let value = nsigma(n, &sigma)?;
            if magnitude(value) > magnitude(worst) {
                worst = value;
            }
            count += 1;
        }
    }
    probe.number("permutations", count as f64);
    probe.text("worst_exact", worst.to_string());
    Ok(probe.finish(*worst.numer() as f64 / *worst.denom() as f64, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn greedy_match_handles_permuted_multisets() {
        let a = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        let b = [
            Complex64::new(0.0, 1e-12),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 1e-13),
        ];
        assert!(greedy_match(&a, &b) < 2e-12);
        assert_eq!(greedy_match(&a, &b[..2]), f64::INFINITY);
    }

    #[test]
    fn nsigma_vanishes_on_small_cases() {
        assert_eq!(nsigma(3, &[0, 1, 2]).unwrap(), Ratio::from_integer(0));
        assert_eq!(nsigma(3, &[1, 0, 2]).unwrap(), Ratio::from_integer(0));
        assert!(nsigma(3, &[0, 0, 2]).is_err());
    }
}
