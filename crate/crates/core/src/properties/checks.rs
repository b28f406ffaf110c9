//! Identities of the elliptic R-matrix and of its trigonometric relatives.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{identity_residual, relative_residual, Probe, PropertyReport, Sampler};
use crate::error::{Error, Result};
use crate::rmatrix::{
    build_g, build_g_half, build_h, build_r, removable_limit, rho, swap_slots, tau, unitarity_u, LimitRule,
    ModelParams, RKind,
};
use crate::special::{theta_shift_residual, theta_square_base_residual, LogComplex, TruncationPolicy};
use crate::tensor::{antisymmetrizer, permutation_op, TensorOperator};

const MAX_CONDITION: f64 = 1e12;

fn shifted(z: LogComplex, by: Complex64) -> LogComplex {
    LogComplex::new(z.log() + by)
}

fn embed(op: &TensorOperator, slots: &[usize], arity: usize) -> TensorOperator {
    TensorOperator::embed(op, slots, arity).expect("slots are valid")
}

fn on_first(op: &TensorOperator) -> TensorOperator {
    embed(op, &[1], 2)
}

/// Both theta quasi-periodicity identities at `samples` random points.
pub fn check_theta_identities(
    sampler: &mut Sampler,
    samples: usize,
    policy: &TruncationPolicy,
    tolerance: f64,
) -> Result<PropertyReport> {
    let dummy = ModelParams::new(2, LogComplex::from_parts(-0.5, 0.0), LogComplex::from_parts(-1.0, 0.0))?;
    let mut probe = Probe::new("theta_identities", &dummy);
    probe.text("params", "independent random nomes");
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let a = sampler.annulus(0.05, 0.6);
        let z = sampler.z();
        let n = sampler.integer(0, 3);
        probe.point("a", a);
        probe.point("z", z);
        worst = worst
            .max(theta_shift_residual(z, a, n, policy)?)
            .max(theta_square_base_residual(z, a, policy)?);
    }
    Ok(probe.finish(worst, tolerance))
}

/// `R_12(z1/z2) R_13(z1/z3) R_23(z2/z3) = R_23(z2/z3) R_13(z1/z3) R_12(z1/z2)`.
pub fn check_ybe(
    params: &ModelParams,
    kind: RKind,
    z1: LogComplex,
    z2: LogComplex,
    z3: LogComplex,
    tolerance: f64,
) -> Result<PropertyReport> {
    let mut probe = Probe::new(&format!("ybe_{kind}"), params);
    for (label, z) in [("z1", z1), ("z2", z2), ("z3", z3)] {
        probe.point(label, z);
    }
    let r12 = build_r(params, kind, z1 / z2)?;
    let r13 = build_r(params, kind, z1 / z3)?;
    let r23 = build_r(params, kind, z2 / z3)?;
    let (a, b, c) = (
        embed(&r12, &[1, 2], 3),
        embed(&r13, &[1, 3], 3),
        embed(&r23, &[2, 3], 3),
    );
    let lhs = &(&a * &b) * &c;
    let rhs = &(&c * &b) * &a;
    let residual = (&lhs - &rhs).frobenius_norm() / lhs.frobenius_norm();
    Ok(probe.finish(residual, tolerance))
}

/// `R_12(z) R_21(1/z) = f(z) I`, with `f = 1` for `R`, `U(z)` for `R-hat`
/// and `rho_N(x) rho_N(1/x)` for the trigonometric matrices.
pub fn check_unitarity(params: &ModelParams, kind: RKind, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new(&format!("unitarity_{kind}"), params);
    probe.point("z", z);
    let lhs = &build_r(params, kind, z)? * &swap_slots(&build_r(params, kind, z.recip())?);
    let id = TensorOperator::identity(params.n, 2);
    let residual = match kind {
        RKind::EllipticR | RKind::EightVertex => identity_residual(&lhs, &id),
        RKind::EllipticRhat => {
            let u = unitarity_u(params, z)?;
            let half = params.log_q.powf(0.5);
            let via_tau = tau(params, half * z)? * tau(params, half / z)?;
            let gap = (u - via_tau).norm() / u.norm();
            probe.number("u_two_routes", gap);
            let matrix = relative_residual(&lhs, &id.scale(u));
            probe.number("matrix", matrix);
            matrix.max(gap)
        }
        RKind::Homogeneous | RKind::Principal | RKind::NonElliptic => {
            let x = if kind == RKind::Homogeneous { z } else { z.powf(2.0) };
            let scalar = rho(params, x)? * rho(params, x.recip())?;
            probe.text("rhs", "rho(x) rho(1/x) I");
            relative_residual(&lhs, &id.scale(scalar))
        }
    };
    Ok(probe.finish(residual, tolerance))
}

/// `R(1) = P`, evaluated as a removable singularity.
pub fn check_regularity(params: &ModelParams, kind: RKind, tolerance: f64) -> Result<PropertyReport> {
    if !matches!(kind, RKind::EllipticR | RKind::EightVertex) {
        return Err(Error::Kind(format!(
            "regularity is checked for the elliptic R only, not {kind}"
        )));
    }
    let mut probe = Probe::new(&format!("regularity_{kind}"), params);
    probe.point("z", LogComplex::ONE);
    let rule = LimitRule::default();
    probe.number("limit_radius", rule.radius);
    let r1 = removable_limit(|u| build_r(params, kind, u), LogComplex::ONE, &rule)?;
    let p = permutation_op(&[2, 1], params.n)?;
    Ok(probe.finish(identity_residual(&r1, &p), tolerance))
}

/// `R_12(z)^{t2} R_21(z^{-1} q^{-N})^{t2} = I`.
pub fn check_crossing(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("crossing", params);
    probe.point("z", z);
    let arg = LogComplex::new(-z.log() - params.log_q.log() * params.n as f64);
    let a = build_r(params, RKind::EllipticR, z)?.partial_transpose(2)?;
    let b = swap_slots(&build_r(params, RKind::EllipticR, arg)?).partial_transpose(2)?;
    let residual = identity_residual(&(&a * &b), &TensorOperator::identity(params.n, 2));
    Ok(probe.finish(residual, tolerance))
}

/// `R_12(-z) = omega (g^{-1} ⊗ 1) R_12(z) (g ⊗ 1)`.
pub fn check_antisymmetry(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("antisymmetry", params);
    probe.point("z", z);
    let omega = Complex64::from_polar(1.0, 2.0 * PI / params.n as f64);
    let g = on_first(&build_g(params));
    let g_inv = on_first(&build_g(params).adjoint());
    let lhs = build_r(params, RKind::EllipticR, z.negate())?;
    let rhs = (&(&g_inv * &build_r(params, RKind::EllipticR, z)?) * &g).scale(omega);
    Ok(probe.finish(relative_residual(&lhs, &rhs), tolerance))
}

/// `R-hat_12(-z p^{1/2}) = X^{-1} R-hat_21(1/z)^{-1} X` with `X = (g^{1/2} h g^{1/2}) ⊗ 1`.
pub fn check_quasi_periodicity(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("quasi_periodicity", params);
    probe.point("z", z);
    probe.text("g_half_branch", "exp(i pi k / N)");
    let gh = build_g_half(params);
    let x = on_first(&(&(&gh * &build_h(params)) * &gh));
    let x_inv = x.inverse(MAX_CONDITION)?;
    let arg = shifted(z.negate(), params.log_p.log() * 0.5);
    let lhs = build_r(params, RKind::EllipticRhat, arg)?;
    let inner = swap_slots(&build_r(params, RKind::EllipticRhat, z.recip())?).inverse(MAX_CONDITION)?;
    let rhs = &(&x_inv * &inner) * &x;
    Ok(probe.finish(relative_residual(&lhs, &rhs), tolerance))
}

fn commutator_residual(x: &TensorOperator, r: &TensorOperator) -> f64 {
    relative_residual(&(x * r), &(r * x))
}

/// `(h ⊗ h) R_12(z) = R_12(z) (h ⊗ h)`, as printed.
pub fn check_h_invariance(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("h_invariance", params);
    probe.point("z", z);
    let h = build_h(params);
    let hh = h.kron(&h)?;
    let residual = commutator_residual(&hh, &build_r(params, RKind::EllipticR, z)?);
    Ok(probe.finish(residual, tolerance))
}

/// Companion of [`check_h_invariance`] with the shift dressed as `g^{1/2} h g^{1/2}`.
pub fn check_h_invariance_gauged(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("h_invariance_gauged", params);
    probe.point("z", z);
    let gh = build_g_half(params);
    let x = &(&gh * &build_h(params)) * &gh;
    let xx = x.kron(&x)?;
    let residual = commutator_residual(&xx, &build_r(params, RKind::EllipticR, z)?);
    Ok(probe.finish(residual, tolerance))
}

/// `(R(z)^{t2})^{-1} = (R(q^N z)^{-1})^{t2}` for `R` or `R-hat`.
pub fn check_crossing_unitarity(
    params: &ModelParams,
    kind: RKind,
    z: LogComplex,
    tolerance: f64,
) -> Result<PropertyReport> {
    if !matches!(kind, RKind::EllipticR | RKind::EllipticRhat) {
        return Err(Error::Kind(format!(
            "crossing-unitarity is stated for R and R-hat, not {kind}"
        )));
    }
    let mut probe = Probe::new(&format!("crossing_unitarity_{kind}"), params);
    probe.point("z", z);
    let lhs = build_r(params, kind, z)?.partial_transpose(2)?.inverse(MAX_CONDITION)?;
    let up = shifted(z, params.log_q.log() * params.n as f64);
    let rhs = build_r(params, kind, up)?
        .inverse(MAX_CONDITION)?
        .partial_transpose(2)?;
    Ok(probe.finish(relative_residual(&lhs, &rhs), tolerance))
}

/// `R-hat(q)` as a removable singularity.
pub fn rhat_at_q(params: &ModelParams) -> Result<TensorOperator> {
    removable_limit(
        |u| build_r(params, RKind::EllipticRhat, u),
        params.log_q,
        &LimitRule::default(),
    )
}

/// Kernel lemma: `ker R-hat(q) = im A_2`, the rank count, and the symmetry of
/// `R-hat(q)` under exchange of its upper indices. The residual is the worst of
/// the two relative residuals and the absolute rank mismatch.
pub fn check_kernel_lemma(params: &ModelParams, sv_threshold: f64, tolerance: f64) -> Result<PropertyReport> {
    let n = params.n;
    let mut probe = Probe::new("kernel_lemma", params);
    probe.point("z", params.log_q);
    let rq = rhat_at_q(params)?;
    let a2 = antisymmetrizer(n, 2)?;
    let annihilation = (&rq * &a2).frobenius_norm() / rq.frobenius_norm();

    let spectral = rq.spectral(sv_threshold)?;
    let expected_rank = n * n - n * (n - 1) / 2;
    let rank_gap = spectral.rank.abs_diff(expected_rank) as f64;

    let mut kernel_outside = 0.0f64;
    for v in &spectral.kernel_basis {
        let av = a2.apply(v)?;
        let gap: f64 = av.iter().zip(v).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
        kernel_outside = kernel_outside.max(gap);
    }

    let mut exchange = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let row = i * n + k;
                    exchange = exchange.max((rq.get(row, j * n + l) - rq.get(row, l * n + j)).norm());
                }
            }
        }
    }
    let exchange = exchange / rq.max_abs();

    probe.number("annihilation", annihilation);
    probe.number("rank", spectral.rank as f64);
    probe.number("expected_rank", expected_rank as f64);
    probe.number("kernel_outside_image", kernel_outside);
    probe.number("upper_index_exchange", exchange);
    Ok(probe.finish(annihilation.max(exchange).max(rank_gap), tolerance))
}

/// Exchange identities of evaluated Lax blocks: with `E_ij(z)` the `(i, j)` block of `R-hat(z)`,
/// `E_ij(z) E_kl(z/q) - E_il(z) E_kj(z/q) - E_kl(z) E_ij(z/q) + E_kj(z) E_il(z/q) = 0`
/// and `E_ij(z) E_il(z/q) = E_il(z) E_ij(z/q)`.
pub fn check_evaluated_ll(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let n = params.n;
    let mut probe = Probe::new("evaluated_ll", params);
    probe.point("z", z);
    let zq = z / params.log_q;
    probe.point("z/q", zq);
    let r1 = build_r(params, RKind::EllipticRhat, z)?;
    let r2 = build_r(params, RKind::EllipticRhat, zq)?;
    let mut e1 = Vec::with_capacity(n * n);
    let mut e2 = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            e1.push(r1.slot1_block(i, j)?);
            e2.push(r2.slot1_block(i, j)?);
        }
    }
    let at = |e: &Vec<TensorOperator>, i: usize, j: usize| e[i * n + j].clone();
    let scale = r1.frobenius_norm() * r2.frobenius_norm();
    let mut four_term = 0.0f64;
    let mut two_term = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let t = &(&(&at(&e1, i, j) * &at(&e2, k, l)) - &(&at(&e1, i, l) * &at(&e2, k, j)))
                        - &(&(&at(&e1, k, l) * &at(&e2, i, j)) - &(&at(&e1, k, j) * &at(&e2, i, l)));
                    four_term = four_term.max(t.frobenius_norm() / scale);
                }
                let l = k;
                let t = &(&at(&e1, i, j) * &at(&e2, i, l)) - &(&at(&e1, i, l) * &at(&e2, i, j));
                two_term = two_term.max(t.frobenius_norm() / scale);
            }
        }
    }
    probe.number("four_term", four_term);
    probe.number("two_term", two_term);
    Ok(probe.finish(four_term.max(two_term), tolerance))
}

/// Full transpose symmetry `R^{t1 t2} = R`. It holds for N = 2 only; for larger N
/// the report is a canary that is expected to fail.
pub fn check_transpose_symmetry(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("transpose_symmetry", params);
    probe.point("z", z);
    if params.n > 2 {
        probe.canary();
    }
    let r = build_r(params, RKind::EllipticR, z)?;
    Ok(probe.finish(relative_residual(&r.transpose(), &r), tolerance))
}

fn entrywise_residual(a: &TensorOperator, b: &TensorOperator) -> f64 {
    let scale = b.max_abs().max(a.max_abs());
    a.matrix()
        .iter()
        .zip(b.matrix().iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// N = 2: the general elliptic builder against the explicit eight-vertex matrix, entrywise.
pub fn check_eightvertex_agreement(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("eightvertex_agreement", params);
    probe.point("z", z);
    let general = build_r(params, RKind::EllipticR, z)?;
    let explicit = build_r(params, RKind::EightVertex, z)?;
    let d_general = general.get(0, 3);
    let d_explicit = explicit.get(0, 3);
    probe.number("d_ratio_re", (d_general / d_explicit).re);
    probe.number("d_ratio_im", (d_general / d_explicit).im);
    Ok(probe.finish(entrywise_residual(&general, &explicit), tolerance))
}

/// Companion of [`check_eightvertex_agreement`]: agreement after conjugating the
/// explicit matrix by `diag(1, i) ⊗ diag(1, i)`.
pub fn check_eightvertex_gauged(params: &ModelParams, z: LogComplex, tolerance: f64) -> Result<PropertyReport> {
    let mut probe = Probe::new("eightvertex_gauged", params);
    probe.point("z", z);
    let general = build_r(params, RKind::EllipticR, z)?;
    let explicit = build_r(params, RKind::EightVertex, z)?;
    let i = Complex64::new(0.0, 1.0);
    let d = TensorOperator::diagonal(&[Complex64::new(1.0, 0.0), i]);
    let d_inv = TensorOperator::diagonal(&[Complex64::new(1.0, 0.0), -i]);
    let g = d.kron(&d)?;
    let g_inv = d_inv.kron(&d_inv)?;
    let gauged = &(&g * &explicit) * &g_inv;
    Ok(probe.finish(entrywise_residual(&general, &gauged), tolerance))
}
