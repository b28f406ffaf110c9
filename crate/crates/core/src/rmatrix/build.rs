use num_complex::Complex64;

use super::scalars::{
    eta_tracked, euler, kappa_inv_tracked, rho_tracked, s_tracked, tau_tracked, theta_den, theta_num,
};
use super::{ModelParams, PoleTracker, RKind};
use crate::error::{Error, Result};
use crate::special::LogComplex;
use crate::tensor::{permutation_op, TensorOperator};

/// Dense `R(z)` of the requested family on `C^N ⊗ C^N`.
///
/// Row `(a, c)` and column `(b, d)` hold the coefficient of `e_{ab} ⊗ e_{cd}`.
pub fn build_r(params: &ModelParams, kind: RKind, log_z: LogComplex) -> Result<TensorOperator> {
    let mut tracker = PoleTracker::new();
    let r = assemble(params, kind, log_z, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    if r.matrix().iter().any(|x| !x.is_finite()) {
        return Err(Error::Pole {
            what: format!("{kind} entries"),
            log_arg: log_z.log(),
            margin: 0.0,
        });
    }
    Ok(r)
}

/// Smallest denominator factor met while building `R(z)`; small values flag nearby poles.
pub fn pole_margin(params: &ModelParams, kind: RKind, log_z: LogComplex) -> Result<f64> {
    let mut tracker = PoleTracker::new();
    assemble(params, kind, log_z, &mut tracker)?;
    Ok(tracker.margin)
}

/// `R_21 = P R_12 P`.
pub fn swap_slots(op: &TensorOperator) -> TensorOperator {
    let p = permutation_op(&[2, 1], op.local_dim()).expect("swap is a permutation");
    &(&p * op) * &p
}

fn assemble(params: &ModelParams, kind: RKind, log_z: LogComplex, tracker: &mut PoleTracker) -> Result<TensorOperator> {
    if !kind.supports(params.n) {
        return Err(Error::Kind(format!("{kind} requires N = 2, got N = {}", params.n)));
    }
    match kind {
        RKind::EllipticR => elliptic(params, log_z, tracker),
        RKind::EllipticRhat => {
            let shifted = params.log_q.powf(0.5) / log_z;
            let t = tau_tracked(params, shifted, tracker)?;
            Ok(elliptic(params, log_z, tracker)?.scale(t))
        }
        RKind::EightVertex => eight_vertex(params, log_z, tracker),
        RKind::Homogeneous => {
            let rho = rho_tracked(params, log_z, tracker)?;
            Ok(bracket(params, kind, log_z, tracker).scale(rho))
        }
        RKind::Principal | RKind::NonElliptic => {
            let rho = rho_tracked(params, log_z.powf(2.0), tracker)?;
            Ok(bracket(params, kind, log_z, tracker).scale(rho))
        }
    }
}

fn elliptic(params: &ModelParams, log_z: LogComplex, tracker: &mut PoleTracker) -> Result<TensorOperator> {
    let n = params.n;
    let ni = n as i64;
    let eta = eta_tracked(params, log_z, tracker)?;
    let mut r = TensorOperator::zeros(n, 2);
    for a in 1..=ni {
        for b in 1..=ni {
            for c in 1..=ni {
                // the unique d in 1..N with a + c = b + d (mod N)
                let d = (a + c - b - 1).rem_euclid(ni) + 1;
                let sign = if ((a + c - b - d) / ni) % 2 == 0 { 1.0 } else { -1.0 };
                let s = s_tracked(params, a, b, c, log_z, true, tracker)?;
                let row = ((a - 1) * ni + (c - 1)) as usize;
                let col = ((b - 1) * ni + (d - 1)) as usize;
                r.set(row, col, eta * s * sign);
            }
        }
    }
    Ok(r)
}

fn eight_vertex(params: &ModelParams, log_z: LogComplex, tracker: &mut PoleTracker) -> Result<TensorOperator> {
    let (lq, lp, lz) = (params.log_q.log(), params.log_p.log(), log_z.log());
    let base = lp * 2.0;
    let th = |arg: Complex64| theta_num(params, arg, base);
    let den_a = theta_den(params, "eight-vertex", lp + lq * 2.0 + lz * 2.0, base, tracker)?;
    let den_b = theta_den(params, "eight-vertex", lq * 2.0 + lz * 2.0, base, tracker)?;

    let a = (-lz).exp() * th(lp + lz * 2.0)? * th(lp + lq * 2.0)? / den_a;
    let b = (lq - lz).exp() * th(lz * 2.0)? * th(lp + lq * 2.0)? / den_b;
    let c = th(lp + lz * 2.0)? * th(lq * 2.0)? / den_b;
    let d = -(lp * 0.5 - lq - lz * 2.0).exp() * th(lz * 2.0)? * th(lq * 2.0)? / den_a;

    let pp = euler(params, lp)?;
    let prefactor = kappa_inv_tracked(params, log_z.powf(2.0), tracker)? * euler(params, base)? / (pp * pp);
    let zero = Complex64::new(0.0, 0.0);
    let rows = [
        [a, zero, zero, d],
        [zero, b, c, zero],
        [zero, c, b, zero],
        [d, zero, zero, a],
    ];
    Ok(TensorOperator::from_fn(2, 2, |i, j| prefactor * rows[i][j]))
}

/// The rational matrix multiplying `rho_N` in a trigonometric R-matrix.
pub fn trigonometric_bracket(params: &ModelParams, kind: RKind, log_z: LogComplex) -> Result<TensorOperator> {
    if kind.is_elliptic() {
        return Err(Error::Kind(format!("{kind} has no trigonometric bracket")));
    }
    let mut tracker = PoleTracker::new();
    let r = bracket(params, kind, log_z, &mut tracker);
    tracker.check(params.pole_threshold)?;
    Ok(r)
}

fn bracket(params: &ModelParams, kind: RKind, log_z: LogComplex, tracker: &mut PoleTracker) -> TensorOperator {
    let n = params.n;
    let nf = n as f64;
    let lq = params.log_q.log();
    let q = params.q();
    let one = Complex64::new(1.0, 0.0);
    let homogeneous = kind == RKind::Homogeneous;
    let lx = if homogeneous { log_z.log() } else { log_z.log() * 2.0 };
    let x = lx.exp();
    let den = one - q * q * x;
    tracker.note("trigonometric bracket", lq * 2.0 + lx, den.norm());
    let diagonal_off = q * (one - x) / den;
    let exchange = (one - q * q) / den;

    let mut r = TensorOperator::zeros(n, 2);
    for i in 1..=n {
        for j in 1..=n {
            let same = (i - 1) * n + (j - 1);
            let swapped = (j - 1) * n + (i - 1);
            if i == j {
                r.set(same, same, one);
                continue;
            }
            if homogeneous {
                r.set(same, same, diagonal_off);
                r.set(same, swapped, if i < j { exchange } else { exchange * x });
                continue;
            }
            let e = if i < j {
                (2.0 * j as f64 - 2.0 * i as f64 - nf) / nf
            } else {
                (2.0 * j as f64 - 2.0 * i as f64 + nf) / nf
            };
            let twist = if kind == RKind::NonElliptic {
                (lq * e).exp()
            } else {
                one
            };
            r.set(same, same, diagonal_off * twist);
            r.set(same, swapped, exchange * (log_z.log() * (1.0 + e)).exp());
        }
    }
    r
}
