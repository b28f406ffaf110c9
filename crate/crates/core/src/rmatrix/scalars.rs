//! Scalar building blocks: the coefficients `S`, the normalizations
//! `eta`, `1/kappa_N`, `tau_N`, `rho_N` and the unitarity function `U`.

use num_complex::Complex64;

use super::{ModelParams, PoleTracker};
use crate::error::Result;
use crate::special::{pochhammer_eval, theta_eval, LogComplex};

fn lc(u: Complex64) -> LogComplex {
    LogComplex::new(u)
}

pub(crate) fn theta_num(params: &ModelParams, arg: Complex64, base: Complex64) -> Result<Complex64> {
    Ok(theta_eval(lc(arg), lc(base), &params.policy)?.value)
}

pub(crate) fn theta_den(
    params: &ModelParams,
    what: &'static str,
    arg: Complex64,
    base: Complex64,
    tracker: &mut PoleTracker,
) -> Result<Complex64> {
    let e = theta_eval(lc(arg), lc(base), &params.policy)?;
    tracker.note(what, arg, e.min_factor);
    Ok(e.value)
}

pub(crate) fn poch_num(params: &ModelParams, arg: Complex64, bases: &[Complex64]) -> Result<Complex64> {
    let bases: Vec<LogComplex> = bases.iter().map(|&b| lc(b)).collect();
    Ok(pochhammer_eval(Some(lc(arg)), &bases, &params.policy)?.value)
}

pub(crate) fn poch_den(
    params: &ModelParams,
    what: &'static str,
    arg: Complex64,
    bases: &[Complex64],
    tracker: &mut PoleTracker,
) -> Result<Complex64> {
    let bases: Vec<LogComplex> = bases.iter().map(|&b| lc(b)).collect();
    let e = pochhammer_eval(Some(lc(arg)), &bases, &params.policy)?;
    tracker.note(what, arg, e.min_factor);
    Ok(e.value)
}

/// `(p;p)_inf` for the given log-base, never zero inside the unit disk.
pub(crate) fn euler(params: &ModelParams, base: Complex64) -> Result<Complex64> {
    poch_num(params, base, &[base])
}

pub(crate) fn s_tracked(
    params: &ModelParams,
    a: i64,
    b: i64,
    c: i64,
    log_z: LogComplex,
    with_prefactor: bool,
    tracker: &mut PoleTracker,
) -> Result<Complex64> {
    let n = params.n as f64;
    let (lq, lp, lz) = (params.log_q.log(), params.log_p.log(), log_z.log());
    let base = lp * n;
    let num = theta_num(params, lp * (n + (c - a) as f64) + lq * 2.0 + lz * 2.0, base)?;
    let den_z = theta_den(
        params,
        "S denominator",
        lp * (n + (c - b) as f64) + lz * 2.0,
        base,
        tracker,
    )?;
    let den_q = theta_den(
        params,
        "S denominator",
        lp * (n + (b - a) as f64) + lq * 2.0,
        base,
        tracker,
    )?;
    let ratio = num / (den_z * den_q);
    if !with_prefactor {
        return Ok(ratio);
    }
    let (ba, cb) = ((b - a) as f64, (c - b) as f64);
    let prefactor = (lz * (2.0 * ba / n) + lq * (2.0 * cb / n) + lp * (ba * cb / n)).exp();
    Ok(prefactor * ratio)
}

/// `S_{a,c}^b(z)` with exponents taken from the raw integers.
pub fn s_coeff(params: &ModelParams, a: i64, b: i64, c: i64, log_z: LogComplex) -> Result<Complex64> {
    let mut tracker = PoleTracker::new();
    let value = s_tracked(params, a, b, c, log_z, true, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    Ok(value)
}

/// Theta ratio of `S_{a,c}^b(z)` without the power prefactor, for any integer indices.
pub fn s_hat(params: &ModelParams, a: i64, b: i64, c: i64, log_z: LogComplex) -> Result<Complex64> {
    let mut tracker = PoleTracker::new();
    let value = s_tracked(params, a, b, c, log_z, false, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    Ok(value)
}

pub(crate) fn kappa_inv_tracked(
    params: &ModelParams,
    log_x: LogComplex,
    tracker: &mut PoleTracker,
) -> Result<Complex64> {
    let n = params.n as f64;
    let (lq, lp, lx) = (params.log_q.log(), params.log_p.log(), log_x.log());
    let bases = [lp, lq * (2.0 * n)];
    let q2n = lq * (2.0 * n);
    let shifted = lp + lq * (2.0 * n - 2.0);
    let num = poch_num(params, q2n - lx, &bases)?
        * poch_num(params, lq * 2.0 + lx, &bases)?
        * poch_num(params, lp - lx, &bases)?
        * poch_num(params, shifted + lx, &bases)?;
    let den = poch_den(params, "kappa", q2n + lx, &bases, tracker)?
        * poch_den(params, "kappa", lq * 2.0 - lx, &bases, tracker)?
        * poch_den(params, "kappa", lp + lx, &bases, tracker)?
        * poch_den(params, "kappa", shifted - lx, &bases, tracker)?;
    Ok(num / den)
}

/// `1/kappa_N(x)`, a ratio of double-base Pochhammer symbols with bases `p` and `q^{2N}`.
pub fn kappa_inv(params: &ModelParams, log_x: LogComplex) -> Result<Complex64> {
    let mut tracker = PoleTracker::new();
    let value = kappa_inv_tracked(params, log_x, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    Ok(value)
}

pub(crate) fn eta_tracked(params: &ModelParams, log_z: LogComplex, tracker: &mut PoleTracker) -> Result<Complex64> {
    let n = params.n as f64;
    let (lq, lp, lz) = (params.log_q.log(), params.log_p.log(), log_z.log());
    let ratio = euler(params, lp * n)? / euler(params, lp)?;
    let power = (lz * (2.0 / n)).exp();
    let kinv = kappa_inv_tracked(params, log_z.powf(2.0), tracker)?;
    let num = theta_num(params, lq * 2.0, lp)? * theta_num(params, lp + lz * 2.0, lp)?;
    let den = theta_den(params, "eta", lq * 2.0 + lz * 2.0, lp, tracker)?;
    Ok(power * kinv * ratio * ratio * ratio * num / den)
}

/// Normalization `eta(z)` of the elliptic R-matrix.
pub fn eta(params: &ModelParams, log_z: LogComplex) -> Result<Complex64> {
    let mut tracker = PoleTracker::new();
    let value = eta_tracked(params, log_z, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    Ok(value)
}

pub(crate) fn tau_tracked(params: &ModelParams, log_z: LogComplex, tracker: &mut PoleTracker) -> Result<Complex64> {
    let n = params.n as f64;
    let (lq, lz) = (params.log_q.log(), log_z.log());
    let base = lq * (2.0 * n);
    let num = theta_num(params, lq + lz * 2.0, base)?;
    let den = theta_den(params, "tau", lq - lz * 2.0, base, tracker)?;
    Ok((lz * (2.0 / n - 2.0)).exp() * num / den)
}

/// `tau_N(z)`, the rescaling between `R` and `R-hat`.
pub fn tau(params: &ModelParams, log_z: LogComplex) -> Result<Complex64> {
    let mut tracker = PoleTracker::new();
    let value = tau_tracked(params, log_z, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    Ok(value)
}

/// `U(z)`, the unitarity function of `R-hat`.
pub fn unitarity_u(params: &ModelParams, log_z: LogComplex) -> Result<Complex64> {
    let mut tracker = PoleTracker::new();
    let n = params.n as f64;
    let (lq, lz) = (params.log_q.log(), log_z.log());
    let base = lq * (2.0 * n);
    let num = theta_num(params, lq * 2.0 + lz * 2.0, base)? * theta_num(params, lq * 2.0 - lz * 2.0, base)?;
    let den =
        theta_den(params, "U", lz * 2.0, base, &mut tracker)? * theta_den(params, "U", -lz * 2.0, base, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    Ok((lq * (2.0 / n - 2.0)).exp() * num / den)
}

pub(crate) fn rho_tracked(params: &ModelParams, log_x: LogComplex, tracker: &mut PoleTracker) -> Result<Complex64> {
    let n = params.n as f64;
    let (lq, lx) = (params.log_q.log(), log_x.log());
    let base = [lq * (2.0 * n)];
    let num = poch_num(params, lq * 2.0 + lx, &base)? * poch_num(params, lq * (2.0 * n - 2.0) + lx, &base)?;
    let den =
        poch_den(params, "rho", lx, &base, tracker)? * poch_den(params, "rho", lq * (2.0 * n) + lx, &base, tracker)?;
    Ok((lq * (1.0 / n - 1.0)).exp() * num / den)
}

/// Scalar normalization `rho_N(x)` of the trigonometric R-matrices.
pub fn rho(params: &ModelParams, log_x: LogComplex) -> Result<Complex64> {
    let mut tracker = PoleTracker::new();
    let value = rho_tracked(params, log_x, &mut tracker)?;
    tracker.check(params.pole_threshold)?;
    Ok(value)
}
