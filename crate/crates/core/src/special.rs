//! Infinite q-Pochhammer symbols and the Jacobi theta function.
//!
//! Every complex argument is carried as a logarithm ([`LogComplex`]) so that
//! fractional powers such as `z^{2/N}` or `p^{1/2}` are `exp(alpha * log z)`
//! and never a principal-branch root of the value.
//!
//! ```text
//! (z; p_1, ..., p_m)_inf = prod_{n_i >= 0} (1 - z p_1^{n_1} ... p_m^{n_m})
//! Theta_p(z)             = (z; p)_inf (p/z; p)_inf (p; p)_inf
//! ```

use std::f64::consts::PI;
use std::ops::{Div, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A nonzero complex number `e^u`, stored through its logarithm `u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogComplex(Complex64);

impl LogComplex {
    /// The number 1.
    pub const ONE: LogComplex = LogComplex(Complex64::new(0.0, 0.0));

    pub const fn new(log: Complex64) -> Self {
        LogComplex(log)
    }

    pub fn from_parts(log_re: f64, log_im: f64) -> Self {
        LogComplex(Complex64::new(log_re, log_im))
    }

    /// Principal logarithm of a nonzero, finite value.
    pub fn from_value(z: Complex64) -> Result<Self> {
        if !z.is_finite() || z.norm() == 0.0 {
            return Err(Error::Domain(format!(
                "{z} has no logarithm; zero must be passed explicitly"
            )));
        }
        Ok(LogComplex(z.ln()))
    }

    /// Polar form `r e^{i theta}` with `r > 0`.
    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(r > 0.0 && r.is_finite() && theta.is_finite()) {
            return Err(Error::Domain(format!("modulus {r} must be positive and finite")));
        }
        Ok(LogComplex(Complex64::new(r.ln(), theta)))
    }

    pub fn log(self) -> Complex64 {
        self.0
    }

    pub fn value(self) -> Complex64 {
        self.0.exp()
    }

    pub fn modulus(self) -> f64 {
        self.0.re.exp()
    }

    /// `x^alpha` as a new logarithm.
    pub fn powf(self, alpha: f64) -> LogComplex {
        LogComplex(self.0 * alpha)
    }

    /// `x^alpha` as a value.
    pub fn pow_value(self, alpha: f64) -> Complex64 {
        (self.0 * alpha).exp()
    }

    pub fn recip(self) -> LogComplex {
        LogComplex(-self.0)
    }

    /// `-x`, realized as `log x + i pi`.
    pub fn negate(self) -> LogComplex {
        LogComplex(self.0 + Complex64::new(0.0, PI))
    }
}

// Products of values are sums of logarithms.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for LogComplex {
    type Output = LogComplex;
    fn mul(self, rhs: LogComplex) -> LogComplex {
        LogComplex(self.0 + rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for LogComplex {
    type Output = LogComplex;
    fn div(self, rhs: LogComplex) -> LogComplex {
        LogComplex(self.0 - rhs.0)
    }
}

/// Cutoffs for the formally infinite products.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Factors `1 - x` with `|x| < abs_floor` are dropped.
    pub abs_floor: f64,
    /// Maximal exponent visited per base before giving up.
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            abs_floor: 1e-17,
            max_terms: 4096,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_floor > 0.0 && self.abs_floor < 1.0) {
            return Err(Error::Domain(format!(
                "abs_floor must lie in (0, 1), got {}",
                self.abs_floor
            )));
        }
        if self.max_terms == 0 {
            return Err(Error::Domain("max_terms must be at least 1".into()));
        }
        Ok(())
    }
}

/// A truncated product together with its diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProductEval {
    pub value: Complex64,
    /// Smallest `|1 - x|` over the factors kept; 0 at an exact zero of the product.
    pub min_factor: f64,
    /// Bound on `sum |x|` over the dropped factors.
    pub tail_bound: f64,
    pub factors: usize,
}

/// Truncated `(z; p_1, ..., p_m)_inf` for `m` in `1..=3`; `None` stands for `z = 0`.
pub fn pochhammer_inf(
    log_z: Option<LogComplex>,
    log_bases: &[LogComplex],
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    pochhammer_eval(log_z, log_bases, policy).map(|e| e.value)
}

/// Same as [`pochhammer_inf`] but also reports the smallest factor and tail bound.
pub fn pochhammer_eval(
    log_z: Option<LogComplex>,
    log_bases: &[LogComplex],
    policy: &TruncationPolicy,
) -> Result<ProductEval> {
    policy.validate()?;
    if log_bases.is_empty() || log_bases.len() > 3 {
        return Err(Error::Domain(format!("expected 1 to 3 bases, got {}", log_bases.len())));
    }
    for base in log_bases {
        if !base.log().is_finite() || base.log().re >= 0.0 {
            return Err(Error::Domain(format!(
                "Pochhammer base {} has modulus >= 1",
                base.value()
            )));
        }
    }
    let mut walk = LatticeWalk {
        bases: log_bases,
        moduli: log_bases.iter().map(|b| b.modulus()).collect(),
        policy,
        eval: ProductEval {
            value: Complex64::new(1.0, 0.0),
            min_factor: f64::INFINITY,
            tail_bound: 0.0,
            factors: 0,
        },
    };
    if let Some(z) = log_z {
        walk.visit(0, z.log())?;
    }
    Ok(walk.eval)
}

struct LatticeWalk<'a> {
    bases: &'a [LogComplex],
    moduli: Vec<f64>,
    policy: &'a TruncationPolicy,
    eval: ProductEval,
}

impl LatticeWalk<'_> {
    fn visit(&mut self, depth: usize, log_term: Complex64) -> Result<()> {
        if depth == self.bases.len() {
            let factor = Complex64::new(1.0, 0.0) - log_term.exp();
            self.eval.value *= factor;
            self.eval.min_factor = self.eval.min_factor.min(factor.norm());
            self.eval.factors += 1;
            return Ok(());
        }
        let step = self.bases[depth].log();
        let mut n = 0usize;
        loop {
            let l = log_term + step * n as f64;
            let magnitude = l.re.exp();
            if magnitude < self.policy.abs_floor {
                // every remaining term in this block is smaller still
                let geometric: f64 = self.moduli[depth..].iter().map(|m| 1.0 / (1.0 - m)).product();
                self.eval.tail_bound += magnitude * geometric;
                return Ok(());
            }
            if n >= self.policy.max_terms {
                return Err(Error::Truncation {
                    max_terms: self.policy.max_terms,
                });
            }
            self.visit(depth + 1, l)?;
            n += 1;
        }
    }
}

/// Jacobi theta function `Theta_p(z) = (z;p)(p/z;p)(p;p)`.
pub fn theta(log_z: LogComplex, log_p: LogComplex, policy: &TruncationPolicy) -> Result<Complex64> {
    theta_eval(log_z, log_p, policy).map(|e| e.value)
}

/// Theta value with the smallest factor of its two z-dependent products.
pub fn theta_eval(log_z: LogComplex, log_p: LogComplex, policy: &TruncationPolicy) -> Result<ProductEval> {
    let a = pochhammer_eval(Some(log_z), &[log_p], policy)?;
    let b = pochhammer_eval(Some(log_p / log_z), &[log_p], policy)?;
    let c = pochhammer_eval(Some(log_p), &[log_p], policy)?;
    Ok(ProductEval {
        value: a.value * b.value * c.value,
        min_factor: a.min_factor.min(b.min_factor),
        tail_bound: a.tail_bound + b.tail_bound + c.tail_bound,
        factors: a.factors + b.factors + c.factors,
    })
}

/// Self-test of the quasi-periodicity of theta.
///
/// Returns the larger of the relative residuals of
/// `Theta_a(a z) = Theta_a(1/z)` and
/// `Theta_a(a^n z) = (-1)^n z^{-n} a^{-n(n-1)/2} Theta_a(z)`,
/// each measured against the larger of its two sides.
pub fn theta_shift_residual(log_z: LogComplex, log_a: LogComplex, n: i32, policy: &TruncationPolicy) -> Result<f64> {
    let reflect_lhs = theta(log_a * log_z, log_a, policy)?;
    let reflect_rhs = theta(log_z.recip(), log_a, policy)?;
    let first = relative_gap(reflect_lhs, reflect_rhs);

    let base = theta(log_z, log_a, policy)?;
    let shifted = theta(log_a.powf(n as f64) * log_z, log_a, policy)?;
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let multiplier = (log_z.log() * (-nf) + log_a.log() * (-nf * (nf - 1.0) / 2.0)).exp() * sign;
    let second = relative_gap(shifted, multiplier * base);
    Ok(first.max(second))
}

/// Relative residual of `Theta_{a^2}(a z) = Theta_{a^2}(a / z)`.
pub fn theta_square_base_residual(log_z: LogComplex, log_a: LogComplex, policy: &TruncationPolicy) -> Result<f64> {
    let base = log_a.powf(2.0);
    let lhs = theta(log_a * log_z, base, policy)?;
    let rhs = theta(log_a / log_z, base, policy)?;
    Ok(relative_gap(lhs, rhs))
}

fn relative_gap(a: Complex64, b: Complex64) -> f64 {
    let scale = a.norm().max(b.norm());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm() / scale
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lc(re: f64, im: f64) -> LogComplex {
        LogComplex::from_value(Complex64::new(re, im)).unwrap()
    }

    #[test]
    fn zero_argument_gives_one() {
        let policy = TruncationPolicy::default();
        let v = pochhammer_inf(None, &[lc(0.4, 0.1)], &policy).unwrap();
        assert_eq!(v, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn p_p_tends_to_one_as_p_vanishes() {
        let policy = TruncationPolicy::default();
        let p = LogComplex::from_polar(1e-12, 0.3).unwrap();
        let v = pochhammer_inf(Some(p), &[p], &policy).unwrap();
        assert!((v - 1.0).norm() < 1e-11);
    }

    #[test]
    fn rejects_bases_outside_unit_disk() {
        let policy = TruncationPolicy::default();
        let err = pochhammer_inf(Some(lc(0.5, 0.0)), &[lc(1.0, 0.0)], &policy).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
        let err = pochhammer_inf(Some(lc(0.5, 0.0)), &[lc(0.2, 0.0); 4], &policy).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn truncation_error_when_budget_too_small() {
        let policy = TruncationPolicy {
            abs_floor: 1e-17,
            max_terms: 10,
        };
        let err = pochhammer_inf(Some(lc(0.5, 0.0)), &[lc(0.9, 0.0)], &policy).unwrap_err();
        assert_eq!(err, Error::Truncation { max_terms: 10 });
    }

    #[test]
    fn theta_vanishes_on_its_lattice() {
        let policy = TruncationPolicy::default();
        let p = lc(0.3, 0.0);
        assert_eq!(theta(LogComplex::ONE, p, &policy).unwrap().norm(), 0.0);
        assert_eq!(theta(p, p, &policy).unwrap().norm(), 0.0);
    }

    #[test]
    fn theta_shift_with_zero_step_is_exact_in_second_identity() {
        let policy = TruncationPolicy::default();
        let z = lc(0.7, 0.4);
        let a = lc(0.2, 0.0);
        let base = theta(z, a, &policy).unwrap();
        let shifted = theta(a.powf(0.0) * z, a, &policy).unwrap();
        assert_eq!(base, shifted);
        assert!(theta_shift_residual(z, a, 0, &policy).unwrap() < 1e-13);
    }

    #[test]
    fn log_complex_power_rule_keeps_branch() {
        // z = -1 as log i*pi: z^{1/2} = i, not the principal root of the value
        let z = LogComplex::new(Complex64::new(0.0, PI));
        let half = z.pow_value(0.5);
        assert!((half - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let z3 = LogComplex::new(Complex64::new(0.0, 3.0 * PI));
        assert!((z3.pow_value(0.5) - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn from_value_rejects_zero() {
        assert!(LogComplex::from_value(Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn policy_validation() {
        assert!(TruncationPolicy {
            abs_floor: 0.0,
            max_terms: 5
        }
        .validate()
        .is_err());
        assert!(TruncationPolicy {
            abs_floor: 1.0,
            max_terms: 5
        }
        .validate()
        .is_err());
        assert!(TruncationPolicy {
            abs_floor: 1e-10,
            max_terms: 0
        }
        .validate()
        .is_err());
    }
}
