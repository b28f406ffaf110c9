//! Values at removable singularities of the printed formulas.
//!
//! `R(1)` and `R-hat(q)` are `0 * inf` products entrywise. The matrix function
//! is analytic in `u = log z` near such a point, so its value there is the mean
//! over a small circle in `u` (trapezoidal rule, exponentially accurate).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::LogComplex;
use crate::tensor::TensorOperator;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitRule {
    /// Circle radius in the log variable.
    pub radius: f64,
    pub nodes: usize,
    /// Relative size of the first Laurent coefficient accepted as "no pole".
    pub residue_tolerance: f64,
}

impl Default for LimitRule {
    fn default() -> Self {
        LimitRule {
            radius: 1e-2,
            nodes: 32,
            residue_tolerance: 1e-6,
        }
    }
}

/// Value of `f` at `center`, assuming the singularity there is removable.
///
/// A genuine pole shows up as a nonzero mean of `f(u) (u - u0)` and is
/// reported as [`Error::Pole`].
pub fn removable_limit<F>(f: F, center: LogComplex, rule: &LimitRule) -> Result<TensorOperator>
where
    F: Fn(LogComplex) -> Result<TensorOperator>,
{
    if rule.nodes < 4 || rule.radius.is_nan() || rule.radius <= 0.0 {
        return Err(Error::Config(
            "limit rule needs at least 4 nodes and a positive radius".into(),
        ));
    }
    let mut mean: Option<TensorOperator> = None;
    let mut residue: Option<TensorOperator> = None;
    let mut scale = 0.0f64;
    for k in 0..rule.nodes {
        let offset = Complex64::from_polar(rule.radius, 2.0 * PI * (k as f64 + 0.5) / rule.nodes as f64);
        let value = f(LogComplex::new(center.log() + offset))?;
        scale = scale.max(value.frobenius_norm());
        let weighted = value.scale(offset);
        mean = Some(match mean {
            None => value,
            Some(acc) => &acc + &value,
        });
        residue = Some(match residue {
            None => weighted,
            Some(acc) => &acc + &weighted,
        });
    }
    let weight = Complex64::new(1.0 / rule.nodes as f64, 0.0);
    let mean = mean.expect("at least one node").scale(weight);
    let residue = residue.expect("at least one node").scale(weight);
    if residue.frobenius_norm() > rule.residue_tolerance * rule.radius * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Pole {
            what: "non-removable singularity".into(),
            log_arg: center.log(),
            margin: 0.0,
        });
    }
    Ok(mean)
}
