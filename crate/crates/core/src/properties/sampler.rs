use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rmatrix::{pole_margin, ModelParams, RKind};
use crate::special::LogComplex;

/// Attempts made before a pole or non-generic draw is reported as an error.
pub const MAX_RESAMPLES: usize = 64;

/// Seeded source of random generic parameters and spectral arguments.
///
/// Phases are uniform; moduli are uniform on the annulus documented at each draw.
#[derive(Clone, Debug)]
pub struct Sampler {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Modulus uniform in `[lo, hi]`, phase uniform.
    pub fn annulus(&mut self, lo: f64, hi: f64) -> LogComplex {
        let r: f64 = self.rng.random_range(lo..=hi);
        let phase: f64 = self.rng.random_range(-PI..PI);
        LogComplex::from_parts(r.ln(), phase)
    }

    /// Uniform integer in `lo..=hi`.
    pub fn integer(&mut self, lo: i32, hi: i32) -> i32 {
        self.rng.random_range(lo..=hi)
    }

    /// `|q|` in [0.3, 0.8].
    pub fn q(&mut self) -> LogComplex {
        self.annulus(0.3, 0.8)
    }

    /// `|p|` in [0.05, 0.5].
    pub fn p(&mut self) -> LogComplex {
        self.annulus(0.05, 0.5)
    }

    /// `|z|` in [0.5, 2].
    pub fn z(&mut self) -> LogComplex {
        self.annulus(0.5, 2.0)
    }

    /// Random `(q, p)` passing the genericity guard.
    pub fn params(&mut self, n: usize) -> Result<ModelParams> {
        for _ in 0..MAX_RESAMPLES {
            let (q, p) = (self.q(), self.p());
            let params = ModelParams::new(n, q, p)?;
            if params.genericity_warnings().is_empty() {
                return Ok(params);
            }
        }
        Err(Error::Convergence("no generic parameters found".into()))
    }

    /// Random `z` whose denominators stay clear of zero for every listed kind.
    pub fn generic_z(&mut self, params: &ModelParams, kinds: &[RKind]) -> Result<LogComplex> {
        let mut worst = (0.0, LogComplex::ONE);
        for _ in 0..MAX_RESAMPLES {
            let z = self.z();
            let mut margin = f64::INFINITY;
            for &kind in kinds {
                margin = margin.min(pole_margin(params, kind, z)?);
            }
            if margin > params.genericity_margin {
                return Ok(z);
            }
            if margin >= worst.0 {
                worst = (margin, z);
            }
        }
        Err(Error::Pole {
            what: "sampling".into(),
            log_arg: worst.1.log(),
            margin: worst.0,
        })
    }
}

/// Runs `f` until it succeeds without hitting a pole, drawing fresh points each time.
pub fn resample<T>(sampler: &mut Sampler, mut f: impl FnMut(&mut Sampler) -> Result<T>) -> Result<T> {
    let mut last = None;
    for _ in 0..MAX_RESAMPLES {
        match f(sampler) {
            Err(e) if e.is_pole() => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_draws() {
        let mut a = Sampler::new(11);
        let mut b = Sampler::new(11);
        for _ in 0..5 {
            assert_eq!(a.z(), b.z());
        }
        assert_eq!(a.params(3).unwrap(), b.params(3).unwrap());
    }

    #[test]
    fn draws_stay_in_annuli() {
        let mut s = Sampler::new(3);
        for _ in 0..100 {
            let z = s.z().modulus();
            assert!((0.5..=2.0 + 1e-12).contains(&z));
            let p = s.params(2).unwrap();
            assert!(p.log_q.modulus() <= 0.8 + 1e-12 && p.log_q.modulus() >= 0.3 - 1e-12);
            assert!(p.log_p.modulus() <= 0.5 + 1e-12 && p.log_p.modulus() >= 0.05 - 1e-12);
        }
    }

    #[test]
    fn resample_gives_up_on_persistent_poles() {
        let mut s = Sampler::new(1);
        let mut calls = 0;
        let out: Result<()> = resample(&mut s, |_| {
            calls += 1;
            Err(Error::Pole {
                what: "test".into(),
                log_arg: Default::default(),
                margin: 0.0,
            })
        });
        assert!(out.unwrap_err().is_pole());
        assert_eq!(calls, MAX_RESAMPLES);
    }
}
