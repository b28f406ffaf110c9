use std::f64::consts::PI;

use elliptic_qdet::properties::{relative_residual, Sampler};
use elliptic_qdet::special::{theta_shift_residual, theta_square_base_residual};
use elliptic_qdet::tensor::antisymmetrizer;
use elliptic_qdet::{build_r, permutation_op, LogComplex, ModelParams, RKind, TensorOperator, TruncationPolicy};
use num_complex::Complex64;
use proptest::prelude::*;

fn log_polar(r: f64, phase: f64) -> LogComplex {
    LogComplex::from_parts(r.ln(), phase)
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a ∘ b)(i) = a(b(i)), 1-based.
    b.iter().map(|&i| a[i - 1]).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn theta_quasi_periodicity(
        zr in 0.5f64..2.0, zp in -PI..PI,
        ar in 0.05f64..0.6, ap in -PI..PI,
        n in -3i32..=3,
    ) {
        let policy = TruncationPolicy::default();
        let (z, a) = (log_polar(zr, zp), log_polar(ar, ap));
        prop_assert!(theta_shift_residual(z, a, n, &policy).unwrap() < 1e-12);
        prop_assert!(theta_square_base_residual(z, a, &policy).unwrap() < 1e-12);
    }

    #[test]
    fn log_powers_compose(lr in -3.0f64..3.0, li in -10.0f64..10.0, a in -2.5f64..2.5, b in -2.5f64..2.5) {
        let z = LogComplex::from_parts(lr, li);
        let lhs = z.powf(a).powf(b).value();
        let rhs = z.pow_value(a * b);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        prop_assert!(((z * z.recip()).value() - 1.0).norm() < 1e-14);
    }

    #[test]
    fn permutation_operators_form_a_representation(seed in any::<u64>()) {
        let mut s = Sampler::new(seed);
        let shuffle = |s: &mut Sampler| {
            let mut v: Vec<usize> = (1..=3).collect();
            for i in (1..3).rev() {
                let j = s.integer(0, i as i32) as usize;
                v.swap(i, j);
            }
            v
        };
        let (a, b) = (shuffle(&mut s), shuffle(&mut s));
        let pa = permutation_op(&a, 2).unwrap();
        let pb = permutation_op(&b, 2).unwrap();
        let pab = permutation_op(&compose(&a, &b), 2).unwrap();
        prop_assert!(relative_residual(&(&pa * &pb), &pab) < 1e-15);
    }

    #[test]
    fn homogeneous_ybe_at_random_points(
        qr in 0.3f64..0.8, qp in -PI..PI,
        z1 in 0.5f64..2.0, p1 in -PI..PI,
        z2 in 0.5f64..2.0, p2 in -PI..PI,
    ) {
        let params = ModelParams::new(3, log_polar(qr, qp), log_polar(0.2, 0.0)).unwrap();
        let (u, v) = (log_polar(z1, p1), log_polar(z2, p2));
        let r = |x: LogComplex| build_r(&params, RKind::Homogeneous, x);
        let (Ok(r12), Ok(r13), Ok(r23)) = (r(u / v), r(u), r(v)) else {
            return Ok(());
        };
        let e = |op: &TensorOperator, slots: [usize; 2]| TensorOperator::embed(op, &slots, 3).unwrap();
        let lhs = &(&e(&r12, [1, 2]) * &e(&r13, [1, 3])) * &e(&r23, [2, 3]);
        let rhs = &(&e(&r23, [2, 3]) * &e(&r13, [1, 3])) * &e(&r12, [1, 2]);
        prop_assert!(relative_residual(&lhs, &rhs) < 1e-10);
    }
}

#[test]
fn antisymmetrizer_is_a_projector_of_rank_binomial() {
    for n in 2..=4 {
        for k in 2..=n {
            let a = antisymmetrizer(n, k).unwrap();
            assert!(relative_residual(&(&a * &a), &a) < 1e-14);
            let binom = (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1));
            assert!((a.trace() - Complex64::new(binom as f64, 0.0)).norm() < 1e-12);
        }
    }
}

#[test]
fn embedding_in_first_slot_is_kronecker_with_identity() {
    let op = TensorOperator::from_fn(3, 1, |i, j| Complex64::new(i as f64 + 1.0, j as f64 - 0.5));
    let via_embed = TensorOperator::embed(&op, &[1], 2).unwrap();
    let via_kron = op.kron(&TensorOperator::identity(3, 1)).unwrap();
    assert!(relative_residual(&via_embed, &via_kron) < 1e-16);
}

#[test]
fn eightvertex_zero_pattern() {
    let params = ModelParams::from_values(2, Complex64::new(0.5, 0.2), Complex64::new(0.2, 0.05)).unwrap();
    let r = build_r(&params, RKind::EightVertex, LogComplex::from_parts(0.2, 0.7)).unwrap();
    let zeros = r.matrix().iter().filter(|x| x.norm() == 0.0).count();
    assert_eq!(zeros, 8);
    for (row, col) in [(0, 0), (0, 3), (1, 1), (1, 2), (2, 1), (2, 2), (3, 0), (3, 3)] {
        assert!(r.get(row, col).norm() > 0.0, "entry ({row}, {col}) vanished");
    }
}

#[test]
fn elliptic_entries_obey_the_selection_rule() {
    for n in [2usize, 3, 4] {
        let params = ModelParams::from_values(n, Complex64::new(0.55, 0.1), Complex64::new(0.15, -0.05)).unwrap();
        let r = build_r(&params, RKind::EllipticR, LogComplex::from_parts(-0.1, 0.4)).unwrap();
        for row in 0..n * n {
            for col in 0..n * n {
                let (a, c) = (row / n, row % n);
                let (b, d) = (col / n, col % n);
                let allowed = (a + c) % n == (b + d) % n;
                if !allowed {
                    assert_eq!(r.get(row, col).norm(), 0.0, "N={n} ({row}, {col})");
                }
            }
        }
    }
}
