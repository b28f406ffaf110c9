//! Dense complex operators on `(C^N)^{⊗k}`.
//!
//! Slot 1 is the leftmost, most significant tensor factor: the basis vector
//! `e_{i_1} ⊗ ... ⊗ e_{i_k}` (0-based digits) sits at composite index
//! `sum_j i_j N^{k-j}`.

use std::io::{self, Write};
use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, Schur, SVD};
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm;

const SOLVER_EPS: f64 = 1e-15;
const SOLVER_MAX_ITER: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct TensorOperator {
    local_dim: usize,
    arity: usize,
    mat: DMatrix<Complex64>,
}

/// Spectral data of an operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<Complex64>,
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Orthonormal basis of the numerical kernel.
    pub kernel_basis: Vec<Vec<Complex64>>,
    pub sv_threshold: f64,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl TensorOperator {
    pub fn new(local_dim: usize, arity: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        if local_dim == 0 {
            return Err(Error::Dimension("local dimension must be positive".into()));
        }
        let dim = checked_pow(local_dim, arity)?;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(Error::Dimension(format!(
                "expected a {dim}x{dim} matrix for N={local_dim}, k={arity}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(TensorOperator { local_dim, arity, mat })
    }

    pub fn identity(local_dim: usize, arity: usize) -> Self {
        let dim = local_dim.pow(arity as u32);
        TensorOperator {
            local_dim,
            arity,
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(local_dim: usize, arity: usize) -> Self {
        let dim = local_dim.pow(arity as u32);
        TensorOperator {
            local_dim,
            arity,
            mat: DMatrix::zeros(dim, dim),
        }
    }

    pub fn from_fn(local_dim: usize, arity: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let dim = local_dim.pow(arity as u32);
        TensorOperator {
            local_dim,
            arity,
            mat: DMatrix::from_fn(dim, dim, f),
        }
    }

    /// Diagonal single-slot operator.
    pub fn diagonal(entries: &[Complex64]) -> Self {
        let n = entries.len();
        Self::from_fn(n, 1, |i, j| if i == j { entries[i] } else { zero() })
    }

    pub fn local_dim(&self) -> usize {
        self.local_dim
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.mat[(row, col)]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.mat[(row, col)] = value;
    }

    /// Composite index of 0-based slot digits.
    pub fn index_of(&self, digits: &[usize]) -> usize {
        compose_index(self.local_dim, digits)
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity,
            mat: &self.mat * factor,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.mat.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        self.mat.trace()
    }

    pub fn transpose(&self) -> Self {
        TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity,
            mat: self.mat.transpose(),
        }
    }

    pub fn adjoint(&self) -> Self {
        TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity,
            mat: self.mat.adjoint(),
        }
    }

    fn check_same_space(&self, other: &TensorOperator) -> Result<()> {
        if self.local_dim != other.local_dim || self.arity != other.arity {
            return Err(Error::Dimension(format!(
                "operators on (C^{})^{} and (C^{})^{} do not compose",
                self.local_dim, self.arity, other.local_dim, other.arity
            )));
        }
        Ok(())
    }

    pub fn try_mul(&self, rhs: &TensorOperator) -> Result<TensorOperator> {
        self.check_same_space(rhs)?;
        Ok(TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity,
            mat: &self.mat * &rhs.mat,
        })
    }

    /// Tensor product; the slots of `rhs` follow those of `self`.
    pub fn kron(&self, rhs: &TensorOperator) -> Result<TensorOperator> {
        if self.local_dim != rhs.local_dim {
            return Err(Error::Dimension("tensor factors differ in local dimension".into()));
        }
        Ok(TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity + rhs.arity,
            mat: self.mat.kronecker(&rhs.mat),
        })
    }

    /// Condition number `sigma_max / sigma_min` (infinite when singular).
    pub fn condition_number(&self) -> Result<f64> {
        let svd = SVD::try_new(self.mat.clone(), false, false, SOLVER_EPS, SOLVER_MAX_ITER)
            .ok_or_else(|| Error::Convergence("singular value decomposition".into()))?;
        let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        Ok(if min == 0.0 { f64::INFINITY } else { max / min })
    }

    /// Inverse, refused when the condition number exceeds `max_condition`.
    pub fn inverse(&self, max_condition: f64) -> Result<TensorOperator> {
        let condition = self.condition_number()?;
        if condition.is_nan() || condition > max_condition {
            return Err(Error::Singular { condition });
        }
        let inv = self.mat.clone().try_inverse().ok_or(Error::Singular { condition })?;
        Ok(TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity,
            mat: inv,
        })
    }

    /// The `(i, j)` block with respect to slot 1, as an operator on the remaining slots.
    pub fn slot1_block(&self, i: usize, j: usize) -> Result<TensorOperator> {
        let n = self.local_dim;
        if self.arity == 0 || i >= n || j >= n {
            return Err(Error::Dimension(format!("block ({i}, {j}) out of range")));
        }
        let sub = self.dim() / n;
        let mat = self.mat.view((i * sub, j * sub), (sub, sub)).into_owned();
        TensorOperator::new(n, self.arity - 1, mat)
    }

    /// Acts as `op` on `slots` (1-based, in op's slot order) and as identity elsewhere.
    pub fn embed(op: &TensorOperator, slots: &[usize], arity: usize) -> Result<TensorOperator> {
        validate_slots(slots, arity)?;
        if slots.len() != op.arity {
            return Err(Error::Dimension(format!(
                "operator of arity {} cannot occupy {} slots",
                op.arity,
                slots.len()
            )));
        }
        let n = op.local_dim;
        let dim = checked_pow(n, arity)?;
        let local = op.dim();
        let mut out = DMatrix::zeros(dim, dim);
        let mut digits = vec![0usize; arity];
        for row in 0..dim {
            decompose_index(n, row, &mut digits);
            let local_row = local_index(n, &digits, slots);
            let mut col_digits = digits.clone();
            for local_col in 0..local {
                let v = op.mat[(local_row, local_col)];
                if v == zero() {
                    continue;
                }
                scatter_local(n, local_col, slots, &mut col_digits);
                out[(row, compose_index(n, &col_digits))] = v;
            }
        }
        Ok(TensorOperator {
            local_dim: n,
            arity,
            mat: out,
        })
    }

    /// `embed(op, slots, k) * self`, without forming the embedded operator.
    pub fn apply_on_slots(&self, op: &TensorOperator, slots: &[usize]) -> Result<TensorOperator> {
        validate_slots(slots, self.arity)?;
        if slots.len() != op.arity || op.local_dim != self.local_dim {
            return Err(Error::Dimension("local operator does not fit the chosen slots".into()));
        }
        let n = self.local_dim;
        let dim = self.dim();
        let local = op.dim();
        let mut terms: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(dim);
        let mut digits = vec![0usize; self.arity];
        for row in 0..dim {
            decompose_index(n, row, &mut digits);
            let local_row = local_index(n, &digits, slots);
            let mut col_digits = digits.clone();
            let mut row_terms = Vec::with_capacity(local);
            for local_col in 0..local {
                let v = op.mat[(local_row, local_col)];
                if v != zero() {
                    scatter_local(n, local_col, slots, &mut col_digits);
                    row_terms.push((compose_index(n, &col_digits), v));
                }
            }
            terms.push(row_terms);
        }
        let mut out = DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let src = self.mat.column(col);
            let mut dst = out.column_mut(col);
            for (row, row_terms) in terms.iter().enumerate() {
                let mut acc = zero();
                for &(k, v) in row_terms {
                    acc += v * src[k];
                }
                dst[row] = acc;
            }
        }
        Ok(TensorOperator {
            local_dim: n,
            arity: self.arity,
            mat: out,
        })
    }

    /// Transposes the indices of one slot (1-based).
    pub fn partial_transpose(&self, slot: usize) -> Result<TensorOperator> {
        validate_slots(&[slot], self.arity)?;
        let n = self.local_dim;
        let dim = self.dim();
        let mut rd = vec![0usize; self.arity];
        let mut cd = vec![0usize; self.arity];
        let mut out = DMatrix::zeros(dim, dim);
        for row in 0..dim {
            decompose_index(n, row, &mut rd);
            for col in 0..dim {
                decompose_index(n, col, &mut cd);
                let s = slot - 1;
                let (a, b) = (rd[s], cd[s]);
                rd[s] = b;
                cd[s] = a;
                out[(row, col)] = self.mat[(compose_index(n, &rd), compose_index(n, &cd))];
                rd[s] = a;
                cd[s] = b;
            }
        }
        Ok(TensorOperator {
            local_dim: n,
            arity: self.arity,
            mat: out,
        })
    }

    /// Contracts the given slots (1-based); the result acts on the others in order.
    pub fn partial_trace(&self, slots: &[usize]) -> Result<TensorOperator> {
        if slots.is_empty() {
            return Err(Error::Dimension("partial trace needs at least one slot".into()));
        }
        validate_slots(slots, self.arity)?;
        let n = self.local_dim;
        let kept: Vec<usize> = (1..=self.arity).filter(|s| !slots.contains(s)).collect();
        let traced_dim = n.pow(slots.len() as u32);
        let kept_dim = n.pow(kept.len() as u32);
        let mut digits = vec![0usize; self.arity];
        let mut out = DMatrix::zeros(kept_dim, kept_dim);
        for r in 0..kept_dim {
            for c in 0..kept_dim {
                let mut acc = zero();
                for t in 0..traced_dim {
                    scatter_local(n, t, slots, &mut digits);
                    scatter_local(n, r, &kept, &mut digits);
                    let row = compose_index(n, &digits);
                    scatter_local(n, c, &kept, &mut digits);
                    let col = compose_index(n, &digits);
                    acc += self.mat[(row, col)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(TensorOperator {
            local_dim: n,
            arity: kept.len(),
            mat: out,
        })
    }

    /// Eigenvalues (as a multiset, in Schur order).
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let schur = Schur::try_new(self.mat.clone(), SOLVER_EPS, SOLVER_MAX_ITER)
            .ok_or_else(|| Error::Convergence("complex Schur decomposition".into()))?;
        let (_, t) = schur.unpack();
        Ok((0..t.nrows()).map(|i| t[(i, i)]).collect())
    }

    /// Spectral data; singular values below `sv_threshold * sigma_max` count as zero.
    pub fn spectral(&self, sv_threshold: f64) -> Result<SpectralReport> {
        if self.mat.iter().any(|z| !z.is_finite()) {
            return Err(Error::Domain("operator has non-finite entries".into()));
        }
        let svd = SVD::try_new(self.mat.clone(), false, true, SOLVER_EPS, SOLVER_MAX_ITER)
            .ok_or_else(|| Error::Convergence("singular value decomposition".into()))?;
        let v_t = svd
            .v_t
            .as_ref()
            .ok_or_else(|| Error::Convergence("missing right singular vectors".into()))?;
        let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let cutoff = sv_threshold * sigma_max;
        let mut rank = 0;
        let mut kernel_basis = Vec::new();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s > cutoff {
                rank += 1;
            } else {
                kernel_basis.push(v_t.row(i).iter().map(|z| z.conj()).collect());
            }
        }
        let mut singular_values: Vec<f64> = svd.singular_values.iter().cloned().collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        Ok(SpectralReport {
            eigenvalues: self.eigenvalues()?,
            singular_values,
            rank,
            kernel_basis,
            sv_threshold,
        })
    }

    /// Applies the operator to a vector.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.dim() {
            return Err(Error::Dimension("vector length does not match".into()));
        }
        Ok((0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.mat[(r, c)] * v[c]).sum())
            .collect())
    }

    /// Matrix dump: `#`-prefixed header lines, then `i, j, re, im` rows with
    /// 1-based composite indices and 17 significant digits.
    pub fn write_dump<W: Write>(&self, out: &mut W, header: &[(String, String)]) -> io::Result<()> {
        for (key, value) in header {
            writeln!(out, "# {key}: {value}")?;
        }
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                let z = self.mat[(i, j)];
                writeln!(out, "{}, {}, {:.16e}, {:.16e}", i + 1, j + 1, z.re, z.im)?;
            }
        }
        Ok(())
    }
}

/// Serialized as `{local_dim, arity, entries}` with `entries[i][j] = [re, im]`.
impl Serialize for TensorOperator {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: Vec<Vec<[f64; 2]>> = (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .map(|j| [self.mat[(i, j)].re, self.mat[(i, j)].im])
                    .collect()
            })
            .collect();
        let mut s = serializer.serialize_struct("TensorOperator", 3)?;
        s.serialize_field("local_dim", &self.local_dim)?;
        s.serialize_field("arity", &self.arity)?;
        s.serialize_field("entries", &entries)?;
        s.end()
    }
}

impl Mul for &TensorOperator {
    type Output = TensorOperator;

    fn mul(self, rhs: &TensorOperator) -> TensorOperator {
        self.try_mul(rhs).expect("operator product on mismatched spaces")
    }
}

impl Add for &TensorOperator {
    type Output = TensorOperator;

    fn add(self, rhs: &TensorOperator) -> TensorOperator {
        self.check_same_space(rhs).expect("operator sum on mismatched spaces");
        TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity,
            mat: &self.mat + &rhs.mat,
        }
    }
}

impl Sub for &TensorOperator {
    type Output = TensorOperator;

    fn sub(self, rhs: &TensorOperator) -> TensorOperator {
        self.check_same_space(rhs)
            .expect("operator difference on mismatched spaces");
        TensorOperator {
            local_dim: self.local_dim,
            arity: self.arity,
            mat: &self.mat - &rhs.mat,
        }
    }
}

/// Permutation operator on `(C^N)^{⊗k}`: the factor in slot `j` moves to slot `sigma[j]`
/// (1-based images). Composition follows `P(sigma ∘ tau) = P(sigma) P(tau)`.
pub fn permutation_op(sigma: &[usize], local_dim: usize) -> Result<TensorOperator> {
    let zero_based: Vec<usize> = sigma.iter().map(|&s| s.wrapping_sub(1)).collect();
    if !perm::is_permutation(&zero_based) {
        return Err(Error::Dimension(format!("{sigma:?} is not a permutation")));
    }
    Ok(permutation_op_zero_based(&zero_based, local_dim))
}

fn permutation_op_zero_based(sigma: &[usize], n: usize) -> TensorOperator {
    let k = sigma.len();
    let mut out = TensorOperator::zeros(n, k);
    let mut digits = vec![0usize; k];
    let mut moved = vec![0usize; k];
    for src in 0..out.dim() {
        decompose_index(n, src, &mut digits);
        for j in 0..k {
            moved[sigma[j]] = digits[j];
        }
        out.mat[(compose_index(n, &moved), src)] = one();
    }
    out
}

/// Projector `(1/k!) sum_sigma sgn(sigma) P_sigma` onto the antisymmetric part of `(C^N)^{⊗k}`.
pub fn antisymmetrizer(local_dim: usize, k: usize) -> Result<TensorOperator> {
    if k < 2 || k > local_dim {
        return Err(Error::Size(format!(
            "antisymmetrizer needs 2 <= k <= N, got k={k}, N={local_dim}"
        )));
    }
    let n = local_dim;
    let perms = perm::lexicographic(k);
    let weight = 1.0 / perms.len() as f64;
    let mut out = TensorOperator::zeros(n, k);
    let mut digits = vec![0usize; k];
    let mut moved = vec![0usize; k];
    for sigma in &perms {
        let s = perm::sign(sigma) as f64 * weight;
        for src in 0..out.dim() {
            decompose_index(n, src, &mut digits);
            for j in 0..k {
                moved[sigma[j]] = digits[j];
            }
            out.mat[(compose_index(n, &moved), src)] += Complex64::new(s, 0.0);
        }
    }
    Ok(out)
}

/// `sum_sigma sgn(sigma) e_{sigma(1)} ⊗ ... ⊗ e_{sigma(N)}`.
pub fn antisymmetric_vector(local_dim: usize) -> Vec<Complex64> {
    let n = local_dim;
    let mut w = vec![zero(); n.pow(n as u32)];
    for sigma in perm::lexicographic(n) {
        w[compose_index(n, &sigma)] += Complex64::new(perm::sign(&sigma) as f64, 0.0);
    }
    w
}

fn checked_pow(n: usize, k: usize) -> Result<usize> {
    n.checked_pow(k as u32)
        .ok_or_else(|| Error::Size(format!("{n}^{k} overflows")))
}

fn validate_slots(slots: &[usize], arity: usize) -> Result<()> {
    for (i, &s) in slots.iter().enumerate() {
        if s == 0 || s > arity {
            return Err(Error::Dimension(format!("slot {s} outside 1..={arity}")));
        }
        if slots[..i].contains(&s) {
            return Err(Error::Dimension(format!("slot {s} repeated")));
        }
    }
    Ok(())
}

pub(crate) fn compose_index(n: usize, digits: &[usize]) -> usize {
    digits.iter().fold(0, |acc, &d| acc * n + d)
}

pub(crate) fn decompose_index(n: usize, mut index: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = index % n;
        index /= n;
    }
}

fn local_index(n: usize, digits: &[usize], slots: &[usize]) -> usize {
    slots.iter().fold(0, |acc, &s| acc * n + digits[s - 1])
}

fn scatter_local(n: usize, mut local: usize, slots: &[usize], digits: &mut [usize]) {
    for &s in slots.iter().rev() {
        digits[s - 1] = local % n;
        local /= n;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn basis(n: usize, digits: &[usize]) -> Vec<Complex64> {
        let mut v = vec![zero(); n.pow(digits.len() as u32)];
        v[compose_index(n, digits)] = one();
        v
    }

    fn pseudo_random(n: usize, k: usize, seed: u64) -> TensorOperator {
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        TensorOperator::from_fn(n, k, |_, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let a = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let b = (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
            Complex64::new(a, b)
        })
    }

    #[test]
    fn identity_embedding() {
        let x = pseudo_random(3, 2, 1);
        assert_eq!(TensorOperator::embed(&x, &[1, 2], 2).unwrap(), x);
    }

    #[test]
    fn embedded_swap_acts_on_outer_slots() {
        let p = permutation_op(&[2, 1], 3).unwrap();
        let p13 = TensorOperator::embed(&p, &[1, 3], 3).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                for cc in 0..3 {
                    let out = p13.apply(&basis(3, &[a, b, cc])).unwrap();
                    assert_eq!(out, basis(3, &[cc, b, a]));
                }
            }
        }
    }

    #[test]
    fn swap_matrix_rows() {
        let p = permutation_op(&[2, 1], 2).unwrap();
        let id = TensorOperator::identity(2, 2);
        for (row, src) in [0usize, 2, 1, 3].iter().enumerate() {
            for col in 0..4 {
                assert_eq!(p.get(row, col), id.get(*src, col));
            }
        }
    }

    #[test]
    fn embed_rejects_bad_slots() {
        let x = pseudo_random(2, 2, 3);
        assert!(TensorOperator::embed(&x, &[1, 1], 3).is_err());
        assert!(TensorOperator::embed(&x, &[1, 4], 3).is_err());
        assert!(TensorOperator::embed(&x, &[1], 3).is_err());
    }

    #[test]
    fn apply_on_slots_matches_embed_then_multiply() {
        let x = pseudo_random(2, 2, 5);
        let y = pseudo_random(2, 3, 7);
        let direct = &TensorOperator::embed(&x, &[3, 1], 3).unwrap() * &y;
        let fast = y.apply_on_slots(&x, &[3, 1]).unwrap();
        assert!((&direct - &fast).frobenius_norm() < 1e-14);
    }

    #[test]
    fn antisymmetrizer_two_sites() {
        let a = antisymmetrizer(2, 2).unwrap();
        let h = 0.5;
        let expected = [
            [0.0, 0.0, 0.0, 0.0],
            [0.0, h, -h, 0.0],
            [0.0, -h, h, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ];
        for (i, row) in expected.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                assert!((a.get(i, j) - c(x)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn antisymmetrizer_rejects_k_above_n() {
        assert!(matches!(antisymmetrizer(2, 3), Err(Error::Size(_))));
        assert!(matches!(antisymmetrizer(3, 1), Err(Error::Size(_))));
    }

    #[test]
    fn full_antisymmetrizer_is_rank_one_projector() {
        for n in 2..=4 {
            let a = antisymmetrizer(n, n).unwrap();
            assert!((&(&a * &a) - &a).frobenius_norm() < 1e-13);
            assert!((a.trace() - one()).norm() < 1e-13);
            let full = a.partial_trace(&(1..=n).collect::<Vec<_>>()).unwrap();
            assert_eq!(full.arity(), 0);
            assert!((full.get(0, 0) - one()).norm() < 1e-13);
        }
    }

    #[test]
    fn antisymmetrizer_fixes_signed_sum() {
        let a = antisymmetrizer(3, 3).unwrap();
        let w = antisymmetric_vector(3);
        let aw = a.apply(&w).unwrap();
        for (x, y) in aw.iter().zip(&w) {
            assert!((x - y).norm() < 1e-14);
        }
    }

    #[test]
    fn projection_onto_signed_sum_uses_factorial_norm() {
        // A v = <w, v> / N! * w
        let n = 3;
        let a = antisymmetrizer(n, n).unwrap();
        let w = antisymmetric_vector(n);
        let v: Vec<Complex64> = (0..27)
            .map(|i| Complex64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.03))
            .collect();
        let overlap: Complex64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        let av = a.apply(&v).unwrap();
        for (x, wi) in av.iter().zip(&w) {
            assert!((x - overlap / 6.0 * wi).norm() < 1e-14);
        }
    }

    #[test]
    fn partial_transpose_is_involutive_and_composes_to_transpose() {
        let x = pseudo_random(3, 2, 11);
        let once = x.partial_transpose(2).unwrap();
        assert_eq!(once.partial_transpose(2).unwrap(), x);
        let both = once.partial_transpose(1).unwrap();
        assert_eq!(both, x.transpose());
        assert!(x.partial_transpose(3).is_err());
    }

    #[test]
    fn partial_trace_of_identity_and_products() {
        let id = TensorOperator::identity(3, 2);
        let t = id.partial_trace(&[2]).unwrap();
        assert_eq!(t, TensorOperator::identity(3, 1).scale(c(3.0)));

        let x = pseudo_random(2, 1, 2);
        let y = pseudo_random(2, 2, 4);
        let xy = x.kron(&y).unwrap();
        let traced = xy.partial_trace(&[1]).unwrap();
        assert!((&traced - &y.scale(x.trace())).frobenius_norm() < 1e-14);
        assert!(id.partial_trace(&[]).is_err());
        assert!(id.partial_trace(&[2, 2]).is_err());
    }

    #[test]
    fn spectral_of_identity_and_antisymmetrizer() {
        let rep = TensorOperator::identity(3, 2).spectral(1e-8).unwrap();
        assert_eq!(rep.rank, 9);
        assert!(rep.kernel_basis.is_empty());
        assert!(rep.eigenvalues.iter().all(|e| (e - one()).norm() < 1e-14));

        for n in 2..=4 {
            let rep = antisymmetrizer(n, 2).unwrap().spectral(1e-8).unwrap();
            assert_eq!(rep.rank, n * (n - 1) / 2);
            assert_eq!(rep.rank + rep.kernel_basis.len(), n * n);
        }
    }

    #[test]
    fn inverse_refuses_singular() {
        let a = antisymmetrizer(2, 2).unwrap();
        assert!(matches!(a.inverse(1e12), Err(Error::Singular { .. })));
        let x = TensorOperator::identity(2, 1).scale(c(2.0));
        let inv = x.inverse(1e12).unwrap();
        assert!((inv.get(0, 0) - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn slot1_block_extracts_operator_on_second_slot() {
        let x = pseudo_random(2, 1, 8);
        let y = pseudo_random(2, 1, 9);
        let xy = x.kron(&y).unwrap();
        let b = xy.slot1_block(1, 0).unwrap();
        assert!((&b - &y.scale(x.get(1, 0))).frobenius_norm() < 1e-15);
    }

    #[test]
    fn dump_format() {
        let x = TensorOperator::identity(2, 1);
        let mut buf = Vec::new();
        x.write_dump(&mut buf, &[("kind".into(), "identity".into())]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# kind: identity");
        assert_eq!(lines[1], "1, 1, 1.0000000000000000e0, 0.0000000000000000e0");
        assert_eq!(lines.len(), 5);
    }
}
