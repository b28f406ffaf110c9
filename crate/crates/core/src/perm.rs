//! Permutations of `0..n` in lexicographic order and compensated sums over them.

use num_complex::Complex64;

/// All permutations of `0..n` in lexicographic order, as image vectors.
pub fn lexicographic(n: usize) -> Vec<Vec<usize>> {
    let mut current: Vec<usize> = (0..n).collect();
    let mut out = vec![current.clone()];
    while next_permutation(&mut current) {
        out.push(current.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Number of inversions, i.e. the Coxeter length.
pub fn length(sigma: &[usize]) -> usize {
    let mut count = 0;
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if sigma[i] > sigma[j] {
                count += 1;
            }
        }
    }
    count
}

pub fn sign(sigma: &[usize]) -> i32 {
    if length(sigma).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `true` when `sigma` is a permutation of `0..sigma.len()`.
pub fn is_permutation(sigma: &[usize]) -> bool {
    let mut seen = vec![false; sigma.len()];
    for &s in sigma {
        if s >= sigma.len() || seen[s] {
            return false;
        }
        seen[s] = true;
    }
    true
}

/// Neumaier-compensated complex accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    compensation: Complex64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        let re = neumaier(self.sum.re, self.compensation.re, x.re);
        let im = neumaier(self.sum.im, self.compensation.im, x.im);
        self.sum = Complex64::new(re.0, im.0);
        self.compensation = Complex64::new(re.1, im.1);
    }

    pub fn total(&self) -> Complex64 {
        self.sum + self.compensation
    }
}

fn neumaier(sum: f64, comp: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() {
        comp + ((sum - t) + x)
    } else {
        comp + ((x - t) + sum)
    };
    (t, c)
}
