//! Small exact linear-algebra helpers used by the polytope kernel.

// Elimination kernels index across rows; iterator forms obscure the pivots.
#![allow(clippy::needless_range_loop)]

use crate::rational::{Int, Ratio};
use num_integer::Integer;
use num_traits::{One, Zero};

/// Determinant by fraction-free-ish Gaussian elimination (exact rationals).
pub(crate) fn det(mat: &[Vec<Ratio>]) -> Ratio {
    let n = mat.len();
    let mut m: Vec<Vec<Ratio>> = mat.to_vec();
    let mut sign = Ratio::one();
    let mut result = Ratio::one();
    for col in 0..n {
        let Some(pivot_row) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Ratio::zero();
        };
        if pivot_row != col {
            m.swap(pivot_row, col);
            sign = -sign;
        }
        let pivot = m[col][col].clone();
        result *= &pivot;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let factor = &m[r][col] / &pivot;
            for c in col..n {
                let delta = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &delta;
            }
        }
    }
    result * sign
}

/// Rank of a rational matrix.
pub(crate) fn rank(mat: &[Vec<Ratio>]) -> usize {
    if mat.is_empty() {
        return 0;
    }
    let rows = mat.len();
    let cols = mat[0].len();
    let mut m: Vec<Vec<Ratio>> = mat.to_vec();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(pivot) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, pivot);
        let pv = m[r][c].clone();
        for i in 0..rows {
            if i == r || m[i][c].is_zero() {
                continue;
            }
            let factor = &m[i][c] / &pv;
            for j in c..cols {
                let delta = &factor * &m[r][j];
                m[i][j] = &m[i][j] - &delta;
            }
        }
        r += 1;
    }
    r
}

/// Solves the square system `A x = b`; `None` when singular.
pub(crate) fn solve(a: &[Vec<Ratio>], b: &[Ratio]) -> Option<Vec<Ratio>> {
    let n = a.len();
    let mut m: Vec<Vec<Ratio>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot_row = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot_row, col);
        let pv = m[col][col].clone();
        for x in m[col].iter_mut() {
            *x = &*x / &pv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone();
            for c in col..=n {
                let delta = &factor * &m[col][c];
                m[r][c] = &m[r][c] - &delta;
            }
        }
    }
    Some(m.into_iter().map(|row| row[row.len() - 1].clone()).collect())
}

/// Generalized cross product: a vector orthogonal to `n-1` vectors in Q^n,
/// with cofactor-expansion components. Zero vector when input is degenerate.
pub(crate) fn generalized_cross(rows: &[Vec<Ratio>]) -> Vec<Ratio> {
    let n = rows.len() + 1;
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let minor: Vec<Vec<Ratio>> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != k)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let d = det(&minor);
        out.push(if k % 2 == 0 { d } else { -d });
    }
    out
}

/// Scales a rational normal vector to its primitive integer representative,
/// preserving direction. Zero stays zero.
pub(crate) fn primitive_integer(v: &[Ratio]) -> Vec<Int> {
    let mut lcm = Int::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let ints: Vec<Int> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let mut g = Int::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}
