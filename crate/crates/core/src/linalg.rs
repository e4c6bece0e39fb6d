//! Exact dense linear algebra over a coefficient field.

use crate::error::{Error, Result};
use crate::scalars::Coefficient;

pub type Matrix<F> = Vec<Vec<F>>;

fn check_square<F>(m: &Matrix<F>) -> Result<usize> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return Err(Error::Invalid("matrix is not square".into()));
    }
    Ok(n)
}

/// Fraction-free (Bareiss) determinant. Pivot search takes the first
/// nonzero entry in the column, scanning rows downward.
pub fn determinant<F: Coefficient>(m: &Matrix<F>) -> Result<F> {
    let n = check_square(m)?;
    if n == 0 {
        return Ok(F::one());
    }
    let mut a = m.clone();
    let mut sign = F::one();
    let mut prev = F::one();
    for k in 0..n - 1 {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Ok(F::zero());
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = num.checked_div(&prev)?;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(sign * a[n - 1][n - 1].clone())
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref<F: Coefficient>(a: &mut Matrix<F>) -> Result<Vec<usize>> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        let inv = a[r][c].inv()?;
        for x in a[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                let pivot_row = a[r].clone();
                for (x, t) in a[i].iter_mut().zip(pivot_row).take(cols) {
                    if !t.is_zero() {
                        *x = x.clone() - f.clone() * t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    Ok(pivots)
}

pub fn rank<F: Coefficient>(m: &Matrix<F>) -> Result<usize> {
    let mut a = m.clone();
    Ok(rref(&mut a)?.len())
}

/// Basis of the right kernel `{x : m x = 0}`, one vector per free column,
/// with a 1 in that column. `cols` is needed when `m` has no rows.
pub fn nullspace<F: Coefficient>(m: &Matrix<F>, cols: usize) -> Result<Vec<Vec<F>>> {
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::Invalid("ragged matrix".into()));
    }
    let mut a = m.clone();
    let pivots = rref(&mut a)?;
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); cols];
        v[free] = F::one();
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free].clone();
        }
        out.push(v);
    }
    Ok(out)
}

pub fn mat_vec<F: Coefficient>(m: &Matrix<F>, v: &[F]) -> Vec<F> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(F::zero(), |acc, (a, b)| acc + a.clone() * b.clone()))
        .collect()
}
