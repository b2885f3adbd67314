//! Dense phase-one simplex for small feasibility problems `A x = b, x >= 0`.
//!
//! Generic over the scalar so the same pivoting runs in exact rationals and in
//! `f64`. Bland's rule guarantees termination on degenerate problems.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::Zero;

use crate::exact::Rational;

pub trait LpScalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    /// Treated as zero when choosing pivots.
    fn negligible(&self) -> bool;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn negligible(&self) -> bool {
        self.abs() < 1e-12
    }
}

impl LpScalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        Rational::from_integer(1)
    }

    fn negligible(&self) -> bool {
        self.is_zero()
    }
}

fn is_positive<T: LpScalar>(x: &T) -> bool {
    !x.negligible() && *x > T::zero()
}

#[derive(Debug, Clone)]
pub struct PhaseOne<T> {
    /// Minimal L1 residual `sum |A x - b|` reached.
    pub residual: T,
    /// A basic solution; at most `rows` nonzero entries.
    pub solution: Vec<T>,
}

/// Minimizes the sum of artificial variables for `A x = b, x >= 0`.
///
/// `a` is row-major with `rows` rows of equal length.
pub fn phase_one<T: LpScalar>(a: &[Vec<T>], b: &[T]) -> PhaseOne<T> {
    let rows = a.len();
    assert_eq!(rows, b.len());
    let cols = a.first().map_or(0, Vec::len);
    let width = cols + rows + 1;
    let rhs = width - 1;

    let mut tab: Vec<Vec<T>> = Vec::with_capacity(rows + 1);
    for (i, (row, bi)) in a.iter().zip(b).enumerate() {
        assert_eq!(row.len(), cols);
        let flip = *bi < T::zero();
        let mut t = vec![T::zero(); width];
        for (j, v) in row.iter().enumerate() {
            t[j] = if flip { -v.clone() } else { v.clone() };
        }
        t[cols + i] = T::one();
        t[rhs] = if flip { -bi.clone() } else { bi.clone() };
        tab.push(t);
    }
    // objective row: column sums over constraint rows (reduced gains of phase one)
    let mut obj = vec![T::zero(); width];
    for t in &tab {
        for j in 0..cols {
            obj[j] = obj[j].clone() + t[j].clone();
        }
        obj[rhs] = obj[rhs].clone() + t[rhs].clone();
    }
    tab.push(obj);

    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    loop {
        let entering = (0..cols).find(|&j| !basis.contains(&j) && is_positive(&tab[rows][j]));
        let Some(enter) = entering else { break };

        let mut leave: Option<usize> = None;
        for i in 0..rows {
            if !is_positive(&tab[i][enter]) {
                continue;
            }
            let ratio = tab[i][rhs].clone() / tab[i][enter].clone();
            leave = match leave {
                None => Some(i),
                Some(k) => {
                    let best = tab[k][rhs].clone() / tab[k][enter].clone();
                    if ratio < best || (!(best < ratio) && basis[i] < basis[k]) {
                        Some(i)
                    } else {
                        Some(k)
                    }
                }
            };
        }
        // Unbounded gain cannot happen in phase one: the objective is bounded by zero.
        let Some(pivot_row) = leave else { break };
        pivot(&mut tab, pivot_row, enter);
        basis[pivot_row] = enter;
    }

    let mut solution = vec![T::zero(); cols];
    for (i, &var) in basis.iter().enumerate() {
        if var < cols {
            let v = tab[i][rhs].clone();
            solution[var] = if v < T::zero() { T::zero() } else { v };
        }
    }
    let residual = tab[rows][rhs].clone();
    PhaseOne { residual, solution }
}

fn pivot<T: LpScalar>(tab: &mut [Vec<T>], r: usize, c: usize) {
    let p = tab[r][c].clone();
    for v in tab[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let pivot_row = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let factor = row[c].clone();
        if factor == T::zero() {
            continue;
        }
        for (v, pv) in row.iter_mut().zip(&pivot_row) {
            *v = v.clone() - factor.clone() * pv.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational;

    #[test]
    fn feasible_system_has_zero_residual() {
        // x + y = 1, x - y = 0
        let a = vec![vec![1.0, 1.0], vec![1.0, -1.0]];
        let out = phase_one(&a, &[1.0, 0.0]);
        assert!(out.residual.abs() < 1e-12);
        assert!((out.solution[0] - 0.5).abs() < 1e-12);
        assert!((out.solution[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn infeasible_system_has_positive_residual() {
        // x + y = 1, x + y = 2
        let a = vec![vec![rational(1, 1), rational(1, 1)], vec![rational(1, 1), rational(1, 1)]];
        let out = phase_one(&a, &[rational(1, 1), rational(2, 1)]);
        assert_eq!(out.residual, rational(1, 1));
    }

    #[test]
    fn negative_rhs_rows_are_flipped() {
        // -x = -3
        let out = phase_one(&[vec![rational(-1, 1)]], &[rational(-3, 1)]);
        assert_eq!(out.residual, rational(0, 1));
        assert_eq!(out.solution, vec![rational(3, 1)]);
    }
}
