//! Dense phase-I simplex with Bland's rule.
//!
//! Solves `min Σ a` over `A'x + a = b'`, `x, a ≥ 0`, where each row of
//! `(A | b)` is sign-flipped so that `b' ≥ 0`. A zero optimum gives a
//! feasible `x`; a positive optimum leaves the dual `w = c_Bᵀ B⁻¹` in the
//! reduced-cost row, with `A'ᵀw ≤ 0 < b'ᵀw`.

use super::scalar::LpScalar;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum RawOutcome<T> {
    Feasible(Vec<T>),
    Infeasible(Vec<T>),
}

pub fn iteration_cap(rows: usize, cols: usize) -> usize {
    50 * (rows + cols) * (rows + cols)
}

struct Tableau<T> {
    rows: Vec<Vec<T>>,
    cost: Vec<T>,
    basis: Vec<usize>,
    width: usize,
}

impl<T: LpScalar> Tableau<T> {
    fn rhs(&self) -> usize {
        self.width - 1
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for v in self.rows[row].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let pivot_row = self.rows[row].clone();
        let eliminate = |target: &mut Vec<T>| {
            let factor = target[col].clone();
            if factor.is_zero() {
                return;
            }
            for (t, pv) in target.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *t = t.clone() - factor.clone() * pv.clone();
                }
            }
        };
        for (i, r) in self.rows.iter_mut().enumerate() {
            if i != row {
                eliminate(r);
            }
        }
        eliminate(&mut self.cost);
        self.basis[row] = col;
    }
}

/// Runs phase I. `tol` is the pivot/zero tolerance (0 for exact arithmetic).
pub fn phase_one<T: LpScalar>(a: &[Vec<T>], b: &[T], tol: &T) -> Result<RawOutcome<T>> {
    let (r, c) = (b.len(), a.first().map_or(0, Vec::len));
    let width = c + r + 1;
    let signs: Vec<T> = b
        .iter()
        .map(|bi| {
            if bi.is_negative() {
                -T::one()
            } else {
                T::one()
            }
        })
        .collect();

    let mut rows = Vec::with_capacity(r);
    for i in 0..r {
        let mut row = vec![T::zero(); width];
        for j in 0..c {
            row[j] = signs[i].clone() * a[i][j].clone();
        }
        row[c + i] = T::one();
        row[width - 1] = signs[i].clone() * b[i].clone();
        rows.push(row);
    }
    let mut cost = vec![T::zero(); width];
    for row in &rows {
        for j in (0..c).chain(std::iter::once(width - 1)) {
            cost[j] = cost[j].clone() - row[j].clone();
        }
    }
    let mut t = Tableau {
        rows,
        cost,
        basis: (c..c + r).collect(),
        width,
    };

    let cap = iteration_cap(r, c);
    let neg_tol = -tol.clone();
    let mut iterations = 0;
    while let Some(enter) = (0..c + r).find(|&j| t.cost[j] < neg_tol) {
        if iterations >= cap {
            return Err(Error::IterationLimit(cap));
        }
        iterations += 1;

        let rhs = t.rhs();
        let mut leave: Option<(usize, T)> = None;
        for i in 0..r {
            let coef = &t.rows[i][enter];
            if coef > tol {
                let ratio = t.rows[i][rhs].clone() / coef.clone();
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => {
                        let diff = ratio.clone() - best.clone();
                        diff < neg_tol || (diff <= *tol && t.basis[i] < t.basis[*best_i])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((row, _)) = leave else {
            // phase I is bounded below by zero; this only happens through rounding
            return Err(Error::Ambiguous("unbounded phase-I ray".into()));
        };
        t.pivot(row, enter);
    }

    let objective = -t.cost[t.rhs()].clone();
    let b_scale = b
        .iter()
        .fold(T::one(), |m, v| if v.abs() > m { v.abs() } else { m });
    if objective > tol.clone() * b_scale {
        let y = (0..r)
            .map(|i| signs[i].clone() * (T::one() - t.cost[c + i].clone()))
            .collect();
        Ok(RawOutcome::Infeasible(y))
    } else {
        let mut x = vec![T::zero(); c];
        for (i, &var) in t.basis.iter().enumerate() {
            if var < c {
                let v = t.rows[i][t.rhs()].clone();
                x[var] = if v.is_negative() { T::zero() } else { v };
            }
        }
        Ok(RawOutcome::Feasible(x))
    }
}
