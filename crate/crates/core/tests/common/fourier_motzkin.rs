//! Exact feasibility of `{x ≥ 0 : Ax = b}` by elimination, independent of the
//! simplex code: Gauss–Jordan on the equalities, then Fourier–Motzkin on the
//! free variables with Chernikov's history rule to keep the system small.

use std::collections::{BTreeSet, HashSet};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone)]
struct Inequality {
    /// `coeffs · x ≤ rhs`
    coeffs: Vec<BigRational>,
    rhs: BigRational,
    history: BTreeSet<usize>,
}

impl Inequality {
    fn normalized(mut self) -> Self {
        let scale = self
            .coeffs
            .iter()
            .chain(std::iter::once(&self.rhs))
            .map(|v| v.abs())
            .fold(BigRational::zero(), |m, v| if v > m { v } else { m });
        if !scale.is_zero() {
            for c in self.coeffs.iter_mut() {
                *c /= &scale;
            }
            self.rhs /= &scale;
        }
        self
    }

    fn key(&self) -> (Vec<BigRational>, BigRational) {
        (self.coeffs.clone(), self.rhs.clone())
    }
}

fn to_rational(v: f64) -> BigRational {
    BigRational::from_float(v).expect("finite input")
}

/// Reduced row echelon form of `[A | b]`; `None` when a row reads `0 = c ≠ 0`.
/// Returns the pivot column of every nonzero row alongside the reduced rows.
fn rref(mut m: Vec<Vec<BigRational>>, cols: usize) -> Option<(Vec<Vec<BigRational>>, Vec<usize>)> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = BigRational::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let factor = m[i][c].clone();
                let pivot_row = m[r].clone();
                for (v, p) in m[i].iter_mut().zip(&pivot_row) {
                    *v -= &factor * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    m.truncate(r);
    Some((m, pivots))
}

pub fn feasible(a: &[Vec<f64>], b: &[f64]) -> bool {
    let cols = a[0].len();
    let augmented: Vec<Vec<BigRational>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            row.iter()
                .map(|&v| to_rational(v))
                .chain(std::iter::once(to_rational(bi)))
                .collect()
        })
        .collect();
    let Some((rows, pivots)) = rref(augmented, cols) else {
        return false;
    };
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();

    // basic x_p = d - Σ_f C_f x_f ≥ 0 becomes Σ_f C_f x_f ≤ d; free x_f ≥ 0 becomes -x_f ≤ 0
    let mut system: Vec<Inequality> = Vec::new();
    for (k, row) in rows.iter().enumerate() {
        system.push(
            Inequality {
                coeffs: free.iter().map(|&f| row[f].clone()).collect(),
                rhs: row[cols].clone(),
                history: BTreeSet::from([k]),
            }
            .normalized(),
        );
    }
    for k in 0..free.len() {
        let mut coeffs = vec![BigRational::zero(); free.len()];
        coeffs[k] = -BigRational::one();
        system.push(Inequality {
            coeffs,
            rhs: BigRational::zero(),
            history: BTreeSet::from([rows.len() + k]),
        });
    }

    for var in 0..free.len() {
        let (mut pos, mut neg, mut next) = (Vec::new(), Vec::new(), Vec::new());
        for ineq in system {
            if ineq.coeffs[var].is_positive() {
                pos.push(ineq);
            } else if ineq.coeffs[var].is_negative() {
                neg.push(ineq);
            } else {
                next.push(ineq);
            }
        }
        for p in &pos {
            for n in &neg {
                let history: BTreeSet<usize> = p.history.union(&n.history).copied().collect();
                // after eliminating var + 1 variables, nonredundant rows combine at most var + 2 originals
                if history.len() > var + 2 {
                    continue;
                }
                let (lp, ln) = (-n.coeffs[var].clone(), p.coeffs[var].clone());
                let coeffs = p
                    .coeffs
                    .iter()
                    .zip(&n.coeffs)
                    .map(|(x, y)| x * &lp + y * &ln)
                    .collect();
                next.push(
                    Inequality {
                        coeffs,
                        rhs: &p.rhs * &lp + &n.rhs * &ln,
                        history,
                    }
                    .normalized(),
                );
            }
        }
        let mut seen = HashSet::new();
        system = next.into_iter().filter(|i| seen.insert(i.key())).collect();
        if system
            .iter()
            .any(|i| i.coeffs.iter().all(Zero::is_zero) && i.rhs.is_negative())
        {
            return false;
        }
    }
    system.iter().all(|i| !i.rhs.is_negative())
}
