//! Linear feasibility: find `x ≥ 0` with `Ax = b`, or a Farkas vector `y`
//! with `Aᵀy ≤ 0` and `bᵀy > 0`.
//!
//! Every answer is re-checked against the outcome tolerances before it is
//! returned. A working-precision run that fails its own check is repeated
//! with a tighter pivot tolerance and then in exact rational arithmetic.

mod scalar;
pub mod simplex;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub use scalar::LpScalar;
use simplex::{phase_one, RawOutcome};

use crate::error::{Error, Result};

/// Feasible witnesses may dip this far below zero before clamping.
pub const NEGATIVE_SLACK: f64 = 1e-12;
/// Residual bound `‖Ax − b‖∞ ≤ RESIDUAL_TOL · (1 + ‖b‖∞)`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Certificates need `Aᵀy ≤ DUAL_TOL` componentwise.
pub const DUAL_TOL: f64 = 1e-9;
/// Certificates need `bᵀy ≥ SEPARATION_MARGIN`.
pub const SEPARATION_MARGIN: f64 = 1e-7;
pub const DEFAULT_MAX_ENTRIES: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilitySystem {
    a: Vec<Vec<f64>>,
    b: Vec<f64>,
}

impl FeasibilitySystem {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        if a.is_empty() || a[0].is_empty() {
            return Err(Error::InvalidSystem(
                "need at least one row and one column".into(),
            ));
        }
        if a.len() != b.len() {
            return Err(Error::InvalidSystem(format!(
                "{} rows but {} right-hand sides",
                a.len(),
                b.len()
            )));
        }
        let c = a[0].len();
        for (i, row) in a.iter().enumerate() {
            if row.len() != c {
                return Err(Error::InvalidSystem(format!(
                    "row {i} has {} columns, expected {c}",
                    row.len()
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidSystem(format!("non-finite entry in row {i}")));
            }
        }
        if b.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSystem("non-finite right-hand side".into()));
        }
        Ok(FeasibilitySystem { a, b })
    }

    pub fn rows(&self) -> usize {
        self.a.len()
    }

    pub fn cols(&self) -> usize {
        self.a[0].len()
    }

    pub fn a(&self) -> &[Vec<f64>] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// `‖Ax − b‖∞`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| (row.iter().zip(x).map(|(a, x)| a * x).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max)
    }

    /// `(max_j (Aᵀy)_j, bᵀy)`.
    pub fn farkas_values(&self, y: &[f64]) -> (f64, f64) {
        let max_aty = (0..self.cols())
            .map(|j| {
                self.a
                    .iter()
                    .zip(y)
                    .map(|(row, yi)| row[j] * yi)
                    .sum::<f64>()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        let bty = self.b.iter().zip(y).map(|(b, y)| b * y).sum();
        (max_aty, bty)
    }

    fn b_norm(&self) -> f64 {
        self.b.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }

    /// Checks the outcome invariants.
    pub fn verify(&self, outcome: &FeasibilityOutcome) -> bool {
        match outcome {
            FeasibilityOutcome::Feasible(x) => {
                x.len() == self.cols()
                    && x.iter().all(|&v| v >= -NEGATIVE_SLACK)
                    && self.residual(x) <= RESIDUAL_TOL * (1.0 + self.b_norm())
            }
            FeasibilityOutcome::Infeasible(y) => {
                let (aty, bty) = self.farkas_values(y);
                y.len() == self.rows() && aty <= DUAL_TOL && bty >= SEPARATION_MARGIN
            }
        }
    }

    /// A copy with row `i` of `(A | b)` multiplied by `factor`.
    pub fn scale_row(&self, i: usize, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.a[i].iter_mut() {
            *v *= factor;
        }
        out.b[i] *= factor;
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeasibilityOutcome {
    Feasible(Vec<f64>),
    Infeasible(Vec<f64>),
}

impl FeasibilityOutcome {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityOutcome::Feasible(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_entries: usize,
    /// Skip working precision and solve in exact rationals.
    pub exact: bool,
    pub pivot_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_entries: DEFAULT_MAX_ENTRIES,
            exact: false,
            pivot_tolerance: 1e-11,
        }
    }
}

impl SolverConfig {
    pub fn exact() -> Self {
        SolverConfig {
            exact: true,
            ..Self::default()
        }
    }
}

pub fn solve_feasibility(sys: &FeasibilitySystem) -> Result<FeasibilityOutcome> {
    solve_feasibility_with(sys, &SolverConfig::default())
}

pub fn solve_feasibility_with(
    sys: &FeasibilitySystem,
    config: &SolverConfig,
) -> Result<FeasibilityOutcome> {
    let entries = sys.rows() * sys.cols();
    if entries > config.max_entries {
        return Err(Error::TooLarge {
            entries,
            limit: config.max_entries,
        });
    }
    if !config.exact {
        for tol in [config.pivot_tolerance, config.pivot_tolerance * 1e-3] {
            let raw = phase_one(&sys.a, &sys.b, &tol);
            let candidate = match raw {
                Ok(raw) => finish_f64(sys, raw),
                Err(Error::IterationLimit(cap)) => return Err(Error::IterationLimit(cap)),
                Err(_) => None,
            };
            if let Some(outcome) = candidate {
                return Ok(outcome);
            }
        }
    }
    let exact = solve_rational(sys)?;
    let outcome = match exact {
        RawOutcome::Feasible(x) => {
            FeasibilityOutcome::Feasible(x.iter().map(LpScalar::to_f64).collect())
        }
        RawOutcome::Infeasible(y) => {
            let bty = y
                .iter()
                .zip(&sys.b)
                .fold(BigRational::zero(), |acc, (yi, bi)| {
                    acc + yi * BigRational::from_f64(*bi)
                });
            FeasibilityOutcome::Infeasible(y.iter().map(|v| (v / &bty).to_f64()).collect())
        }
    };
    if sys.verify(&outcome) {
        Ok(outcome)
    } else {
        Err(Error::Ambiguous(match outcome {
            FeasibilityOutcome::Feasible(x) => {
                format!("exact witness has residual {}", sys.residual(&x))
            }
            FeasibilityOutcome::Infeasible(y) => {
                let (aty, bty) = sys.farkas_values(&y);
                format!("exact certificate rounds to max Aᵀy = {aty}, bᵀy = {bty}")
            }
        }))
    }
}

/// Exact-rational phase I on the (exactly converted) system.
pub fn solve_rational(sys: &FeasibilitySystem) -> Result<RawOutcome<BigRational>> {
    let a: Vec<Vec<BigRational>> = sys
        .a
        .iter()
        .map(|row| row.iter().map(|&v| BigRational::from_f64(v)).collect())
        .collect();
    let b: Vec<BigRational> = sys.b.iter().map(|&v| BigRational::from_f64(v)).collect();
    phase_one(&a, &b, &BigRational::zero())
}

fn finish_f64(sys: &FeasibilitySystem, raw: RawOutcome<f64>) -> Option<FeasibilityOutcome> {
    match raw {
        RawOutcome::Feasible(x) => {
            let outcome = FeasibilityOutcome::Feasible(x);
            sys.verify(&outcome).then_some(outcome)
        }
        RawOutcome::Infeasible(y) => {
            let (_, bty) = sys.farkas_values(&y);
            if bty.is_nan() || bty <= 0.0 {
                return None;
            }
            let inf = y.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
            // y is only defined up to positive scaling; try the two natural normalizations
            [bty, inf / (1.0 + sys.b_norm())]
                .into_iter()
                .map(|s| FeasibilityOutcome::Infeasible(y.iter().map(|v| v / s).collect()))
                .find(|o| sys.verify(o))
        }
    }
}

/// Exact verification of a rational certificate, used by tests.
pub fn rational_farkas_holds(a: &[Vec<BigRational>], b: &[BigRational], y: &[BigRational]) -> bool {
    let cols = a.first().map_or(0, Vec::len);
    let dual_ok = (0..cols).all(|j| {
        let s = a
            .iter()
            .zip(y)
            .fold(BigRational::zero(), |acc, (row, yi)| acc + &row[j] * yi);
        !s.is_positive()
    });
    let bty = b
        .iter()
        .zip(y)
        .fold(BigRational::zero(), |acc, (bi, yi)| acc + bi * yi);
    dual_ok && bty.is_positive()
}
