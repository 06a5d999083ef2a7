//! Stochastic kernels between finite spaces.
//!
//! A kernel from `(Y, ν)` (p atoms) to `(X, μ)` (m atoms) is an m×p table
//! `K ≥ 0` with `Σ_i μ_i K(i, j) = 1` for every column j. It acts on
//! functions over Y by `(Kg)_i = Σ_j K(i, j) ν_j g_j`, componentwise.
//! Under counting measures this is an ordinary column-stochastic matrix.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{positive_values, FiniteMeasureSpace, VectorStepFunction};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KernelJson", into = "KernelJson")]
pub struct StochasticKernel {
    domain: FiniteMeasureSpace,
    codomain: FiniteMeasureSpace,
    table: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct KernelJson {
    domain_weights: Vec<f64>,
    codomain_weights: Vec<f64>,
    table: Vec<Vec<f64>>,
}

impl TryFrom<KernelJson> for StochasticKernel {
    type Error = Error;

    fn try_from(json: KernelJson) -> Result<Self> {
        StochasticKernel::new(
            FiniteMeasureSpace::new(json.domain_weights)?,
            FiniteMeasureSpace::new(json.codomain_weights)?,
            json.table,
        )
    }
}

impl From<StochasticKernel> for KernelJson {
    fn from(k: StochasticKernel) -> Self {
        KernelJson {
            domain_weights: k.domain.into(),
            codomain_weights: k.codomain.into(),
            table: k.table,
        }
    }
}

fn check_shape(
    domain: &FiniteMeasureSpace,
    codomain: &FiniteMeasureSpace,
    table: &[Vec<f64>],
) -> Result<()> {
    if table.len() != codomain.len() {
        return Err(Error::InvalidKernel(format!(
            "table has {} rows, codomain has {} atoms",
            table.len(),
            codomain.len()
        )));
    }
    for (i, row) in table.iter().enumerate() {
        if row.len() != domain.len() {
            return Err(Error::InvalidKernel(format!(
                "row {i} has {} entries, domain has {} atoms",
                row.len(),
                domain.len()
            )));
        }
        for (j, &v) in row.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::InvalidKernel(format!("entry ({i}, {j}) = {v}")));
            }
        }
    }
    Ok(())
}

impl StochasticKernel {
    pub fn new(
        domain: FiniteMeasureSpace,
        codomain: FiniteMeasureSpace,
        table: Vec<Vec<f64>>,
    ) -> Result<Self> {
        check_shape(&domain, &codomain, &table)?;
        let kernel = StochasticKernel {
            domain,
            codomain,
            table,
        };
        let tol = Tolerance::default();
        for (j, s) in kernel.column_masses().into_iter().enumerate() {
            if !tol.eq(s, 1.0) {
                return Err(Error::InvalidKernel(format!(
                    "column {j} integrates to {s}, expected 1"
                )));
            }
        }
        Ok(kernel)
    }

    /// Repairs a nearly stochastic table: negative entries are clamped to 0
    /// and each column is rescaled so that `Σ_i μ_i K(i, j) = 1`.
    pub fn renormalize(
        domain: FiniteMeasureSpace,
        codomain: FiniteMeasureSpace,
        mut table: Vec<Vec<f64>>,
    ) -> Result<Self> {
        for row in table.iter_mut() {
            for v in row.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
        }
        check_shape(&domain, &codomain, &table)?;
        for j in 0..domain.len() {
            let s: f64 = (0..codomain.len())
                .map(|i| codomain.weight(i) * table[i][j])
                .sum();
            if s <= 0.0 {
                return Err(Error::InvalidKernel(format!("column {j} is zero")));
            }
            for row in table.iter_mut() {
                row[j] /= s;
            }
        }
        Self::new(domain, codomain, table)
    }

    /// Identity operator on `space`: diagonal `1/μ_i`.
    pub fn identity(space: &FiniteMeasureSpace) -> Self {
        let m = space.len();
        let table = (0..m)
            .map(|i| {
                let mut row = vec![0.0; m];
                row[i] = 1.0 / space.weight(i);
                row
            })
            .collect();
        StochasticKernel {
            domain: space.clone(),
            codomain: space.clone(),
            table,
        }
    }

    /// Sends every function to its full integral spread uniformly over `codomain`.
    pub fn total_averaging(domain: &FiniteMeasureSpace, codomain: &FiniteMeasureSpace) -> Self {
        let value = 1.0 / codomain.total_mass();
        StochasticKernel {
            domain: domain.clone(),
            codomain: codomain.clone(),
            table: vec![vec![value; domain.len()]; codomain.len()],
        }
    }

    pub fn domain(&self) -> &FiniteMeasureSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &FiniteMeasureSpace {
        &self.codomain
    }

    pub fn table(&self) -> &[Vec<f64>] {
        &self.table
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.table[i][j]
    }

    /// `Σ_i μ_i K(i, j)` per column.
    pub fn column_masses(&self) -> Vec<f64> {
        (0..self.domain.len())
            .map(|j| {
                (0..self.codomain.len())
                    .map(|i| self.codomain.weight(i) * self.table[i][j])
                    .sum()
            })
            .collect()
    }

    /// `Σ_j ν_j K(i, j)` per row, i.e. the image of the constant 1.
    pub fn row_masses(&self) -> Vec<f64> {
        self.table
            .iter()
            .map(|row| {
                row.iter()
                    .zip(self.domain.weights())
                    .map(|(k, w)| k * w)
                    .sum()
            })
            .collect()
    }

    pub fn apply(&self, g: &VectorStepFunction) -> Result<VectorStepFunction> {
        self.domain
            .ensure_matches(g.space(), "kernel domain vs function space")?;
        let n = g.dim();
        let rows = self
            .table
            .iter()
            .map(|krow| {
                let mut out = vec![0.0; n];
                for (j, (&k, &w)) in krow.iter().zip(self.domain.weights()).enumerate() {
                    let c = k * w;
                    if c != 0.0 {
                        for (o, v) in out.iter_mut().zip(g.row(j)) {
                            *o += c * v;
                        }
                    }
                }
                out
            })
            .collect();
        VectorStepFunction::new(self.codomain.clone(), rows)
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &StochasticKernel) -> Result<StochasticKernel> {
        self.domain
            .ensure_matches(&inner.codomain, "composition middle space")?;
        let middle = self.domain.weights();
        let table = self
            .table
            .iter()
            .map(|outer_row| {
                let mut row = vec![0.0; inner.domain.len()];
                for (t, (&k2, &beta)) in outer_row.iter().zip(middle).enumerate() {
                    let c = k2 * beta;
                    if c != 0.0 {
                        for (r, &k1) in row.iter_mut().zip(&inner.table[t]) {
                            *r += c * k1;
                        }
                    }
                }
                row
            })
            .collect();
        StochasticKernel::new(inner.domain.clone(), self.codomain.clone(), table)
    }

    /// `(‖Kf‖₁, ‖f‖₁)`; a stochastic kernel never increases the L¹ norm.
    pub fn l1_contraction_check(&self, f: &VectorStepFunction) -> Result<(f64, f64)> {
        Ok((self.apply(f)?.l1_norm(), f.l1_norm()))
    }

    /// Checks the extra doubly stochastic conditions.
    pub fn into_doubly_stochastic(self) -> Result<DoublyStochasticKernel> {
        DoublyStochasticKernel::try_from(self)
    }
}

/// Free-function form of [`StochasticKernel::compose`]: `second ∘ first`.
pub fn compose(second: &StochasticKernel, first: &StochasticKernel) -> Result<StochasticKernel> {
    second.compose(first)
}

pub fn apply(k: &StochasticKernel, g: &VectorStepFunction) -> Result<VectorStepFunction> {
    k.apply(g)
}

pub fn l1_contraction_check(k: &StochasticKernel, f: &VectorStepFunction) -> Result<(f64, f64)> {
    k.l1_contraction_check(f)
}

/// The multiplication operator `f ↦ s·f` as a kernel from `from` to `to`.
///
/// Both spaces share their atoms; stochasticity forces the target weights to
/// be `from_i / s_i`, so `T_{1/h}` maps `(X, μ)` onto `(X, h dμ)` and `T_k`
/// maps `(Y, k dν)` onto `(Y, ν)`.
pub fn multiplication_kernel(
    s: &VectorStepFunction,
    from: &FiniteMeasureSpace,
    to: &FiniteMeasureSpace,
) -> Result<StochasticKernel> {
    let sv = positive_values(s, "multiplier")?;
    if sv.len() != from.len() || to.len() != from.len() {
        return Err(Error::SpaceMismatch(format!(
            "multiplier has {} atoms, spaces have {} and {}",
            sv.len(),
            from.len(),
            to.len()
        )));
    }
    let tol = Tolerance::default();
    for (i, s) in sv.iter().enumerate() {
        let expected = from.weight(i) / s;
        if !tol.eq(to.weight(i), expected) {
            return Err(Error::SpaceMismatch(format!(
                "target weight {} at atom {i}, multiplier requires {expected}",
                to.weight(i)
            )));
        }
    }
    let m = from.len();
    let table = (0..m)
        .map(|i| {
            let mut row = vec![0.0; m];
            row[i] = sv[i] / from.weight(i);
            row
        })
        .collect();
    StochasticKernel::new(from.clone(), to.clone(), table)
}

/// Target space of the multiplication operator by `s` out of `from`.
pub fn multiplication_target(
    s: &VectorStepFunction,
    from: &FiniteMeasureSpace,
) -> Result<FiniteMeasureSpace> {
    let sv = positive_values(s, "multiplier")?;
    FiniteMeasureSpace::new(from.weights().iter().zip(&sv).map(|(w, s)| w / s).collect())
}

/// A stochastic kernel that also fixes constants: `Σ_j ν_j K(i, j) = 1` for
/// every row, between spaces of equal total mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StochasticKernel", into = "StochasticKernel")]
pub struct DoublyStochasticKernel(StochasticKernel);

impl TryFrom<StochasticKernel> for DoublyStochasticKernel {
    type Error = Error;

    fn try_from(k: StochasticKernel) -> Result<Self> {
        let tol = Tolerance::default();
        let (a, b) = (k.domain.total_mass(), k.codomain.total_mass());
        if !tol.eq(a, b) {
            return Err(Error::MassMismatch { left: b, right: a });
        }
        for (i, s) in k.row_masses().into_iter().enumerate() {
            if !tol.eq(s, 1.0) {
                return Err(Error::InvalidKernel(format!(
                    "row {i} integrates to {s}, expected 1"
                )));
            }
        }
        Ok(DoublyStochasticKernel(k))
    }
}

impl From<DoublyStochasticKernel> for StochasticKernel {
    fn from(d: DoublyStochasticKernel) -> Self {
        d.0
    }
}

impl std::ops::Deref for DoublyStochasticKernel {
    type Target = StochasticKernel;

    fn deref(&self) -> &StochasticKernel {
        &self.0
    }
}

impl DoublyStochasticKernel {
    pub fn new(
        domain: FiniteMeasureSpace,
        codomain: FiniteMeasureSpace,
        table: Vec<Vec<f64>>,
    ) -> Result<Self> {
        StochasticKernel::new(domain, codomain, table)?.try_into()
    }

    pub fn identity(space: &FiniteMeasureSpace) -> Self {
        DoublyStochasticKernel(StochasticKernel::identity(space))
    }

    pub fn as_stochastic(&self) -> &StochasticKernel {
        &self.0
    }

    pub fn into_stochastic(self) -> StochasticKernel {
        self.0
    }

    pub fn compose(&self, inner: &DoublyStochasticKernel) -> Result<DoublyStochasticKernel> {
        self.0.compose(&inner.0)?.try_into()
    }
}
