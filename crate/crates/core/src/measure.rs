//! Finite atomic measure spaces and step functions over them.
//!
//! A [`VectorStepFunction`] assigns a vector in ℝⁿ to every atom. Scalar
//! functions (n = 1) can be rearranged into a non-increasing step function on
//! `[0, total_mass]`, which is what continuous majorization compares.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Positive atom weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FiniteMeasureSpace {
    weights: Vec<f64>,
}

impl FiniteMeasureSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, &weight) in weights.iter().enumerate() {
            if !(weight.is_finite() && weight > 0.0) {
                return Err(Error::BadWeight { index, weight });
            }
        }
        let space = FiniteMeasureSpace { weights };
        if !space.total_mass().is_finite() {
            return Err(Error::BadWeight {
                index: 0,
                weight: space.total_mass(),
            });
        }
        Ok(space)
    }

    /// Counting measure on `atoms` points.
    pub fn counting(atoms: usize) -> Result<Self> {
        Self::new(vec![1.0; atoms])
    }

    /// `atoms` equal atoms of total mass `mass`.
    pub fn uniform(atoms: usize, mass: f64) -> Result<Self> {
        Self::new(vec![mass / atoms as f64; atoms])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Same atom count and weights equal within tolerance.
    pub fn matches(&self, other: &FiniteMeasureSpace) -> bool {
        let tol = Tolerance::default();
        self.len() == other.len()
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(&a, &b)| tol.eq(a, b))
    }

    pub(crate) fn ensure_matches(&self, other: &FiniteMeasureSpace, what: &str) -> Result<()> {
        if self.matches(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch(format!(
                "{what}: {} atoms vs {} atoms",
                self.len(),
                other.len()
            )))
        }
    }

    /// Weights multiplied atomwise by a positive density, i.e. the measure `h dμ`.
    pub fn reweighted(&self, density: &[f64]) -> Result<Self> {
        if density.len() != self.len() {
            return Err(Error::Dimension {
                expected: self.len(),
                found: density.len(),
            });
        }
        Self::new(
            self.weights
                .iter()
                .zip(density)
                .map(|(w, d)| w * d)
                .collect(),
        )
    }
}

impl TryFrom<Vec<f64>> for FiniteMeasureSpace {
    type Error = Error;

    fn try_from(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights)
    }
}

impl From<FiniteMeasureSpace> for Vec<f64> {
    fn from(space: FiniteMeasureSpace) -> Self {
        space.weights
    }
}

/// A function from the atoms of a [`FiniteMeasureSpace`] into ℝⁿ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionJson", into = "FunctionJson")]
pub struct VectorStepFunction {
    space: FiniteMeasureSpace,
    values: Vec<Vec<f64>>,
    dim: usize,
}

#[derive(Serialize, Deserialize)]
struct FunctionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weights: Option<Vec<f64>>,
    values: Vec<Vec<f64>>,
}

impl TryFrom<FunctionJson> for VectorStepFunction {
    type Error = Error;

    fn try_from(json: FunctionJson) -> Result<Self> {
        let space = match json.weights {
            Some(w) => FiniteMeasureSpace::new(w)?,
            None => FiniteMeasureSpace::counting(json.values.len())?,
        };
        VectorStepFunction::new(space, json.values)
    }
}

impl From<VectorStepFunction> for FunctionJson {
    fn from(f: VectorStepFunction) -> Self {
        FunctionJson {
            weights: Some(f.space.weights),
            values: f.values,
        }
    }
}

impl VectorStepFunction {
    pub fn new(space: FiniteMeasureSpace, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != space.len() {
            return Err(Error::RowCount {
                rows: values.len(),
                atoms: space.len(),
            });
        }
        let dim = values[0].len();
        if dim == 0 {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        for (atom, row) in values.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: row.len(),
                });
            }
            if let Some(component) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { atom, component });
            }
        }
        Ok(VectorStepFunction { space, values, dim })
    }

    pub fn scalar(space: FiniteMeasureSpace, values: Vec<f64>) -> Result<Self> {
        Self::new(space, values.into_iter().map(|v| vec![v]).collect())
    }

    /// Scalar function on the counting measure.
    pub fn counting(values: Vec<f64>) -> Result<Self> {
        let space = FiniteMeasureSpace::counting(values.len())?;
        Self::scalar(space, values)
    }

    /// Constant function `value` in every component.
    pub fn constant(space: FiniteMeasureSpace, dim: usize, value: f64) -> Result<Self> {
        let rows = vec![vec![value; dim]; space.len()];
        Self::new(space, rows)
    }

    /// Builds a function from component columns.
    pub fn from_components(space: FiniteMeasureSpace, components: &[Vec<f64>]) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Dimension {
                expected: 1,
                found: 0,
            });
        }
        let rows = (0..space.len())
            .map(|i| {
                components
                    .iter()
                    .map(|c| c.get(i).copied().unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        for c in components {
            if c.len() != space.len() {
                return Err(Error::RowCount {
                    rows: c.len(),
                    atoms: space.len(),
                });
            }
        }
        Self::new(space, rows)
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn row(&self, atom: usize) -> &[f64] {
        &self.values[atom]
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.dim == 1
    }

    pub fn component(&self, k: usize) -> Vec<f64> {
        self.values.iter().map(|row| row[k]).collect()
    }

    /// Values of a scalar function.
    pub fn scalar_values(&self) -> Result<Vec<f64>> {
        self.ensure_scalar()?;
        Ok(self.component(0))
    }

    pub(crate) fn ensure_scalar(&self) -> Result<()> {
        if self.dim == 1 {
            Ok(())
        } else {
            Err(Error::NotScalar(self.dim))
        }
    }

    /// Same values over a different space with the same atom count.
    pub fn with_space(&self, space: FiniteMeasureSpace) -> Result<Self> {
        Self::new(space, self.values.clone())
    }

    /// Componentwise integral `Σ_i μ_i f_i`.
    pub fn integral(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.dim];
        for (row, &w) in self.values.iter().zip(self.space.weights()) {
            for (t, v) in total.iter_mut().zip(row) {
                *t += w * v;
            }
        }
        total
    }

    /// `Σ_i μ_i Σ_k |f_ik|`.
    pub fn l1_norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.space.weights())
            .map(|(row, w)| w * row.iter().map(|v| v.abs()).sum::<f64>())
            .sum()
    }

    /// L¹ distance to a function on the same space.
    pub fn l1_distance(&self, other: &VectorStepFunction) -> Result<f64> {
        self.space.ensure_matches(&other.space, "l1 distance")?;
        if self.dim != other.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .zip(self.space.weights())
            .map(|((a, b), w)| w * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
            .sum())
    }

    /// Largest componentwise absolute difference.
    pub fn max_abs_difference(&self, other: &VectorStepFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }

    /// Appends the components of `other` after those of `self`.
    pub fn stack(&self, other: &VectorStepFunction) -> Result<Self> {
        self.space.ensure_matches(&other.space, "stack")?;
        let rows = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.iter().chain(b).copied().collect())
            .collect();
        Self::new(self.space.clone(), rows)
    }

    /// Each row divided by the matching value of a strictly positive scalar.
    pub fn divide_by(&self, h: &VectorStepFunction) -> Result<Self> {
        let hv = positive_values(h, "divisor")?;
        self.space.ensure_matches(&h.space, "divide")?;
        let rows = self
            .values
            .iter()
            .zip(&hv)
            .map(|(row, d)| row.iter().map(|v| v / d).collect())
            .collect();
        Self::new(self.space.clone(), rows)
    }

    /// Distribution function `d_f(s) = μ({x : f(x) > s})`.
    pub fn distribution_function(&self, s: f64) -> Result<f64> {
        self.ensure_scalar()?;
        Ok(self
            .values
            .iter()
            .zip(self.space.weights())
            .filter(|(row, _)| row[0] > s)
            .map(|(_, w)| w)
            .sum())
    }

    /// Non-increasing rearrangement onto `[0, total_mass]`.
    pub fn decreasing_rearrangement(&self) -> Result<RearrangedStep> {
        self.ensure_scalar()?;
        let mut order: Vec<usize> = (0..self.len()).collect();
        // stable: ties keep their original index order
        order.sort_by(|&a, &b| self.values[b][0].total_cmp(&self.values[a][0]));

        let mut breakpoints = vec![0.0];
        let mut levels: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for atom in order {
            let value = self.values[atom][0];
            acc += self.space.weight(atom);
            if levels.last() == Some(&value) {
                *breakpoints.last_mut().unwrap() = acc;
            } else {
                levels.push(value);
                breakpoints.push(acc);
            }
        }
        Ok(RearrangedStep {
            breakpoints,
            levels,
        })
    }
}

pub(crate) fn positive_values(h: &VectorStepFunction, what: &str) -> Result<Vec<f64>> {
    let values = h.scalar_values()?;
    if let Some(i) = values.iter().position(|&v| v <= 0.0) {
        return Err(Error::NotPositive(format!(
            "{what} is {} at atom {i}",
            values[i]
        )));
    }
    Ok(values)
}

/// `l1_norm` as a free function.
pub fn l1_norm(f: &VectorStepFunction) -> f64 {
    f.l1_norm()
}

pub fn distribution_function(f: &VectorStepFunction, s: f64) -> Result<f64> {
    f.distribution_function(s)
}

pub fn decreasing_rearrangement(f: &VectorStepFunction) -> Result<RearrangedStep> {
    f.decreasing_rearrangement()
}

/// A non-increasing step function on `[0, total_mass]`: level `levels[k]`
/// on `[breakpoints[k], breakpoints[k + 1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RearrangedStep {
    breakpoints: Vec<f64>,
    levels: Vec<f64>,
}

impl RearrangedStep {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn total_mass(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value at `t`, right-continuous.
    pub fn value_at(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        let k = self.breakpoints[1..]
            .iter()
            .position(|&b| t < b)
            .unwrap_or(self.levels.len() - 1);
        Ok(self.levels[k])
    }

    /// `∫₀ᵗ f↓(x) dx`, exact for the step function.
    pub fn partial_integral(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        let mut total = 0.0;
        for (k, &level) in self.levels.iter().enumerate() {
            let (lo, hi) = (self.breakpoints[k], self.breakpoints[k + 1]);
            if t >= hi {
                total += level * (hi - lo);
            } else {
                total += level * (t - lo);
                break;
            }
        }
        Ok(total)
    }

    /// `∫₀ᵃ f↓`.
    pub fn integral(&self) -> f64 {
        self.levels
            .iter()
            .zip(self.breakpoints.windows(2))
            .map(|(l, b)| l * (b[1] - b[0]))
            .sum()
    }

    fn check_range(&self, t: f64) -> Result<()> {
        let total = self.total_mass();
        let tol = Tolerance::default();
        if t.is_nan() || t < -tol.slack(0.0, total) || t > total + tol.slack(t, total) {
            return Err(Error::OutOfRange { t, total });
        }
        Ok(())
    }
}

pub fn partial_integral(r: &RearrangedStep, t: f64) -> Result<f64> {
    r.partial_integral(t)
}

/// Continuous majorization `f ≺ g`: equal masses, `∫₀ᵗ f↓ ≤ ∫₀ᵗ g↓` for all
/// `t`, and equal full integrals.
pub fn continuous_majorize_check(f: &VectorStepFunction, g: &VectorStepFunction) -> Result<bool> {
    continuous_majorize_check_with(f, g, &Tolerance::default())
}

pub fn continuous_majorize_check_with(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    tol: &Tolerance,
) -> Result<bool> {
    let (fr, gr) = (f.decreasing_rearrangement()?, g.decreasing_rearrangement()?);
    let (a, b) = (fr.total_mass(), gr.total_mass());
    if !tol.eq(a, b) {
        return Err(Error::MassMismatch { left: a, right: b });
    }
    let mass = a.min(b);
    // Both partial integrals are piecewise linear; checking every kink suffices.
    let mut points: Vec<f64> = fr
        .breakpoints()
        .iter()
        .chain(gr.breakpoints())
        .map(|&t| t.min(mass))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let scale = f.l1_norm().max(g.l1_norm());
    for &t in &points {
        let (lhs, rhs) = (fr.partial_integral(t)?, gr.partial_integral(t)?);
        if lhs > rhs + tol.slack(scale, 0.0) {
            return Ok(false);
        }
    }
    Ok((fr.integral() - gr.integral()).abs() <= tol.slack(scale, 0.0))
}
