//! Partitions of a finite space and the block-averaging operator `M_P`.
//!
//! `M_P` replaces a function by its weighted mean over each block. It is a
//! doubly stochastic operator; composing it after a stochastic kernel gives
//! the coarse-grained kernels used by [`approximate_operator`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{DoublyStochasticKernel, StochasticKernel};
use crate::measure::{FiniteMeasureSpace, VectorStepFunction};

/// Disjoint blocks of atom indices covering a space. Blocks are kept sorted
/// internally and ordered by their smallest atom, so equal partitions compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    space: FiniteMeasureSpace,
    blocks: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionJson {
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    pub fn new(space: FiniteMeasureSpace, mut blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut seen = vec![false; space.len()];
        for block in blocks.iter_mut() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            block.sort_unstable();
            for &atom in block.iter() {
                match seen.get_mut(atom) {
                    None => {
                        return Err(Error::InvalidPartition(format!(
                            "atom {atom} outside a space of {} atoms",
                            space.len()
                        )))
                    }
                    Some(true) => {
                        return Err(Error::InvalidPartition(format!(
                            "atom {atom} in two blocks"
                        )))
                    }
                    Some(s) => *s = true,
                }
            }
        }
        if let Some(atom) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("atom {atom} not covered")));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        Ok(Partition { space, blocks })
    }

    /// Partition with every atom in its own block.
    pub fn singletons(space: &FiniteMeasureSpace) -> Self {
        Partition {
            space: space.clone(),
            blocks: (0..space.len()).map(|i| vec![i]).collect(),
        }
    }

    /// Partition with one block.
    pub fn whole(space: &FiniteMeasureSpace) -> Self {
        Partition {
            space: space.clone(),
            blocks: vec![(0..space.len()).collect()],
        }
    }

    /// Groups atoms carrying the same label.
    pub fn from_labels<T: Ord + Clone>(space: &FiniteMeasureSpace, labels: &[T]) -> Result<Self> {
        if labels.len() != space.len() {
            return Err(Error::Dimension {
                expected: space.len(),
                found: labels.len(),
            });
        }
        let mut groups: std::collections::BTreeMap<T, Vec<usize>> = Default::default();
        for (atom, label) in labels.iter().enumerate() {
            groups.entry(label.clone()).or_default().push(atom);
        }
        Partition::new(space.clone(), groups.into_values().collect())
    }

    pub fn from_json(space: &FiniteMeasureSpace, json: PartitionJson) -> Result<Self> {
        Partition::new(space.clone(), json.blocks)
    }

    pub fn to_json(&self) -> PartitionJson {
        PartitionJson {
            blocks: self.blocks.clone(),
        }
    }

    pub fn space(&self) -> &FiniteMeasureSpace {
        &self.space
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Block index of every atom.
    pub fn assignment(&self) -> Vec<usize> {
        let mut out = vec![0; self.space.len()];
        for (b, block) in self.blocks.iter().enumerate() {
            for &atom in block {
                out[atom] = b;
            }
        }
        out
    }

    pub fn block_mass(&self, block: usize) -> f64 {
        self.blocks[block]
            .iter()
            .map(|&a| self.space.weight(a))
            .sum()
    }

    /// Every block of `self` lies inside a single block of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.space.len() != coarser.space.len() {
            return false;
        }
        let outer = coarser.assignment();
        self.blocks
            .iter()
            .all(|block| block.iter().all(|&a| outer[a] == outer[block[0]]))
    }

    /// `{E_i ∩ F_j}` over all nonempty intersections.
    pub fn intersect(&self, other: &Partition) -> Result<Partition> {
        self.space
            .ensure_matches(&other.space, "intersection partition")?;
        let (a, b) = (self.assignment(), other.assignment());
        let labels: Vec<(usize, usize)> = a.into_iter().zip(b).collect();
        Partition::from_labels(&self.space, &labels)
    }
}

pub fn intersection_partition(p: &Partition, q: &Partition) -> Result<Partition> {
    p.intersect(q)
}

/// `M_P f`: every atom takes the weighted mean of its block.
pub fn partition_average(p: &Partition, f: &VectorStepFunction) -> Result<VectorStepFunction> {
    p.space
        .ensure_matches(f.space(), "partition vs function space")?;
    let mut rows = vec![Vec::new(); f.len()];
    for block in &p.blocks {
        let mut mean = vec![0.0; f.dim()];
        let mut mass = 0.0;
        for &atom in block {
            let w = p.space.weight(atom);
            mass += w;
            for (m, v) in mean.iter_mut().zip(f.row(atom)) {
                *m += w * v;
            }
        }
        for m in mean.iter_mut() {
            *m /= mass;
        }
        for &atom in block {
            rows[atom] = mean.clone();
        }
    }
    VectorStepFunction::new(f.space().clone(), rows)
}

/// Kernel of `M_P`: `1/μ(E)` when both atoms share block `E`, else 0.
pub fn mp_kernel(p: &Partition) -> DoublyStochasticKernel {
    let m = p.space.len();
    let mut table = vec![vec![0.0; m]; m];
    for (b, block) in p.blocks.iter().enumerate() {
        let value = 1.0 / p.block_mass(b);
        for &i in block {
            for &j in block {
                table[i][j] = value;
            }
        }
    }
    DoublyStochasticKernel::new(p.space.clone(), p.space.clone(), table)
        .expect("block averaging is doubly stochastic")
}

/// Bin of `value` among `E₀ = (-∞, -n)`, `E_j = [-n + (j-1)/n, -n + j/n)`
/// for `j = 1..=2n²`, and `E_{2n²+1} = [n, ∞)`.
pub fn level_bin(value: f64, n: u32) -> u64 {
    let nf = f64::from(n);
    let top = 2 * u64::from(n) * u64::from(n) + 1;
    if value < -nf {
        return 0;
    }
    if value >= nf {
        return top;
    }
    let mut j = ((value + nf) * nf).floor() as u64 + 1;
    // floor can land one bin off near a boundary; re-check against the bin edges
    let lower = |j: u64| -nf + (j - 1) as f64 / nf;
    while j > 1 && value < lower(j) {
        j -= 1;
    }
    while j < top - 1 && value >= lower(j + 1) {
        j += 1;
    }
    j.clamp(1, top - 1)
}

/// Half-open interval `[lo, hi)` of a bin; tails use infinities.
pub fn level_bin_interval(bin: u64, n: u32) -> (f64, f64) {
    let nf = f64::from(n);
    let top = 2 * u64::from(n) * u64::from(n) + 1;
    match bin {
        0 => (f64::NEG_INFINITY, -nf),
        b if b >= top => (nf, f64::INFINITY),
        b => (-nf + (b - 1) as f64 / nf, -nf + b as f64 / nf),
    }
}

/// Groups atoms of a scalar function by level bin; empty bins are dropped.
pub fn level_set_partition(f: &VectorStepFunction, n: u32) -> Result<Partition> {
    let values = f.scalar_values()?;
    if n == 0 {
        return Err(Error::InvalidPartition(
            "level resolution must be at least 1".into(),
        ));
    }
    let bins: Vec<u64> = values.iter().map(|&v| level_bin(v, n)).collect();
    Partition::from_labels(f.space(), &bins)
}

/// Intersection of the level-set partitions of every component of every function.
pub fn joint_level_set_partition(functions: &[VectorStepFunction], n: u32) -> Result<Partition> {
    let first = functions
        .first()
        .ok_or_else(|| Error::InvalidPartition("no functions to partition by".into()))?;
    let space = first.space();
    let mut part = Partition::whole(space);
    for f in functions {
        for k in 0..f.dim() {
            let comp = VectorStepFunction::scalar(f.space().clone(), f.component(k))?;
            part = part.intersect(&level_set_partition(&comp, n)?)?;
        }
    }
    Ok(part)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationRow {
    pub level: u32,
    pub basis_index: usize,
    /// `‖M_P K b − K b‖₁` with `P` built at this level alone.
    pub l1_error: f64,
    /// Same error with `P` intersected over all levels up to this one.
    pub refined_l1_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproximationReport {
    pub rows: Vec<ApproximationRow>,
}

impl ApproximationReport {
    pub fn errors_at(&self, level: u32) -> Vec<f64> {
        self.rows
            .iter()
            .filter(|r| r.level == level)
            .map(|r| r.l1_error)
            .collect()
    }
}

/// The coarse-grained kernel `M_P ∘ K` for the partition `P` of `K`'s
/// codomain built from the level sets of the images `K b` at resolution `level`.
pub fn approximating_kernel(
    kernel: &StochasticKernel,
    basis: &[VectorStepFunction],
    level: u32,
) -> Result<StochasticKernel> {
    let images = images(kernel, basis)?;
    let part = joint_level_set_partition(&images, level)?;
    mp_kernel(&part).as_stochastic().compose(kernel)
}

fn images(
    kernel: &StochasticKernel,
    basis: &[VectorStepFunction],
) -> Result<Vec<VectorStepFunction>> {
    if basis.is_empty() {
        return Err(Error::InvalidPartition("empty basis".into()));
    }
    basis.iter().map(|b| kernel.apply(b)).collect()
}

/// Approximates `K` on the span of `basis` by `M_{P_level} ∘ K` for levels
/// `1..=depth`, reporting the L¹ error on each basis function.
pub fn approximate_operator(
    kernel: &StochasticKernel,
    basis: &[VectorStepFunction],
    depth: u32,
) -> Result<ApproximationReport> {
    let images = images(kernel, basis)?;
    let mut rows = Vec::new();
    let mut refined = Partition::whole(kernel.codomain());
    for level in 1..=depth {
        let part = joint_level_set_partition(&images, level)?;
        refined = refined.intersect(&part)?;
        // (M_P ∘ K) b = M_P (K b), without forming the composed kernel
        for (basis_index, image) in images.iter().enumerate() {
            rows.push(ApproximationRow {
                level,
                basis_index,
                l1_error: partition_average(&part, image)?.l1_distance(image)?,
                refined_l1_error: partition_average(&refined, image)?.l1_distance(image)?,
            });
        }
    }
    Ok(ApproximationReport { rows })
}
