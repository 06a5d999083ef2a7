#![allow(dead_code)]

pub mod fourier_motzkin;

use majorization::{FiniteMeasureSpace, StochasticKernel, VectorStepFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weights are multiples of 1/8 in `[1/4, 2]`, so sums stay exact.
pub fn random_space(rng: &mut ChaCha8Rng, atoms: usize) -> FiniteMeasureSpace {
    FiniteMeasureSpace::new(
        (0..atoms)
            .map(|_| rng.random_range(2..=16) as f64 / 8.0)
            .collect(),
    )
    .unwrap()
}

/// Random weights rescaled to a prescribed total mass.
pub fn space_with_mass(rng: &mut ChaCha8Rng, atoms: usize, mass: f64) -> FiniteMeasureSpace {
    let raw: Vec<f64> = (0..atoms).map(|_| rng.random_range(0.2..2.0)).collect();
    let total: f64 = raw.iter().sum();
    FiniteMeasureSpace::new(raw.iter().map(|w| w * mass / total).collect()).unwrap()
}

pub fn random_function(
    rng: &mut ChaCha8Rng,
    space: &FiniteMeasureSpace,
    dim: usize,
) -> VectorStepFunction {
    let values = (0..space.len())
        .map(|_| (0..dim).map(|_| rng.random_range(-3.0..3.0)).collect())
        .collect();
    VectorStepFunction::new(space.clone(), values).unwrap()
}

pub fn random_positive(rng: &mut ChaCha8Rng, space: &FiniteMeasureSpace) -> VectorStepFunction {
    VectorStepFunction::scalar(
        space.clone(),
        (0..space.len())
            .map(|_| rng.random_range(0.2..3.0))
            .collect(),
    )
    .unwrap()
}

/// Random stochastic kernel; roughly a quarter of the entries are zero, but no
/// row or column vanishes.
pub fn random_kernel(
    rng: &mut ChaCha8Rng,
    domain: &FiniteMeasureSpace,
    codomain: &FiniteMeasureSpace,
) -> StochasticKernel {
    loop {
        let table: Vec<Vec<f64>> = (0..codomain.len())
            .map(|_| {
                (0..domain.len())
                    .map(|_| {
                        if rng.random_bool(0.25) {
                            0.0
                        } else {
                            rng.random_range(0.0..1.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let columns_alive = (0..domain.len()).all(|j| table.iter().any(|row| row[j] > 0.0));
        let rows_alive = table.iter().all(|row| row.iter().any(|&v| v > 0.0));
        if columns_alive && rows_alive {
            return StochasticKernel::renormalize(domain.clone(), codomain.clone(), table).unwrap();
        }
    }
}

/// Integer feasibility systems, mixing generic and degenerate shapes.
pub fn random_system(rng: &mut ChaCha8Rng, case: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let rows = rng.random_range(1..=6);
    let cols = rng.random_range(1..=10);
    let mut a: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.random_range(-3..=3) as f64).collect())
        .collect();
    let mut b: Vec<f64> = (0..rows).map(|_| rng.random_range(-4..=4) as f64).collect();
    match case % 5 {
        // planted solution with many zero coordinates: degenerate vertex
        1 => {
            let x: Vec<f64> = (0..cols)
                .map(|_| {
                    if rng.random_bool(0.6) {
                        0.0
                    } else {
                        rng.random_range(0..=3) as f64
                    }
                })
                .collect();
            b = a
                .iter()
                .map(|row| row.iter().zip(&x).map(|(p, q)| p * q).sum())
                .collect();
        }
        // duplicated row, consistent or not
        2 if rows > 1 => {
            a[rows - 1] = a[0].clone();
            b[rows - 1] = if rng.random_bool(0.5) {
                b[0]
            } else {
                b[0] + 1.0
            };
        }
        // zero column and a zero right-hand side
        3 => {
            for row in a.iter_mut() {
                row[0] = 0.0;
            }
            b[0] = 0.0;
        }
        // row that is the sum of two others
        4 if rows > 2 => {
            a[rows - 1] = a[0].iter().zip(&a[1]).map(|(p, q)| p + q).collect();
            b[rows - 1] = b[0] + b[1];
        }
        _ => {}
    }
    (a, b)
}
