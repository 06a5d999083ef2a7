//! Vector, continuous, matrix and multivariate majorization.
//!
//! Matrix majorization `f ≺_M g` asks for a stochastic kernel `K` with
//! `apply(K, g) = f`. Writing the unknown table row-major over `(i, j)`, the
//! question is the linear feasibility problem
//!
//! ```text
//!   Σ_j ν_j g_j K(i, j) = f_i      (value rows, one per (i, k))
//!   Σ_i μ_i K(i, j)     = 1        (normalization rows, one per j)
//!   K ≥ 0
//! ```
//!
//! and multivariate majorization adds `Σ_j ν_j K(i, j) = 1` per row.
//!
//! When the system is infeasible, the Farkas vector `(y_i; z_j)` turns into
//! the sublinear functional `φ(v) = max_i ⟨y_i / μ_i, v⟩`. Dual feasibility
//! gives `ν_j φ(g_j) ≤ −z_j`, and `bᵀy > 0` gives
//! `Σ_i μ_i φ(f_i) ≥ Σ_i ⟨y_i, f_i⟩ > −Σ_j z_j`, so
//! `Σ μ φ(f) > Σ ν φ(g)`. For the multivariate system the extra multipliers
//! `w_i` enter as an intercept: the certificate is `max_i ⟨(y_i, w_i) / μ_i, (v, x)⟩`
//! evaluated at `x = 1`, one dimension larger than the data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{
    functional_integral, phi_divergence, sample_sublinear, ConvexFunctional, Functional,
    SublinearFunctional,
};
use crate::kernels::{
    multiplication_kernel, multiplication_target, DoublyStochasticKernel, StochasticKernel,
};
use crate::lp::{solve_feasibility_with, FeasibilityOutcome, FeasibilitySystem, SolverConfig};
use crate::measure::{
    continuous_majorize_check_with, positive_values, FiniteMeasureSpace, VectorStepFunction,
};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MajorizeOptions {
    pub tolerance: Tolerance,
    pub solver: SolverConfig,
}

impl MajorizeOptions {
    pub fn exact() -> Self {
        MajorizeOptions {
            solver: SolverConfig::exact(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Witness {
    Doubly(DoublyStochasticKernel),
    Stochastic(StochasticKernel),
}

impl Witness {
    pub fn kernel(&self) -> &StochasticKernel {
        match self {
            Witness::Doubly(d) => d.as_stochastic(),
            Witness::Stochastic(k) => k,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorizationVerdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub certificate: Option<SublinearFunctional>,
    pub margin: Option<f64>,
}

impl MajorizationVerdict {
    fn holds(witness: Witness) -> Self {
        MajorizationVerdict {
            holds: true,
            witness: Some(witness),
            certificate: None,
            margin: None,
        }
    }

    fn fails(certificate: SublinearFunctional, margin: f64) -> Self {
        MajorizationVerdict {
            holds: false,
            witness: None,
            certificate: Some(certificate),
            margin: Some(margin),
        }
    }
}

fn lifted(row: &[f64]) -> Vec<f64> {
    let mut v = row.to_vec();
    v.push(1.0);
    v
}

/// `Σ_i μ_i φ(f_i)`, evaluating a functional of dimension `n + 1` at `(f_i, 1)`.
fn certificate_integral(cert: &SublinearFunctional, f: &VectorStepFunction) -> Result<f64> {
    if cert.dim() == f.dim() {
        return functional_integral(cert, f);
    }
    if cert.dim() == f.dim() + 1 {
        return Ok(f
            .values()
            .iter()
            .zip(f.space().weights())
            .map(|(row, w)| w * cert.eval_unchecked(&lifted(row)))
            .sum());
    }
    Err(Error::Dimension {
        expected: f.dim(),
        found: cert.dim(),
    })
}

/// `Σ μ φ(f) − Σ ν φ(g)`; positive means φ separates `f` from `g`.
pub fn certificate_margin(
    cert: &SublinearFunctional,
    f: &VectorStepFunction,
    g: &VectorStepFunction,
) -> Result<f64> {
    Ok(certificate_integral(cert, f)? - certificate_integral(cert, g)?)
}

fn magnitude(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
}

/// `x ≺ y`: descending partial sums of `x` never exceed those of `y`, and
/// the totals agree.
pub fn vector_majorize(x: &[f64], y: &[f64]) -> Result<bool> {
    vector_majorize_with(x, y, &Tolerance::default())
}

pub fn vector_majorize_with(x: &[f64], y: &[f64], tol: &Tolerance) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::Dimension {
            expected: x.len(),
            found: y.len(),
        });
    }
    let mut xs = x.to_vec();
    let mut ys = y.to_vec();
    xs.sort_by(|a, b| b.total_cmp(a));
    ys.sort_by(|a, b| b.total_cmp(a));
    let scale: f64 = xs.iter().chain(&ys).map(|v| v.abs()).sum();
    let slack = tol.slack(scale, 0.0);
    let (mut sx, mut sy) = (0.0, 0.0);
    for (a, b) in xs.iter().zip(&ys) {
        sx += a;
        sy += b;
        if sx > sy + slack {
            return Ok(false);
        }
    }
    Ok((sx - sy).abs() <= slack)
}

/// A doubly stochastic matrix `S` (counting measures) with `S y = x`, built
/// from at most `len − 1` two-coordinate averaging steps.
pub fn hlp_witness(x: &[f64], y: &[f64]) -> Result<DoublyStochasticKernel> {
    hlp_witness_with(x, y, &Tolerance::default())
}

pub fn hlp_witness_with(x: &[f64], y: &[f64], tol: &Tolerance) -> Result<DoublyStochasticKernel> {
    if !vector_majorize_with(x, y, tol)? {
        return Err(Error::NotMajorized("x is not majorized by y".into()));
    }
    let n = x.len();
    let space = FiniteMeasureSpace::counting(n)?;
    let desc = |v: &[f64]| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| v[b].total_cmp(&v[a]));
        idx
    };
    let (x_order, y_order) = (desc(x), desc(y));
    let target: Vec<f64> = x_order.iter().map(|&i| x[i]).collect();
    let mut z: Vec<f64> = y_order.iter().map(|&i| y[i]).collect();
    // z = M y throughout; M starts as the sorting permutation of y
    let mut m: Vec<Vec<f64>> = y_order
        .iter()
        .map(|&j| {
            let mut row = vec![0.0; n];
            row[j] = 1.0;
            row
        })
        .collect();

    let slack = tol.slack(magnitude(x).max(magnitude(y)), 0.0);
    for _ in 0..n {
        let Some(j) = (0..n).rev().find(|&j| z[j] > target[j] + slack) else {
            break;
        };
        let Some(k) = (j + 1..n).find(|&k| z[k] < target[k] - slack) else {
            break;
        };
        let delta = (z[j] - target[j]).min(target[k] - z[k]);
        let mix = delta / (z[j] - z[k]);
        let (rj, rk) = (m[j].clone(), m[k].clone());
        for c in 0..n {
            m[j][c] = (1.0 - mix) * rj[c] + mix * rk[c];
            m[k][c] = mix * rj[c] + (1.0 - mix) * rk[c];
        }
        if z[j] - target[j] <= target[k] - z[k] {
            z[k] += z[j] - target[j];
            z[j] = target[j];
        } else {
            z[j] -= target[k] - z[k];
            z[k] = target[k];
        }
    }

    let mut table = vec![Vec::new(); n];
    for (rank, &i) in x_order.iter().enumerate() {
        table[i] = m[rank].iter().map(|v| v.max(0.0)).collect();
    }
    let witness = DoublyStochasticKernel::new(space.clone(), space.clone(), table)?;
    let image = witness.apply(&VectorStepFunction::scalar(space, y.to_vec())?)?;
    let err = image
        .scalar_values()?
        .iter()
        .zip(x)
        .fold(0.0, |e: f64, (a, b)| e.max((a - b).abs()));
    if err > tol.slack(magnitude(x).max(magnitude(y)), 0.0) {
        return Err(Error::InvalidWitness(format!(
            "averaging steps reproduce x only to {err}"
        )));
    }
    Ok(witness)
}

/// `p / q` with `q ≤ max_den` within `1e-12` relative error, if any.
fn as_fraction(w: f64, max_den: u64) -> Option<(u64, u64)> {
    let (mut h0, mut h1, mut k0, mut k1) = (0u64, 1u64, 1u64, 0u64);
    let mut r = w;
    for _ in 0..64 {
        let a = r.floor();
        if a > 1e15 {
            break;
        }
        let a = a as u64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if ((h1 as f64 / k1 as f64) - w).abs() <= 1e-12 * w {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac <= 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    None
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Largest common grid the continuous witness will expand to.
pub const MAX_GRID_CELLS: u64 = 2048;

/// Doubly stochastic kernel `D` with `apply(D, g) = f` for continuous
/// majorization `f ≺ g` between scalar functions whose weights are rational.
///
/// Both spaces are cut into a common grid of equal cells, the vector witness
/// is built there, and its blocks are summed back onto the original atoms.
pub fn continuous_witness(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
) -> Result<DoublyStochasticKernel> {
    continuous_witness_with(f, g, &Tolerance::default())
}

pub fn continuous_witness_with(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    tol: &Tolerance,
) -> Result<DoublyStochasticKernel> {
    if !continuous_majorize_check_with(f, g, tol)? {
        return Err(Error::NotMajorized("f is not majorized by g".into()));
    }
    let fractions = f
        .space()
        .weights()
        .iter()
        .chain(g.space().weights())
        .map(|&w| {
            as_fraction(w, 1_000_000)
                .ok_or_else(|| Error::Unsupported(format!("weight {w} is not a small rational")))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut lcm: u64 = 1;
    for &(_, q) in &fractions {
        lcm = lcm / gcd(lcm, q) * q;
        if lcm > MAX_GRID_CELLS {
            return Err(Error::Unsupported(format!(
                "common grid exceeds {MAX_GRID_CELLS} cells"
            )));
        }
    }
    let cells: Vec<u64> = fractions.iter().map(|&(p, q)| p * (lcm / q)).collect();
    let (fc, gc) = cells.split_at(f.len());
    let (nf, ng): (u64, u64) = (fc.iter().sum(), gc.iter().sum());
    if nf != ng {
        return Err(Error::MassMismatch {
            left: f.space().total_mass(),
            right: g.space().total_mass(),
        });
    }
    if nf > MAX_GRID_CELLS {
        return Err(Error::Unsupported(format!(
            "common grid needs {nf} cells, limit is {MAX_GRID_CELLS}"
        )));
    }
    let expand = |h: &VectorStepFunction, counts: &[u64]| -> Result<(Vec<f64>, Vec<usize>)> {
        let values = h.scalar_values()?;
        let mut out = Vec::new();
        let mut owner = Vec::new();
        for (atom, (&v, &c)) in values.iter().zip(counts).enumerate() {
            for _ in 0..c {
                out.push(v);
                owner.push(atom);
            }
        }
        Ok((out, owner))
    };
    let (x, x_owner) = expand(f, fc)?;
    let (y, y_owner) = expand(g, gc)?;
    let grid = hlp_witness_with(&x, &y, tol)?;

    let mut blocks = vec![vec![0.0; g.len()]; f.len()];
    for (a, row) in grid.table().iter().enumerate() {
        for (b, &s) in row.iter().enumerate() {
            blocks[x_owner[a]][y_owner[b]] += s;
        }
    }
    // K(i, j) = C_ij / (N_i ν_j)
    let table = blocks
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, c)| c / (fc[i] as f64 * g.space().weight(j)))
                .collect()
        })
        .collect();
    DoublyStochasticKernel::new(g.space().clone(), f.space().clone(), table)
}

fn feasibility_system(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    doubly: bool,
) -> Result<FeasibilitySystem> {
    if f.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    let (m, p, n) = (f.len(), g.len(), f.dim());
    let (mu, nu) = (f.space().weights(), g.space().weights());
    let rows = m * n + p + if doubly { m } else { 0 };
    let cols = m * p;
    let mut a = vec![vec![0.0; cols]; rows];
    let mut b = vec![0.0; rows];
    for i in 0..m {
        for k in 0..n {
            let r = i * n + k;
            for j in 0..p {
                a[r][i * p + j] = nu[j] * g.row(j)[k];
            }
            b[r] = f.row(i)[k];
        }
    }
    for j in 0..p {
        let r = m * n + j;
        for i in 0..m {
            a[r][i * p + j] = mu[i];
        }
        b[r] = 1.0;
    }
    if doubly {
        for i in 0..m {
            let r = m * n + p + i;
            for j in 0..p {
                a[r][i * p + j] = nu[j];
            }
            b[r] = 1.0;
        }
    }
    FeasibilitySystem::new(a, b)
}

fn witness_from(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    x: &[f64],
    tol: &Tolerance,
) -> Result<StochasticKernel> {
    let p = g.len();
    let table: Vec<Vec<f64>> = x
        .chunks(p)
        .map(|row| row.iter().map(|v| v.max(0.0)).collect())
        .collect();
    let k = StochasticKernel::new(g.space().clone(), f.space().clone(), table)?;
    let image = k.apply(g)?;
    let scale = f
        .values()
        .iter()
        .chain(g.values())
        .flatten()
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    let err = image.max_abs_difference(f);
    if err > tol.slack(scale, 0.0) {
        return Err(Error::InvalidWitness(format!(
            "kernel reproduces f only to {err}"
        )));
    }
    Ok(k)
}

fn certificate_from(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    y: &[f64],
    doubly: bool,
    tol: &Tolerance,
) -> Result<MajorizationVerdict> {
    let (m, p, n) = (f.len(), g.len(), f.dim());
    let mu = f.space().weights();
    let pieces = (0..m)
        .map(|i| {
            let mut c: Vec<f64> = y[i * n..(i + 1) * n].iter().map(|v| v / mu[i]).collect();
            if doubly {
                c.push(y[m * n + p + i] / mu[i]);
            }
            c
        })
        .collect();
    let cert = SublinearFunctional::new(pieces)?;
    let margin = certificate_margin(&cert, f, g)?;
    if margin.is_nan() || margin < tol.certificate_margin {
        return Err(Error::Ambiguous(format!(
            "certificate separates by only {margin}"
        )));
    }
    Ok(MajorizationVerdict::fails(cert, margin))
}

fn decide(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    doubly: bool,
    opts: &MajorizeOptions,
) -> Result<MajorizationVerdict> {
    if f == g {
        let id = StochasticKernel::identity(f.space());
        return Ok(MajorizationVerdict::holds(if doubly {
            Witness::Doubly(id.into_doubly_stochastic()?)
        } else {
            Witness::Stochastic(id)
        }));
    }
    let sys = feasibility_system(f, g, doubly)?;
    let read = |outcome: FeasibilityOutcome| match outcome {
        FeasibilityOutcome::Feasible(x) => {
            let k = witness_from(f, g, &x, &opts.tolerance)?;
            Ok(MajorizationVerdict::holds(if doubly {
                Witness::Doubly(k.into_doubly_stochastic()?)
            } else {
                Witness::Stochastic(k)
            }))
        }
        FeasibilityOutcome::Infeasible(y) => certificate_from(f, g, &y, doubly, &opts.tolerance),
    };
    match read(solve_feasibility_with(&sys, &opts.solver)?) {
        // a working-precision answer that fails its replay is redone exactly
        Err(_) if !opts.solver.exact => read(solve_feasibility_with(
            &sys,
            &SolverConfig {
                exact: true,
                ..opts.solver
            },
        )?),
        verdict => verdict,
    }
}

/// Matrix majorization `f ≺_M g` with a stochastic-kernel witness or a
/// separating sublinear certificate.
pub fn matrix_majorize(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
) -> Result<MajorizationVerdict> {
    matrix_majorize_with(f, g, &MajorizeOptions::default())
}

pub fn matrix_majorize_with(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    opts: &MajorizeOptions,
) -> Result<MajorizationVerdict> {
    decide(f, g, false, opts)
}

/// Multivariate majorization: a doubly stochastic kernel maps `g` onto `f`.
pub fn multivariate_majorize(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
) -> Result<MajorizationVerdict> {
    multivariate_majorize_with(f, g, &MajorizeOptions::default())
}

pub fn multivariate_majorize_with(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    opts: &MajorizeOptions,
) -> Result<MajorizationVerdict> {
    let (a, b) = (f.space().total_mass(), g.space().total_mass());
    if !opts.tolerance.eq(a, b) {
        return Err(Error::MassMismatch { left: a, right: b });
    }
    decide(f, g, true, opts)
}

/// The hinge family deciding scalar continuous majorization on equal masses:
/// `±identity` and `u ↦ (u − t)₊` at every value taken by either function.
pub fn hinge_family(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
) -> Result<Vec<ConvexFunctional>> {
    let mut kinks: Vec<f64> = f
        .scalar_values()?
        .into_iter()
        .chain(g.scalar_values()?)
        .collect();
    kinks.sort_by(f64::total_cmp);
    kinks.dedup();
    let mut family = vec![
        ConvexFunctional::linear_scalar(1.0),
        ConvexFunctional::linear_scalar(-1.0),
    ];
    family.extend(kinks.into_iter().map(ConvexFunctional::hinge));
    Ok(family)
}

/// `∫ φ(f) dμ ≤ ∫ φ(g) dν` for every member of [`hinge_family`].
pub fn hinge_criterion(f: &VectorStepFunction, g: &VectorStepFunction) -> Result<bool> {
    hinge_criterion_with(f, g, &Tolerance::default())
}

pub fn hinge_criterion_with(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    tol: &Tolerance,
) -> Result<bool> {
    let (a, b) = (f.space().total_mass(), g.space().total_mass());
    if !tol.eq(a, b) {
        return Err(Error::MassMismatch { left: a, right: b });
    }
    let scale = f.l1_norm().max(g.l1_norm());
    for phi in hinge_family(f, g)? {
        let (lhs, rhs) = (functional_integral(&phi, f)?, functional_integral(&phi, g)?);
        if lhs > rhs + tol.slack(scale, 0.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For scalar `f ⊀ g` on equal masses: the hinge-family member with the largest
/// violation, homogenized to a sublinear functional evaluated at `(v, 1)`.
pub fn hinge_certificate(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
) -> Result<(SublinearFunctional, f64)> {
    let mut best: Option<(SublinearFunctional, f64)> = None;
    for phi in hinge_family(f, g)? {
        let psi = phi.perspective();
        let margin = certificate_margin(&psi, f, g)?;
        if best.as_ref().is_none_or(|(_, m)| margin > *m) {
            best = Some((psi, margin));
        }
    }
    let (psi, margin) = best.expect("hinge family is never empty");
    if margin <= 0.0 {
        return Err(Error::InvalidWitness(
            "no hinge functional separates f from g".into(),
        ));
    }
    Ok((psi, margin))
}

/// Scalar majorization verdict. Counting measures of equal size go through
/// the vector witness; other equal-mass spaces through the common-grid
/// witness, or the doubly stochastic LP when weights are not small rationals.
pub fn scalar_verdict(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    opts: &MajorizeOptions,
) -> Result<MajorizationVerdict> {
    let (x, y) = (f.scalar_values()?, g.scalar_values()?);
    if f == g {
        return Ok(MajorizationVerdict::holds(Witness::Doubly(
            DoublyStochasticKernel::identity(f.space()),
        )));
    }
    let counting = |s: &FiniteMeasureSpace| s.weights().iter().all(|&w| w == 1.0);
    let holds = if counting(f.space()) && counting(g.space()) && x.len() == y.len() {
        vector_majorize_with(&x, &y, &opts.tolerance)?
    } else {
        continuous_majorize_check_with(f, g, &opts.tolerance)?
    };
    if !holds {
        let (cert, margin) = hinge_certificate(f, g)?;
        return Ok(MajorizationVerdict::fails(cert, margin));
    }
    let witness = if counting(f.space()) && counting(g.space()) && x.len() == y.len() {
        hlp_witness_with(&x, &y, &opts.tolerance)?
    } else {
        match continuous_witness_with(f, g, &opts.tolerance) {
            Ok(w) => w,
            Err(Error::Unsupported(_)) => {
                let v = multivariate_majorize_with(f, g, opts)?;
                return Ok(v);
            }
            Err(e) => return Err(e),
        }
    };
    Ok(MajorizationVerdict::holds(Witness::Doubly(witness)))
}

/// Worst `Σ ν φ(g) − Σ μ φ(f)` over `trials` sampled nonnegative sublinear
/// functionals, plus any `extra` functionals supplied.
pub fn sublinear_sweep(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    sublinear_sweep_with(f, g, trials, seed, &[])
}

pub fn sublinear_sweep_with(
    f: &VectorStepFunction,
    g: &VectorStepFunction,
    trials: usize,
    seed: u64,
    extra: &[SublinearFunctional],
) -> Result<f64> {
    if f.dim() != g.dim() {
        return Err(Error::Dimension {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::INFINITY;
    for t in 0..trials {
        let phi = sample_sublinear(f.dim(), 1 + t % 4, true, rng.random())?;
        worst = worst.min(-certificate_margin(&phi, f, g)?);
    }
    for phi in extra {
        worst = worst.min(-certificate_margin(phi, f, g)?);
    }
    Ok(worst)
}

/// Doubly stochastic form of a matrix-majorization witness after reweighting
/// both spaces by the positive densities `h` and `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reweighting {
    /// `D = T_{1/h} ∘ S ∘ T_k`, from `(Y, k dν)` to `(X, h dμ)`.
    pub kernel: DoublyStochasticKernel,
    pub alpha: FiniteMeasureSpace,
    pub beta: FiniteMeasureSpace,
    /// `f / h` over `alpha`.
    pub f_ratio: VectorStepFunction,
    /// `g / k` over `beta`.
    pub g_ratio: VectorStepFunction,
}

fn close(a: &VectorStepFunction, b: &VectorStepFunction, tol: &Tolerance) -> bool {
    let scale = a
        .values()
        .iter()
        .chain(b.values())
        .flatten()
        .fold(0.0, |m: f64, v| m.max(v.abs()));
    a.max_abs_difference(b) <= tol.slack(scale, 0.0)
}

/// Given a stochastic `S` with `S g = f` and `S k = h`, builds the doubly
/// stochastic `D` mapping `g/k` to `f/h` between `β = k dν` and `α = h dμ`.
pub fn reweight_to_multivariate(
    f: &VectorStepFunction,
    h: &VectorStepFunction,
    g: &VectorStepFunction,
    k: &VectorStepFunction,
    s: &StochasticKernel,
) -> Result<Reweighting> {
    let tol = Tolerance::default();
    let (hv, kv) = (positive_values(h, "h")?, positive_values(k, "k")?);
    if !close(&s.apply(g)?, f, &tol) {
        return Err(Error::InvalidWitness("S g differs from f".into()));
    }
    if !close(&s.apply(k)?, h, &tol) {
        return Err(Error::InvalidWitness("S k differs from h".into()));
    }
    let (mu, nu) = (f.space(), g.space());
    let alpha = mu.reweighted(&hv)?;
    let beta = nu.reweighted(&kv)?;
    let inv_h = VectorStepFunction::scalar(mu.clone(), hv.iter().map(|v| 1.0 / v).collect())?;
    let k_on_beta = k.with_space(beta.clone())?;
    let t_inv_h = multiplication_kernel(&inv_h, mu, &alpha)?;
    let t_k = multiplication_kernel(&k_on_beta, &beta, nu)?;
    let kernel = t_inv_h
        .compose(&s.compose(&t_k)?)?
        .into_doubly_stochastic()?;
    Ok(Reweighting {
        kernel,
        f_ratio: f.divide_by(h)?.with_space(alpha.clone())?,
        g_ratio: g.divide_by(k)?.with_space(beta.clone())?,
        alpha,
        beta,
    })
}

/// The converse construction `S = T_h ∘ D ∘ T_{1/k}` from `(Y, ν)` to `(X, μ)`.
pub fn reweight_to_stochastic(
    d: &DoublyStochasticKernel,
    h: &VectorStepFunction,
    k: &VectorStepFunction,
) -> Result<StochasticKernel> {
    let (alpha, beta) = (d.codomain(), d.domain());
    let h_alpha = h.with_space(alpha.clone())?;
    let mu = multiplication_target(&h_alpha, alpha)?;
    let kv = positive_values(k, "k")?;
    let nu = FiniteMeasureSpace::new(beta.weights().iter().zip(&kv).map(|(b, k)| b / k).collect())?;
    let inv_k = VectorStepFunction::scalar(nu.clone(), kv.iter().map(|v| 1.0 / v).collect())?;
    let t_h = multiplication_kernel(&h_alpha, alpha, &mu)?;
    let t_inv_k = multiplication_kernel(&inv_k, &nu, beta)?;
    t_h.compose(&d.as_stochastic().compose(&t_inv_k)?)
}

/// The three scalar predicates that are expected to agree when
/// `∫ h dμ = ∫ k dν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarEquivalenceReport {
    /// `(f, h) ≺_M (g, k)` by LP feasibility.
    pub stochastic: bool,
    /// `∫ φ(f/h) h dμ ≤ ∫ φ(g/k) k dν` over the hinge family.
    pub convex: bool,
    /// `f/h` multivariate-majorized by `g/k` under `α = h dμ`, `β = k dν`.
    pub doubly_stochastic: bool,
    /// Continuous majorization `f/h ≺ g/k` by partial integrals.
    pub ratio_majorized: bool,
    /// Continuous majorization in the opposite orientation, `g/k ≺ f/h`.
    pub reverse_ratio_majorized: bool,
    /// `stochastic`, `convex` and `doubly_stochastic` coincide.
    pub agree: bool,
}

pub fn scalar_equivalence_report(
    f: &VectorStepFunction,
    h: &VectorStepFunction,
    g: &VectorStepFunction,
    k: &VectorStepFunction,
) -> Result<ScalarEquivalenceReport> {
    scalar_equivalence_report_with(f, h, g, k, &MajorizeOptions::default())
}

pub fn scalar_equivalence_report_with(
    f: &VectorStepFunction,
    h: &VectorStepFunction,
    g: &VectorStepFunction,
    k: &VectorStepFunction,
    opts: &MajorizeOptions,
) -> Result<ScalarEquivalenceReport> {
    f.ensure_scalar()?;
    g.ensure_scalar()?;
    let (hv, kv) = (positive_values(h, "h")?, positive_values(k, "k")?);
    f.space().ensure_matches(h.space(), "f vs h")?;
    g.space().ensure_matches(k.space(), "g vs k")?;
    let (ih, ik) = (h.integral()[0], k.integral()[0]);
    if !opts.tolerance.eq(ih, ik) {
        return Err(Error::MassMismatch {
            left: ih,
            right: ik,
        });
    }

    let stochastic = matrix_majorize_with(&f.stack(h)?, &g.stack(k)?, opts)?.holds;

    let alpha = f.space().reweighted(&hv)?;
    let beta = g.space().reweighted(&kv)?;
    let u = f.divide_by(h)?.with_space(alpha)?;
    let v = g.divide_by(k)?.with_space(beta)?;

    let scale = f.l1_norm().max(g.l1_norm());
    let mut convex = true;
    for phi in hinge_family(&u, &v)? {
        let lhs = phi_divergence(&phi, f, h)?;
        let rhs = phi_divergence(&phi, g, k)?;
        if lhs > rhs + opts.tolerance.slack(scale, 0.0) {
            convex = false;
            break;
        }
    }

    let doubly_stochastic = multivariate_majorize_with(&u, &v, opts)?.holds;
    let ratio_majorized = continuous_majorize_check_with(&u, &v, &opts.tolerance)?;
    let reverse_ratio_majorized = continuous_majorize_check_with(&v, &u, &opts.tolerance)?;
    Ok(ScalarEquivalenceReport {
        stochastic,
        convex,
        doubly_stochastic,
        ratio_majorized,
        reverse_ratio_majorized,
        agree: stochastic == convex && convex == doubly_stochastic,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::StochasticKernel;

    fn rows(m: &[[f64; 2]]) -> VectorStepFunction {
        let space = FiniteMeasureSpace::counting(m.len()).unwrap();
        VectorStepFunction::new(space, m.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn vector_examples() {
        assert!(vector_majorize(&[2.0, 2.0], &[3.0, 1.0]).unwrap());
        assert!(!vector_majorize(&[3.0, 1.0], &[2.0, 2.0]).unwrap());
        assert!(vector_majorize(&[1.0, 5.0, 3.0], &[3.0, 1.0, 5.0]).unwrap());
        assert!(vector_majorize(&[3.0, 1.0, 5.0], &[1.0, 5.0, 3.0]).unwrap());
        assert!(!vector_majorize(&[1.0, 1.0], &[1.0, 2.0]).unwrap());
        assert!(vector_majorize(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn hlp_examples() {
        let id = hlp_witness(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(
            id.table(),
            &[
                vec![1.0, 0.0, 0.0],
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0]
            ]
        );
        let s = hlp_witness(&[2.0, 2.0], &[3.0, 1.0]).unwrap();
        assert_eq!(s.table(), &[vec![0.5, 0.5], vec![0.5, 0.5]]);
        assert!(matches!(
            hlp_witness(&[3.0, 1.0], &[2.0, 2.0]),
            Err(Error::NotMajorized(_))
        ));
    }

    #[test]
    fn fraction_recovery() {
        assert_eq!(as_fraction(0.5, 100), Some((1, 2)));
        assert_eq!(as_fraction(1.5, 100), Some((3, 2)));
        assert_eq!(as_fraction(1.0 / 3.0, 100), Some((1, 3)));
        assert_eq!(as_fraction(std::f64::consts::PI, 100), None);
    }

    #[test]
    fn continuous_witness_on_uneven_grids() {
        let f = VectorStepFunction::scalar(
            FiniteMeasureSpace::new(vec![0.5, 1.5]).unwrap(),
            vec![1.0, 1.0],
        )
        .unwrap();
        let g = VectorStepFunction::scalar(
            FiniteMeasureSpace::new(vec![1.0, 1.0]).unwrap(),
            vec![2.0, 0.0],
        )
        .unwrap();
        let d = continuous_witness(&f, &g).unwrap();
        assert!(d.apply(&g).unwrap().max_abs_difference(&f) < 1e-12);
        assert!(matches!(
            continuous_witness(&g, &f),
            Err(Error::NotMajorized(_))
        ));

        let irrational = VectorStepFunction::scalar(
            FiniteMeasureSpace::new(vec![std::f64::consts::PI, 2.0 - std::f64::consts::PI + 2.0])
                .unwrap(),
            vec![1.0, 1.0],
        )
        .unwrap();
        let g4 = VectorStepFunction::scalar(
            FiniteMeasureSpace::new(vec![2.0, 2.0]).unwrap(),
            vec![2.0, 0.0],
        )
        .unwrap();
        assert!(matches!(
            continuous_witness(&irrational, &g4),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn matrix_examples() {
        let g = rows(&[[2.0, 1.0], [0.0, 1.0]]);
        let f = rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let v = matrix_majorize(&g, &g).unwrap();
        assert!(v.holds);
        assert!(
            v.witness
                .unwrap()
                .kernel()
                .apply(&g)
                .unwrap()
                .max_abs_difference(&g)
                < 1e-12
        );

        let v = matrix_majorize(&f, &g).unwrap();
        assert!(v.holds);
        let k = v.witness.unwrap();
        for row in k.kernel().table() {
            for &e in row {
                assert!((e - 0.5).abs() < 1e-12);
            }
        }

        let v = matrix_majorize(&g, &f).unwrap();
        assert!(!v.holds);
        let cert = v.certificate.unwrap();
        let margin = certificate_margin(&cert, &g, &f).unwrap();
        assert!(margin >= 1e-7);
        assert!((margin - v.margin.unwrap()).abs() < 1e-12);

        let textbook = SublinearFunctional::new(vec![vec![1.0, -1.0], vec![0.0, 0.0]]).unwrap();
        assert_eq!(certificate_margin(&textbook, &g, &f).unwrap(), 1.0);
    }

    #[test]
    fn multivariate_examples() {
        let f = VectorStepFunction::counting(vec![1.0, 1.0]).unwrap();
        let g = VectorStepFunction::counting(vec![2.0, 0.0]).unwrap();
        let v = multivariate_majorize(&f, &g).unwrap();
        assert!(v.holds);
        assert!(matches!(v.witness, Some(Witness::Doubly(_))));
        let v = multivariate_majorize(&g, &f).unwrap();
        assert!(!v.holds);
        let cert = v.certificate.unwrap();
        assert_eq!(cert.dim(), 2);
        assert!(certificate_margin(&cert, &g, &f).unwrap() >= 1e-7);

        let three = VectorStepFunction::counting(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            multivariate_majorize(&three, &g),
            Err(Error::MassMismatch { .. })
        ));
    }

    #[test]
    fn sweep_examples() {
        let g = rows(&[[2.0, 1.0], [0.0, 1.0]]);
        let f = rows(&[[1.0, 1.0], [1.0, 1.0]]);
        assert!(sublinear_sweep(&g, &g, 50, 1).unwrap().abs() < 1e-12);
        assert!(sublinear_sweep(&f, &g, 1000, 2).unwrap() >= -1e-7);
        let textbook = SublinearFunctional::new(vec![vec![1.0, -1.0], vec![0.0, 0.0]]).unwrap();
        assert!(sublinear_sweep_with(&g, &f, 10, 3, &[textbook]).unwrap() <= -1.0 + 1e-7);
        assert_eq!(sublinear_sweep(&f, &g, 0, 0).unwrap(), f64::INFINITY);
    }

    #[test]
    fn unit_reweighting_keeps_kernel() {
        let s = FiniteMeasureSpace::counting(2).unwrap();
        let d = StochasticKernel::new(
            s.clone(),
            s.clone(),
            vec![vec![0.75, 0.25], vec![0.25, 0.75]],
        )
        .unwrap();
        let g = VectorStepFunction::counting(vec![4.0, 0.0]).unwrap();
        let f = d.apply(&g).unwrap();
        let one = VectorStepFunction::constant(s.clone(), 1, 1.0).unwrap();
        let r = reweight_to_multivariate(&f, &one, &g, &one, &d).unwrap();
        assert_eq!(r.alpha, s);
        assert_eq!(r.beta, s);
        assert_eq!(r.kernel.as_stochastic(), &d);

        let wrong = VectorStepFunction::counting(vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            reweight_to_multivariate(&wrong, &one, &g, &one, &d),
            Err(Error::InvalidWitness(_))
        ));
    }

    #[test]
    fn scalar_equivalence_identical_inputs() {
        let f = VectorStepFunction::counting(vec![1.0, -2.0, 0.5]).unwrap();
        let h = VectorStepFunction::counting(vec![1.0, 2.0, 0.5]).unwrap();
        let r = scalar_equivalence_report(&f, &h, &f, &h).unwrap();
        assert!(r.stochastic && r.convex && r.doubly_stochastic && r.agree);
        assert!(r.ratio_majorized && r.reverse_ratio_majorized);

        let k = VectorStepFunction::counting(vec![1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(
            scalar_equivalence_report(&f, &h, &f, &k),
            Err(Error::MassMismatch { .. })
        ));
    }

    #[test]
    fn scalar_verdict_paths() {
        let f = VectorStepFunction::counting(vec![2.0, 2.0]).unwrap();
        let g = VectorStepFunction::counting(vec![3.0, 1.0]).unwrap();
        let v = scalar_verdict(&f, &g, &MajorizeOptions::default()).unwrap();
        assert!(v.holds);
        let v = scalar_verdict(&g, &f, &MajorizeOptions::default()).unwrap();
        assert!(!v.holds);
        assert!(certificate_margin(v.certificate.as_ref().unwrap(), &g, &f).unwrap() > 0.0);

        let w = VectorStepFunction::scalar(
            FiniteMeasureSpace::new(vec![0.5, 1.5]).unwrap(),
            vec![2.0, 2.0],
        )
        .unwrap();
        let v = scalar_verdict(&w, &g, &MajorizeOptions::default()).unwrap();
        assert!(v.holds);
        assert!(
            v.witness
                .unwrap()
                .kernel()
                .apply(&g)
                .unwrap()
                .max_abs_difference(&w)
                < 1e-12
        );
    }

    #[test]
    fn verdict_json_shape() {
        let g = rows(&[[2.0, 1.0], [0.0, 1.0]]);
        let f = rows(&[[1.0, 1.0], [1.0, 1.0]]);
        let v = matrix_majorize(&g, &f).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["holds"], false);
        assert!(json["witness"].is_null());
        assert!(json["certificate"]["pieces"].is_array());
        let back: MajorizationVerdict = serde_json::from_value(json).unwrap();
        assert_eq!(back.holds, v.holds);
    }
}
