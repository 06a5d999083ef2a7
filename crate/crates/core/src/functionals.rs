//! Sublinear and convex functionals in max-of-finitely-many-pieces form.
//!
//! `SublinearFunctional` is `v ↦ max_k ⟨c_k, v⟩`; `ConvexFunctional` is
//! `v ↦ max_k (⟨a_k, v⟩ + b_k)`. The perspective `x·φ(v/x)` of a max-affine
//! `φ` is again max-linear in `(v, x)`, which ties φ-divergences to integrals
//! of sublinear functionals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{positive_values, VectorStepFunction};
use crate::tolerance::Tolerance;

/// Common evaluation interface.
pub trait Functional {
    fn dim(&self) -> usize;

    /// Value at `v`; `v.len()` must equal [`Functional::dim`].
    fn eval_unchecked(&self, v: &[f64]) -> f64;

    fn evaluate(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(self.eval_unchecked(v))
    }

    /// Jensen's inequality for convex functionals only holds on probability
    /// spaces; the sublinear version holds for any finite measure.
    fn needs_probability_space(&self) -> bool;
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SublinearFunctional {
    pieces: Vec<Vec<f64>>,
}

impl SublinearFunctional {
    pub fn new(pieces: Vec<Vec<f64>>) -> Result<Self> {
        let dim = pieces
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidFunctional("no pieces".into()))?;
        if dim == 0 {
            return Err(Error::InvalidFunctional("zero-dimensional piece".into()));
        }
        for p in &pieces {
            if p.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: p.len(),
                });
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidFunctional("non-finite coefficient".into()));
            }
        }
        Ok(SublinearFunctional { pieces })
    }

    /// `|v|` on ℝ as `max{v, -v}`.
    pub fn absolute_value() -> Self {
        SublinearFunctional {
            pieces: vec![vec![1.0], vec![-1.0]],
        }
    }

    /// `Σ_k |v_k|`, the ℓ¹ norm on ℝⁿ, as the max over all sign patterns.
    pub fn l1_norm(dim: usize) -> Self {
        let pieces = (0..1usize << dim)
            .map(|mask| {
                (0..dim)
                    .map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 })
                    .collect()
            })
            .collect();
        SublinearFunctional { pieces }
    }

    pub fn zero(dim: usize) -> Self {
        SublinearFunctional {
            pieces: vec![vec![0.0; dim]],
        }
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    /// True when the zero functional is one of the pieces, so `φ ≥ 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.pieces.iter().any(|p| p.iter().all(|&c| c == 0.0))
    }

    /// `max(φ, 0)`.
    pub fn with_zero_piece(mut self) -> Self {
        if !self.is_nonnegative() {
            let dim = self.dim();
            self.pieces.push(vec![0.0; dim]);
        }
        self
    }

    /// `max_k ‖c_k‖₁`, a Lipschitz constant for φ.
    pub fn lipschitz_bound(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// The max-affine functional `v ↦ ψ(v, 1)` on ℝⁿ⁻¹ (last coordinate as intercept).
    pub fn dehomogenize(&self) -> Result<ConvexFunctional> {
        if self.dim() < 2 {
            return Err(Error::InvalidFunctional(
                "dehomogenizing needs dimension at least 2".into(),
            ));
        }
        ConvexFunctional::new(
            self.pieces
                .iter()
                .map(|p| AffinePiece {
                    slope: p[..p.len() - 1].to_vec(),
                    intercept: p[p.len() - 1],
                })
                .collect(),
        )
    }
}

impl Functional for SublinearFunctional {
    fn dim(&self) -> usize {
        self.pieces[0].len()
    }

    fn eval_unchecked(&self, v: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| dot(p, v))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn needs_probability_space(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub slope: Vec<f64>,
    pub intercept: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexFunctional {
    pieces: Vec<AffinePiece>,
}

impl ConvexFunctional {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let dim = pieces
            .first()
            .map(|p| p.slope.len())
            .ok_or_else(|| Error::InvalidFunctional("no pieces".into()))?;
        if dim == 0 {
            return Err(Error::InvalidFunctional("zero-dimensional piece".into()));
        }
        for p in &pieces {
            if p.slope.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: p.slope.len(),
                });
            }
            if !p.intercept.is_finite() || p.slope.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidFunctional("non-finite coefficient".into()));
            }
        }
        Ok(ConvexFunctional { pieces })
    }

    /// Scalar max-affine function from `(slope, intercept)` pairs.
    pub fn scalar(pieces: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            pieces
                .iter()
                .map(|&(a, b)| AffinePiece {
                    slope: vec![a],
                    intercept: b,
                })
                .collect(),
        )
    }

    /// `u ↦ (u - t)₊`.
    pub fn hinge(t: f64) -> Self {
        ConvexFunctional {
            pieces: vec![
                AffinePiece {
                    slope: vec![1.0],
                    intercept: -t,
                },
                AffinePiece {
                    slope: vec![0.0],
                    intercept: 0.0,
                },
            ],
        }
    }

    /// `u ↦ c·u` on ℝ.
    pub fn linear_scalar(c: f64) -> Self {
        ConvexFunctional {
            pieces: vec![AffinePiece {
                slope: vec![c],
                intercept: 0.0,
            }],
        }
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.slope.iter().map(|c| c.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// `ψ(v, x) = x·φ(v/x)`, written as the max-linear `max_k (⟨a_k, v⟩ + b_k x)`.
    /// Only meaningful for `x > 0`.
    pub fn perspective(&self) -> SublinearFunctional {
        SublinearFunctional {
            pieces: self
                .pieces
                .iter()
                .map(|p| {
                    let mut c = p.slope.clone();
                    c.push(p.intercept);
                    c
                })
                .collect(),
        }
    }
}

impl Functional for ConvexFunctional {
    fn dim(&self) -> usize {
        self.pieces[0].slope.len()
    }

    fn eval_unchecked(&self, v: &[f64]) -> f64 {
        self.pieces
            .iter()
            .map(|p| dot(&p.slope, v) + p.intercept)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn needs_probability_space(&self) -> bool {
        true
    }
}

pub fn evaluate<F: Functional>(phi: &F, v: &[f64]) -> Result<f64> {
    phi.evaluate(v)
}

pub fn perspective(phi: &ConvexFunctional) -> SublinearFunctional {
    phi.perspective()
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum PieceJson {
    Linear(Vec<f64>),
    Affine(AffinePiece),
}

#[derive(Serialize, Deserialize)]
struct FunctionalJson {
    pieces: Vec<PieceJson>,
}

impl Serialize for SublinearFunctional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionalJson {
            pieces: self.pieces.iter().cloned().map(PieceJson::Linear).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SublinearFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = FunctionalJson::deserialize(d)?;
        let pieces = json
            .pieces
            .into_iter()
            .map(|p| match p {
                PieceJson::Linear(c) => Ok(c),
                PieceJson::Affine(a) if a.intercept == 0.0 => Ok(a.slope),
                PieceJson::Affine(_) => Err(serde::de::Error::custom(
                    "sublinear functional pieces cannot carry an intercept",
                )),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        SublinearFunctional::new(pieces).map_err(serde::de::Error::custom)
    }
}

impl Serialize for ConvexFunctional {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionalJson {
            pieces: self.pieces.iter().cloned().map(PieceJson::Affine).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexFunctional {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let json = FunctionalJson::deserialize(d)?;
        let pieces = json
            .pieces
            .into_iter()
            .map(|p| match p {
                PieceJson::Linear(slope) => AffinePiece {
                    slope,
                    intercept: 0.0,
                },
                PieceJson::Affine(a) => a,
            })
            .collect();
        ConvexFunctional::new(pieces).map_err(serde::de::Error::custom)
    }
}

/// `Σ_i μ_i φ(f_i)`.
pub fn functional_integral<F: Functional>(phi: &F, f: &VectorStepFunction) -> Result<f64> {
    if f.dim() != phi.dim() {
        return Err(Error::Dimension {
            expected: phi.dim(),
            found: f.dim(),
        });
    }
    Ok(f.values()
        .iter()
        .zip(f.space().weights())
        .map(|(row, w)| w * phi.eval_unchecked(row))
        .sum())
}

/// `∫ φ(f) dμ` for a sublinear φ.
pub fn sublinear_integral(phi: &SublinearFunctional, f: &VectorStepFunction) -> Result<f64> {
    functional_integral(phi, f)
}

/// `∫ h φ(f/h) dμ` for strictly positive scalar `h`.
pub fn phi_divergence(
    phi: &ConvexFunctional,
    f: &VectorStepFunction,
    h: &VectorStepFunction,
) -> Result<f64> {
    let hv = positive_values(h, "reference density")?;
    f.space().ensure_matches(h.space(), "divergence")?;
    if f.dim() != phi.dim() {
        return Err(Error::Dimension {
            expected: phi.dim(),
            found: f.dim(),
        });
    }
    let mut ratio = vec![0.0; f.dim()];
    Ok(f.values()
        .iter()
        .zip(&hv)
        .zip(f.space().weights())
        .map(|((row, &hi), w)| {
            for (r, v) in ratio.iter_mut().zip(row) {
                *r = v / hi;
            }
            w * hi * phi.eval_unchecked(&ratio)
        })
        .sum())
}

/// Jensen's inequality `φ(∫ f dμ) ≤ ∫ φ(f) dμ`, returned as `(lhs, rhs)`.
///
/// Convex functionals need `μ(X) = 1`; sublinear ones need no normalization.
pub fn jensen_check<F: Functional>(phi: &F, f: &VectorStepFunction) -> Result<(f64, f64)> {
    if phi.needs_probability_space() {
        let mass = f.space().total_mass();
        if !Tolerance::default().eq(mass, 1.0) {
            return Err(Error::NotProbability(mass));
        }
    }
    let rhs = functional_integral(phi, f)?;
    let lhs = phi.evaluate(&f.integral())?;
    Ok((lhs, rhs))
}

/// Random max-linear functional with `pieces` standard normal pieces, plus
/// the zero piece when `nonnegative`. Deterministic in `seed`.
pub fn sample_sublinear(
    dim: usize,
    pieces: usize,
    nonnegative: bool,
    seed: u64,
) -> Result<SublinearFunctional> {
    if pieces == 0 || dim == 0 {
        return Err(Error::InvalidFunctional(
            "need at least one piece and one dimension".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<f64>> = (0..pieces)
        .map(|_| (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect())
        .collect();
    if nonnegative {
        out.push(vec![0.0; dim]);
    }
    SublinearFunctional::new(out)
}

/// Random max-affine functional, standard normal slopes and intercepts.
pub fn sample_convex(dim: usize, pieces: usize, seed: u64) -> Result<ConvexFunctional> {
    if pieces == 0 || dim == 0 {
        return Err(Error::InvalidFunctional(
            "need at least one piece and one dimension".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ConvexFunctional::new(
        (0..pieces)
            .map(|_| AffinePiece {
                slope: (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect(),
                intercept: StandardNormal.sample(&mut rng),
            })
            .collect(),
    )
}
