use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("measure space needs at least one atom")]
    EmptySpace,
    #[error("atom {index} has non-positive or non-finite weight {weight}")]
    BadWeight { index: usize, weight: f64 },
    #[error("value table has {rows} rows but the space has {atoms} atoms")]
    RowCount { rows: usize, atoms: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("non-finite value at atom {atom}, component {component}")]
    NonFinite { atom: usize, component: usize },
    #[error("expected a scalar function, found dimension {0}")]
    NotScalar(usize),
    #[error("measure spaces do not match: {0}")]
    SpaceMismatch(String),
    #[error("total masses differ: {left} vs {right}")]
    MassMismatch { left: f64, right: f64 },
    #[error("t = {t} outside [0, {total}]")]
    OutOfRange { t: f64, total: f64 },
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid functional: {0}")]
    InvalidFunctional(String),
    #[error("expected strictly positive values: {0}")]
    NotPositive(String),
    #[error("convex Jensen check needs a probability space, total mass is {0}")]
    NotProbability(f64),
    #[error("relation does not hold: {0}")]
    NotMajorized(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("invalid feasibility system: {0}")]
    InvalidSystem(String),
    #[error("system has {entries} table entries, limit is {limit}")]
    TooLarge { entries: usize, limit: usize },
    #[error("simplex hit its iteration cap of {0}")]
    IterationLimit(usize),
    #[error("feasibility is ambiguous at working precision: {0}")]
    Ambiguous(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
