use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

use crate::period_lab::CounterexampleReport;

/// Errors raised by the library.
///
/// Every variant maps to a stable, module-qualified code through
/// [`Error::code`], which the command-line driver reports verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{what} has {size} elements, above the enumeration cap {cap}")]
    FieldTooLarge { what: &'static str, size: u128, cap: u64 },
    #[error("division by zero in the residue field")]
    DivisionByZero,
    #[error("the zero element has no multiplicative order")]
    ZeroElement,

    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("bad precision: {0}")]
    BadPrecision(String),
    #[error("element of valuation {0} is not a unit")]
    NonUnitInverse(u32),

    #[error("projective map is not homogeneous of one common degree")]
    InhomogeneousMap,
    #[error("projective map has a common zero over the residue field")]
    BaseLocusNonempty,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("every output coordinate vanishes at the working precision")]
    PrecisionExhausted,
    #[error("orbit did not close within {0} iterations")]
    IterationBudgetExceeded(u64),

    #[error("residue cycle is degenerate: det(J - I) is not a unit")]
    Degenerate,
    #[error("not a cycle of the reduced map: {0}")]
    NotACycle(String),
    #[error("periodic-point search exceeded the branch budget of {0} nodes")]
    BranchBudgetExceeded(usize),
    #[error("point is not periodic at precision {0}")]
    NotPeriodicAtPrecision(u32),
    #[error("bound verification failed")]
    Counterexample(Box<CounterexampleReport>),

    #[error("{0} and {1} are not coprime")]
    NotCoprime(u64, u64),

    #[error("sieve cap exceeded: {0} > {1}")]
    CapExceeded(u64, u64),
    #[error("singular curve: discriminant vanishes in the residue field")]
    SingularCurve,
    #[error("bad tower: {0}")]
    BadTower(String),

    #[error("bad input: {0}")]
    BadInput(String),
}

impl Error {
    /// Stable `module.Variant` code.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NotPrime(_) => "residue_field.NotPrime",
            Error::FieldTooLarge { .. } => "residue_field.FieldTooLarge",
            Error::DivisionByZero => "residue_field.DivisionByZero",
            Error::ZeroElement => "residue_field.ZeroElement",
            Error::NotEisenstein(_) => "dvr_tower.NotEisenstein",
            Error::BadPrecision(_) => "dvr_tower.BadPrecision",
            Error::NonUnitInverse(_) => "dvr_tower.NonUnitInverse",
            Error::InhomogeneousMap => "dynamics_core.InhomogeneousMap",
            Error::BaseLocusNonempty => "dynamics_core.BaseLocusNonempty",
            Error::DimensionMismatch(_) => "dynamics_core.DimensionMismatch",
            Error::PrecisionExhausted => "dynamics_core.PrecisionExhausted",
            Error::IterationBudgetExceeded(_) => "dynamics_core.IterationBudgetExceeded",
            Error::Degenerate => "period_lab.Degenerate",
            Error::NotACycle(_) => "period_lab.NotACycle",
            Error::BranchBudgetExceeded(_) => "period_lab.BranchBudgetExceeded",
            Error::NotPeriodicAtPrecision(_) => "period_lab.NotPeriodicAtPrecision",
            Error::Counterexample(_) => "period_lab.Counterexample",
            Error::NotCoprime(..) => "power_map_lab.NotCoprime",
            Error::CapExceeded(..) => "torsion_sieve.CapExceeded",
            Error::SingularCurve => "torsion_sieve.SingularCurve",
            Error::BadTower(_) => "torsion_sieve.BadTower",
            Error::BadInput(_) => "BadInput",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
