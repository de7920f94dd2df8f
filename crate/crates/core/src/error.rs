use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("leq table is not reflexive at {0:?}")]
    NotReflexive(String),
    #[error("leq table is not transitive: {0:?} <= {1:?} <= {2:?} but not {0:?} <= {2:?}")]
    NotTransitive(String, String, String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("empty period")]
    EmptyPeriod,
    #[error("sequence is not bad: {0}")]
    NotBad(String),
    #[error("sequence is shift-fixed")]
    ShiftFixed,
    #[error("lengths are not nondecreasing")]
    NotInB,
    #[error("sequence is not 1-derivable")]
    NotDerivable,
    #[error("witness side condition m_(k+1) >= n_k fails at k = {0}")]
    WitnessCondition(usize),
    #[error("point never enters the piece")]
    NeverEnters,
    #[error("size guard exceeded: {0}")]
    SizeGuard(String),
    #[error("factor identity violated: {0}")]
    FactorIdentity(String),
    #[error("well-foundedness breach: {0}")]
    WellFoundedness(String),
    #[error("empty piece reached: {0}")]
    EmptyPiece(String),
    #[error("finset badness broken: {0}")]
    FinsetBadness(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
