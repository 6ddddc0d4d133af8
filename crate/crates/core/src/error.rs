use thiserror::Error;

/// Errors raised by model validation, analysis and the simulation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("rate matrix is not irreducible (assumption (I) violated)")]
    NotIrreducible,

    #[error("transform undefined at z = {z}: {component}")]
    Domain { component: String, z: String },

    #[error("regime undecidable under implemented criteria: mean undefined and no killing")]
    RegimeUndecidable,

    #[error("Condition (C) applies to transient regime only")]
    RecurrentRegime,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("continuous ladder structure unsupported; use a non-creeping test spec ({0})")]
    Creeping(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("refused: Condition (C) fails, the entrance law cannot be normalized to a probability measure")]
    ConditionFails,

    #[error("all particles killed before the first checkpoint; increase n or shrink checkpoint spacing")]
    AllKilled,

    #[error("empty sample: {0}")]
    Empty(String),

    #[error("replicate {index} failed: {source}")]
    Replicate {
        index: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
