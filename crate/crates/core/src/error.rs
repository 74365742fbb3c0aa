use thiserror::Error;

use crate::model::ObjectId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("shape error at {object}: {reason}")]
    Shape { object: ObjectId, reason: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid split plan: {0}")]
    Plan(String),

    #[error("object budget of {budget} exceeded during {stage} ({objects} objects)")]
    Budget { budget: usize, objects: usize, stage: String },

    #[error("{0} was already processed")]
    Idempotency(String),

    #[error("unresolved reference: {0}")]
    Reference(String),

    #[error("cannot discharge obligation on {sphere}: {remaining} intersection edge(s) remain")]
    PrematureDischarge { sphere: ObjectId, remaining: usize },

    #[error("ledger has {pending} pending obligation(s)")]
    IncompleteLedger { pending: usize },

    #[error("collision at distance < {n}: {detail}")]
    Collision { n: usize, detail: String },

    #[error("ball has {vertices} vertices, above the oracle limit of {limit}")]
    OracleScale { vertices: usize, limit: usize },
}
