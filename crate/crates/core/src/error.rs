use thiserror::Error;

use crate::diagram::Defect;

/// Errors raised by diagram construction, evaluation and the higher-level builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("illegal arity {n_in}->{n_out} for {kind}")]
    IllegalArity {
        kind: &'static str,
        n_in: usize,
        n_out: usize,
    },
    #[error("arity mismatch: {outputs} outputs composed with {inputs} inputs")]
    ArityMismatch { outputs: usize, inputs: usize },
    #[error("pink spider is only defined for phases 0 and pi, got {0}")]
    PinkPhase(f64),
    #[error("W spider needs at least one output leg")]
    EmptyWSpider,
    #[error("diagram failed validation: {}", format_defects(.0))]
    Invalid(Vec<Defect>),
    #[error("{found} boundary wires exceed the qubit cap of {cap}")]
    CapExceeded { found: usize, cap: usize },
    #[error("contraction would create a rank-{rank} intermediate (limit {limit})")]
    IntermediateTooLarge { rank: usize, limit: usize },
    #[error("diagram contains time-dependent labels; supply a value for t")]
    UnresolvedParameter,
    #[error("shape mismatch: {left:?} vs {right:?}")]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("dimension {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("index {index} out of range (bound {bound})")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("row indices must differ, got {0} twice")]
    SameRow(usize),
    #[error("mixed qubit counts in controlled diagrams: {left} vs {right}")]
    MixedQubitCount { left: usize, right: usize },
    #[error("expected a controlled {expected}, got a controlled {found}")]
    WrongControlledKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("terms {first} and {second} do not commute")]
    NonCommuting { first: usize, second: usize },
    #[error("coefficient of term {0} is not real")]
    NonRealCoefficient(usize),
    #[error("all-identity Pauli string has no gadget; treat it as a global phase")]
    IdentityString,
    #[error("Pauli strings {0} and {1} commute")]
    Commuting(String, String),
    #[error("degenerate Hamiltonian: a and b are both zero")]
    Degenerate,
    #[error("{0}")]
    Precondition(String),
    #[error("eigenvalue solve failed")]
    EigenSolve,
    #[error("unknown rule {0}")]
    UnknownRule(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn format_defects(defects: &[Defect]) -> String {
    defects
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;
