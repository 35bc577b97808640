use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("exponent at byte {pos} does not fit the supported degree range")]
    ExponentOverflow { pos: usize },

    #[error("modulus must be at least 1")]
    ZeroModulus,

    /// `p^cap` does not fit a 64-bit modulus.
    #[error("prime power {p}^{cap} exceeds the 64-bit modulus range")]
    ModulusOverflow { p: u64, cap: u32 },

    /// An exact orbit term would exceed the bit budget. `last_safe_index` is
    /// the largest `n` whose term was computed (0 if none).
    #[error("term {next_index} exceeds the bit budget of {budget_bits} bits (last safe index {last_safe_index})")]
    BitBudgetExceeded {
        last_safe_index: usize,
        next_index: usize,
        budget_bits: u64,
    },

    #[error("could not classify the orbit of 0 within {steps} iterations")]
    Undecided { steps: usize },

    /// A primitive-part quotient was not exact. For a rigid divisibility
    /// sequence this cannot happen, so it is evidence against rigidity.
    #[error("non-exact division computing the primitive part of term {n}")]
    NonExactDivision { n: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{0} is not a vertex of the graph")]
    NotAVertex(u64),

    /// An edge the proof-ordered path needs is absent from the graph.
    #[error("graph has no edge ({from}, {to})")]
    MissingEdge { from: u64, to: u64 },

    #[error("malformed record: {0}")]
    Record(String),
}
