use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("line {line}: unknown element `{name}`")]
    UnknownElement { line: usize, name: String },

    #[error("line {line}: unknown vertex `{name}`")]
    UnknownVertex { line: usize, name: String },

    #[error("relation `{relation}` has arity {arity} but a tuple has {got} entries")]
    ArityMismatch {
        relation: String,
        arity: usize,
        got: usize,
    },

    #[error("duplicate name `{0}`")]
    DuplicateName(String),

    #[error("relation `{0}` of a template must be nonempty")]
    NonemptyRelationRequired(String),

    #[error("a template needs at least one relation")]
    EmptySignature,

    #[error("element index {index} out of range for a domain of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),

    #[error("vertex `{0}` is not an interior path vertex")]
    NotInterior(String),

    #[error("component is not balanced (cycle through {witness:?} has nonzero net orientation)")]
    Unbalanced { witness: Vec<String> },

    #[error("input digraph is not balanced")]
    UnbalancedInput,

    #[error(
        "template is trivial: element `{0}` carries a constant tuple, so CSP(A) has no NO instance"
    )]
    TrivialTemplate(String),

    #[error("identity `{0}` is not linear")]
    NonlinearIdentity(String),

    #[error("identity set violates the lifting shape: {0}")]
    ShapeViolation(String),

    #[error("zigzag witnesses do not satisfy the identities: {0}")]
    ZigzagWitnessFails(String),

    #[error("operation `{0}` is not a polymorphism of the template")]
    NotAPolymorphism(String),

    #[error("operation arity mismatch: {0}")]
    OpArityMismatch(String),

    #[error("map is not an endomorphism: {0}")]
    NotEndomorphism(String),

    #[error("internal invariant violated: {0}")]
    InternalInvariantViolation(String),

    #[error("{0} exceeds the supported arity of 64")]
    ArityTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
