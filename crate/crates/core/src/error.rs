use thiserror::Error;

/// Errors shared by all evaluator modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero divisor")]
    ZeroDivisor,

    #[error("cannot factor zero")]
    CannotFactorZero,

    #[error("degree too small (need degree >= 1)")]
    DegreeTooSmall,

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("modulus not irreducible")]
    ModulusNotIrreducible,

    #[error("field too large for table mode: q^r = {size} exceeds budget {budget}")]
    FieldTooLarge { size: u128, budget: u64 },

    #[error("mixed fields: operands belong to different coefficient fields")]
    MixedFields,

    #[error("window {m} out of range 1..={r}")]
    WindowOutOfRange { m: usize, r: usize },

    #[error("character index {index} out of range 0..{order}")]
    CharIndexOutOfRange { index: u64, order: u64 },

    #[error("square roots need odd characteristic")]
    EvenCharacteristic,

    #[error("class representative must be nonzero")]
    ZeroClass,

    #[error("expected polynomial of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: String },

    #[error("oracle too large: needs {needed} steps, budget {budget}")]
    OracleTooLarge { needed: u128, budget: u64 },

    #[error("budget exceeded: needs {needed} steps, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("inequality violated: |S| = {lhs} exceeds bound {bound}")]
    BoundViolated { lhs: f64, bound: f64 },

    #[error("weight window {window} does not match required window {required}")]
    WeightWindowMismatch { window: usize, required: usize },

    #[error("parameter {name} out of range: {detail}")]
    BadParameter { name: &'static str, detail: String },

    #[error("invalid field spec '{spec}': {detail}")]
    BadFieldSpec { spec: String, detail: String },

    #[error("invalid polynomial text '{text}': {detail}")]
    BadPolyText { text: String, detail: String },

    #[error("cache io: {0}")]
    CacheIo(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
