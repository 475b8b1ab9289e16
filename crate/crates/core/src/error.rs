use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} must be an odd prime")]
    InvalidPrime(u64),
    #[error("precision M = {0} is out of range")]
    InvalidPrecision(u32),
    #[error("{value} is not a unit modulo {p}")]
    NotAUnit { value: u64, p: u64 },
    #[error("{value} is not a quadratic residue modulo {p}")]
    NonResidue { value: u64, p: u64 },
    #[error("a_p = {ap} is divisible by p = {p} (not ordinary)")]
    NonOrdinary { ap: u64, p: u64 },
    #[error("layer mismatch: {0} vs {1}")]
    LayerMismatch(u32, u32),
    #[error("context mismatch")]
    ContextMismatch,
    #[error("cannot project below layer 0")]
    BottomLayer,
    #[error("target layer {target} is not below source layer {source_layer}")]
    InvalidTarget { source_layer: u32, target: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("minor size {k} exceeds matrix dimensions {rows}x{cols}")]
    SizeTooLarge { k: usize, rows: usize, cols: usize },
    #[error("level {level} out of range 1..={max}")]
    LevelOutOfRange { level: usize, max: usize },
    #[error("invalid tower: {0}")]
    InvalidTower(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("bad reduction at {0}")]
    BadReduction(u64),
    #[error("prime {0} dividing N ramifies in K")]
    RamifiedPrime(u64),
    #[error("D_K = {0} gives a non-integral reduced norm (need D_K = 3 mod 4)")]
    NonIntegralNorm(u64),
    #[error("p = {p} does not split in Q(sqrt(-{d}))")]
    NotSplit { p: u64, d: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("malformed data: {0}")]
    Data(String),
}
