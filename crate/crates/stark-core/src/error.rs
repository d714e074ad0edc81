use alloc::string::String;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant of a real quadratic field")]
    BadDiscriminant(i64),
    #[error("the zero ideal is not allowed here")]
    ZeroIdeal,
    #[error("lattice is not an ideal of the maximal order")]
    NotAnIdeal,
    #[error("ideal is not integral")]
    NotIntegral,
    #[error("prime {p} does not split in the field")]
    NonSplitPrime { p: u64 },
    #[error("character modulus {f} does not divide p - 1 = {}", p - 1)]
    BadF { f: u64, p: u64 },
    #[error("p = {0} is not an odd prime")]
    BadPrime(u64),
    #[error("ideal is not coprime to the modulus")]
    NotCoprime,
    #[error("no prime ideal found in the class below norm {0}")]
    ScanBoundExceeded(u64),
    #[error("the modulus is trivial")]
    TrivialModulus,
    #[error("element does not lie in the ideal")]
    NotInIdeal,
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("cone generator lies in the kernel of the character")]
    KernelGenerator,
    #[error("series constant term is not a unit")]
    NonUnitDivisor,
    #[error("series truncated below degree {needed}")]
    InsufficientDegree { needed: usize },
    #[error("p-adic modulus p^{0} exceeds the supported word size")]
    PrecisionOverflow(u32),
    #[error("negative p-adic valuation")]
    NegativeValuation,
    #[error("index out of range")]
    InvalidIndex,
    #[error("groups are inconsistent: {0}")]
    InconsistentGroups(String),
    #[error("dimensions are inconsistent: {0}")]
    InconsistentDimensions(String),
    #[error("lattice ranks differ")]
    RankMismatch,
    #[error("element is not invertible on the required component")]
    NotInvertible,
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("the regulator element is singular on the required component")]
    SingularRegulator,
    #[error("rational reconstruction failed: {0}")]
    ReconstructionFailed(String),
    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
