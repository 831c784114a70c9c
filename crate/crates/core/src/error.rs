use thiserror::Error;

/// Every failure mode of the crate, reported distinctly so callers (and the
/// CLI exit-code mapping) can tell bad input from genuine numerical trouble.
#[derive(Debug, Error)]
pub enum Error {
    #[error("prime must be at least 2, got {0}")]
    InvalidPrime(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("prime mismatch: {left} vs {right}")]
    PrimeMismatch { left: u64, right: u64 },
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("division by a value indistinguishable from zero at precision O(p^{known_to})")]
    DivisionByZeroAtPrecision { known_to: i64 },
    #[error("requested {requested} digits but only {available} are known")]
    DigitsBeyondPrecision { requested: i64, available: i64 },
    #[error("digit positions 0..count are undefined for valuation {valuation} < 0")]
    NegativeValuationDigits { valuation: i64 },
    #[error("congruence modulus exponent {modulus} exceeds known precision {available}")]
    PrecisionTooLow { modulus: i64, available: i64 },
    #[error("exp argument must satisfy |x|_p <= 1/p (1/4 for p = 2); got valuation {valuation}")]
    ExpDomain { valuation: i64 },
    #[error("log argument must satisfy |x - 1|_p < 1; got valuation {valuation} for x - 1")]
    LogDomain { valuation: i64 },
    #[error("square root of a value that is zero at working precision")]
    SqrtOfZero,
    #[error("no square root: valuation {0} is odd")]
    SqrtOddValuation(i64),
    #[error("no square root: leading digit {digit} is not a quadratic residue mod {prime}")]
    SqrtNonResidue { digit: u64, prime: u64 },
    #[error("no square root in Q_2: unit must be 1 mod 8, got {unit_mod_8}")]
    SqrtTwoAdicDigits { unit_mod_8: u64 },
    #[error("Hensel seed {a0}: F(a0) = {value} != 0 (mod {prime})")]
    HenselNotRoot { a0: u64, prime: u64, value: u64 },
    #[error("Hensel seed {a0} is not simple: F'(a0) = 0 (mod {prime})")]
    HenselSingularDerivative { a0: u64, prime: u64 },
    #[error("polynomial coefficient {index} has negative valuation {valuation}")]
    CoefficientNotIntegral { index: usize, valuation: i64 },
    #[error("division by a polynomial that is zero at working precision")]
    DivisionByZeroPolynomial,
    #[error("divisor's leading coefficient must be a p-adic unit")]
    DivisorLeadingNotUnit,
    #[error(
        "polynomial division left a nonzero remainder at degree {index} (valuation {valuation})"
    )]
    NonZeroRemainder { index: usize, valuation: i64 },
    #[error("the two cofactor constructions disagree at coefficient {index}")]
    CofactorMismatch { index: usize },
    #[error("coupling must satisfy |J|_p <= 1/p (1/4 for p = 2)")]
    CouplingOutsideDomain,
    #[error("value is not in E_p (need |x|_p = 1 and |x - 1|_p <= 1/p)")]
    NotInEp,
    #[error("boundary value at position {index} is not in E_p")]
    BoundaryNotInEp { index: usize },
    #[error("explicit boundary has no value for level {level}")]
    BoundaryLevelMissing { level: u32 },
    #[error("boundary kind not supported here: {0}")]
    UnsupportedBoundary(&'static str),
    #[error("tree order k must be at least 1")]
    InvalidOrder,
    #[error("k = {0} exceeds the certified factorization range (k <= 64)")]
    OrderTooLargeForTable(u32),
    #[error("scan over p^{m} = {size} residues exceeds the enumeration limit")]
    ScanTooLarge { m: u32, size: u128 },
    #[error("volume of {vertices} vertices exceeds the enumeration cap {cap}")]
    CapExceeded { vertices: u128, cap: usize },
    #[error("closed-form count requires k >= 2")]
    ClosedFormUnsupportedOrder,
    #[error("partition function is zero at working precision")]
    ZeroPartitionFunction,
    #[error("bad input: {0}")]
    BadInput(String),
    #[error("internal arithmetic failure: {0}")]
    Internal(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Internal(format!("serialization failed: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
