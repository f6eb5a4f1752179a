use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("invalid extension degree {0}")]
    InvalidDegree(u32),
    #[error("modulus is reducible over F_{p}")]
    ReducibleModulus { p: u32 },
    #[error("modulus must be monic of degree {expected}, got {got:?}")]
    BadModulus { expected: u32, got: Vec<u32> },
    #[error("field of order {0} exceeds the table limit")]
    FieldTooLarge(u64),
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("{what} cap of {limit} exceeded")]
    CapExceeded { what: &'static str, limit: usize },
    #[error("subgroup is not contained in the ambient group")]
    NotSubgroup,
    #[error("level structure is not injective")]
    NotInjective,
    #[error("zero Drinfeld module (no non-constant coefficient)")]
    ZeroModule,
    #[error("zero skew polynomial")]
    ZeroPolynomial,
    #[error("element is not in the base field")]
    NotInBaseField,
    #[error("set is not an F_q-subspace")]
    NotSubspace,
    #[error("subspace is not stable under phi_t")]
    NotStable,
    #[error("isogeny division left a non-zero remainder")]
    IsogenyRemainder,
    #[error("internal consistency failure: {0}")]
    Consistency(String),
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),
    #[error("determinant is not a unit times a power of t")]
    BadDeterminant,
    #[error("summand for s = {s} is not integral")]
    NonIntegralSummand { s: usize },
    #[error("subgroup image is not unipotent")]
    NotUnipotent,
    #[error("element is not invariant under the subgroup")]
    NotInvariant,
    #[error("arithmetic overflow")]
    Overflow,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}
