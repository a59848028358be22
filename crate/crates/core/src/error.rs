use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,
    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: BigUint, modulus: BigUint },
    #[error("moduli {0} and {1} are not coprime")]
    NotCoprime(BigUint, BigUint),
    #[error("{divisor} does not divide {multiple}")]
    NotDivisible { divisor: BigUint, multiple: BigUint },
    #[error("residue modulus {found} does not match expected modulus {expected}")]
    ModulusMismatch { expected: BigUint, found: BigUint },

    #[error("p-adic operands use different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("insufficient precision: need absolute precision {needed}, have {available}")]
    InsufficientPrecision { needed: i64, available: i64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("value is not a p-adic integer (valuation {0})")]
    NotIntegral(i64),

    #[error("{0} must be an odd prime")]
    NotOddPrime(u64),
    #[error("character value at {0} is not a (p-1)-st root of unity")]
    UnsupportedOrder(BigUint),
    #[error("character is not multiplicative: chi({a}*{b}) != chi({a})*chi({b}) modulo {modulus}")]
    NotMultiplicative { a: BigUint, b: BigUint, modulus: BigUint },
    #[error("character table is missing unit {0}")]
    MissingEntry(BigUint),
    #[error("character table entry for {0} is not a unit modulo the prime")]
    InvalidEntry(BigUint),
    #[error("character table value at 1 is not 1")]
    NotNormalized,
    #[error("characters are defined for different primes ({0} and {1})")]
    CharacterPrimeMismatch(u64, u64),
    #[error("cannot parse character spec {0:?}; expected triv, omega^<k> or table:<path>")]
    BadCharacterSpec(String),
    #[error("cannot load character table: {0}")]
    TableLoad(String),

    #[error("{multiple} is not a multiple of the conductor {conductor}")]
    NotMultipleOfConductor { conductor: BigUint, multiple: BigUint },
    #[error("level {coarse} exceeds level {fine}")]
    LevelOrder { coarse: u32, fine: u32 },
    #[error("level {level} is below the character level exponent {min}")]
    LevelTooLow { level: u32, min: u32 },
    #[error("precondition violated: {0}")]
    Precondition(String),
}
