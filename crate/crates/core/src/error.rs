use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("denominator of {value} is divisible by {p}")]
    DenominatorDivisibleByP { value: String, p: u64 },
    #[error("cannot combine values of characteristic {left} and {right}")]
    CharacteristicMismatch { left: u64, right: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("characteristic {p} is not allowed for {family}: need p > {bound}")]
    BadCharacteristic { family: String, p: u64, bound: u64 },
    #[error("bad matrix size {size} for {family}")]
    BadSize { family: String, size: usize },
    #[error("invariant form is degenerate")]
    DegenerateForm,
    #[error("capacity exceeded at weight/degree {at}: {needed} basis elements > cap {cap}")]
    CapacityExceeded { at: u32, needed: usize, cap: usize },
    #[error("truncation overflow: depth {depth} exceeds truncation level {trunc} (max depth {})", trunc + 1)]
    TruncationOverflow { depth: u32, trunc: u32 },
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),
    #[error("ad-nilpotency order {order} of root vector {root} is not below p = {p}")]
    NilpotencyOrderTooLarge { root: String, order: u32, p: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}
