use thiserror::Error;

/// Errors surfaced by backend construction, element arithmetic and the
/// theorem checkers. Variants carry enough context to be reported verbatim.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus is reducible: {0}")]
    ReducibleModulus(String),
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u64),
    #[error("coefficient characteristic conflicts with the group: {0}")]
    UnsupportedGroupCharacteristic(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("division by zero in expression")]
    ZeroDenominator,
    #[error("unknown group element {0}")]
    UnknownGroupElement(String),
    #[error("elements belong to different backends")]
    BackendMismatch,
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("element is not a unit")]
    NotAUnit,
    #[error("inverse not supported here: {0}")]
    UnsupportedInverse(String),
    #[error("set must be nonempty")]
    EmptySet,
    #[error("set elements must be nonzero")]
    ZeroElementInSet,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("evaluation points must be pairwise distinct and match the arity")]
    DuplicateAlpha,
    #[error("subspace is not stabilized by the given subring")]
    NotStabilized,
    #[error("subring is not multiplicatively closed or misses 1")]
    NotDivisionClosed,
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("operation not supported on this backend: {0}")]
    UnsupportedBackend(String),
    #[error("operation requires a commutative division backend")]
    NonCommutativeBackend,
    #[error("an exhaustive ratio minimizer is required, got a heuristic one")]
    HeuristicRho,
    #[error("sets contain a non-commuting pair")]
    CommutationFailure,
    #[error("first set must be pairwise commutative")]
    NonCommutativeA,
    #[error("leading sets must be pairwise commutative")]
    NonCommutativePrefix,
    #[error("witness verification failed: {0}")]
    WitnessCheckFailed(String),
    #[error("expected {expected} elements, got {got}")]
    WrongArity { expected: usize, got: usize },
    #[error("elements equal to 1 are not allowed here")]
    OneElement,
    #[error("hypothesis not satisfied: {0}")]
    HypothesisFailed(String),
    #[error("unit precondition failed: {0}")]
    UnitPreconditionFailed(String),
    #[error("commutative group algebra required (abelian group)")]
    NonAbelianAlgebra,
    #[error("exhaustive subspace enumeration needs a finite coefficient field")]
    InfiniteFieldExhaustive,
    #[error("lambda must be < 1 for fragment search")]
    LambdaTooLarge,
    #[error("subspace must be nonzero")]
    ZeroSubspace,
    #[error("sets live in different groups")]
    GroupMismatch,
    #[error("abelian group required")]
    NonAbelianGroup,
    #[error("group has torsion; embed through the group-algebra route")]
    TorsionPresent,
    #[error("checker is incompatible with this backend: {0}")]
    IncompatibleChecker(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("unsupported modulus: {0}")]
    UnsupportedModulus(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
