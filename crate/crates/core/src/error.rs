use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus must lie in the upper half plane (Im tau = {0})")]
    NonPositiveImaginaryPart(f64),

    #[error("point is {dist:.3e} from the lattice, inside the pole guard {guard:.3e}")]
    TooCloseToPole { dist: f64, guard: f64 },

    #[error("{what} did not converge (residual {residual:.3e})")]
    ConvergenceFailure { what: &'static str, residual: f64 },

    #[error("derivative sign cannot select a preimage (|wp'| = {wp_prime_abs:.3e})")]
    AmbiguousBranch { wp_prime_abs: f64 },

    #[error("branch jump at sample {index}: |db| = {step:.3e} exceeds bound {bound:.3e}")]
    BranchJump { index: usize, step: f64, bound: f64 },

    #[error("branch slope denominator wp(a) + 2 wp(b) vanishes ({0:.3e})")]
    DegenerateDenominator(f64),

    #[error("pair violates the exclusions a != -a, a != +-b ({0})")]
    DegeneratePair(&'static str),

    #[error("rectangular modulus required, got tau = {re} + {im}i")]
    RectangularRequired { re: f64, im: f64 },

    #[error("zeros at {first} and {second} are closer than three sample steps")]
    ResolutionTooCoarse { first: f64, second: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
