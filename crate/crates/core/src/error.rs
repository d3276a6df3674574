use thiserror::Error;

/// Failures raised by model construction, verification, spectra, propagation
/// and closed-form evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coupling p_{index} is zero")]
    ZeroCoupling { index: usize },
    #[error("slope b must be nonzero")]
    ZeroSlope,
    #[error("slopes r_{first} and r_{second} coincide")]
    DuplicateSlope { first: usize, second: usize },
    #[error("slope r_{index} is zero")]
    ZeroSlopeEntry { index: usize },
    #[error("offsets a_{first} and a_{second} coincide")]
    DuplicateOffset { first: usize, second: usize },
    #[error("parameter lists have mismatched lengths: {0}")]
    LengthMismatch(String),
    #[error("model needs at least {min} states, got {got}")]
    TooFewStates { min: usize, got: usize },
    #[error("invalid spin j = {0}: 2j must be a positive integer")]
    InvalidSpin(f64),
    #[error("cutoff {0} is below the minimum of 4")]
    CutoffTooSmall(usize),
    #[error("chain window [{n_min}, {n_max}] spans fewer than 5 sites")]
    WindowTooSmall { n_min: i64, n_max: i64 },
    #[error("invalid Bargmann index k = {0}")]
    InvalidBargmannIndex(f64),
    #[error("pencil is not gaugeable to a real symmetric form: {0}")]
    NotGaugeable(String),
    #[error("coefficient C_{degree} is not Hermitian (defect {defect:e})")]
    NotHermitian { degree: usize, defect: f64 },
    #[error("invalid pencil: {0}")]
    InvalidPencil(String),
    #[error("family parameters xi_{first} and xi_{second} coincide")]
    DegenerateXi { first: usize, second: usize },
    #[error("family parameter gamma_{0} is zero")]
    ZeroGamma(usize),
    #[error("root bracketing failed on interval [{lo}, {hi}]")]
    RootBracketFailure { lo: f64, hi: f64 },
    #[error("detuning epsilon must be nonzero")]
    ZeroDetuning,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("not a commuting partner: commutator norm {0:e}")]
    NotACommutingPartner(f64),
    #[error("secular poles are degenerate at u = {0}")]
    DegeneratePoles(f64),
    #[error("invalid secular specification: {0}")]
    InvalidSecular(String),
    #[error("step limit {0} exceeded")]
    StepLimitExceeded(usize),
    #[error("tolerance unreachable at t = {t}: {reason}")]
    ToleranceUnreachable { t: f64, reason: String },
    #[error("invalid propagation config: {0}")]
    InvalidConfig(String),
    #[error("horizon tail does not converge (differences {0:?})")]
    NonConvergentTail(Vec<f64>),
    #[error("probe state {0} lies outside the smallest cutoff")]
    ProbeOutsideCutoff(i64),
    #[error("invalid magnetic quantum numbers m = {m}, m' = {m_prime} for j = {j}")]
    InvalidMagneticQuantum { j: f64, m: f64, m_prime: f64 },
    #[error("state mu = {mu} is not in the k = {k} sector")]
    InvalidSectorState { k: f64, mu: f64 },
    #[error("hypergeometric series does not terminate (a = {a}, b = {b})")]
    NonTerminating { a: f64, b: f64 },
    #[error("hypergeometric denominator c = {c} reaches a non-positive integer")]
    PolePassed { c: f64 },
    #[error("argument {0} must be positive")]
    NonPositiveArgument(f64),
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error("task {task}: {source}")]
    InTask { task: String, source: Box<Error> },
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Whether the failure is a numerical one (tolerance, convergence, step
    /// control) rather than an invalid input.
    pub fn is_numerical(&self) -> bool {
        if let Error::InTask { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::RootBracketFailure { .. }
                | Error::StepLimitExceeded(_)
                | Error::ToleranceUnreachable { .. }
                | Error::NonConvergentTail(_)
                | Error::NotACommutingPartner(_)
        )
    }

    pub fn is_io(&self) -> bool {
        match self {
            Error::Io(_) => true,
            Error::InTask { source, .. } => source.is_io(),
            _ => false,
        }
    }

    pub(crate) fn in_task(self, task: &str) -> Self {
        Error::InTask {
            task: task.to_string(),
            source: Box::new(self),
        }
    }
}
