use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("roots are not real and finite: ({0}, {1}, {2})")]
    NonRealRoots(f64, f64, f64),
    #[error("roots must satisfy e3 < e2 < e1, got ({0}, {1}, {2})")]
    UnorderedRoots(f64, f64, f64),
    #[error("roots must sum to zero, got e1 + e2 + e3 = {0:e}")]
    NonZeroSum(f64),
    #[error("argument {re} + {im}i is within {radius:e} of a lattice point")]
    PoleProximity { re: f64, im: f64, radius: f64 },
    #[error("edge evaluation returned imaginary part {im:e} (real part {re})")]
    NonRealResult { re: f64, im: f64 },
    #[error("density is not positive at y = {y} (R = {value})")]
    NonPositiveDensity { y: f64, value: f64 },
    #[error("derivative of order {needed} requested but only {available} available")]
    MissingDerivative { needed: usize, available: usize },
    #[error("1 + <alpha, f> vanishes at y = {y}")]
    DenominatorZero { y: f64 },
    #[error("linear system is singular (pivot {pivot:e})")]
    SingularSystem { pivot: f64 },
    #[error("target is not of the reconstruction form: holdout residual {residual:e} exceeds {tol:e}")]
    NoLinearFit { residual: f64, tol: f64 },
    #[error("e_{alpha} = 0: branch degenerates")]
    ZeroEalpha { alpha: u8 },
    #[error("invalid branch {0}")]
    InvalidBranch(String),
    #[error("g2 = {0} is not positive")]
    NegativeG2(f64),
    #[error("degenerate branch: {0}")]
    DegenerateBranch(String),
    #[error("no solution of wp(gamma) = {target} on the fundamental rectangle")]
    GammaNotFound { target: f64 },
    #[error("e_beta = e_gamma: denominator constant vanishes")]
    ZeroDenominatorConstant,
    #[error("product R_hat * R is not constant: relative variation {variation:e}")]
    NotConstantProduct { variation: f64 },
    #[error("density has no zero near x0 = {x0}")]
    NotACusp { x0: f64 },
    #[error("log-log fit residual {residual:e} exceeds {tol:e}")]
    PoorFit { residual: f64, tol: f64 },
    #[error("ODE step size underflow at t = {t}")]
    IntegrationFailure { t: f64 },
    #[error("monodromy determinant drifted to {det} (lambda = {lambda})")]
    WronskianDrift { det: f64, lambda: f64 },
    #[error("found {found} band edges, expected {expected}")]
    EdgeCountMismatch {
        found: usize,
        expected: usize,
        samples: Vec<(f64, f64)>,
    },
    #[error("lambda range [{lo}, {hi}] does not enclose the spectrum edges")]
    RangeTooSmall { lo: f64, hi: f64 },
    #[error("inversion x -> y did not converge for x = {x}: bracket [{lo}, {hi}], residual {residual:e}")]
    NoConvergence {
        x: f64,
        lo: f64,
        hi: f64,
        residual: f64,
    },
    #[error("x(y) is not monotone for this density ({0}); sample it in y instead")]
    NotMonotone(String),
    #[error("operator is not admissible: {0}")]
    InvalidOperator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
