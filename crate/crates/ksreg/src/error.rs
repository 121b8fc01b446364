//! Crate-wide error type.
//!
//! All fallible operations in this crate return [`Result`]. The variants are
//! grouped by origin: series-algebra contract violations, invalid physical
//! parameters, chart domain errors, solver non-convergence, domain escapes of
//! the analytic propagator, and integrator failures. Conditions that are
//! *expected* in normal operation (e.g. an encounter orbit that never exits the
//! entry sphere, or a Cartesian integration driven into the collision) have
//! dedicated variants so callers can distinguish "wrong input" from "this
//! orbit genuinely does that".

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    // ───────────────────────── series algebra ─────────────────────────
    /// Two series with different variable counts or truncation orders were
    /// combined, or a point of the wrong dimension was supplied.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A requested exponent tuple lies outside the truncation order.
    #[error("exponent {exponent:?} has total degree {degree}, beyond truncation order {order}")]
    DegreeOutOfRange {
        /// Offending exponent tuple.
        exponent: Vec<u16>,
        /// Its total degree.
        degree: usize,
        /// The truncation order of the series.
        order: usize,
    },

    /// A real power `a^r` was requested for a series whose constant term is
    /// not strictly positive, so no real branch exists.
    #[error("series power with non-positive constant term {value:e}")]
    NonPositiveBase {
        /// Value (principal part) of the constant term.
        value: f64,
    },

    /// A non-finite number appeared where a finite one is required.
    #[error("non-finite value in {context}")]
    NonFinite {
        /// Description of the operation that produced it.
        context: String,
    },

    // ───────────────────────── parameters / charts ─────────────────────────
    /// A physical or numerical parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The requested KS chart is undefined at the given position (the point
    /// lies on the excluded half-line of that chart).
    #[error("KS chart {chart} undefined at position ({x:e}, {y:e}, {z:e})")]
    ChartUndefined {
        /// Name of the chart ("+X" or "-X").
        chart: &'static str,
        /// Planetocentric position components.
        x: f64,
        /// Planetocentric position components.
        y: f64,
        /// Planetocentric position components.
        z: f64,
    },

    // ───────────────────────── series solver ─────────────────────────
    /// The fixed-point (Picard) pass count exceeded its bound without the
    /// coefficient vector stabilizing bitwise. Does not occur for finite
    /// input; kept as a hard guard against NaN poisoning.
    #[error("fixed-point iteration did not stabilize after {passes} passes at order {order}")]
    PicardStalled {
        /// Number of passes performed.
        passes: usize,
        /// Truncation order of the attempted solve.
        order: usize,
    },

    // ───────────────────────── nonlinear solves ─────────────────────────
    /// A Newton-type solve exhausted its iteration budget.
    #[error("Newton solve for {what} did not converge: residual {residual:e} after {iters} iterations")]
    NewtonDiverged {
        /// What was being solved for.
        what: &'static str,
        /// Final residual norm.
        residual: f64,
        /// Iterations performed.
        iters: usize,
    },

    /// A state needed by the analytic propagator lies outside the trusted
    /// convergence ball `|u| ≤ r_max` of the series.
    #[error("state outside trusted domain: |u| = {radius:.6e} > r_max = {limit:.6e}")]
    DomainExceeded {
        /// The offending KS radius `|u|`.
        radius: f64,
        /// The configured trust radius.
        limit: f64,
    },

    /// The encounter flow never re-crossed the entry sphere within the
    /// scanned range of the regularized time (a non-transit orbit, or an
    /// entry state that is not actually entering).
    #[error("no exit crossing of the entry sphere within |s| <= {s_max}")]
    NoExit {
        /// Scan bound on the regularized time.
        s_max: f64,
    },

    /// A finite-difference derivative could not be trusted to the accuracy
    /// the caller requires (Richardson error estimate above the limit).
    #[error("numeric derivative error estimate {estimate:e} exceeds limit {limit:e}")]
    DerivativeAccuracy {
        /// Richardson-extrapolation error estimate.
        estimate: f64,
        /// Caller-required accuracy.
        limit: f64,
    },

    // ───────────────────────── numerical integration ─────────────────────────
    /// Adaptive step size fell below the configured minimum, typically on
    /// approach to the collision singularity in Cartesian variables.
    #[error("step size underflow at t = {t:e} (attempted step {step:e}): singularity approach")]
    StepUnderflow {
        /// Integration time at failure.
        t: f64,
        /// Magnitude of the step the controller wanted to take.
        step: f64,
    },

    /// The integrator exceeded its step budget before reaching the end of the
    /// requested span.
    #[error("integration exceeded {0} accepted steps")]
    MaxSteps(usize),

    /// An event function did not change sign over the integration span.
    #[error("event not bracketed within the integration span")]
    EventNotFound,

    // ───────────────────────── I/O ─────────────────────────
    /// Filesystem error while reading or writing an artifact.
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed JSON while parsing an artifact.
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    /// Any other malformed textual input (CSV fields, numeric literals, …).
    #[error("malformed input: {0}")]
    Parse(String),
}

impl Error {
    /// True when the error describes an *expected* dynamical outcome rather
    /// than a caller mistake: non-transit orbits and singular Cartesian
    /// approaches. The CLI reports such outcomes without a failure exit code
    /// when they are legitimate results of the requested computation.
    pub fn is_dynamical(&self) -> bool {
        matches!(
            self,
            Error::NoExit { .. } | Error::StepUnderflow { .. }
        )
    }
}
