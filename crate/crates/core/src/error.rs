use thiserror::Error;

/// Subsystem that raised an error. Carried by every variant so that
/// diagnostics can name where a computation failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Module {
    PartSpectrum,
    SpecialFn,
    Boltzmann,
    Saddle,
    ExactCount,
    Asymptotics,
    Harness,
}

impl Module {
    pub fn name(self) -> &'static str {
        match self {
            Module::PartSpectrum => "part-spectrum",
            Module::SpecialFn => "special-fn",
            Module::Boltzmann => "boltzmann-eval",
            Module::Saddle => "saddle-solver",
            Module::ExactCount => "exact-count",
            Module::Asymptotics => "asymptotics",
            Module::Harness => "cli-harness",
        }
    }
}

impl std::fmt::Display for Module {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{module}: invalid input: {what}")]
    InvalidInput { module: Module, what: String },

    #[error("{module}: {quantity} = {value} outside the domain ({what})")]
    Domain {
        module: Module,
        quantity: &'static str,
        value: f64,
        what: &'static str,
    },

    #[error("{module}: ceiling of {k}^beta cannot be certified at working precision")]
    PrecisionAmbiguous { module: Module, k: u64 },

    #[error("{module}: {quantity} did not converge after {iterations} iterations (last error {last_error:e})")]
    Convergence {
        module: Module,
        quantity: &'static str,
        iterations: usize,
        last_error: f64,
    },

    #[error("{module}: could not bracket {quantity} = {target} (searched {lo:e}..{hi:e})")]
    Bracket {
        module: Module,
        quantity: &'static str,
        target: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{module}: series needs parts up to k = {needed}, spectrum holds only {available}")]
    Truncation {
        module: Module,
        needed: u64,
        available: u64,
    },

    #[error("{module}: {quantity} = {value} outside the admissible range [{lo}, {hi}]")]
    Range {
        module: Module,
        quantity: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("{module}: polylogarithm order {order} <= 0 requested for nu = {nu}")]
    OrderOutOfRange { module: Module, order: f64, nu: u32 },

    #[error("{module}: {quantity} = {value} exceeds the configured guard {limit}")]
    Guard {
        module: Module,
        quantity: &'static str,
        value: u64,
        limit: u64,
    },
}

impl Error {
    pub fn module(&self) -> Module {
        match self {
            Error::InvalidInput { module, .. }
            | Error::Domain { module, .. }
            | Error::PrecisionAmbiguous { module, .. }
            | Error::Convergence { module, .. }
            | Error::Bracket { module, .. }
            | Error::Truncation { module, .. }
            | Error::Range { module, .. }
            | Error::OrderOutOfRange { module, .. }
            | Error::Guard { module, .. } => *module,
        }
    }

    pub(crate) fn invalid(module: Module, what: impl Into<String>) -> Self {
        Error::InvalidInput {
            module,
            what: what.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
