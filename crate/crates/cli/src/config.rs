use std::fmt;
use std::process::ExitCode;

use brauer4_core::brauer::BrauerBudget;
use brauer4_core::localsolve::LocalBudget;
use brauer4_core::Error;

use crate::input::InputError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Table,
}

/// Budgets and output options shared by every command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    /// Sampling precision at odd places.
    pub precision_max: u32,
    /// Sample points per place.
    pub samples: usize,
    /// Height bound for rational point search.
    pub height: u64,
    pub seed: u64,
    pub format: Format,
    pub jobs: usize,
    pub local: LocalBudget,
}

impl Default for RunConfig {
    fn default() -> Self {
        let b = BrauerBudget::default();
        RunConfig {
            precision_max: b.precision,
            samples: b.samples,
            height: 200,
            seed: b.seed,
            format: Format::Json,
            jobs: 1,
            local: b.local,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |what: &str| Err(CliError::Input(format!("{what} must be positive")));
        if self.precision_max == 0 {
            return bad("--precision-max");
        }
        if self.samples == 0 {
            return bad("--samples");
        }
        if self.height == 0 {
            return bad("--height");
        }
        if self.jobs == 0 {
            return bad("--jobs");
        }
        Ok(())
    }

    pub fn brauer_budget(&self) -> BrauerBudget {
        BrauerBudget {
            samples: self.samples,
            precision: self.precision_max,
            seed: self.seed,
            check_theorems: false,
            local: self.local.clone(),
        }
    }
}

/// Outcome classes, in increasing order of precedence for the exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Ok,
    Inconclusive,
    Mismatch,
}

impl Status {
    pub fn exit_code(self) -> ExitCode {
        match self {
            Status::Ok => ExitCode::SUCCESS,
            Status::Mismatch => ExitCode::from(1),
            Status::Inconclusive => ExitCode::from(3),
        }
    }

    /// How an error inside a report section affects the run.
    pub fn of_error(e: &Error) -> Status {
        match e {
            Error::Inconclusive(_)
            | Error::EnumerationBudget(_)
            | Error::FactorBudget(_)
            | Error::Indeterminate(_)
            | Error::InsufficientPrecision(_) => Status::Inconclusive,
            _ => Status::Mismatch,
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or invalid input; exit code 2.
    Input(String),
    /// A core error that aborted the whole command.
    Core(Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Core(Error::InvalidArgument(_) | Error::Precondition(_) | Error::ZeroInput) => ExitCode::from(2),
            CliError::Core(e) => Status::of_error(e).exit_code(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<InputError> for CliError {
    fn from(e: InputError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}
