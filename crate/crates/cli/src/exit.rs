//! Exit-code contract: 0 success, 1 check failure, 2 usage or input error.

use std::fmt;

use virasoro_core::Error as CoreError;

pub const SUCCESS: i32 = 0;
pub const CHECK_FAILURE: i32 = 1;
pub const USAGE: i32 = 2;

/// Bad flags, bad configuration or malformed input files.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

/// Exit code for an error that escaped a command.
pub fn code_for(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return USAGE;
        }
        if let Some(core) = cause.downcast_ref::<CoreError>() {
            return match core {
                CoreError::Parse(_) | CoreError::Format { .. } | CoreError::NotReal { .. } | CoreError::Csv(_) => USAGE,
                _ => CHECK_FAILURE,
            };
        }
    }
    CHECK_FAILURE
}
