use std::fmt;

/// Invalid command-line usage; exit code 1.
#[derive(Debug)]
pub struct UsageError(pub String);

/// Unreadable or invalid input data; exit code 2.
#[derive(Debug)]
pub struct DataError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for DataError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}
impl std::error::Error for DataError {}

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_INTERNAL: u8 = 3;

/// Exit code for an error, from the first classifiable cause.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    use rankver_core::Error as E;
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if cause.is::<DataError>() {
            return EXIT_DATA;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::InvalidArgument(_) => EXIT_USAGE,
                E::DimensionMismatch { .. }
                | E::InvalidFamily(_)
                | E::InvalidObservation(_)
                | E::OutsideSupport { .. }
                | E::DegenerateLaw(_) => EXIT_DATA,
                E::Precondition(_) | E::TooLarge { .. } => EXIT_INTERNAL,
            };
        }
    }
    EXIT_INTERNAL
}
