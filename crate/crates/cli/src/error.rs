use std::fmt;

/// Process exit codes.
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self { code: EXIT_DATA, message: message.into() }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self { code: EXIT_NUMERICAL, message: message.into() }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<multicurve::Error> for CliError {
    fn from(e: multicurve::Error) -> Self {
        use multicurve::Error as E;
        let code = match e {
            E::Inversion(_) | E::CalibrationFailed(_) => EXIT_NUMERICAL,
            _ => EXIT_DATA,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn library_errors_map_to_exit_codes() {
        assert_eq!(CliError::from(multicurve::Error::Inversion("x".into())).code, EXIT_NUMERICAL);
        assert_eq!(CliError::from(multicurve::Error::Domain("x".into())).code, EXIT_DATA);
        assert_eq!(CliError::from(std::io::Error::other("gone")).code, EXIT_DATA);
    }
}
