use std::fmt;

use cellmat::ErrorKind;
use serde::Serialize;

/// Why a command failed; each variant maps to one exit status.
#[derive(Debug)]
pub enum Failure {
    /// Input could not be read or does not match the command's schema.
    Parse(String),
    /// A library call rejected the input or failed to converge.
    Library(cellmat::Error),
    /// Writing the result failed.
    Output(String),
}

impl Failure {
    pub fn parse(message: String) -> Self {
        Failure::Parse(message)
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Library(e) => match e.kind() {
                ErrorKind::Domain => 3,
                ErrorKind::NonConvergence => 4,
            },
            Failure::Output(_) => 1,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Failure::Parse(_) => "parse",
            Failure::Library(e) => match e.kind() {
                ErrorKind::Domain => "domain",
                ErrorKind::NonConvergence => "non_convergence",
            },
            Failure::Output(_) => "output",
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
            status: u8,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        let w = Wrapper {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
                status: self.exit_code(),
            },
        };
        serde_json::to_string(&w).expect("error object serializes")
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Parse(m) | Failure::Output(m) => f.write_str(m),
            Failure::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<cellmat::Error> for Failure {
    fn from(e: cellmat::Error) -> Self {
        Failure::Library(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_error_class() {
        assert_eq!(Failure::parse("x".into()).exit_code(), 2);
        assert_eq!(Failure::from(cellmat::Error::EmptyVector).exit_code(), 3);
        let stalled = cellmat::Error::NoConvergence {
            method: "Jacobi eigensolver",
            iterations: 50,
        };
        let f = Failure::from(stalled);
        assert_eq!(f.exit_code(), 4);
        let body: serde_json::Value = serde_json::from_str(&f.to_json()).unwrap();
        assert_eq!(body["error"]["kind"], "non_convergence");
        assert_eq!(body["error"]["status"], 4);
    }
}
