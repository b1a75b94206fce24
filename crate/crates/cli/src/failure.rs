use std::fmt;

use polyshape::complexes::ComplexError;
use polyshape::corpus::CorpusError;
use polyshape::metric::LadderError;
use polyshape::towers::TowerError;
use serde_json::json;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Parse,
    Input,
    Io,
    Usage,
    Budget,
    Verification,
    Internal,
}

impl Kind {
    pub fn exit_code(self) -> i32 {
        match self {
            Kind::Verification | Kind::Internal => 1,
            Kind::Parse | Kind::Input | Kind::Io | Kind::Usage => 2,
            Kind::Budget => 3,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Kind::Parse => "parse",
            Kind::Input => "input",
            Kind::Io => "io",
            Kind::Usage => "usage",
            Kind::Budget => "budget",
            Kind::Verification => "verification",
            Kind::Internal => "internal",
        }
    }
}

/// A failed run: the error kind decides the exit code.
#[derive(Debug)]
pub struct Failure {
    pub kind: Kind,
    pub detail: String,
}

impl Failure {
    pub fn new(kind: Kind, detail: impl fmt::Display) -> Self {
        Failure { kind, detail: detail.to_string() }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind.as_str(), "detail": self.detail }).to_string()
    }
}

impl From<polyshape::Error> for Failure {
    fn from(e: polyshape::Error) -> Self {
        use polyshape::Error as E;
        let kind = if e.is_budget() {
            Kind::Budget
        } else {
            match &e {
                E::Metric(_) | E::Ladder(_) | E::Corpus(_) => Kind::Input,
                E::Tower(TowerError::UnknownKind(_) | TowerError::Level(_)) => Kind::Input,
                E::Complex(ComplexError::NotSimplicial { .. })
                | E::Tower(TowerError::Complex(ComplexError::NotSimplicial { .. })) => Kind::Verification,
                _ => Kind::Internal,
            }
        };
        Failure::new(kind, e)
    }
}

impl From<TowerError> for Failure {
    fn from(e: TowerError) -> Self {
        polyshape::Error::from(e).into()
    }
}

impl From<CorpusError> for Failure {
    fn from(e: CorpusError) -> Self {
        polyshape::Error::from(e).into()
    }
}

impl From<LadderError> for Failure {
    fn from(e: LadderError) -> Self {
        polyshape::Error::from(e).into()
    }
}
