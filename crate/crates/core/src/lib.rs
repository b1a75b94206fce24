//! Shape reconstruction of compact metric spaces from towers of finite
//! approximations.

pub mod complexes;
pub mod corpus;
pub mod exact;
pub mod finite_space;
pub mod homology;
pub mod metric;
pub mod persistence;
pub mod towers;

use thiserror::Error;

/// Any failure raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Metric(#[from] metric::MetricError),
    #[error(transparent)]
    Ladder(#[from] metric::LadderError),
    #[error(transparent)]
    Poset(#[from] finite_space::PosetError),
    #[error(transparent)]
    Complex(#[from] complexes::ComplexError),
    #[error(transparent)]
    Homology(#[from] homology::HomologyError),
    #[error(transparent)]
    Persistence(#[from] persistence::PersistenceError),
    #[error(transparent)]
    Corpus(#[from] corpus::CorpusError),
    #[error(transparent)]
    Tower(#[from] towers::TowerError),
}

impl Error {
    /// True when a configured resource limit stopped the computation.
    pub fn is_budget(&self) -> bool {
        match self {
            Error::Poset(finite_space::PosetError::Budget { .. }) => true,
            Error::Complex(complexes::ComplexError::Budget { .. }) => true,
            Error::Tower(e) => e.is_budget(),
            _ => false,
        }
    }
}
