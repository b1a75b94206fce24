//! Abstract simplicial complexes with labelled vertices, simplicial maps and
//! the builders for every complex family used by the towers.

mod builders;
pub mod diagrams;
mod maps;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

pub use builders::{
    barycentric_subdivision, cech_nerve, dowker_lower, dowker_upper, mccord_complex, rips_complex,
    virtual_rips, witness_complex,
};
pub use maps::{
    cech_refinement_map, compose, contiguous, dowker_diagonal, inclusion_by_label, last_vertex_map,
    nearest_point_map, poset_induced_map, subdivided_map, DowkerSide,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("simplex budget exceeded: reached {reached} simplices (limit {limit})")]
    Budget { reached: usize, limit: usize },
    #[error("membership of a {dim}-simplex cannot be decided: only dimensions up to {stored} are stored")]
    InsufficientDimension { dim: usize, stored: usize },
    #[error("map is not simplicial: {simplex} is sent to {image}, which is not a simplex of the target")]
    NotSimplicial { simplex: String, image: String },
    #[error("vertex label {0} is missing from the target complex")]
    MissingLabel(String),
    #[error("maps do not share source and target complexes")]
    Mismatch,
    #[error("{0}")]
    Invalid(String),
}

/// What a vertex stands for.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexLabel {
    /// A point of the reference space.
    Point(usize),
    /// The ball centred at a point of the reference space.
    Ball(usize),
    /// A finite set of reference points (a poset element).
    Subset(Vec<usize>),
    /// A simplex of another complex, given by its vertex indices there.
    Face(Vec<usize>),
}

impl fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VertexLabel::Point(p) => write!(f, "x{p}"),
            VertexLabel::Ball(p) => write!(f, "B(x{p})"),
            VertexLabel::Subset(s) => write!(f, "{s:?}"),
            VertexLabel::Face(s) => write!(f, "<{s:?}>"),
        }
    }
}

/// Decides membership of simplices beyond the stored dimensions.
pub trait SimplexOracle: Send + Sync + fmt::Debug {
    fn contains(&self, simplex: &[usize]) -> bool;
}

/// Explicit resource limits for exponential constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_simplices: usize,
    pub max_elements: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_simplices: 20_000_000, max_elements: 2_000_000 }
    }
}

/// A simplicial complex stored dimension by dimension.
///
/// Simplices are strictly increasing vertex-index tuples, sorted
/// lexicographically within each dimension. When `dim_cap` is set only
/// dimensions up to the cap are stored and larger simplices are answered by
/// the oracle, if one is attached.
#[derive(Clone)]
pub struct SimplicialComplex {
    labels: Vec<VertexLabel>,
    label_index: HashMap<VertexLabel, usize>,
    simplices: Vec<Vec<Vec<usize>>>,
    index: Vec<HashMap<Vec<usize>, usize>>,
    dim_cap: Option<usize>,
    oracle: Option<Arc<dyn SimplexOracle>>,
}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SimplicialComplex")
            .field("vertices", &self.labels.len())
            .field("counts", &self.counts())
            .field("dim_cap", &self.dim_cap)
            .finish()
    }
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels && self.simplices == other.simplices
    }
}

impl SimplicialComplex {
    pub(crate) fn from_sorted_parts(
        labels: Vec<VertexLabel>,
        mut simplices: Vec<Vec<Vec<usize>>>,
        dim_cap: Option<usize>,
        oracle: Option<Arc<dyn SimplexOracle>>,
    ) -> Self {
        while simplices.len() > 1 && simplices.last().map_or(false, |d| d.is_empty()) {
            simplices.pop();
        }
        for dim in &mut simplices {
            dim.sort_unstable();
        }
        let index = simplices
            .iter()
            .map(|dim| dim.iter().enumerate().map(|(k, s)| (s.clone(), k)).collect())
            .collect();
        let label_index = labels.iter().enumerate().map(|(k, l)| (l.clone(), k)).collect();
        SimplicialComplex { labels, label_index, simplices, index, dim_cap, oracle }
    }

    /// The face-closure of the given simplices; every vertex is included.
    pub fn from_simplices(
        labels: Vec<VertexLabel>,
        generators: &[Vec<usize>],
        dim_cap: Option<usize>,
    ) -> Result<Self, ComplexError> {
        let n = labels.len();
        let cap = dim_cap.unwrap_or(usize::MAX);
        let mut by_dim: Vec<std::collections::BTreeSet<Vec<usize>>> = vec![Default::default()];
        for v in 0..n {
            by_dim[0].insert(vec![v]);
        }
        for g in generators {
            let mut s = g.clone();
            s.sort_unstable();
            s.dedup();
            if s.iter().any(|&v| v >= n) || s.is_empty() {
                return Err(ComplexError::Invalid(format!("bad simplex {g:?}")));
            }
            let k = s.len();
            for mask in 1u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| s[b]).collect();
                let d = face.len() - 1;
                if d > cap {
                    continue;
                }
                while by_dim.len() <= d {
                    by_dim.push(Default::default());
                }
                by_dim[d].insert(face);
            }
        }
        let simplices = by_dim.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self::from_sorted_parts(labels, simplices, dim_cap, None))
    }

    pub fn with_oracle(mut self, oracle: Arc<dyn SimplexOracle>) -> Self {
        self.oracle = Some(oracle);
        self
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[VertexLabel] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &VertexLabel {
        &self.labels[v]
    }

    pub fn vertex_of(&self, label: &VertexLabel) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Highest dimension holding a stored simplex.
    pub fn dim(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    pub fn dim_cap(&self) -> Option<usize> {
        self.dim_cap
    }

    /// True when no simplex exists beyond the stored dimensions.
    pub fn is_complete(&self) -> bool {
        match self.dim_cap {
            None => true,
            Some(cap) => self.dim() < cap,
        }
    }

    pub fn simplices(&self, dim: usize) -> &[Vec<usize>] {
        self.simplices.get(dim).map_or(&[], |d| d.as_slice())
    }

    pub fn count(&self, dim: usize) -> usize {
        self.simplices(dim).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(|d| d.len()).collect()
    }

    pub fn total(&self) -> usize {
        self.simplices.iter().map(|d| d.len()).sum()
    }

    pub fn all_simplices(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().flatten()
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        let d = simplex.len().checked_sub(1)?;
        self.index.get(d)?.get(simplex).copied()
    }

    /// Membership of a sorted, duplicate-free vertex tuple.
    pub fn contains(&self, simplex: &[usize]) -> Result<bool, ComplexError> {
        let Some(d) = simplex.len().checked_sub(1) else {
            return Ok(false);
        };
        if simplex.iter().any(|&v| v >= self.labels.len()) {
            return Ok(false);
        }
        let stored = match self.dim_cap {
            Some(cap) => cap,
            None => usize::MAX,
        };
        if d <= stored || self.is_complete() {
            return Ok(self.index.get(d).map_or(false, |m| m.contains_key(simplex)));
        }
        match &self.oracle {
            Some(o) => Ok(o.contains(simplex)),
            None => Err(ComplexError::InsufficientDimension { dim: d, stored }),
        }
    }

    /// First stored simplex one of whose facets is missing.
    pub fn face_closure_violation(&self) -> Option<Vec<usize>> {
        for d in 1..self.simplices.len() {
            for s in &self.simplices[d] {
                for skip in 0..s.len() {
                    let face: Vec<usize> =
                        s.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                    if !self.index[d - 1].contains_key(&face) {
                        return Some(s.clone());
                    }
                }
            }
        }
        None
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(d, s)| if d % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }

    pub fn describe(&self, simplex: &[usize]) -> String {
        let parts: Vec<String> = simplex.iter().map(|&v| self.labels[v].to_string()).collect();
        format!("<{}>", parts.join(", "))
    }

    pub fn dump(&self) -> ComplexDump {
        ComplexDump {
            vertices: self.labels.clone(),
            simplices: self.simplices.clone(),
            dim_cap: self.dim_cap,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexDump {
    pub vertices: Vec<VertexLabel>,
    pub simplices: Vec<Vec<Vec<usize>>>,
    pub dim_cap: Option<usize>,
}

/// A vertex map between complexes that sends simplices to simplices.
#[derive(Debug, Clone)]
pub struct SimplicialMap {
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    assignment: Vec<usize>,
}

impl PartialEq for SimplicialMap {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.source, &other.source)
            && Arc::ptr_eq(&self.target, &other.target)
            && self.assignment == other.assignment
    }
}

impl SimplicialMap {
    /// Builds and validates the map on every stored source simplex.
    pub fn new(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        assignment: Vec<usize>,
    ) -> Result<Self, ComplexError> {
        let m = Self::new_unchecked(source, target, assignment)?;
        m.validate()?;
        Ok(m)
    }

    /// Builds the map checking only that vertices land on vertices.
    pub fn new_unchecked(
        source: Arc<SimplicialComplex>,
        target: Arc<SimplicialComplex>,
        assignment: Vec<usize>,
    ) -> Result<Self, ComplexError> {
        if assignment.len() != source.vertex_count() {
            return Err(ComplexError::Invalid(format!(
                "assignment has {} entries for {} vertices",
                assignment.len(),
                source.vertex_count()
            )));
        }
        if let Some(&bad) = assignment.iter().find(|&&t| t >= target.vertex_count()) {
            return Err(ComplexError::Invalid(format!("target vertex {bad} out of range")));
        }
        Ok(SimplicialMap { source, target, assignment })
    }

    pub fn identity(k: Arc<SimplicialComplex>) -> Self {
        let assignment = (0..k.vertex_count()).collect();
        SimplicialMap { source: k.clone(), target: k, assignment }
    }

    pub fn source(&self) -> &Arc<SimplicialComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<SimplicialComplex> {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, v: usize) -> usize {
        self.assignment[v]
    }

    /// Sorted, duplicate-free image vertex set.
    pub fn image(&self, simplex: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = simplex.iter().map(|&v| self.assignment[v]).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn validate(&self) -> Result<(), ComplexError> {
        for s in self.source.all_simplices() {
            let img = self.image(s);
            if !self.target.contains(&img)? {
                return Err(ComplexError::NotSimplicial {
                    simplex: self.source.describe(s),
                    image: self.target.describe(&img),
                });
            }
        }
        Ok(())
    }

    pub fn same_endpoints(&self, other: &SimplicialMap) -> bool {
        Arc::ptr_eq(&self.source, &other.source) && Arc::ptr_eq(&self.target, &other.target)
    }
}
