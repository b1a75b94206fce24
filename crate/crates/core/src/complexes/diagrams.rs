//! Pass/fail records for the commuting diagrams between towers.

use serde::Serialize;

use super::{contiguous, ComplexError, SimplicialComplex, SimplicialMap, VertexLabel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    /// The map sends simplices to simplices.
    Simplicial,
    /// Two maps are contiguous.
    Contiguous,
    /// Two maps agree vertex by vertex.
    Equal,
    /// Two complexes coincide as labelled complexes.
    Identical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramCheck {
    pub name: String,
    pub relation: Relation,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl DiagramCheck {
    pub fn pass(name: impl Into<String>, relation: Relation) -> Self {
        DiagramCheck { name: name.into(), relation, passed: true, detail: None }
    }

    pub fn fail(name: impl Into<String>, relation: Relation, detail: impl Into<String>) -> Self {
        DiagramCheck { name: name.into(), relation, passed: false, detail: Some(detail.into()) }
    }
}

/// Records the outcome of building a validated map.
pub fn simplicial(name: &str, built: &Result<SimplicialMap, ComplexError>) -> Result<DiagramCheck, ComplexError> {
    match built {
        Ok(_) => Ok(DiagramCheck::pass(name, Relation::Simplicial)),
        Err(ComplexError::NotSimplicial { simplex, image }) => {
            Ok(DiagramCheck::fail(name, Relation::Simplicial, format!("{simplex} ↦ {image}")))
        }
        Err(e) => Err(e.clone()),
    }
}

pub fn contiguity(name: &str, f: &SimplicialMap, g: &SimplicialMap) -> Result<DiagramCheck, ComplexError> {
    Ok(match contiguous(f, g)? {
        None => DiagramCheck::pass(name, Relation::Contiguous),
        Some(s) => DiagramCheck::fail(name, Relation::Contiguous, format!("fails on {}", f.source().describe(&s))),
    })
}

pub fn equality(name: &str, f: &SimplicialMap, g: &SimplicialMap) -> Result<DiagramCheck, ComplexError> {
    if !f.same_endpoints(g) {
        return Err(ComplexError::Mismatch);
    }
    let diff = f.assignment().iter().zip(g.assignment()).position(|(a, b)| a != b);
    Ok(match diff {
        None => DiagramCheck::pass(name, Relation::Equal),
        Some(v) => DiagramCheck::fail(name, Relation::Equal, format!("maps differ at {}", f.source().label(v))),
    })
}

/// Rewrites the `Face` labels of a subdivision as the sets of point ids of
/// the subdivided complex, so it can be compared with an order complex.
pub fn face_labels_as_subsets(subdivision: &SimplicialComplex, base: &SimplicialComplex) -> Option<Vec<VertexLabel>> {
    subdivision
        .labels()
        .iter()
        .map(|label| match label {
            VertexLabel::Face(s) => {
                let mut ids = Vec::with_capacity(s.len());
                for &v in s {
                    match base.label(v) {
                        VertexLabel::Point(p) => ids.push(*p),
                        _ => return None,
                    }
                }
                ids.sort_unstable();
                Some(VertexLabel::Subset(ids))
            }
            _ => None,
        })
        .collect()
}

/// Checks that an order complex and a subdivision of a point complex agree
/// as labelled complexes, vertex order and simplices included.
pub fn identical_labelled(
    name: &str,
    order_complex: &SimplicialComplex,
    subdivision: &SimplicialComplex,
    base: &SimplicialComplex,
) -> DiagramCheck {
    let Some(relabelled) = face_labels_as_subsets(subdivision, base) else {
        return DiagramCheck::fail(name, Relation::Identical, "subdivision of a complex without point labels");
    };
    if relabelled != order_complex.labels() {
        return DiagramCheck::fail(
            name,
            Relation::Identical,
            format!("vertex sets differ ({} vs {} vertices)", order_complex.vertex_count(), relabelled.len()),
        );
    }
    let top = order_complex.dim().max(subdivision.dim());
    for d in 0..=top {
        if order_complex.simplices(d) != subdivision.simplices(d) {
            return DiagramCheck::fail(
                name,
                Relation::Identical,
                format!(
                    "{d}-simplices differ ({} vs {})",
                    order_complex.count(d),
                    subdivision.count(d)
                ),
            );
        }
    }
    DiagramCheck::pass(name, Relation::Identical)
}
