use std::sync::Arc;

use super::{ComplexError, SimplicialComplex, SimplicialMap, VertexLabel};
use crate::finite_space::{sorted_intersection, sorted_union, PosetMap};
use crate::metric::{Approximation, FiniteMetricSpace, NeighborSearch};

fn lookup(target: &SimplicialComplex, label: VertexLabel) -> Result<usize, ComplexError> {
    target.vertex_of(&label).ok_or_else(|| ComplexError::MissingLabel(label.to_string()))
}

fn point_of(label: &VertexLabel) -> Result<usize, ComplexError> {
    match label {
        VertexLabel::Point(p) | VertexLabel::Ball(p) => Ok(*p),
        other => Err(ComplexError::Invalid(format!("vertex {other} is not a point or ball"))),
    }
}

/// Maps each vertex through a label rewrite, validating simpliciality.
pub fn inclusion_by_label(
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    relabel: impl Fn(&VertexLabel) -> VertexLabel,
) -> Result<SimplicialMap, ComplexError> {
    let assignment = source
        .labels()
        .iter()
        .map(|l| lookup(&target, relabel(l)))
        .collect::<Result<Vec<_>, _>>()?;
    SimplicialMap::new(source, target, assignment)
}

/// `x ↦ min q_A(x)`: every point or ball goes to the lowest-id nearest centre
/// of `target_level`, keeping the label kind of the target.
pub fn nearest_point_map(
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    space: &FiniteMetricSpace,
    target_level: &Approximation,
) -> Result<SimplicialMap, ComplexError> {
    let search = NeighborSearch::new(space, &target_level.subset);
    let balls = matches!(target.labels().first(), Some(VertexLabel::Ball(_)));
    let mut assignment = Vec::with_capacity(source.vertex_count());
    for label in source.labels() {
        let rep = search.nearest(point_of(label)?)[0];
        let image = if balls { VertexLabel::Ball(rep) } else { VertexLabel::Point(rep) };
        assignment.push(lookup(&target, image)?);
    }
    SimplicialMap::new(source, target, assignment)
}

/// The simplicial map induced by a poset map on complexes whose vertices are
/// poset elements (order and Dowker complexes).
pub fn poset_induced_map(
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    map: &PosetMap,
) -> Result<SimplicialMap, ComplexError> {
    let assignment = source
        .labels()
        .iter()
        .map(|label| {
            let VertexLabel::Subset(set) = label else {
                return Err(ComplexError::Invalid(format!("vertex {label} is not a poset element")));
            };
            let c = map
                .source
                .index_of(set)
                .ok_or_else(|| ComplexError::MissingLabel(label.to_string()))?;
            lookup(&target, VertexLabel::Subset(map.image(c).to_vec()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    SimplicialMap::new(source, target, assignment)
}

/// `ρ: K′ → K`, sending a simplex of `K` to its largest vertex.
pub fn last_vertex_map(
    base: Arc<SimplicialComplex>,
    subdivision: Arc<SimplicialComplex>,
) -> Result<SimplicialMap, ComplexError> {
    let assignment = subdivision
        .labels()
        .iter()
        .map(|label| match label {
            VertexLabel::Face(s) => s.last().copied().ok_or_else(|| ComplexError::Invalid("empty face".into())),
            other => Err(ComplexError::Invalid(format!("vertex {other} is not a face"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    SimplicialMap::new(subdivision, base, assignment)
}

/// `g′: K′ → L′` with `g′(σ) = g(σ)`.
pub fn subdivided_map(
    f: &SimplicialMap,
    source_subdivision: Arc<SimplicialComplex>,
    target_subdivision: Arc<SimplicialComplex>,
) -> Result<SimplicialMap, ComplexError> {
    let assignment = source_subdivision
        .labels()
        .iter()
        .map(|label| match label {
            VertexLabel::Face(s) => lookup(&target_subdivision, VertexLabel::Face(f.image(s))),
            other => Err(ComplexError::Invalid(format!("vertex {other} is not a face"))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    SimplicialMap::new(source_subdivision, target_subdivision, assignment)
}

/// `B_{n+1}(a) ↦ B_n(c)` for the lowest `c` whose ball contains `B_{n+1}(a)`
/// on the reference points.
pub fn cech_refinement_map(
    source: Arc<SimplicialComplex>,
    target: Arc<SimplicialComplex>,
    space: &FiniteMetricSpace,
    fine: &Approximation,
    coarse: &Approximation,
) -> Result<SimplicialMap, ComplexError> {
    let everything: Vec<usize> = (0..space.len()).collect();
    let reference = NeighborSearch::new(space, &everything);
    let centres = NeighborSearch::new(space, &coarse.subset);
    let (_, fine_hi) = fine.epsilon.bounds();
    let (_, coarse_hi) = coarse.epsilon.bounds();
    let mut assignment = Vec::with_capacity(source.vertex_count());
    for label in source.labels() {
        let a = point_of(label)?;
        let ball: Vec<usize> = reference
            .within(a, fine_hi)
            .into_iter()
            .filter(|&x| space.distance_lt(x, a, &fine.epsilon))
            .collect();
        let chosen = centres
            .within(a, coarse_hi)
            .into_iter()
            .filter(|&c| space.distance_lt(a, c, &coarse.epsilon))
            .find(|&c| ball.iter().all(|&x| space.distance_lt(x, c, &coarse.epsilon)))
            .ok_or_else(|| ComplexError::Invalid(format!("no ball of the coarse cover contains B({label})")))?;
        assignment.push(lookup(&target, VertexLabel::Ball(chosen))?);
    }
    SimplicialMap::new(source, target, assignment)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DowkerSide {
    Upper,
    Lower,
}

/// Morita diagonal from the subdivided Dowker complex at level `n+1` to the
/// order complex at level `n`: a family `{C_0, …, C_s}` goes to
/// `⋃ p(C_i)` (upper) or `⋂ p(C_i)` (lower).
pub fn dowker_diagonal(
    side: DowkerSide,
    dowker: &SimplicialComplex,
    subdivision: Arc<SimplicialComplex>,
    order_complex: Arc<SimplicialComplex>,
    map: &PosetMap,
) -> Result<SimplicialMap, ComplexError> {
    let image_of = |v: usize| -> Result<&[usize], ComplexError> {
        let label = dowker.label(v);
        let VertexLabel::Subset(set) = label else {
            return Err(ComplexError::Invalid(format!("vertex {label} is not a poset element")));
        };
        let c = map.source.index_of(set).ok_or_else(|| ComplexError::MissingLabel(label.to_string()))?;
        Ok(map.image(c))
    };
    let mut assignment = Vec::with_capacity(subdivision.vertex_count());
    for label in subdivision.labels() {
        let VertexLabel::Face(family) = label else {
            return Err(ComplexError::Invalid(format!("vertex {label} is not a face")));
        };
        let mut combined = image_of(family[0])?.to_vec();
        for &v in &family[1..] {
            combined = match side {
                DowkerSide::Upper => sorted_union(&combined, image_of(v)?),
                DowkerSide::Lower => sorted_intersection(&combined, image_of(v)?),
            };
        }
        assignment.push(lookup(&order_complex, VertexLabel::Subset(combined))?);
    }
    SimplicialMap::new(subdivision, order_complex, assignment)
}

/// `second ∘ first`.
pub fn compose(first: &SimplicialMap, second: &SimplicialMap) -> Result<SimplicialMap, ComplexError> {
    if !Arc::ptr_eq(first.target(), second.source()) {
        return Err(ComplexError::Mismatch);
    }
    let assignment = first.assignment().iter().map(|&v| second.apply(v)).collect();
    SimplicialMap::new_unchecked(first.source().clone(), second.target().clone(), assignment)
}

/// First stored source simplex `σ` with `f(σ) ∪ g(σ)` not a target simplex.
pub fn contiguous(f: &SimplicialMap, g: &SimplicialMap) -> Result<Option<Vec<usize>>, ComplexError> {
    if !f.same_endpoints(g) {
        return Err(ComplexError::Mismatch);
    }
    for s in f.source().all_simplices() {
        let mut both: Vec<usize> = s.iter().flat_map(|&v| [f.apply(v), g.apply(v)]).collect();
        both.sort_unstable();
        both.dedup();
        if !f.target().contains(&both)? {
            return Ok(Some(s.clone()));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::super::{barycentric_subdivision, Budget};
    use super::*;

    fn points(n: usize) -> Vec<VertexLabel> {
        (0..n).map(VertexLabel::Point).collect()
    }

    #[test]
    fn last_vertex_on_an_edge() {
        let k = Arc::new(SimplicialComplex::from_simplices(points(2), &[vec![0, 1]], None).unwrap());
        let sd = Arc::new(barycentric_subdivision(&k, None, &Budget::default()).unwrap());
        let rho = last_vertex_map(k.clone(), sd.clone()).unwrap();
        let at = |face: Vec<usize>| rho.apply(sd.vertex_of(&VertexLabel::Face(face)).unwrap());
        assert_eq!(at(vec![0]), 0);
        assert_eq!(at(vec![1]), 1);
        assert_eq!(at(vec![0, 1]), 1);
        // first-vertex choice is contiguous to ρ
        let first: Vec<usize> = sd
            .labels()
            .iter()
            .map(|l| match l {
                VertexLabel::Face(s) => s[0],
                _ => unreachable!(),
            })
            .collect();
        let other = SimplicialMap::new(sd, k, first).unwrap();
        assert_eq!(contiguous(&rho, &other).unwrap(), None);
    }

    #[test]
    fn constant_maps_to_distant_vertices_are_not_contiguous() {
        let k = Arc::new(SimplicialComplex::from_simplices(points(1), &[], None).unwrap());
        let l = Arc::new(SimplicialComplex::from_simplices(points(2), &[], None).unwrap());
        let f = SimplicialMap::new(k.clone(), l.clone(), vec![0]).unwrap();
        let g = SimplicialMap::new(k, l, vec![1]).unwrap();
        assert_eq!(contiguous(&f, &g).unwrap(), Some(vec![0]));
        assert_eq!(contiguous(&f, &f).unwrap(), None);
    }

    #[test]
    fn subdivided_collapse_and_identity() {
        let b = Budget::default();
        let k = Arc::new(SimplicialComplex::from_simplices(points(2), &[vec![0, 1]], None).unwrap());
        let pt = Arc::new(SimplicialComplex::from_simplices(points(1), &[], None).unwrap());
        let sdk = Arc::new(barycentric_subdivision(&k, None, &b).unwrap());
        let sdp = Arc::new(barycentric_subdivision(&pt, None, &b).unwrap());
        let collapse = SimplicialMap::new(k.clone(), pt, vec![0, 0]).unwrap();
        let g = subdivided_map(&collapse, sdk.clone(), sdp).unwrap();
        assert_eq!(g.assignment(), &[0, 0, 0]);
        let id = subdivided_map(&SimplicialMap::identity(k), sdk.clone(), sdk.clone()).unwrap();
        assert_eq!(id, SimplicialMap::identity(sdk));
    }
}
