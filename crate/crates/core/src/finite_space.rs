//! Finite T₀ spaces of small-diameter subsets and their bonding maps.

use std::collections::HashMap;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::exact::Threshold;
use crate::metric::{nearest_sets, Approximation, FiniteMetricSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PosetError {
    #[error("poset element budget exceeded: reached {reached} elements (limit {limit})")]
    Budget { reached: usize, limit: usize },
    #[error("image {image:?} of element {element:?} is not an element of the target poset")]
    ImageNotElement { element: Vec<usize>, image: Vec<usize> },
    #[error("subset {0:?} is empty or not strictly increasing")]
    BadSubset(Vec<usize>),
    #[error("duplicate poset element {0:?}")]
    Duplicate(Vec<usize>),
}

/// Subsets of a ground set ordered by inclusion, stored in canonical order
/// (cardinality first, then lexicographic).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinitePoset {
    elements: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
    diameter_bound: Option<Threshold>,
    max_cardinality: Option<usize>,
}

impl FinitePoset {
    /// A poset from explicit subsets; they are sorted into canonical order.
    pub fn from_subsets(mut subsets: Vec<Vec<usize>>) -> Result<Self, PosetError> {
        for s in &subsets {
            if s.is_empty() || s.windows(2).any(|w| w[0] >= w[1]) {
                return Err(PosetError::BadSubset(s.clone()));
            }
        }
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        if let Some(w) = subsets.windows(2).find(|w| w[0] == w[1]) {
            return Err(PosetError::Duplicate(w[0].clone()));
        }
        let index = subsets.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(FinitePoset { elements: subsets, index, diameter_bound: None, max_cardinality: None })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[Vec<usize>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &[usize] {
        &self.elements[i]
    }

    pub fn index_of(&self, subset: &[usize]) -> Option<usize> {
        self.index.get(subset).copied()
    }

    pub fn diameter_bound(&self) -> Option<&Threshold> {
        self.diameter_bound.as_ref()
    }

    pub fn max_cardinality(&self) -> Option<usize> {
        self.max_cardinality
    }

    /// `C ≤ D` iff `C ⊆ D`.
    pub fn le(&self, c: usize, d: usize) -> bool {
        is_subset(&self.elements[c], &self.elements[d])
    }

    /// Checks that every nonempty subset of an element is an element.
    pub fn is_downward_closed(&self) -> bool {
        self.elements.iter().all(|e| {
            e.len() == 1
                || (0..e.len()).all(|skip| {
                    let face: Vec<usize> =
                        e.iter().enumerate().filter(|&(k, _)| k != skip).map(|(_, &v)| v).collect();
                    self.index.contains_key(&face)
                })
        })
    }
}

pub fn is_subset(small: &[usize], big: &[usize]) -> bool {
    if small.len() > big.len() {
        return false;
    }
    let mut it = big.iter();
    'outer: for x in small {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

pub fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub fn sorted_intersection(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Adjacency lists of the graph `d(a, b) < bound` on `ids` (given as
/// positions into `ids`), each list sorted.
pub fn threshold_graph(space: &FiniteMetricSpace, ids: &[usize], bound: &Threshold) -> Vec<Vec<usize>> {
    let search = crate::metric::NeighborSearch::new(space, ids);
    let position: HashMap<usize, usize> = ids.iter().enumerate().map(|(k, &id)| (id, k)).collect();
    let (_, radius) = bound.bounds();
    ids.iter()
        .map(|&a| {
            let mut out: Vec<usize> = search
                .within(a, radius)
                .into_iter()
                .filter(|&b| b != a && space.distance_lt(a, b, bound))
                .map(|b| position[&b])
                .collect();
            out.sort_unstable();
            out
        })
        .collect()
}

/// `U_{2ε}(A)`: the nonempty subsets of `A` with diameter strictly below `2ε`.
pub fn build_finite_space(
    space: &FiniteMetricSpace,
    approx: &Approximation,
    max_cardinality: Option<usize>,
    max_elements: usize,
) -> Result<FinitePoset, PosetError> {
    let bound = approx.epsilon.times(2);
    let ids = &approx.subset;
    let graph = threshold_graph(space, ids, &bound);
    let cap = max_cardinality.unwrap_or(usize::MAX);
    let mut elements: Vec<Vec<usize>> = Vec::new();
    // clique expansion: extend each clique by larger common neighbours
    let mut stack: Vec<(Vec<usize>, Vec<usize>)> =
        (0..ids.len()).rev().map(|v| (vec![v], graph[v].iter().copied().filter(|&w| w > v).collect())).collect();
    while let Some((clique, candidates)) = stack.pop() {
        elements.push(clique.iter().map(|&k| ids[k]).collect());
        if elements.len() > max_elements {
            return Err(PosetError::Budget { reached: elements.len(), limit: max_elements });
        }
        if clique.len() >= cap {
            continue;
        }
        for (pos, &w) in candidates.iter().enumerate().rev() {
            let mut next = clique.clone();
            next.push(w);
            let rest: Vec<usize> =
                candidates[pos + 1..].iter().copied().filter(|x| graph[w].binary_search(x).is_ok()).collect();
            stack.push((next, rest));
        }
    }
    for e in &mut elements {
        e.sort_unstable();
    }
    let mut poset = FinitePoset::from_subsets(elements)?;
    poset.diameter_bound = Some(bound);
    poset.max_cardinality = max_cardinality;
    Ok(poset)
}

/// An order-preserving map between posets, stored as target indices.
#[derive(Debug, Clone)]
pub struct PosetMap {
    pub source: Arc<FinitePoset>,
    pub target: Arc<FinitePoset>,
    pub assignment: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PosetDump {
    pub elements: Vec<Vec<usize>>,
}

impl From<&FinitePoset> for PosetDump {
    fn from(p: &FinitePoset) -> Self {
        PosetDump { elements: p.elements.clone() }
    }
}

impl PosetMap {
    pub fn identity(p: Arc<FinitePoset>) -> Self {
        let assignment = (0..p.len()).collect();
        PosetMap { source: p.clone(), target: p, assignment }
    }

    pub fn image(&self, c: usize) -> &[usize] {
        self.target.element(self.assignment[c])
    }

    pub fn compose(&self, after: &PosetMap) -> PosetMap {
        PosetMap {
            source: self.source.clone(),
            target: after.target.clone(),
            assignment: self.assignment.iter().map(|&t| after.assignment[t]).collect(),
        }
    }
}

/// `p(C) = ⋃_{c ∈ C} q_{A_n}(c)` from level `n+1` to level `n`.
pub fn bonding_map(
    space: &FiniteMetricSpace,
    source: Arc<FinitePoset>,
    source_level: &Approximation,
    target: Arc<FinitePoset>,
    target_level: &Approximation,
) -> Result<PosetMap, PosetError> {
    let nearest = nearest_sets(space, &target_level.subset, &source_level.subset);
    let near_of: HashMap<usize, &Vec<usize>> =
        source_level.subset.iter().copied().zip(nearest.iter()).collect();
    let mut assignment = Vec::with_capacity(source.len());
    for c in source.elements() {
        let mut image: Vec<usize> = Vec::new();
        for a in c {
            image = sorted_union(&image, near_of[a]);
        }
        match target.index_of(&image) {
            Some(t) => assignment.push(t),
            None => return Err(PosetError::ImageNotElement { element: c.clone(), image }),
        }
    }
    Ok(PosetMap { source, target, assignment })
}

/// First pair `(C, D)` with `C ⊆ D` but `m(C) ⊄ m(D)`, if any.
pub fn check_order_preserving(m: &PosetMap) -> Option<(usize, usize)> {
    let src = &m.source;
    for d in 0..src.len() {
        for c in 0..d {
            if src.element(c).len() < src.element(d).len() && src.le(c, d) && !is_subset(m.image(c), m.image(d)) {
                return Some((c, d));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn line(xs: &[i64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_points(xs.iter().map(|&x| vec![BigRational::from_integer(x.into())]).collect())
            .unwrap()
    }

    fn approx(subset: Vec<usize>, eps: Threshold) -> Approximation {
        Approximation { level: 1, epsilon: eps, gamma: Threshold::zero(), subset }
    }

    #[test]
    fn pairs_and_strictness() {
        let s = line(&[0, 1]);
        let p = build_finite_space(&s, &approx(vec![0, 1], Threshold::ratio(3, 4)), None, 100).unwrap();
        assert_eq!(p.elements(), &[vec![0], vec![1], vec![0, 1]]);
        let p = build_finite_space(&s, &approx(vec![0, 1], Threshold::ratio(1, 4)), None, 100).unwrap();
        assert_eq!(p.elements(), &[vec![0], vec![1]]);
        // distance exactly 2ε is excluded
        let p = build_finite_space(&s, &approx(vec![0, 1], Threshold::ratio(1, 2)), None, 100).unwrap();
        assert_eq!(p.len(), 2);
    }

    #[test]
    fn everything_below_a_large_bound() {
        let s = line(&[0, 1, 2, 3, 4]);
        let p = build_finite_space(&s, &approx(vec![0, 1, 2, 3, 4], Threshold::ratio(10, 1)), None, 100).unwrap();
        assert_eq!(p.len(), 31);
        assert!(p.is_downward_closed());
        let capped = build_finite_space(&s, &approx(vec![0, 1, 2, 3, 4], Threshold::ratio(10, 1)), Some(2), 100).unwrap();
        assert_eq!(capped.len(), 15);
        let err = build_finite_space(&s, &approx(vec![0, 1, 2, 3, 4], Threshold::ratio(10, 1)), None, 10).unwrap_err();
        assert!(matches!(err, PosetError::Budget { limit: 10, .. }));
    }

    #[test]
    fn order_preservation_witness() {
        // {a}↦{x,y}, {a,b}↦{x}
        let src = Arc::new(FinitePoset::from_subsets(vec![vec![0], vec![1], vec![0, 1]]).unwrap());
        let tgt = Arc::new(FinitePoset::from_subsets(vec![vec![10], vec![11], vec![10, 11]]).unwrap());
        let m = PosetMap { source: src.clone(), target: tgt, assignment: vec![2, 0, 0] };
        assert_eq!(check_order_preserving(&m), Some((0, 2)));
        assert_eq!(check_order_preserving(&PosetMap::identity(src)), None);
    }

    #[test]
    fn bonding_unions_nearest_sets() {
        // level n: {0, 4} ; level n+1: {1, 2, 3}; 2 ties between 0 and 4
        let s = line(&[0, 1, 2, 3, 4]);
        let fine = approx(vec![1, 2, 3], Threshold::ratio(1, 1));
        let coarse = approx(vec![0, 4], Threshold::ratio(3, 1));
        let src = Arc::new(build_finite_space(&s, &fine, None, 100).unwrap());
        let tgt = Arc::new(build_finite_space(&s, &coarse, None, 100).unwrap());
        let m = bonding_map(&s, src.clone(), &fine, tgt, &coarse).unwrap();
        for (c, elem) in src.elements().iter().enumerate() {
            let mut expect: Vec<usize> = elem.iter().flat_map(|&a| s.nearest_set(a, &[0, 4])).collect();
            expect.sort_unstable();
            expect.dedup();
            assert_eq!(m.image(c), expect.as_slice());
        }
        assert_eq!(m.image(src.index_of(&[2]).unwrap()), &[0, 4]);
        assert_eq!(check_order_preserving(&m), None);
    }

    #[test]
    fn subset_helpers() {
        assert!(is_subset(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[0, 1, 2, 3]));
        assert_eq!(sorted_union(&[1, 3], &[2, 3]), vec![1, 2, 3]);
        assert_eq!(sorted_intersection(&[1, 3, 5], &[3, 5, 7]), vec![3, 5]);
    }
}
