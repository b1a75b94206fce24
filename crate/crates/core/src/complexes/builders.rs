use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use super::{Budget, ComplexError, SimplexOracle, SimplicialComplex, VertexLabel};
use crate::exact::Threshold;
use crate::finite_space::{is_subset, sorted_intersection, sorted_union, threshold_graph, FinitePoset};
use crate::metric::{Approximation, FiniteMetricSpace, NeighborSearch};

/// Depth-first enumeration of a downward-closed family whose 1-skeleton is
/// `neighbors`. A simplex is extended only by larger vertices adjacent to all
/// of its members, and `extend` decides membership of the extension.
fn enumerate<S, F>(
    neighbors: &[Vec<usize>],
    dim_cap: usize,
    limit: usize,
    init: impl Fn(usize) -> S,
    mut extend: F,
) -> Result<Vec<Vec<Vec<usize>>>, ComplexError>
where
    F: FnMut(&[usize], &S, usize) -> Option<S>,
{
    struct Walk<'a, F> {
        neighbors: &'a [Vec<usize>],
        dim_cap: usize,
        limit: usize,
        count: usize,
        out: Vec<Vec<Vec<usize>>>,
        extend: F,
    }
    impl<F> Walk<'_, F> {
        fn visit<S>(&mut self, simplex: &mut Vec<usize>, state: &S, candidates: &[usize]) -> Result<(), ComplexError>
        where
            F: FnMut(&[usize], &S, usize) -> Option<S>,
        {
            let d = simplex.len() - 1;
            if self.out.len() <= d {
                self.out.push(Vec::new());
            }
            self.out[d].push(simplex.clone());
            self.count += 1;
            if self.count > self.limit {
                return Err(ComplexError::Budget { reached: self.count, limit: self.limit });
            }
            if d >= self.dim_cap {
                return Ok(());
            }
            for (i, &w) in candidates.iter().enumerate() {
                if let Some(next_state) = (self.extend)(simplex, state, w) {
                    let next: Vec<usize> = candidates[i + 1..]
                        .iter()
                        .copied()
                        .filter(|x| self.neighbors[w].binary_search(x).is_ok())
                        .collect();
                    simplex.push(w);
                    self.visit(simplex, &next_state, &next)?;
                    simplex.pop();
                }
            }
            Ok(())
        }
    }
    let mut walk = Walk { neighbors, dim_cap, limit, count: 0, out: vec![Vec::new()], extend: &mut extend };
    for v in 0..neighbors.len() {
        let candidates: Vec<usize> = neighbors[v].iter().copied().filter(|&w| w > v).collect();
        walk.visit(&mut vec![v], &init(v), &candidates)?;
    }
    Ok(walk.out)
}

fn sorted_adjacency(mut adj: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for list in &mut adj {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

#[derive(Debug)]
struct RipsOracle {
    space: Arc<FiniteMetricSpace>,
    ids: Vec<usize>,
    bound: Threshold,
}

impl SimplexOracle for RipsOracle {
    fn contains(&self, simplex: &[usize]) -> bool {
        simplex.iter().enumerate().all(|(k, &u)| {
            simplex[k + 1..].iter().all(|&v| self.space.distance_lt(self.ids[u], self.ids[v], &self.bound))
        })
    }
}

/// Vietoris–Rips complex: subsets of `ids` with diameter strictly below `bound`.
pub fn rips_complex(
    space: &Arc<FiniteMetricSpace>,
    ids: &[usize],
    bound: &Threshold,
    dim_cap: usize,
    budget: &Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let graph = threshold_graph(space, ids, bound);
    let simplices = enumerate(&graph, dim_cap, budget.max_simplices, |_| (), |_, _, _| Some(()))?;
    let labels = ids.iter().map(|&p| VertexLabel::Point(p)).collect();
    let oracle = RipsOracle { space: space.clone(), ids: ids.to_vec(), bound: bound.clone() };
    Ok(SimplicialComplex::from_sorted_parts(labels, simplices, Some(dim_cap), Some(Arc::new(oracle))))
}

/// Rips complex over every reference point, storing only vertices and
/// answering every other query through the distance oracle.
pub fn virtual_rips(space: &Arc<FiniteMetricSpace>, bound: &Threshold) -> SimplicialComplex {
    let ids: Vec<usize> = (0..space.len()).collect();
    let labels = ids.iter().map(|&p| VertexLabel::Point(p)).collect();
    let vertices = ids.iter().map(|&p| vec![p]).collect();
    let oracle = RipsOracle { space: space.clone(), ids, bound: bound.clone() };
    SimplicialComplex::from_sorted_parts(labels, vec![vertices], Some(0), Some(Arc::new(oracle)))
}

#[derive(Debug)]
struct ChainOracle {
    sets: Vec<Vec<usize>>,
}

impl SimplexOracle for ChainOracle {
    fn contains(&self, simplex: &[usize]) -> bool {
        simplex.windows(2).all(|w| {
            let (a, b) = (&self.sets[w[0]], &self.sets[w[1]]);
            a.len() < b.len() && is_subset(a, b)
        })
    }
}

/// Comparability graph of a family of sets listed by increasing cardinality.
fn comparability(sets: &[Vec<usize>], index: impl Fn(&[usize]) -> Option<usize>) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); sets.len()];
    for (d, big) in sets.iter().enumerate() {
        if big.len() <= 16 {
            let k = big.len();
            for mask in 1u32..((1u32 << k) - 1) {
                let sub: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| big[b]).collect();
                if let Some(c) = index(&sub) {
                    adj[c].push(d);
                    adj[d].push(c);
                }
            }
        } else {
            for (c, small) in sets.iter().enumerate().take(d) {
                if small.len() < big.len() && is_subset(small, big) {
                    adj[c].push(d);
                    adj[d].push(c);
                }
            }
        }
    }
    sorted_adjacency(adj)
}

/// Order complex: chains of the poset.
pub fn mccord_complex(
    poset: &FinitePoset,
    dim_cap: Option<usize>,
    budget: &Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let sets = poset.elements().to_vec();
    let adj = comparability(&sets, |s| poset.index_of(s));
    // canonical order lists subsets before supersets, so cliques are chains
    let cap = dim_cap.unwrap_or(usize::MAX);
    let simplices = enumerate(&adj, cap, budget.max_simplices, |_| (), |_, _, _| Some(()))?;
    let labels = sets.iter().cloned().map(VertexLabel::Subset).collect();
    Ok(SimplicialComplex::from_sorted_parts(labels, simplices, dim_cap, Some(Arc::new(ChainOracle { sets }))))
}

/// Barycentric subdivision of the stored part of `k`; vertices are the stored
/// simplices in (dimension, lexicographic) order.
pub fn barycentric_subdivision(
    k: &SimplicialComplex,
    dim_cap: Option<usize>,
    budget: &Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let faces: Vec<Vec<usize>> = k.all_simplices().cloned().collect();
    let position: HashMap<&[usize], usize> = faces.iter().enumerate().map(|(i, f)| (f.as_slice(), i)).collect();
    let adj = comparability(&faces, |s| position.get(s).copied());
    let cap = dim_cap.unwrap_or(usize::MAX);
    let simplices = enumerate(&adj, cap, budget.max_simplices, |_| (), |_, _, _| Some(()))?;
    let labels = faces.iter().cloned().map(VertexLabel::Face).collect();
    Ok(SimplicialComplex::from_sorted_parts(labels, simplices, dim_cap, Some(Arc::new(ChainOracle { sets: faces }))))
}

#[derive(Debug)]
struct CommonWitnessOracle {
    witnesses: Vec<Vec<usize>>,
}

impl SimplexOracle for CommonWitnessOracle {
    fn contains(&self, simplex: &[usize]) -> bool {
        let mut common = self.witnesses[simplex[0]].clone();
        for &v in &simplex[1..] {
            common = sorted_intersection(&common, &self.witnesses[v]);
            if common.is_empty() {
                return false;
            }
        }
        !common.is_empty()
    }
}

/// Reference points strictly within `radius` of each centre.
fn ball_members(space: &FiniteMetricSpace, centres: &[usize], radius: &Threshold) -> Vec<Vec<usize>> {
    let all: Vec<usize> = (0..space.len()).collect();
    let search = NeighborSearch::new(space, &all);
    let (_, hi) = radius.bounds();
    centres
        .iter()
        .map(|&a| search.within(a, hi).into_iter().filter(|&x| space.distance_lt(x, a, radius)).collect())
        .collect()
}

/// Adjacency of sets that share an element.
fn overlap_graph(sets: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut holders: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, s) in sets.iter().enumerate() {
        for &x in s {
            holders.entry(x).or_default().push(i);
        }
    }
    let mut adj = vec![Vec::new(); sets.len()];
    for list in holders.values() {
        for &i in list {
            adj[i].extend(list.iter().copied().filter(|&j| j != i));
        }
    }
    sorted_adjacency(adj)
}

/// Nerve of the balls `B(a, ε_n)`, with intersections witnessed by reference points.
pub fn cech_nerve(
    space: &Arc<FiniteMetricSpace>,
    approx: &Approximation,
    dim_cap: usize,
    budget: &Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let witnesses = ball_members(space, &approx.subset, &approx.epsilon);
    let adj = overlap_graph(&witnesses);
    let simplices = enumerate(
        &adj,
        dim_cap,
        budget.max_simplices,
        |v| witnesses[v].clone(),
        |_, common: &Vec<usize>, w| {
            let next = sorted_intersection(common, &witnesses[w]);
            (!next.is_empty()).then_some(next)
        },
    )?;
    let labels = approx.subset.iter().map(|&p| VertexLabel::Ball(p)).collect();
    Ok(SimplicialComplex::from_sorted_parts(
        labels,
        simplices,
        Some(dim_cap),
        Some(Arc::new(CommonWitnessOracle { witnesses })),
    ))
}

/// Decides whether `Σ_j d(x, a_j) < k·ε` has a witness `x` among the reference points.
#[derive(Debug)]
struct WitnessTest {
    space: Arc<FiniteMetricSpace>,
    ids: Vec<usize>,
    epsilon: Threshold,
    // reference points within ε of each vertex; every witness lies in one of them
    near: Vec<Vec<usize>>,
    cache: Mutex<HashMap<Vec<usize>, bool>>,
}

impl WitnessTest {
    fn admissible(&self, subset: &[usize]) -> bool {
        if subset.len() == 1 {
            return true;
        }
        if let Some(&known) = self.cache.lock().expect("witness cache").get(subset) {
            return known;
        }
        let points: Vec<usize> = subset.iter().map(|&v| self.ids[v]).collect();
        let bound = self.epsilon.times(subset.len() as i64);
        let mut candidates: Vec<usize> = Vec::new();
        for &v in subset {
            candidates = sorted_union(&candidates, &self.near[v]);
        }
        let found = candidates
            .iter()
            .any(|&x| self.space.cmp_distance_sum(x, &points, &bound) == std::cmp::Ordering::Less);
        self.cache.lock().expect("witness cache").insert(subset.to_vec(), found);
        found
    }

    /// Every subset of `simplex ∪ {w}` containing `w` is admissible.
    fn extends(&self, simplex: &[usize], w: usize) -> bool {
        let k = simplex.len();
        (0u64..(1u64 << k)).all(|mask| {
            let mut sub: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| simplex[b]).collect();
            sub.push(w);
            self.admissible(&sub)
        })
    }
}

impl SimplexOracle for WitnessTest {
    fn contains(&self, simplex: &[usize]) -> bool {
        let k = simplex.len();
        (1u64..(1u64 << k)).all(|mask| {
            let sub: Vec<usize> = (0..k).filter(|b| mask >> b & 1 == 1).map(|b| simplex[b]).collect();
            self.admissible(&sub)
        })
    }
}

/// Witness complex: every nonempty subset needs a reference witness with
/// `Σ d(x, a_j) < (r+1)·ε_n`.
pub fn witness_complex(
    space: &Arc<FiniteMetricSpace>,
    approx: &Approximation,
    dim_cap: usize,
    budget: &Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let near = ball_members(space, &approx.subset, &approx.epsilon);
    let test = Arc::new(WitnessTest {
        space: space.clone(),
        ids: approx.subset.clone(),
        epsilon: approx.epsilon.clone(),
        near,
        cache: Mutex::new(HashMap::new()),
    });
    // admissible pairs are Rips edges at 2ε
    let graph = threshold_graph(space, &approx.subset, &approx.epsilon.times(2));
    let simplices = enumerate(&graph, dim_cap, budget.max_simplices, |_| (), |s, _, w| test.extends(s, w).then_some(()))?;
    let labels = approx.subset.iter().map(|&p| VertexLabel::Point(p)).collect();
    Ok(SimplicialComplex::from_sorted_parts(labels, simplices, Some(dim_cap), Some(test)))
}

#[derive(Debug)]
struct UnionOracle {
    poset: Arc<FinitePoset>,
}

impl SimplexOracle for UnionOracle {
    fn contains(&self, simplex: &[usize]) -> bool {
        let mut union: Vec<usize> = Vec::new();
        for &v in simplex {
            union = sorted_union(&union, self.poset.element(v));
        }
        self.poset.index_of(&union).is_some()
    }
}

/// Upper Dowker complex: families contained in a common element.
pub fn dowker_upper(
    poset: &Arc<FinitePoset>,
    dim_cap: usize,
    budget: &Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let n = poset.len();
    let mut adj = vec![Vec::new(); n];
    for c in 0..n {
        for d in c + 1..n {
            if poset.index_of(&sorted_union(poset.element(c), poset.element(d))).is_some() {
                adj[c].push(d);
                adj[d].push(c);
            }
        }
    }
    let simplices = enumerate(
        &adj,
        dim_cap,
        budget.max_simplices,
        |v| poset.element(v).to_vec(),
        |_, union: &Vec<usize>, w| {
            let next = sorted_union(union, poset.element(w));
            poset.index_of(&next).is_some().then_some(next)
        },
    )?;
    let labels = poset.elements().iter().cloned().map(VertexLabel::Subset).collect();
    Ok(SimplicialComplex::from_sorted_parts(
        labels,
        simplices,
        Some(dim_cap),
        Some(Arc::new(UnionOracle { poset: poset.clone() })),
    ))
}

#[derive(Debug)]
struct IntersectionOracle {
    sets: Vec<Vec<usize>>,
}

impl SimplexOracle for IntersectionOracle {
    fn contains(&self, simplex: &[usize]) -> bool {
        let mut common = self.sets[simplex[0]].clone();
        for &v in &simplex[1..] {
            common = sorted_intersection(&common, &self.sets[v]);
        }
        !common.is_empty()
    }
}

/// Lower Dowker complex: families sharing a common point.
pub fn dowker_lower(
    poset: &Arc<FinitePoset>,
    dim_cap: usize,
    budget: &Budget,
) -> Result<SimplicialComplex, ComplexError> {
    let sets = poset.elements().to_vec();
    let adj = overlap_graph(&sets);
    let simplices = enumerate(
        &adj,
        dim_cap,
        budget.max_simplices,
        |v| sets[v].clone(),
        |_, common: &Vec<usize>, w| {
            let next = sorted_intersection(common, &sets[w]);
            (!next.is_empty()).then_some(next)
        },
    )?;
    let labels = sets.iter().cloned().map(VertexLabel::Subset).collect();
    Ok(SimplicialComplex::from_sorted_parts(labels, simplices, Some(dim_cap), Some(Arc::new(IntersectionOracle { sets }))))
}
