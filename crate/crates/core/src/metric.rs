//! Finite metric spaces with exact distances, nearest sets and the ladder of
//! adjusted approximations built on top of them.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{format_rational, parse_rational, ParseError, Surd, Threshold};

const UNIT_ROUNDOFF: f64 = 1.0 / 9_007_199_254_740_992.0; // 2^-53
const TINY: f64 = 1e-300;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricError {
    #[error("input contains no points")]
    Empty,
    #[error("input must contain exactly one of \"points\" or \"distance_matrix\"")]
    Shape,
    #[error("point {index} has {found} coordinates, expected {expected}")]
    Dimension { index: usize, found: usize, expected: usize },
    #[error("distance matrix row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("distance matrix is asymmetric at ({i}, {j})")]
    Asymmetric { i: usize, j: usize },
    #[error("negative distance at ({i}, {j})")]
    Negative { i: usize, j: usize },
    #[error("nonzero diagonal entry at {i}")]
    NonzeroDiagonal { i: usize },
    #[error("distinct points {i} and {j} are at distance zero")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("triangle inequality fails: d({i},{k}) > d({i},{j}) + d({j},{k})")]
    Triangle { i: usize, j: usize, k: usize },
    #[error("empty subset")]
    EmptySubset,
    #[error("point id {id} out of range for a space of {len} points")]
    OutOfRange { id: usize, len: usize },
    #[error("subset ids must be strictly increasing (found {prev} before {next})")]
    Unsorted { prev: usize, next: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum Scalar {
    Text(String),
    Integer(i64),
}

impl Scalar {
    fn to_rational(&self) -> Result<BigRational, ParseError> {
        match self {
            Scalar::Text(s) => parse_rational(s),
            Scalar::Integer(n) => Ok(BigRational::from_integer((*n).into())),
        }
    }
}

/// The JSON shape of a point cloud or a distance matrix.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(deny_unknown_fields)]
pub struct SpaceInput {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub points: Option<Vec<Vec<Scalar>>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub distance_matrix: Option<Vec<Vec<Scalar>>>,
}

#[derive(Debug, Clone)]
enum Repr {
    Coordinates(Vec<Vec<BigRational>>),
    Distances(Vec<Vec<BigRational>>),
}

/// A finite metric space whose distances are decided exactly.
///
/// Points are identified by their index. Coordinate spaces are Euclidean;
/// matrix spaces carry user-supplied rational distances.
#[derive(Debug, Clone)]
pub struct FiniteMetricSpace {
    repr: Repr,
    // f64 shadows of the exact data, used to skip most exact comparisons
    approx_coords: Vec<f64>,
    approx_l1: Vec<f64>,
    approx_dist: Vec<f64>,
    dim: usize,
}

impl FiniteMetricSpace {
    pub fn from_points(points: Vec<Vec<BigRational>>) -> Result<Self, MetricError> {
        if points.is_empty() {
            return Err(MetricError::Empty);
        }
        let dim = points[0].len();
        for (index, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(MetricError::Dimension { index, found: p.len(), expected: dim });
            }
        }
        let mut approx_coords = Vec::with_capacity(points.len() * dim);
        let mut approx_l1 = Vec::with_capacity(points.len());
        for p in &points {
            let mut l1 = 0.0;
            for c in p {
                let v = c.to_f64().unwrap_or(f64::NAN);
                approx_coords.push(v);
                l1 += v.abs();
            }
            approx_l1.push(l1);
        }
        Ok(FiniteMetricSpace {
            repr: Repr::Coordinates(points),
            approx_coords,
            approx_l1,
            approx_dist: Vec::new(),
            dim,
        })
    }

    pub fn from_distance_matrix(rows: Vec<Vec<BigRational>>) -> Result<Self, MetricError> {
        let n = rows.len();
        if n == 0 {
            return Err(MetricError::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
            }
        }
        for i in 0..n {
            if !rows[i][i].is_zero() {
                return Err(MetricError::NonzeroDiagonal { i });
            }
            for j in 0..n {
                if rows[i][j].is_negative() {
                    return Err(MetricError::Negative { i, j });
                }
                if rows[i][j] != rows[j][i] {
                    return Err(MetricError::Asymmetric { i: i.min(j), j: i.max(j) });
                }
                if i != j && rows[i][j].is_zero() {
                    return Err(MetricError::ZeroOffDiagonal { i: i.min(j), j: i.max(j) });
                }
            }
        }
        let approx_dist = rows
            .iter()
            .flat_map(|r| r.iter().map(|d| d.to_f64().unwrap_or(f64::NAN)))
            .collect();
        let space = FiniteMetricSpace {
            repr: Repr::Distances(rows),
            approx_coords: Vec::new(),
            approx_l1: Vec::new(),
            approx_dist,
            dim: 0,
        };
        space.check_triangle_inequality()?;
        Ok(space)
    }

    pub fn from_input(input: &SpaceInput) -> Result<Self, MetricError> {
        let parse_rows = |rows: &Vec<Vec<Scalar>>| -> Result<Vec<Vec<BigRational>>, MetricError> {
            rows.iter()
                .map(|r| r.iter().map(|s| s.to_rational().map_err(MetricError::from)).collect())
                .collect()
        };
        match (&input.points, &input.distance_matrix) {
            (Some(points), None) => Self::from_points(parse_rows(points)?),
            (None, Some(rows)) => Self::from_distance_matrix(parse_rows(rows)?),
            _ => Err(MetricError::Shape),
        }
    }

    pub fn to_input(&self) -> SpaceInput {
        let fmt_rows = |rows: &Vec<Vec<BigRational>>| {
            rows.iter()
                .map(|r| r.iter().map(|q| Scalar::Text(format_rational(q))).collect())
                .collect()
        };
        match &self.repr {
            Repr::Coordinates(p) => SpaceInput { points: Some(fmt_rows(p)), distance_matrix: None },
            Repr::Distances(d) => SpaceInput { points: None, distance_matrix: Some(fmt_rows(d)) },
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Coordinates(p) => p.len(),
            Repr::Distances(d) => d.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coordinates(&self, i: usize) -> Option<&[BigRational]> {
        match &self.repr {
            Repr::Coordinates(p) => Some(&p[i]),
            Repr::Distances(_) => None,
        }
    }

    fn approx_point(&self, i: usize) -> &[f64] {
        &self.approx_coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Exact squared distance.
    pub fn sqdist(&self, i: usize, j: usize) -> BigRational {
        match &self.repr {
            Repr::Coordinates(p) => {
                let mut s = BigRational::zero();
                for (a, b) in p[i].iter().zip(&p[j]) {
                    let d = a - b;
                    s += &d * &d;
                }
                s
            }
            Repr::Distances(d) => &d[i][j] * &d[i][j],
        }
    }

    /// Exact distance.
    pub fn distance(&self, i: usize, j: usize) -> Surd {
        match &self.repr {
            Repr::Coordinates(_) => Surd::sqrt(&self.sqdist(i, j)),
            Repr::Distances(d) => Surd::rational(d[i][j].clone()),
        }
    }

    /// Floating-point distance together with a rigorous error bound.
    pub fn approx_distance(&self, i: usize, j: usize) -> (f64, f64) {
        if i == j {
            return (0.0, 0.0);
        }
        let (value, err) = match &self.repr {
            Repr::Coordinates(_) => {
                let (a, b) = (self.approx_point(i), self.approx_point(j));
                let mut s = 0.0;
                for k in 0..self.dim {
                    let d = a[k] - b[k];
                    s += d * d;
                }
                let v = s.sqrt();
                let dim = self.dim as f64;
                let err = 8.0 * UNIT_ROUNDOFF * (self.approx_l1[i] + self.approx_l1[j])
                    + 8.0 * (dim + 2.0) * UNIT_ROUNDOFF * v
                    + TINY;
                (v, err)
            }
            Repr::Distances(_) => {
                let v = self.approx_dist[i * self.len() + j];
                (v, 4.0 * UNIT_ROUNDOFF * v.abs() + TINY)
            }
        };
        if value.is_finite() && err.is_finite() {
            (value, err)
        } else {
            (0.0, f64::INFINITY)
        }
    }

    /// Compares `d(i, j)` with `t` exactly.
    pub fn cmp_distance(&self, i: usize, j: usize, t: &Threshold) -> Ordering {
        let (v, e) = self.approx_distance(i, j);
        let (lo, hi) = t.bounds();
        if v + e < lo {
            return Ordering::Less;
        }
        if v - e > hi {
            return Ordering::Greater;
        }
        match &self.repr {
            Repr::Coordinates(_) => t.cmp_sqrt(&self.sqdist(i, j)),
            Repr::Distances(d) => (&Surd::rational(d[i][j].clone()) - t.value()).signum(),
        }
    }

    pub fn distance_lt(&self, i: usize, j: usize, t: &Threshold) -> bool {
        self.cmp_distance(i, j, t) == Ordering::Less
    }

    /// Compares `Σ_k d(x, a_k)` with `t` exactly.
    pub fn cmp_distance_sum(&self, x: usize, others: &[usize], t: &Threshold) -> Ordering {
        let mut v = 0.0;
        let mut e = 0.0;
        for &a in others {
            let (dv, de) = self.approx_distance(x, a);
            v += dv;
            e += de + 2.0 * UNIT_ROUNDOFF * v.abs();
        }
        let (lo, hi) = t.bounds();
        if v + e < lo {
            return Ordering::Less;
        }
        if v - e > hi {
            return Ordering::Greater;
        }
        let mut sum = Surd::zero();
        for &a in others {
            sum = &sum + &self.distance(x, a);
        }
        (&sum - t.value()).signum()
    }

    /// Checks `d(i,k) ≤ d(i,j) + d(j,k)` for every triple.
    pub fn check_triangle_inequality(&self) -> Result<(), MetricError> {
        let n = self.len();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i == k {
                        continue;
                    }
                    let (a, ea) = self.approx_distance(i, j);
                    let (b, eb) = self.approx_distance(j, k);
                    let (c, ec) = self.approx_distance(i, k);
                    if c + ec <= (a - ea) + (b - eb) - 4.0 * UNIT_ROUNDOFF * (a + b) {
                        continue;
                    }
                    let lhs = self.distance(i, k);
                    let rhs = &self.distance(i, j) + &self.distance(j, k);
                    if lhs > rhs {
                        return Err(MetricError::Triangle { i, j, k });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn validate_subset(&self, subset: &[usize]) -> Result<(), MetricError> {
        if subset.is_empty() {
            return Err(MetricError::EmptySubset);
        }
        for w in subset.windows(2) {
            if w[0] >= w[1] {
                return Err(MetricError::Unsorted { prev: w[0], next: w[1] });
            }
        }
        let len = self.len();
        match subset.last() {
            Some(&id) if id >= len => Err(MetricError::OutOfRange { id, len }),
            _ => Ok(()),
        }
    }

    /// All points of `members` realizing the minimal distance to `x`.
    pub fn nearest_set(&self, x: usize, members: &[usize]) -> Vec<usize> {
        nearest_exact(self, x, members.iter().copied())
    }

    /// Exact diameter of a subset, `None` when empty.
    pub fn diameter(&self, subset: &[usize]) -> Option<Surd> {
        let mut best: Option<(BigRational, usize, usize)> = None;
        for (k, &i) in subset.iter().enumerate() {
            for &j in &subset[k + 1..] {
                let sq = self.sqdist(i, j);
                if best.as_ref().map_or(true, |(b, _, _)| sq > *b) {
                    best = Some((sq, i, j));
                }
            }
        }
        match best {
            None if subset.is_empty() => None,
            None => Some(Surd::zero()),
            Some((_, i, j)) => Some(self.distance(i, j)),
        }
    }
}

fn nearest_exact(space: &FiniteMetricSpace, x: usize, candidates: impl Iterator<Item = usize>) -> Vec<usize> {
    let candidates: Vec<usize> = candidates.collect();
    // Upper bound on the minimum via the float filter, then exact ties.
    let mut best_hi = f64::INFINITY;
    let mut approx = Vec::with_capacity(candidates.len());
    for &a in &candidates {
        let (v, e) = space.approx_distance(x, a);
        best_hi = best_hi.min(v + e);
        approx.push((v, e));
    }
    let mut best: Option<BigRational> = None;
    let mut out = Vec::new();
    for (&a, &(v, e)) in candidates.iter().zip(&approx) {
        if v - e > best_hi {
            continue;
        }
        let sq = space.sqdist(x, a);
        match best.as_ref().map(|b| sq.cmp(b)) {
            None | Some(Ordering::Less) => {
                best = Some(sq);
                out.clear();
                out.push(a);
            }
            Some(Ordering::Equal) => out.push(a),
            Some(Ordering::Greater) => {}
        }
    }
    out.sort_unstable();
    out
}

/// Uniform grid over the float shadows of a coordinate space, used to find
/// candidate neighbours. Every query returns a superset of the exact answer.
pub struct NeighborSearch<'a> {
    space: &'a FiniteMetricSpace,
    members: Vec<usize>,
    grid: Option<Grid>,
}

struct Grid {
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> NeighborSearch<'a> {
    pub fn new(space: &'a FiniteMetricSpace, members: &[usize]) -> Self {
        let members = members.to_vec();
        let grid = Self::build_grid(space, &members);
        NeighborSearch { space, members, grid }
    }

    fn build_grid(space: &FiniteMetricSpace, members: &[usize]) -> Option<Grid> {
        if space.dim == 0 || space.dim > 3 || members.len() < 64 {
            return None;
        }
        let mut lo = vec![f64::INFINITY; space.dim];
        let mut hi = vec![f64::NEG_INFINITY; space.dim];
        for &m in members {
            for (k, &c) in space.approx_point(m).iter().enumerate() {
                if !c.is_finite() || c.abs() > 1e150 {
                    return None;
                }
                lo[k] = lo[k].min(c);
                hi[k] = hi[k].max(c);
            }
        }
        let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
        if extent <= 0.0 {
            return None;
        }
        // aim for a handful of members per occupied cell along curves and clouds
        let cell = extent / (members.len() as f64).powf(1.0 / space.dim as f64).max(1.0) * 2.0;
        if !(cell > 0.0) || !cell.is_finite() {
            return None;
        }
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for &m in members {
            let key = space.approx_point(m).iter().map(|c| (c / cell).floor() as i64).collect();
            cells.entry(key).or_default().push(m);
        }
        Some(Grid { cell, cells })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Members that may lie within distance `radius` of point `x`, sorted.
    pub fn within(&self, x: usize, radius: f64) -> Vec<usize> {
        let keep = |m: usize| {
            let (v, e) = self.space.approx_distance(x, m);
            v - e <= radius
        };
        let mut out: Vec<usize> = match &self.grid {
            Some(grid) if radius.is_finite() => {
                let center = self.space.approx_point(x);
                let pad = radius + grid.cell * 1e-9;
                let lo: Vec<i64> = center.iter().map(|c| ((c - pad) / grid.cell).floor() as i64).collect();
                let hi: Vec<i64> = center.iter().map(|c| ((c + pad) / grid.cell).floor() as i64).collect();
                let count: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a + 1) as f64).product();
                if count > (self.members.len() as f64).max(grid.cells.len() as f64) {
                    self.members.iter().copied().filter(|&m| keep(m)).collect()
                } else {
                    let mut out = Vec::new();
                    let mut key = lo.clone();
                    loop {
                        if let Some(bucket) = grid.cells.get(&key) {
                            out.extend(bucket.iter().copied().filter(|&m| keep(m)));
                        }
                        let mut k = 0;
                        loop {
                            if k == key.len() {
                                out.sort_unstable();
                                return out;
                            }
                            key[k] += 1;
                            if key[k] <= hi[k] {
                                break;
                            }
                            key[k] = lo[k];
                            k += 1;
                        }
                    }
                }
            }
            _ => self.members.iter().copied().filter(|&m| keep(m)).collect(),
        };
        out.sort_unstable();
        out
    }

    /// The exact nearest set of `x` among the members.
    pub fn nearest(&self, x: usize) -> Vec<usize> {
        let Some(grid) = &self.grid else {
            return nearest_exact(self.space, x, self.members.iter().copied());
        };
        let mut radius = grid.cell;
        loop {
            let found = self.within(x, radius);
            if !found.is_empty() {
                let best_hi = found
                    .iter()
                    .map(|&m| {
                        let (v, e) = self.space.approx_distance(x, m);
                        v + e
                    })
                    .fold(f64::INFINITY, f64::min);
                // every member that might beat the current best
                let pool = self.within(x, best_hi);
                return nearest_exact(self.space, x, pool.into_iter());
            }
            radius *= 2.0;
            if !radius.is_finite() {
                return nearest_exact(self.space, x, self.members.iter().copied());
            }
        }
    }
}

/// `q_A(x)` for every query point.
pub fn nearest_sets(space: &FiniteMetricSpace, members: &[usize], queries: &[usize]) -> Vec<Vec<usize>> {
    let search = NeighborSearch::new(space, members);
    queries.iter().map(|&x| search.nearest(x)).collect()
}

/// Largest distance from a reference point to `subset`.
pub fn gamma_of(space: &FiniteMetricSpace, subset: &[usize]) -> Result<Threshold, MetricError> {
    space.validate_subset(subset)?;
    let search = NeighborSearch::new(space, subset);
    let mut worst = BigRational::zero();
    for x in 0..space.len() {
        let near = search.nearest(x);
        let sq = space.sqdist(x, near[0]);
        if sq > worst {
            worst = sq;
        }
    }
    Ok(match &space.repr {
        Repr::Coordinates(_) => Threshold::sqrt_of(&worst),
        Repr::Distances(_) => {
            // distances are rational here; recover d from d²
            let d = (0..space.len())
                .flat_map(|x| subset.iter().map(move |&a| (x, a)))
                .find(|&(x, a)| space.sqdist(x, a) == worst)
                .map(|(x, a)| space.distance(x, a))
                .unwrap_or_else(Surd::zero);
            Threshold::new(d).expect("distances are nonnegative")
        }
    })
}

/// Farthest-point insertion seeded at point 0; ties go to the lowest id.
pub fn greedy_epsilon_approximation(space: &FiniteMetricSpace, eps: &Threshold) -> Vec<usize> {
    let n = space.len();
    let mut chosen = vec![0usize];
    let mut min_sq: Vec<BigRational> = (0..n).map(|x| space.sqdist(x, 0)).collect();
    loop {
        let mut far = 0;
        for x in 1..n {
            if min_sq[x] > min_sq[far] {
                far = x;
            }
        }
        if eps.cmp_sqrt(&min_sq[far]) == Ordering::Less {
            break;
        }
        chosen.push(far);
        for x in 0..n {
            let (v, e) = space.approx_distance(x, far);
            let current = min_sq[x].to_f64().unwrap_or(f64::INFINITY).sqrt();
            if (v - e) > current * (1.0 + 4.0 * UNIT_ROUNDOFF) + TINY {
                continue;
            }
            let sq = space.sqdist(x, far);
            if sq < min_sq[x] {
                min_sq[x] = sq;
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

/// One rung `(ε_n, A_n, γ_n)` of the ladder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Approximation {
    pub level: usize,
    pub epsilon: Threshold,
    pub gamma: Threshold,
    pub subset: Vec<usize>,
}

/// Explicit values for one level, any of which may be left to the default.
#[derive(Debug, Clone, Default)]
pub struct LevelOverride {
    pub epsilon: Option<Threshold>,
    pub subset: Option<Vec<usize>>,
    pub gamma: Option<Threshold>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LadderError {
    #[error("level {level}: {source}")]
    Subset { level: usize, source: MetricError },
    #[error("level {level}: epsilon must be positive")]
    NonPositiveEpsilon { level: usize },
    #[error("level {level}: gamma {gamma} is not below epsilon {epsilon}")]
    NotAnApproximation { level: usize, gamma: String, epsilon: String },
    #[error("level {level}: stated gamma {stated} is below the reference value {computed}")]
    GammaUnderstated { level: usize, stated: String, computed: String },
    #[error("level {level}: epsilon {next} violates epsilon_{level} < (epsilon_{prev_level} - gamma_{prev_level})/2 = {bound}")]
    Adjustment { level: usize, prev_level: usize, next: String, bound: String },
    #[error("levels must be numbered 1, 2, … in order (found {found} at position {position})")]
    Numbering { position: usize, found: usize },
    #[error("ladder has no levels")]
    NoLevels,
}

/// `X_ref` together with the adjusted ladder of approximations.
#[derive(Debug, Clone)]
pub struct AdjustedSequence {
    pub reference: Arc<FiniteMetricSpace>,
    pub levels: Vec<Approximation>,
}

impl AdjustedSequence {
    pub fn level(&self, n: usize) -> Option<&Approximation> {
        self.levels.get(n.checked_sub(1)?)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Re-checks every level against the reference and every adjustment
    /// inequality between neighbours.
    pub fn validate(&self) -> Result<(), LadderError> {
        if self.levels.is_empty() {
            return Err(LadderError::NoLevels);
        }
        let mut prev: Option<&Approximation> = None;
        for (position, a) in self.levels.iter().enumerate() {
            if a.level != position + 1 {
                return Err(LadderError::Numbering { position, found: a.level });
            }
            check_level(&self.reference, a)?;
            if let Some(p) = prev {
                check_adjustment(p, a)?;
            }
            prev = Some(a);
        }
        Ok(())
    }
}

fn check_level(space: &FiniteMetricSpace, a: &Approximation) -> Result<(), LadderError> {
    let level = a.level;
    if a.epsilon.is_zero() {
        return Err(LadderError::NonPositiveEpsilon { level });
    }
    let computed = gamma_of(space, &a.subset).map_err(|source| LadderError::Subset { level, source })?;
    if computed > a.gamma {
        return Err(LadderError::GammaUnderstated {
            level,
            stated: a.gamma.to_string(),
            computed: computed.to_string(),
        });
    }
    if a.gamma >= a.epsilon {
        return Err(LadderError::NotAnApproximation {
            level,
            gamma: a.gamma.to_string(),
            epsilon: a.epsilon.to_string(),
        });
    }
    Ok(())
}

fn check_adjustment(prev: &Approximation, next: &Approximation) -> Result<(), LadderError> {
    let bound = prev
        .epsilon
        .minus(&prev.gamma)
        .and_then(|d| d.scale(&BigRational::new(1.into(), 2.into())))
        .unwrap_or_else(Threshold::zero);
    if next.epsilon >= bound {
        return Err(LadderError::Adjustment {
            level: next.level,
            prev_level: prev.level,
            next: next.epsilon.to_string(),
            bound: bound.to_string(),
        });
    }
    Ok(())
}

/// Builds `depth` levels, taking explicit values from `overrides` where given
/// and otherwise `ε_{n+1} = (ε_n − γ_n)/4` with a greedy approximation.
pub fn build_adjusted_sequence(
    reference: Arc<FiniteMetricSpace>,
    eps1: &Threshold,
    depth: usize,
    overrides: &[LevelOverride],
) -> Result<AdjustedSequence, LadderError> {
    if depth == 0 {
        return Err(LadderError::NoLevels);
    }
    let quarter = BigRational::new(1.into(), 4.into());
    let mut levels: Vec<Approximation> = Vec::with_capacity(depth);
    for level in 1..=depth {
        let o = overrides.get(level - 1).cloned().unwrap_or_default();
        let epsilon = match (o.epsilon, levels.last()) {
            (Some(e), _) => e,
            (None, None) => eps1.clone(),
            (None, Some(p)) => p
                .epsilon
                .minus(&p.gamma)
                .and_then(|d| d.scale(&quarter))
                .unwrap_or_else(Threshold::zero),
        };
        if epsilon.is_zero() {
            return Err(LadderError::NonPositiveEpsilon { level });
        }
        let subset = match o.subset {
            Some(s) => s,
            None => greedy_epsilon_approximation(&reference, &epsilon),
        };
        let computed =
            gamma_of(&reference, &subset).map_err(|source| LadderError::Subset { level, source })?;
        let gamma = o.gamma.unwrap_or_else(|| computed.clone());
        let a = Approximation { level, epsilon, gamma, subset };
        check_level(&reference, &a)?;
        if let Some(p) = levels.last() {
            check_adjustment(p, &a)?;
        }
        levels.push(a);
    }
    Ok(AdjustedSequence { reference, levels })
}

/// Self-contained JSON form of a ladder.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LadderFile {
    pub reference: SpaceInput,
    pub levels: Vec<Approximation>,
}

impl LadderFile {
    pub fn from_sequence(seq: &AdjustedSequence) -> Self {
        LadderFile { reference: seq.reference.to_input(), levels: seq.levels.clone() }
    }
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "level {}: eps = {}, gamma = {}, |A| = {}",
            self.level,
            self.epsilon,
            self.gamma,
            self.subset.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn line(xs: &[i64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_points(xs.iter().map(|&x| vec![q(x)]).collect()).unwrap()
    }

    #[test]
    fn euclidean_squared_distances() {
        let s = FiniteMetricSpace::from_points(vec![vec![q(0), q(0)], vec![q(1), q(0)]]).unwrap();
        assert_eq!(s.sqdist(0, 1), q(1));
        let s = FiniteMetricSpace::from_points(vec![vec![q(0), q(0)], vec![q(3), q(4)]]).unwrap();
        // oracle: 3² + 4²
        assert_eq!(s.sqdist(0, 1), q(3 * 3 + 4 * 4));
        assert_eq!(s.distance(0, 1).as_rational(), Some(q(5)));
    }

    #[test]
    fn distance_matrix_validation() {
        let ok = FiniteMetricSpace::from_distance_matrix(vec![vec![q(0), q(1)], vec![q(1), q(0)]]);
        assert_eq!(ok.unwrap().sqdist(0, 1), q(1));
        let asym = FiniteMetricSpace::from_distance_matrix(vec![vec![q(0), q(1)], vec![q(2), q(0)]]);
        assert_eq!(asym.unwrap_err(), MetricError::Asymmetric { i: 0, j: 1 });
        let diag = FiniteMetricSpace::from_distance_matrix(vec![vec![q(1), q(1)], vec![q(1), q(0)]]);
        assert_eq!(diag.unwrap_err(), MetricError::NonzeroDiagonal { i: 0 });
        let neg = FiniteMetricSpace::from_distance_matrix(vec![vec![q(0), q(-1)], vec![q(-1), q(0)]]);
        assert_eq!(neg.unwrap_err(), MetricError::Negative { i: 0, j: 1 });
        let tri = FiniteMetricSpace::from_distance_matrix(vec![
            vec![q(0), q(1), q(5)],
            vec![q(1), q(0), q(1)],
            vec![q(5), q(1), q(0)],
        ]);
        assert!(matches!(tri.unwrap_err(), MetricError::Triangle { .. }));
    }

    #[test]
    fn nearest_set_examples() {
        let s = line(&[0, 1, 2, 4, 5]);
        // point ids: 0→0, 1→1, 2→2, 3→4, 4→5
        assert_eq!(s.nearest_set(2, &[0, 2]), vec![2]);
        assert_eq!(s.nearest_set(1, &[0, 2]), vec![0, 2]);
        assert_eq!(s.nearest_set(3, &[0, 2, 4]), vec![4]);
    }

    #[test]
    fn gamma_examples() {
        let s = line(&[0, 1, 2]);
        assert!(gamma_of(&s, &[0, 1, 2]).unwrap().is_zero());
        assert_eq!(gamma_of(&s, &[0, 2]).unwrap(), Threshold::ratio(1, 1));
        assert!(gamma_of(&s, &[]).is_err());
    }

    #[test]
    fn greedy_examples() {
        let s = line(&[0, 1]);
        assert_eq!(greedy_epsilon_approximation(&s, &Threshold::ratio(2, 1)), vec![0]);
        assert_eq!(greedy_epsilon_approximation(&s, &Threshold::ratio(1, 2)), vec![0, 1]);
        let s = line(&(0..10).collect::<Vec<_>>());
        let eps = Threshold::ratio(3, 2);
        let a = greedy_epsilon_approximation(&s, &eps);
        // exhaustive cover oracle
        for x in 0..10 {
            assert!(a.iter().any(|&c| s.distance_lt(x, c, &eps)), "point {x} uncovered by {a:?}");
        }
    }

    #[test]
    fn ladder_on_single_point() {
        let s = Arc::new(line(&[0]));
        let seq = build_adjusted_sequence(s, &Threshold::ratio(1, 1), 3, &[]).unwrap();
        for a in &seq.levels {
            assert_eq!(a.subset, vec![0]);
            assert!(a.gamma.is_zero());
        }
        seq.validate().unwrap();
    }

    #[test]
    fn ladder_rejects_bad_override() {
        let s = Arc::new(line(&[0, 1, 2, 3]));
        let overrides = vec![
            LevelOverride { epsilon: Some(Threshold::ratio(4, 1)), ..Default::default() },
            LevelOverride { epsilon: Some(Threshold::ratio(3, 1)), ..Default::default() },
        ];
        let err = build_adjusted_sequence(s, &Threshold::ratio(4, 1), 2, &overrides).unwrap_err();
        assert!(matches!(err, LadderError::Adjustment { level: 2, .. }), "{err}");
    }

    #[test]
    fn neighbor_search_matches_brute_force() {
        let pts: Vec<Vec<BigRational>> = (0..200)
            .map(|i| vec![BigRational::new((i * 37 % 101).into(), 7.into()), BigRational::new((i * 53 % 89).into(), 5.into())])
            .collect();
        let s = FiniteMetricSpace::from_points(pts).unwrap();
        let members: Vec<usize> = (0..200).step_by(3).collect();
        let search = NeighborSearch::new(&s, &members);
        for x in 0..200 {
            assert_eq!(search.nearest(x), s.nearest_set(x, &members));
        }
    }
}
