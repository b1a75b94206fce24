#![allow(dead_code)]

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use polyshape::complexes::{
    barycentric_subdivision, cech_nerve, dowker_lower, dowker_upper, mccord_complex, rips_complex, witness_complex,
    Budget, SimplicialComplex,
};
use polyshape::exact::Threshold;
use polyshape::finite_space::{build_finite_space, FinitePoset};
use polyshape::metric::{gamma_of, greedy_epsilon_approximation, Approximation, FiniteMetricSpace};
use proptest::prelude::*;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn plane(points: &[(i64, i64)]) -> Arc<FiniteMetricSpace> {
    let coords = points.iter().map(|&(x, y)| vec![q(x, 1), q(y, 1)]).collect();
    Arc::new(FiniteMetricSpace::from_points(coords).expect("distinct points"))
}

/// Two to eight distinct lattice points.
pub fn point_sets(max: usize) -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::btree_set((0i64..6, 0i64..6), 2..=max).prop_map(|s| s.into_iter().collect())
}

/// `k/2` for `k` in `1..=6`.
pub fn half_integers() -> impl Strategy<Value = Threshold> {
    (1i64..=6).prop_map(|k| Threshold::ratio(k, 2))
}

/// A greedy ε-approximation of `space` packaged as level 1.
pub fn level_one(space: &FiniteMetricSpace, eps: &Threshold) -> Approximation {
    let subset = greedy_epsilon_approximation(space, eps);
    let gamma = gamma_of(space, &subset).expect("nonempty");
    Approximation { level: 1, epsilon: eps.clone(), gamma, subset }
}

pub fn poset(space: &FiniteMetricSpace, a: &Approximation) -> Arc<FinitePoset> {
    Arc::new(build_finite_space(space, a, None, Budget::default().max_elements).expect("within budget"))
}

/// Every complex family built from one approximation.
pub fn families(space: &Arc<FiniteMetricSpace>, a: &Approximation, cap: usize) -> Vec<(&'static str, Arc<SimplicialComplex>)> {
    let budget = Budget::default();
    let p = poset(space, a);
    let rips = rips_complex(space, &a.subset, &a.epsilon.times(2), cap, &budget).unwrap();
    let sd = barycentric_subdivision(&rips, Some(cap), &budget).unwrap();
    vec![
        ("rips", Arc::new(rips)),
        ("sd-rips", Arc::new(sd)),
        ("mccord", Arc::new(mccord_complex(&p, Some(cap), &budget).unwrap())),
        ("cech", Arc::new(cech_nerve(space, a, cap, &budget).unwrap())),
        ("witness", Arc::new(witness_complex(space, a, cap, &budget).unwrap())),
        ("dowker-upper", Arc::new(dowker_upper(&p, cap, &budget).unwrap())),
        ("dowker-lower", Arc::new(dowker_lower(&p, cap, &budget).unwrap())),
    ]
}

/// Rank over ℚ by Gaussian elimination.
pub fn rational_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, pivot);
        let lead = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let factor = &rows[r][c] / &lead;
                for k in c..cols {
                    let delta = &factor * &rows[rank][k];
                    rows[r][k] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over 𝔽_p.
pub fn modular_rank(mut rows: Vec<Vec<i64>>, p: i64) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    for row in rows.iter_mut() {
        for x in row.iter_mut() {
            *x = x.rem_euclid(p);
        }
    }
    let inverse = |a: i64| (1..p).find(|b| a * b % p == 1).expect("prime modulus");
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else { continue };
        rows.swap(rank, pivot);
        let inv = inverse(rows[rank][c]);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] != 0 {
                let f = rows[r][c] * inv % p;
                for k in c..cols {
                    rows[r][k] = (rows[r][k] - f * rows[rank][k]).rem_euclid(p);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Boundary `C_p → C_{p-1}` as dense rows, built directly from the face lists.
pub fn naive_boundary(k: &SimplicialComplex, p: usize) -> Vec<Vec<i64>> {
    let faces = if p == 0 { &[][..] } else { k.simplices(p - 1) };
    let cells = k.simplices(p);
    let mut rows = vec![vec![0i64; cells.len()]; faces.len()];
    if p == 0 {
        return rows;
    }
    for (j, s) in cells.iter().enumerate() {
        for i in 0..s.len() {
            let mut face = s.clone();
            face.remove(i);
            let row = faces.binary_search(&face).expect("face closure");
            rows[row][j] += if i % 2 == 0 { 1 } else { -1 };
        }
    }
    rows
}

fn as_rational(rows: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect()).collect()
}

/// `dim C_p − rank ∂_p − rank ∂_{p+1}` over ℚ.
pub fn rational_betti(k: &SimplicialComplex, p: usize) -> usize {
    let cells = k.count(p);
    let lower = if p == 0 { 0 } else { rational_rank(as_rational(&naive_boundary(k, p))) };
    let upper = rational_rank(as_rational(&naive_boundary(k, p + 1)));
    cells - lower - upper
}

/// The same count over 𝔽_p; exceeds the rational Betti number by the
/// number of torsion summands divisible by `prime` in degrees `p` and `p−1`.
pub fn modular_betti(k: &SimplicialComplex, p: usize, prime: i64) -> usize {
    let cells = k.count(p);
    let lower = if p == 0 { 0 } else { modular_rank(naive_boundary(k, p), prime) };
    let upper = modular_rank(naive_boundary(k, p + 1), prime);
    cells - lower - upper
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn one() -> BigInt {
    BigInt::one()
}
