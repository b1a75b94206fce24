//! Built-in spaces: the square Hawaiian earring with its analytic ladder, the
//! dyadic solenoid tower and a few small regression spaces.

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::Threshold;
use crate::homology::{DenseMatrix, FgAbelianGroup, GroupHom};
use crate::metric::{
    build_adjusted_sequence, gamma_of, AdjustedSequence, FiniteMetricSpace, LadderError, LevelOverride,
};
use crate::persistence::{GroupTower, PersistenceError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CorpusError {
    #[error("{0}")]
    Parameters(String),
    #[error("reference sample too coarse: {0}")]
    Resolution(String),
    #[error(transparent)]
    Ladder(#[from] LadderError),
    #[error(transparent)]
    Persistence(#[from] PersistenceError),
}

fn inv_pow2(k: u32) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::one() << k)
}

type Point = (BigRational, BigRational);

/// Points of `□(t, t)` (boundary of `[0,t]²`) on the lattice of spacing
/// `step`, which must divide `t`.
fn square_on_grid(t: &BigRational, step: &BigRational, out: &mut BTreeSet<Point>) {
    let cells = (t / step).to_integer();
    let mut k = BigInt::zero();
    while k <= cells {
        let c = step * BigRational::from_integer(k.clone());
        out.insert((c.clone(), BigRational::zero()));
        out.insert((c.clone(), t.clone()));
        out.insert((BigRational::zero(), c.clone()));
        out.insert((t.clone(), c));
        k += 1;
    }
}

/// Grid side at level `n ≥ 2`: `1/2^{3n−4}`.
fn grid_exponent(n: usize) -> u32 {
    (3 * n - 4) as u32
}

/// `G_n ∩ H` plus the point `(1/2^{3n−3}, 1/2^{3n−3})`; `{(0,0)}` at level 1.
pub fn hawaiian_level_points(n: usize, squares: usize) -> Vec<Point> {
    let mut pts = BTreeSet::new();
    if n == 1 {
        pts.insert((BigRational::zero(), BigRational::zero()));
        return pts.into_iter().collect();
    }
    let e = grid_exponent(n);
    let side = inv_pow2(e);
    for k in 0..squares as u32 {
        let t = inv_pow2(k);
        if t >= side {
            square_on_grid(&t, &side, &mut pts);
        }
    }
    pts.insert((BigRational::zero(), BigRational::zero()));
    let half = inv_pow2(e + 1);
    pts.insert((half.clone(), half));
    pts.into_iter().collect()
}

/// `ε_n`: `2√2` at level 1, `√2/2^{3n−3}` afterwards.
pub fn hawaiian_epsilon(n: usize) -> Threshold {
    let q = if n == 1 { BigRational::from_integer(2.into()) } else { inv_pow2((3 * n - 3) as u32) };
    Threshold::sqrt2_multiple(q).expect("positive")
}

/// `γ_n`: `√2` at level 1, `1/2^{3n−3}` afterwards.
pub fn hawaiian_gamma(n: usize) -> Threshold {
    if n == 1 {
        Threshold::sqrt2_multiple(BigRational::one()).expect("positive")
    } else {
        Threshold::rational(inv_pow2((3 * n - 3) as u32)).expect("positive")
    }
}

/// Smallest square count that resolves level `levels`.
pub fn hawaiian_min_squares(levels: usize) -> usize {
    if levels < 2 {
        2
    } else {
        3 * levels - 2
    }
}

/// The square Hawaiian earring `⋃_{k<squares} □(1/2^k, 1/2^k)` sampled on a
/// grid four times finer than the deepest level, with the analytic ladder
/// checked exactly against that sample.
pub fn hawaiian(levels: usize, squares: usize) -> Result<AdjustedSequence, CorpusError> {
    if levels == 0 {
        return Err(CorpusError::Parameters("at least one level is needed".into()));
    }
    let needed = hawaiian_min_squares(levels);
    if squares < needed {
        return Err(CorpusError::Parameters(format!(
            "{levels} levels need at least {needed} squares, got {squares}"
        )));
    }
    let deepest = if levels < 2 { 0 } else { grid_exponent(levels) };
    let fine = inv_pow2(deepest + 2);
    let mut reference = BTreeSet::new();
    for k in 0..squares as u32 {
        let t = inv_pow2(k);
        if t >= fine {
            square_on_grid(&t, &fine, &mut reference);
        } else {
            let z = BigRational::zero();
            for p in [(z.clone(), z.clone()), (t.clone(), z.clone()), (z.clone(), t.clone()), (t.clone(), t.clone())] {
                reference.insert(p);
            }
        }
    }
    let mut level_points = Vec::with_capacity(levels);
    for n in 1..=levels {
        let pts = hawaiian_level_points(n, squares);
        for p in &pts {
            reference.insert(p.clone());
        }
        level_points.push(pts);
    }
    let reference: Vec<Point> = reference.into_iter().collect();
    let ids = |pts: &[Point]| -> Vec<usize> {
        pts.iter().map(|p| reference.binary_search(p).expect("level points lie in the reference")).collect()
    };
    let overrides: Vec<LevelOverride> = (1..=levels)
        .map(|n| LevelOverride {
            epsilon: Some(hawaiian_epsilon(n)),
            subset: Some(ids(&level_points[n - 1])),
            gamma: Some(hawaiian_gamma(n)),
        })
        .collect();
    let space = FiniteMetricSpace::from_points(reference.iter().map(|(x, y)| vec![x.clone(), y.clone()]).collect())
        .map_err(|e| CorpusError::Parameters(e.to_string()))?;
    let space = Arc::new(space);
    let seq = build_adjusted_sequence(space.clone(), &hawaiian_epsilon(1), levels, &overrides)?;
    for a in &seq.levels {
        let computed = gamma_of(&space, &a.subset).map_err(|e| CorpusError::Parameters(e.to_string()))?;
        if computed != a.gamma {
            return Err(CorpusError::Resolution(format!(
                "level {}: sampled gamma {computed} differs from {}",
                a.level, a.gamma
            )));
        }
    }
    Ok(seq)
}

/// `ℤ ← ℤ ← …` with every bonding multiplication by `base`.
pub fn solenoid_tower(levels: usize, base: i64) -> Result<GroupTower, CorpusError> {
    if levels < 2 || base < 2 {
        return Err(CorpusError::Parameters("solenoid needs at least two levels and base ≥ 2".into()));
    }
    let z = FgAbelianGroup::free(1);
    let times = GroupHom::new(z.clone(), z, DenseMatrix::from_i64(&[vec![base]]))
        .map_err(|e| CorpusError::Parameters(e.to_string()))?;
    Ok(GroupTower::constant(1, levels, times)?)
}

/// The rational point `((1−t²)/(1+t²), 2t/(1+t²))` closest to
/// angle `2πj/k`, with `t` rounded to a multiple of `1/1024`.
fn circle_point(j: usize, k: usize) -> Point {
    if 2 * j == k {
        return (BigRational::from_integer((-1).into()), BigRational::zero());
    }
    let half_angle = std::f64::consts::PI * j as f64 / k as f64;
    let t = BigRational::new(BigInt::from((half_angle.tan() * 1024.0).round() as i64), BigInt::from(1024));
    let one = BigRational::one();
    let denom = &one + &t * &t;
    ((&one - &t * &t) / &denom, (BigRational::from_integer(2.into()) * &t) / &denom)
}

/// `k` nearly equally spaced points on the unit circle, all with rational
/// coordinates so that squared chords are exact.
pub fn circle_sample(k: usize) -> Result<FiniteMetricSpace, CorpusError> {
    if k < 3 {
        return Err(CorpusError::Parameters("a circle sample needs at least 3 points".into()));
    }
    let pts = (0..k).map(|j| {
        let (x, y) = circle_point(j, k);
        vec![x, y]
    });
    FiniteMetricSpace::from_points(pts.collect()).map_err(|e| CorpusError::Parameters(e.to_string()))
}

/// Two levels on `circle_sample(12)`, both using every point, with
/// `ε = 4/5, 3/10`.
pub fn circle_ladder() -> Result<AdjustedSequence, CorpusError> {
    let space = Arc::new(circle_sample(12)?);
    let all: Vec<usize> = (0..12).collect();
    let level = |num, den| LevelOverride {
        epsilon: Some(Threshold::ratio(num, den)),
        subset: Some(all.clone()),
        gamma: None,
    };
    Ok(build_adjusted_sequence(space, &Threshold::ratio(4, 5), 2, &[level(4, 5), level(3, 10)])?)
}

pub fn point() -> FiniteMetricSpace {
    FiniteMetricSpace::from_points(vec![vec![BigRational::zero()]]).expect("one point")
}

/// `k` points at the integers `0, 1, …, k−1` of the line.
pub fn discrete(k: usize) -> Result<FiniteMetricSpace, CorpusError> {
    if k == 0 {
        return Err(CorpusError::Parameters("discrete space needs at least one point".into()));
    }
    FiniteMetricSpace::from_points((0..k).map(|i| vec![BigRational::from_integer(i.into())]).collect())
        .map_err(|e| CorpusError::Parameters(e.to_string()))
}
