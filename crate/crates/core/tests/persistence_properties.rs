mod common;

use std::collections::BTreeSet;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use polyshape::complexes::Budget;
use polyshape::corpus;
use polyshape::homology::{DenseMatrix, FgAbelianGroup, GroupHom};
use polyshape::persistence::{
    direct_error_bonding, error_bonding, error_group, ml_index, persistent_group, GroupTower,
};
use polyshape::towers::{tower_homology, RipsTower, TowerContext};
use proptest::prelude::*;

fn free_tower() -> impl Strategy<Value = GroupTower> {
    prop::collection::vec(0usize..=3, 3..=5).prop_flat_map(|ranks| {
        let shapes: Vec<(usize, usize)> = ranks.windows(2).map(|w| (w[0], w[1])).collect();
        let mats = shapes
            .iter()
            .map(|&(rows, cols)| prop::collection::vec(-2i64..=2, rows * cols))
            .collect::<Vec<_>>();
        (Just(ranks), Just(shapes), mats)
    })
    .prop_map(|(ranks, shapes, entries)| {
        let bondings = shapes
            .iter()
            .zip(entries)
            .map(|(&(rows, cols), e)| {
                let m: Vec<Vec<i64>> = (0..rows).map(|r| e[r * cols..(r + 1) * cols].to_vec()).collect();
                let m = if rows == 0 { DenseMatrix::zeros(0, cols) } else { DenseMatrix::from_i64(&m) };
                GroupHom::new(FgAbelianGroup::free(cols), FgAbelianGroup::free(rows), m).unwrap()
            })
            .collect();
        GroupTower::new(1, ranks.iter().map(|&r| FgAbelianGroup::free(r)).collect(), bondings).unwrap()
    })
}

const FINITE_SHAPES: &[&[i64]] = &[&[2], &[3], &[4], &[6], &[2, 2], &[2, 4], &[2, 6], &[12]];

fn finite_group(torsion: &[i64]) -> FgAbelianGroup {
    FgAbelianGroup::new(0, torsion.iter().map(|&d| BigInt::from(d)).collect()).unwrap()
}

/// Entry `(i, j)` is a multiple of `t_i / gcd(t_i, s_j)`, which makes the
/// map from the source generator of order `s_j` well defined.
fn finite_tower() -> impl Strategy<Value = GroupTower> {
    prop::collection::vec(0..FINITE_SHAPES.len(), 3..=4)
        .prop_flat_map(|shapes| {
            let n = shapes.len() - 1;
            (Just(shapes), prop::collection::vec(prop::collection::vec(0i64..4, 4), n))
        })
        .prop_map(|(shapes, coeffs)| {
            let groups: Vec<FgAbelianGroup> = shapes.iter().map(|&s| finite_group(FINITE_SHAPES[s])).collect();
            let bondings = (0..groups.len() - 1)
                .map(|k| {
                    let (target, source) = (FINITE_SHAPES[shapes[k]], FINITE_SHAPES[shapes[k + 1]]);
                    let rows: Vec<Vec<i64>> = target
                        .iter()
                        .enumerate()
                        .map(|(i, &t)| {
                            source.iter().enumerate().map(|(j, &s)| coeffs[k][2 * i + j] * (t / t.gcd(&s))).collect()
                        })
                        .collect();
                    GroupHom::new(groups[k + 1].clone(), groups[k].clone(), DenseMatrix::from_i64(&rows)).unwrap()
                })
                .collect();
            GroupTower::new(1, groups, bondings).unwrap()
        })
}

fn elements(g: &FgAbelianGroup) -> Vec<Vec<BigInt>> {
    let mut out = vec![vec![]];
    for d in g.torsion() {
        let d = d.to_i64().unwrap();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..d).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(BigInt::from(x));
                    v
                })
            })
            .collect();
    }
    out
}

fn order(g: &FgAbelianGroup) -> BigInt {
    assert_eq!(g.rank(), 0);
    g.torsion().iter().fold(BigInt::one(), |acc, d| acc * d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn persistent_groups_shrink_and_errors_count_lost_rank(tower in free_tower()) {
        let last = tower.last_level();
        for n in 1..last {
            let hn = tower.group(n).unwrap().rank();
            for m in n + 1..=last {
                let sub = persistent_group(&tower, n, m).unwrap();
                let e = error_group(&tower, n, m).unwrap();
                prop_assert_eq!(e.group().rank(), hn - sub.abstract_group().rank());
                if m < last {
                    let next = persistent_group(&tower, n, m + 1).unwrap();
                    prop_assert!(next.is_subgroup_of(&sub));
                    prop_assert!(error_bonding(&tower, n, m).unwrap().is_surjective());
                }
            }
        }
    }

    #[test]
    fn error_orders_match_a_coset_count(tower in finite_tower()) {
        let last = tower.last_level();
        for n in 1..last {
            let hn = tower.group(n).unwrap();
            for m in n + 1..=last {
                let q = tower.composite(n, m).unwrap();
                let image: BTreeSet<Vec<BigInt>> = elements(tower.group(m).unwrap()).iter().map(|x| q.apply(x)).collect();
                let image_size = BigInt::from(image.len());
                let sub = persistent_group(&tower, n, m).unwrap();
                prop_assert_eq!(order(&sub.abstract_group()), image_size.clone());
                let e = error_group(&tower, n, m).unwrap();
                prop_assert!((order(hn) % &image_size).is_zero());
                prop_assert_eq!(order(e.group()), order(hn) / image_size);
                if m < last {
                    prop_assert!(error_bonding(&tower, n, m).unwrap().is_surjective());
                }
            }
        }
    }
}

#[test]
fn solenoid_g_and_l_compose_to_multiplication_by_the_base() {
    for base in 2..=5i64 {
        let tower = corpus::solenoid_tower(6, base).unwrap();
        let times = |g: &FgAbelianGroup| GroupHom::new(g.clone(), g.clone(), DenseMatrix::from_i64(&[vec![base]])).unwrap();
        for m in 2..5 {
            let g = error_bonding(&tower, 1, m).unwrap();
            let l = direct_error_bonding(&tower, 1, m).unwrap();
            let coarse = error_group(&tower, 1, m).unwrap().group().clone();
            let fine = error_group(&tower, 1, m + 1).unwrap().group().clone();
            assert_eq!(g.compose(&l).unwrap(), times(&coarse), "base {base}, m {m}");
            assert_eq!(l.compose(&g).unwrap(), times(&fine), "base {base}, m {m}");
            assert!(g.is_surjective());
        }
        assert_eq!(ml_index(&tower, 1, 6).unwrap(), None);
    }
}

#[test]
fn hawaiian_mittag_leffler_index_is_the_next_level() {
    let seq = Arc::new(corpus::hawaiian(4, corpus::hawaiian_min_squares(4)).unwrap());
    let ctx = TowerContext::new(seq, 1, Budget::default());
    let tower = tower_homology(&RipsTower, &ctx, 1, 1, 4).unwrap().group_tower().unwrap();
    assert_eq!(ml_index(&tower, 2, 4).unwrap(), Some(3));
}
