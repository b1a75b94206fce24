//! Worked values checked against oracles written independently of the
//! library: hand arithmetic, exhaustive search and rank computations over
//! ℚ and 𝔽_p.

mod common;

use std::sync::Arc;

use common::*;
use num_bigint::BigInt;
use num_rational::BigRational;
use polyshape::complexes::{rips_complex, Budget, SimplicialComplex, VertexLabel};
use polyshape::corpus;
use polyshape::exact::Threshold;
use polyshape::homology::{homology_by_smith, homology_group, FgAbelianGroup};
use polyshape::metric::{gamma_of, greedy_epsilon_approximation, nearest_sets, FiniteMetricSpace};
use polyshape::persistence::{error_group, persistent_group};
use polyshape::towers::{tower_homology, RipsTower, TowerContext};

fn line(xs: &[i64]) -> FiniteMetricSpace {
    FiniteMetricSpace::from_points(xs.iter().map(|&x| vec![q(x, 1)]).collect()).unwrap()
}

#[test]
fn pythagorean_squared_distance() {
    let s = FiniteMetricSpace::from_points(vec![vec![q(0, 1), q(0, 1)], vec![q(3, 1), q(4, 1)]]).unwrap();
    assert_eq!(s.sqdist(0, 1), q(3 * 3 + 4 * 4, 1));
}

#[test]
fn nearest_set_matches_exhaustive_minimum() {
    let s = line(&[0, 2, 5, 4]);
    let members = [0, 1, 2];
    let got = nearest_sets(&s, &members, &[3]);
    let best = members.iter().map(|&a| s.sqdist(3, a)).min().unwrap();
    let expected: Vec<usize> = members.iter().copied().filter(|&a| s.sqdist(3, a) == best).collect();
    assert_eq!(got[0], expected);
    assert_eq!(got[0], vec![2]);
}

#[test]
fn gamma_is_the_max_min_distance() {
    let s = line(&[0, 1, 2]);
    let subset = [0, 2];
    let worst = (0..3).map(|x| subset.iter().map(|&a| s.sqdist(x, a)).min().unwrap()).max().unwrap();
    assert_eq!(worst, q(1, 1));
    assert_eq!(gamma_of(&s, &subset).unwrap(), Threshold::rational(worst).unwrap());
}

#[test]
fn greedy_net_covers_a_segment() {
    let s = line(&(0..10).collect::<Vec<_>>());
    let eps = Threshold::ratio(3, 2);
    let net = greedy_epsilon_approximation(&s, &eps);
    let limit = q(9, 4);
    for x in 0..10 {
        assert!(net.iter().any(|&a| s.sqdist(x, a) <= limit), "point {x} uncovered by {net:?}");
    }
}

fn from_generators(vertices: usize, generators: &[Vec<usize>]) -> Arc<SimplicialComplex> {
    let labels = (0..vertices).map(VertexLabel::Point).collect();
    Arc::new(SimplicialComplex::from_simplices(labels, generators, None).unwrap())
}

/// Six-vertex triangulation of the real projective plane.
fn projective_plane() -> Arc<SimplicialComplex> {
    let faces = [
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
        [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
    ];
    from_generators(6, &faces.iter().map(|f| f.to_vec()).collect::<Vec<_>>())
}

#[test]
fn projective_plane_torsion_seen_by_modular_ranks() {
    let k = projective_plane();
    assert_eq!(rational_betti(&k, 1), 0);
    assert_eq!(modular_betti(&k, 1, 2), 1);
    assert_eq!(modular_betti(&k, 1, 3), 0);
    let h1 = homology_group(&k, 1).unwrap();
    assert_eq!(h1, FgAbelianGroup::cyclic(2));
    assert_eq!(homology_group(&k, 2).unwrap(), FgAbelianGroup::trivial());
}

#[test]
fn torus_betti_numbers() {
    // 7-vertex torus
    let faces: Vec<Vec<usize>> = (0..7)
        .flat_map(|i| [vec![i, (i + 1) % 7, (i + 3) % 7], vec![i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    let k = from_generators(7, &faces);
    for p in 0..=2 {
        let g = homology_group(&k, p).unwrap();
        assert!(g.torsion().is_empty());
        assert_eq!(g.rank(), rational_betti(&k, p), "degree {p}");
    }
    assert_eq!(homology_group(&k, 1).unwrap(), FgAbelianGroup::free(2));
}

#[test]
fn circle_levels_agree_with_dense_smith_oracle() {
    let ladder = Arc::new(corpus::circle_ladder().unwrap());
    let ctx = TowerContext::new(ladder, 1, Budget::default());
    let h = tower_homology(&RipsTower, &ctx, 1, 1, 2).unwrap();
    for (k, b) in h.complexes.iter().zip(&h.bases) {
        assert_eq!(b.group(), &homology_by_smith(k, 1).unwrap());
        assert_eq!(b.group(), &FgAbelianGroup::free(1));
        assert_eq!(rational_betti(k, 1), 1);
    }
    let f = &h.induced[0];
    assert_eq!(f.matrix().rows(), 1);
    assert!(f.matrix().get(0, 0) == &BigInt::from(1) || f.matrix().get(0, 0) == &BigInt::from(-1));
}

#[test]
fn discrete_points_below_the_gap_are_separate_components() {
    let k = 5;
    let space = Arc::new(corpus::discrete(k).unwrap());
    let ids: Vec<usize> = (0..k).collect();
    let rips = Arc::new(rips_complex(&space, &ids, &Threshold::ratio(1, 2), 1, &Budget::default()).unwrap());
    assert_eq!(homology_group(&rips, 0).unwrap(), FgAbelianGroup::free(k));
    assert_eq!(rational_betti(&rips, 0), k);
}

#[test]
fn single_point_has_no_higher_homology() {
    let space = Arc::new(corpus::point());
    let rips = Arc::new(rips_complex(&space, &[0], &Threshold::ratio(1, 1), 3, &Budget::default()).unwrap());
    for p in 1..=2 {
        assert!(homology_group(&rips, p).unwrap().is_trivial());
    }
    assert_eq!(homology_group(&rips, 0).unwrap(), FgAbelianGroup::free(1));
}

#[test]
fn base_three_errors_are_cyclic_of_order_three_to_the_gap() {
    let tower = corpus::solenoid_tower(5, 3).unwrap();
    for n in 1..5 {
        for m in n + 1..=5 {
            let order = BigInt::from(3).pow((m - n) as u32);
            let sub = persistent_group(&tower, n, m).unwrap();
            assert_eq!(sub.generators(), vec![vec![order.clone()]]);
            let e = error_group(&tower, n, m).unwrap();
            assert_eq!(e.group(), &FgAbelianGroup::new(0, vec![order]).unwrap());
        }
    }
}

#[test]
fn hawaiian_gamma_matches_brute_force_over_the_sample() {
    let seq = corpus::hawaiian(2, corpus::hawaiian_min_squares(2)).unwrap();
    let a = seq.level(2).unwrap();
    let s = &seq.reference;
    let mut worst = BigRational::from_integer(0.into());
    for x in 0..s.len() {
        let near = a.subset.iter().map(|&p| s.sqdist(x, p)).min().unwrap();
        if near > worst {
            worst = near;
        }
    }
    assert_eq!(worst, q(1, 64));
}
