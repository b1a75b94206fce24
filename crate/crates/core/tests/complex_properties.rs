mod common;

use std::sync::Arc;

use common::*;
use polyshape::complexes::diagrams::identical_labelled;
use polyshape::complexes::{
    barycentric_subdivision, dowker_lower, dowker_upper, inclusion_by_label, last_vertex_map, mccord_complex,
    rips_complex, witness_complex, Budget,
};
use polyshape::corpus;
use polyshape::finite_space::build_finite_space;
use polyshape::homology::{boundary_matrix, homology_by_smith, homology_group, induced_map, HomologyBasis};
use polyshape::metric::AdjustedSequence;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn boundary_of_boundary_vanishes(points in point_sets(7), eps in half_integers()) {
        let space = plane(&points);
        let a = level_one(&space, &eps);
        for (name, k) in families(&space, &a, 3) {
            prop_assert!(k.face_closure_violation().is_none(), "{name}");
            for p in 1..=k.dim() {
                let dd = boundary_matrix(&k, p).mul(&boundary_matrix(&k, p + 1));
                prop_assert!(dd.is_zero(), "{name} in degree {p}");
            }
        }
    }

    #[test]
    fn sparse_homology_agrees_with_dense_and_rational_oracles(points in point_sets(7), eps in half_integers()) {
        let space = plane(&points);
        let a = level_one(&space, &eps);
        for (name, k) in families(&space, &a, 3) {
            for p in 0..=1 {
                let g = homology_group(&k, p).unwrap();
                prop_assert_eq!(&g, &homology_by_smith(&k, p).unwrap(), "{} degree {}", name, p);
                prop_assert_eq!(g.rank(), rational_betti(&k, p), "{} degree {}", name, p);
            }
        }
    }

    #[test]
    fn witness_lies_inside_rips(points in point_sets(8), eps in half_integers()) {
        let space = plane(&points);
        let a = level_one(&space, &eps);
        let budget = Budget::default();
        let w = Arc::new(witness_complex(&space, &a, 3, &budget).unwrap());
        let r = Arc::new(rips_complex(&space, &a.subset, &a.epsilon.times(2), 3, &budget).unwrap());
        prop_assert!(inclusion_by_label(w, r, |l| l.clone()).is_ok());
    }

    #[test]
    fn mccord_lies_inside_both_dowker_complexes(points in point_sets(8), eps in half_integers()) {
        let space = plane(&points);
        let a = level_one(&space, &eps);
        let budget = Budget::default();
        let p = poset(&space, &a);
        let k = Arc::new(mccord_complex(&p, Some(3), &budget).unwrap());
        let upper = Arc::new(dowker_upper(&p, 3, &budget).unwrap());
        let lower = Arc::new(dowker_lower(&p, 3, &budget).unwrap());
        prop_assert!(inclusion_by_label(k.clone(), upper, |l| l.clone()).is_ok());
        prop_assert!(inclusion_by_label(k, lower, |l| l.clone()).is_ok());
    }

    #[test]
    fn posets_are_downward_closed_with_singletons(points in point_sets(8), eps in half_integers()) {
        let space = plane(&points);
        let a = level_one(&space, &eps);
        let p = poset(&space, &a);
        prop_assert!(p.is_downward_closed());
        for &x in &a.subset {
            prop_assert!(p.index_of(&[x]).is_some());
        }
    }

    #[test]
    fn order_complex_is_the_subdivided_rips_complex(points in point_sets(6), k in 1i64..=3) {
        let space = plane(&points);
        let eps = polyshape::exact::Threshold::ratio(k, 2);
        let a = level_one(&space, &eps);
        let budget = Budget::default();
        let order = mccord_complex(&poset(&space, &a), None, &budget).unwrap();
        let rips = rips_complex(&space, &a.subset, &a.epsilon.times(2), usize::MAX, &budget).unwrap();
        let sd = barycentric_subdivision(&rips, None, &budget).unwrap();
        let check = identical_labelled("order = sd", &order, &sd, &rips);
        prop_assert!(check.passed, "{:?}", check.detail);
    }

    #[test]
    fn subdivision_preserves_homology_through_last_vertex(points in point_sets(7), eps in half_integers()) {
        let space = plane(&points);
        let a = level_one(&space, &eps);
        let budget = Budget::default();
        let k = Arc::new(rips_complex(&space, &a.subset, &a.epsilon.times(2), 3, &budget).unwrap());
        let sd = Arc::new(barycentric_subdivision(&k, Some(3), &budget).unwrap());
        let rho = last_vertex_map(k.clone(), sd.clone()).unwrap();
        for p in 0..=1 {
            let hk = HomologyBasis::compute(k.clone(), p).unwrap();
            let hsd = HomologyBasis::compute(sd.clone(), p).unwrap();
            prop_assert_eq!(hk.group(), hsd.group());
            prop_assert!(induced_map(&rho, &hsd, &hk).unwrap().is_isomorphism());
        }
    }
}

fn corpus_ladders() -> Vec<(String, AdjustedSequence)> {
    let mut out = vec![
        ("hawaiian".to_string(), corpus::hawaiian(3, corpus::hawaiian_min_squares(3)).unwrap()),
        ("circle".to_string(), corpus::circle_ladder().unwrap()),
    ];
    let greedy = |space: polyshape::metric::FiniteMetricSpace, eps| {
        polyshape::metric::build_adjusted_sequence(Arc::new(space), &eps, 2, &[]).unwrap()
    };
    out.push(("point".into(), greedy(corpus::point(), polyshape::exact::Threshold::ratio(1, 1))));
    out.push(("discrete".into(), greedy(corpus::discrete(5).unwrap(), polyshape::exact::Threshold::ratio(1, 4))));
    out
}

#[test]
fn dowker_duality_on_every_corpus_poset() {
    let budget = Budget::default();
    for (name, seq) in corpus_ladders() {
        for a in &seq.levels {
            let p = Arc::new(build_finite_space(&seq.reference, a, None, budget.max_elements).unwrap());
            let upper = Arc::new(dowker_upper(&p, 2, &budget).unwrap());
            let lower = Arc::new(dowker_lower(&p, 2, &budget).unwrap());
            for degree in 0..=1 {
                assert_eq!(
                    homology_group(&upper, degree).unwrap(),
                    homology_group(&lower, degree).unwrap(),
                    "{name} level {} degree {degree}",
                    a.level
                );
            }
        }
    }
}
