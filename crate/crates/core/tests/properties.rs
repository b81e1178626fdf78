mod common;

use proptest::prelude::*;
use raag::automorphism::{compose, endos_equal, ls_generators, Endomorphism, LSGenerator};
use raag::lift::{
    abelianization_matrix, check_shift_conditions, lift_of_generator, solve_shift_system, verify_relations_on_lifts,
    ShiftOutcome,
};
use raag::subgroup::{recognize_raag, reidemeister_schreier, virtual_embed_target, FiniteQuotientSpec};
use raag::torsion::{minkowski, nu_p_gl, nu_p_pure, rank_p_pure, valuation};
use raag::word::{normal_form, words_equal};
use raag::{Letter, SimpleGraph, Word};

use common::graphs_up_to;

fn graph(max_n: usize) -> impl Strategy<Value = SimpleGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        proptest::collection::vec(any::<bool>(), pairs.len()).prop_map(move |keep| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(&keep).filter(|(_, k)| **k).map(|(e, _)| *e).collect();
            SimpleGraph::from_indices(SimpleGraph::null(n).names().to_vec(), &edges).unwrap()
        })
    })
}

fn word(n: usize, len: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec((0..n, any::<bool>()), 0..=len)
        .prop_map(|ls| Word(ls.into_iter().map(|(v, inverse)| Letter { vertex: v, inverse }).collect()))
}

fn pick(g: &SimpleGraph, seeds: &[usize]) -> Vec<Endomorphism> {
    let gens = ls_generators(g, 1000).unwrap();
    seeds.iter().map(|s| gens[s % gens.len()].endomorphism(g)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_associative(g in graph(5), seeds in proptest::collection::vec(any::<usize>(), 3)) {
        let e = pick(&g, &seeds);
        let left = compose(&g, &compose(&g, &e[0], &e[1]), &e[2]);
        let right = compose(&g, &e[0], &compose(&g, &e[1], &e[2]));
        prop_assert!(endos_equal(&g, &left, &right));
    }

    #[test]
    fn abelianization_is_functorial(g in graph(5), seeds in proptest::collection::vec(any::<usize>(), 2)) {
        let e = pick(&g, &seeds);
        let whole = abelianization_matrix(&g, &compose(&g, &e[0], &e[1])).unwrap();
        let parts = abelianization_matrix(&g, &e[0]).unwrap().mul(&abelianization_matrix(&g, &e[1]).unwrap());
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn normal_form_is_canonical((g, w) in graph(5).prop_flat_map(|g| { let n = g.order(); (Just(g), word(n, 12)) })) {
        let once = normal_form(&g, &w).unwrap();
        prop_assert_eq!(normal_form(&g, &once).unwrap(), once.clone());
        prop_assert!(words_equal(&g, &w, &once).unwrap());
        prop_assert!(normal_form(&g, &w.concat(&w.inverse())).unwrap().is_empty());
    }

    #[test]
    fn graph_json_round_trips(g in graph(6)) {
        prop_assert_eq!(SimpleGraph::from_json(&g.to_json()).unwrap(), g);
    }

    #[test]
    fn solved_shifts_are_sound(
        (g, residues) in graph(3).prop_flat_map(|g| { let n = g.order(); (Just(g), proptest::collection::vec(1i64..=5, n)) })
    ) {
        if let ShiftOutcome::Feasible(s) = solve_shift_system(&g, &residues, 1000).unwrap() {
            prop_assert!(check_shift_conditions(&g, &s, 1000).unwrap().all_hold());
            prop_assert!(verify_relations_on_lifts(&g, &s, 1000).unwrap().passed());
        }
    }
}

#[test]
fn symmetry_conjugates_inversion_lifts() {
    for g in graphs_up_to(4) {
        let n = g.order();
        for residues in common::assignments(n, 3) {
            let ShiftOutcome::Feasible(s) = solve_shift_system(&g, &residues, 1000).unwrap() else { continue };
            for sigma in g.automorphisms(1000).unwrap() {
                let lift_sigma = lift_of_generator(&g, &LSGenerator::GraphSymmetry(sigma.clone()), &s);
                let back = lift_sigma.inverse().unwrap();
                for v in 0..n {
                    let conj = lift_sigma.compose(&lift_of_generator(&g, &LSGenerator::Inversion(v), &s)).compose(&back);
                    assert_eq!(conj, lift_of_generator(&g, &LSGenerator::Inversion(sigma[v]), &s), "{} {residues:?}", g.to_json());
                }
            }
        }
    }
}

#[test]
fn minkowski_is_product_of_prime_powers() {
    for n in 1..=10u64 {
        let m = minkowski(n).unwrap();
        for p in [2u64, 3, 5, 7, 11, 13] {
            assert_eq!(valuation(&m, p), nu_p_gl(n, p).unwrap(), "n={n} p={p}");
        }
    }
}

#[test]
fn rank_never_exceeds_valuation() {
    for g in graphs_up_to(5) {
        for p in [2u64, 3, 5] {
            assert!(rank_p_pure(&g, p).unwrap() <= nu_p_pure(&g, p).unwrap());
        }
    }
}

#[test]
fn free_kernel_rank_matches_index() {
    for n in 1..=3usize {
        for residues in common::assignments(n, 4) {
            let r: Vec<u64> = residues.iter().map(|&x| x as u64).collect();
            let k = reidemeister_schreier(&SimpleGraph::null(n), &FiniteQuotientSpec::residues(&r), 1000).unwrap();
            assert!(k.presentation.relators.is_empty());
            assert_eq!(k.presentation.generators.len(), k.index * (n - 1) + 1);
        }
    }
}

#[test]
fn cyclic_kernels_are_amalgams_along_stars() {
    for g in graphs_up_to(4) {
        for v in 0..g.order() {
            for d in 1..=3 {
                let (target, _) = virtual_embed_target(&g, v, d).unwrap();
                let k = reidemeister_schreier(&g, &FiniteQuotientSpec::cyclic(g.order(), v, d as u64), 1000).unwrap();
                let found = recognize_raag(&k.presentation).expect("kernel is recognised");
                assert!(found.is_isomorphic(&target, 1_000_000).unwrap(), "{} v={v} d={d}", g.to_json());
            }
        }
    }
}
