mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coordgame::analysis::ProfileScan;
use coordgame::colorforest::verify_color_forest;
use coordgame::deviation::{
    audit_key_lemma, run_improvement_path, DeviationReport, DeviationSearch, PathConfig, Scheduler,
};
use coordgame::format::{parse_instance, serialize_instance};
use coordgame::random::{
    gnp, random_color_forest, random_forest, random_game, random_profile, random_pseudoforest, random_two_color,
};
use coordgame::solvers::{solve_pseudoforest, solve_tree};
use coordgame::{ColorAssignment, CoordinationGame};

use common::{all_profiles, oracle_deviation, oracle_max_welfare, oracle_min_coalition, oracle_min_feedback};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn welfare_is_twice_unicolored_edges(seed: u64, n in 1usize..10) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.5, 3, 3);
        let s = random_profile(&mut r, &g);
        prop_assert_eq!(g.payoffs(&s).iter().map(|&p| p as u64).sum::<u64>(), g.social_welfare(&s));
        prop_assert_eq!(g.social_welfare(&s), 2 * g.unicolored_edges(&s).len() as u64);
    }

    #[test]
    fn edges_split_into_inside_boundary_outside(seed: u64, n in 1usize..12) {
        let mut r = rng(seed);
        let graph = gnp(&mut r, n, 0.4);
        let k: Vec<usize> = (0..n).filter(|_| r.gen_bool(0.5)).collect();
        let rest: Vec<usize> = (0..n).filter(|v| !k.contains(v)).collect();
        let inside = graph.internal_edges(&k).unwrap();
        let boundary = graph.boundary_edges(&k).unwrap();
        let outside = graph.internal_edges(&rest).unwrap();
        let mut all: Vec<_> = inside.iter().chain(&boundary).chain(&outside).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, graph.edges().to_vec());
    }

    #[test]
    fn feedback_number_matches_oracle(seed: u64, n in 1usize..8) {
        let graph = gnp(&mut rng(seed), n, 0.45);
        let tau = graph.feedback_edge_number();
        prop_assert_eq!(tau, oracle_min_feedback(n, graph.edges()));
        prop_assert_eq!(graph.min_feedback_edge_set().len(), tau);
    }

    #[test]
    fn simple_search_is_complete(seed: u64, n in 1usize..8, k in 1usize..8) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.5, 3, 3);
        let s = random_profile(&mut r, &g);
        let search = DeviationSearch::new(&g);
        let simple = search.find(&s, k, true).unwrap();
        let general = search.find(&s, k, false).unwrap();
        let oracle = oracle_deviation(&g, &s, k);
        prop_assert_eq!(simple.is_some(), general.is_some());
        prop_assert_eq!(simple.is_some(), oracle.is_some());
        if let (Some(a), Some(b)) = (&simple, &general) {
            prop_assert_eq!(a.size(), b.size());
            prop_assert!(a.simple && a.is_profitable());
        }
        prop_assert_eq!(search.first_found(&s, k, true).unwrap().is_some(), simple.is_some());
    }

    #[test]
    fn minimal_witness_size_matches_oracle(seed: u64, n in 1usize..9) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.5, 3, 3);
        let s = random_profile(&mut r, &g);
        let found = DeviationSearch::new(&g).find(&s, n, true).unwrap().map(|d| d.size());
        prop_assert_eq!(found, oracle_min_coalition(&g, &s));
    }

    #[test]
    fn welfare_identity_and_bounds_on_sampled_deviations(seed: u64, n in 2usize..10) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.6, 3, 3);
        let s = random_profile(&mut r, &g);
        let coalition: Vec<usize> = (0..n).filter(|&v| g.assignment().set(v).len() > 1 && r.gen_bool(0.6)).collect();
        prop_assume!(!coalition.is_empty());
        let colors: Vec<_> = coalition
            .iter()
            .map(|&v| {
                let options: Vec<_> = g.assignment().set(v).iter().copied().filter(|&c| c != s.color(v)).collect();
                options[r.gen_range(0..options.len())]
            })
            .collect();
        let report = DeviationReport::evaluate(&g, &s, &coalition, &colors).unwrap();
        let after = report.apply(&s);
        prop_assert_eq!(report.delta_sw, g.social_welfare(&after) as i64 - g.social_welfare(&s) as i64);
        if report.is_profitable() {
            let audit = audit_key_lemma(&g, &s, &report).unwrap();
            prop_assert!(audit.all_hold(), "{:?}", audit);
            prop_assert_eq!(audit.identity_rhs(), report.delta_sw);
        }
    }

    #[test]
    fn color_forest_witness_is_minimal(seed: u64, n in 1usize..11) {
        let mut r = rng(seed);
        let g = random_color_forest(&mut r, n, 0.5, 3, 3);
        let s = random_profile(&mut r, &g);
        let verdict = verify_color_forest(&g, &s, n).unwrap();
        prop_assert_eq!(verdict.witness().map(|w| w.size()), oracle_min_coalition(&g, &s));
    }

    #[test]
    fn tree_solver_is_optimal(seed: u64, n in 1usize..10) {
        let mut r = rng(seed);
        let graph = random_forest(&mut r, n, 0.9);
        let sets: Vec<Vec<String>> =
            (0..n).map(|_| ["a", "b", "c"].iter().filter(|_| r.gen_bool(0.6)).map(|c| c.to_string()).collect()).collect();
        let sets: Vec<Vec<String>> = sets.into_iter().map(|s| if s.is_empty() { vec!["a".into()] } else { s }).collect();
        let g = CoordinationGame::new(graph, ColorAssignment::from_names(&sets).unwrap()).unwrap();
        let (s, sw) = solve_tree(&g).unwrap();
        prop_assert_eq!(g.social_welfare(&s), sw);
        prop_assert_eq!(sw, oracle_max_welfare(&g));
    }

    #[test]
    fn pseudoforest_solver_prefers_unicolored_cycles(seed: u64, n in 3usize..10) {
        let mut r = rng(seed);
        let g = random_pseudoforest(&mut r, n, 2, 2);
        let sol = solve_pseudoforest(&g).unwrap();
        let best = oracle_max_welfare(&g);
        prop_assert_eq!(sol.welfare, best);
        prop_assert!(oracle_deviation(&g, &sol.profile, n).is_none());
        let optima: Vec<_> = all_profiles(&g).into_iter().filter(|s| g.social_welfare(s) == best).collect();
        for tree in &sol.pseudotrees {
            let uni = |s: &coordgame::JointStrategy| tree.cycle.iter().all(|&v| s.color(v) == s.color(tree.cycle[0]));
            if optima.iter().any(uni) {
                prop_assert!(uni(&sol.profile));
            }
        }
    }

    #[test]
    fn instances_round_trip(seed: u64, n in 1usize..10) {
        let mut r = rng(seed);
        let g = random_game(&mut r, n, 0.5, 4, 3);
        let s = random_profile(&mut r, &g);
        let text = serialize_instance(&g, Some(&s), Some("random"), None);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back.game, &g);
        prop_assert_eq!(back.profile, Some(s));
    }

    #[test]
    fn seeded_paths_are_reproducible(seed: u64, n in 2usize..9) {
        let g = random_game(&mut rng(seed), n, 0.5, 3, 3);
        let s0 = g.default_profile();
        let config = PathConfig::new(n).scheduler(Scheduler::Random { seed });
        let a = run_improvement_path(&g, &s0, &config).unwrap();
        let b = run_improvement_path(&g, &s0, &config).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn levels_match_oracle(seed: u64, n in 1usize..7) {
        let g = random_game(&mut rng(seed), n, 0.6, 3, 2);
        let scan = ProfileScan::run(&g, 10_000).unwrap();
        let mut counts = vec![0u64; n + 1];
        for s in all_profiles(&g) {
            counts[oracle_min_coalition(&g, &s).map_or(n, |m| m - 1)] += 1;
        }
        prop_assert_eq!(scan.level_counts, counts);
    }

    #[test]
    fn strong_price_of_stability_is_one(seed: u64, n in 2usize..8, family in 0u8..3) {
        let mut r = rng(seed);
        let g = match family {
            0 => random_color_forest(&mut r, n, 0.5, 3, 2),
            1 => random_pseudoforest(&mut r, n, 3, 2),
            _ => random_two_color(&mut r, n, 0.5),
        };
        let scan = ProfileScan::run(&g, 10_000).unwrap();
        prop_assert_eq!(scan.transition_value(), n);
        let best = scan.equilibria(&g, n).best.unwrap().1;
        prop_assert_eq!(best, scan.optimum_sw);
    }
}
