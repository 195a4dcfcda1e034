mod common;

use coordgame::analysis::{generate, inefficiency, social_optimum, transition_value};
use coordgame::deviation::{is_k_equilibrium, is_uniform, DeviationReport};
use coordgame::solvers::{solve_auto, Method};
use coordgame::{ColorAssignment, CoordinationGame, Graph};

use common::oracle_is_k_equilibrium;

#[test]
fn clique_reduction_on_triangle() {
    let inst = generate("clique-reduction:base=complete-3,k=3").unwrap();
    let s = inst.reference.unwrap();
    let verdict = is_k_equilibrium(&inst.game, &s, 3).unwrap();
    let w = verdict.witness().expect("the triangle deviates");
    assert_eq!(w.describe(&inst.game), "{1,2,3}->y");
    assert_eq!(w.payoff_after, vec![2, 2, 2]);
    assert_eq!(w.payoff_before, vec![1, 1, 1]);
}

#[test]
fn keylemma_clique_three_is_welfare_neutral() {
    let inst = generate("keylemma-clique:l=3").unwrap();
    let s = inst.reference.clone().unwrap();
    let target = inst.extra("deviation").unwrap();
    let r = DeviationReport::evaluate(&inst.game, &s, &[0, 1, 2], &[target.color(0); 3]).unwrap();
    assert!(r.is_profitable());
    assert_eq!(r.delta_sw, 0);
}

#[test]
fn unbounded_price_of_anarchy() {
    let inst = generate("poa-unbounded:base=cycle-5").unwrap();
    let s = inst.reference.clone().unwrap();
    assert!(is_k_equilibrium(&inst.game, &s, 1).unwrap().holds());
    let report = inefficiency(&inst.game, &[1], 1_000_000).unwrap();
    assert_eq!(report.optimum_sw, 10);
    assert!(report.per_k[0].poa.unwrap().is_infinite());
}

#[test]
fn optimum_values() {
    let inst = generate("kpoa-lower:n=6,k=3").unwrap();
    assert_eq!(social_optimum(&inst.game, 1_000_000).unwrap().1, 24);
    assert_eq!(social_optimum(&generate("fig3").unwrap().game, 1_000).unwrap().1, 8);
    let sets = vec![vec!["a"], vec!["b"]];
    let edge = CoordinationGame::new(Graph::path(2), ColorAssignment::from_names(&sets).unwrap()).unwrap();
    assert_eq!(social_optimum(&edge, 10).unwrap().1, 0);
}

#[test]
fn dispatcher_choices() {
    let oct = solve_auto(&generate("octahedron").unwrap().game, 1_000_000).unwrap();
    assert_eq!(oct.method, Method::BruteForce);
    assert_eq!(oct.profile, None);

    let fig3 = generate("fig3").unwrap();
    let sol = solve_auto(&fig3.game, 1_000).unwrap();
    assert_eq!(sol.method, Method::Pseudoforest);
    assert_eq!(sol.profile.as_ref(), fig3.extra("optimum"));

    let tree = CoordinationGame::new(Graph::star(3), ColorAssignment::from_names(&vec![vec!["a", "b"]; 4]).unwrap()).unwrap();
    let sol = solve_auto(&tree, 1_000).unwrap();
    assert_eq!(sol.method, Method::ColorForest);
    assert!(oracle_is_k_equilibrium(&tree, sol.profile.as_ref().unwrap(), 4));
    assert_eq!(transition_value(&tree, 1_000).unwrap(), 4);
}

#[test]
fn weakly_acyclic_variant() {
    let inst = generate("weakly-acyclic-fig1").unwrap();
    let g = &inst.game;
    let all_d = inst.extra("all-d").unwrap();
    assert!(oracle_is_k_equilibrium(g, all_d, 8));
    let s = inst.reference.clone().unwrap();
    let d = all_d.color(0);
    let everyone: Vec<usize> = (0..8).collect();
    let jump = DeviationReport::evaluate(g, &s, &everyone, &[d; 8]).unwrap();
    assert!(jump.is_profitable());
    assert_eq!(&jump.apply(&s), all_d);
    assert_eq!(transition_value(g, 1_000_000).unwrap(), 8);
}

#[test]
fn complete_graphs_are_uniform() {
    let g = CoordinationGame::new(Graph::complete(4), ColorAssignment::from_names(&[vec!["a", "b"], vec!["b", "c"], vec!["a", "c"], vec!["a"]]).unwrap())
        .unwrap();
    let report = is_uniform(&g, 1_000).unwrap();
    assert!(report.uniform && report.color_complete);
    assert_eq!(report.profiles_checked, 8);
}

#[test]
fn fig3_copies_keep_strong_poa_two() {
    let inst = generate("fig3:copies=2").unwrap();
    let report = inefficiency(&inst.game, &[8], 1_000_000).unwrap();
    assert_eq!(report.per_k[0].poa.unwrap().to_string(), "2");
}
