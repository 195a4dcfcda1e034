//! Seeded random instance families.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::game::{ColorAssignment, ColorId, CoordinationGame, JointStrategy};
use crate::graph::Graph;

fn palette(colors: usize) -> Vec<String> {
    (0..colors).map(|c| ((b'a' + (c % 26) as u8) as char).to_string() + &"'".repeat(c / 26)).collect()
}

fn game_from(graph: Graph, palette: Vec<String>, sets: Vec<Vec<ColorId>>) -> CoordinationGame {
    let assignment = ColorAssignment::from_ids(palette, sets).expect("generated sets are nonempty");
    CoordinationGame::new(graph, assignment).expect("generated sizes agree")
}

/// `G(n, p)`.
pub fn gnp<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    Graph::new(n, edges).expect("simple graph")
}

/// Random forest: each node joins a random earlier node with probability `attach`.
pub fn random_forest<R: Rng + ?Sized>(rng: &mut R, n: usize, attach: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        if rng.gen_bool(attach) {
            edges.push((rng.gen_range(0..v), v));
        }
    }
    Graph::new(n, edges).expect("forest")
}

/// A uniformly random nonempty subset of `0..colors` of size at most `max_set`.
fn random_set<R: Rng + ?Sized>(rng: &mut R, colors: usize, max_set: usize) -> Vec<ColorId> {
    let size = rng.gen_range(1..=max_set.clamp(1, colors));
    let mut all: Vec<u32> = (0..colors as u32).collect();
    all.shuffle(rng);
    all.truncate(size);
    all.into_iter().map(ColorId).collect()
}

fn random_sets<R: Rng + ?Sized>(rng: &mut R, n: usize, colors: usize, max_set: usize) -> Vec<Vec<ColorId>> {
    (0..n).map(|_| random_set(rng, colors, max_set)).collect()
}

/// `G(n, p)` with random color sets over `colors` colors.
pub fn random_game<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64, colors: usize, max_set: usize) -> CoordinationGame {
    let graph = gnp(rng, n, p);
    let sets = random_sets(rng, n, colors, max_set);
    game_from(graph, palette(colors), sets)
}

/// Random game using at most the two colors `a` and `b`.
pub fn random_two_color<R: Rng + ?Sized>(rng: &mut R, n: usize, p: f64) -> CoordinationGame {
    random_game(rng, n, p, 2, 2)
}

/// Random color forest on `G(n, p)`.
///
/// Colors are granted greedily in random order whenever the nodes holding a
/// color still induce a forest. A node left with nothing gets a private color.
pub fn random_color_forest<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    p: f64,
    colors: usize,
    max_set: usize,
) -> CoordinationGame {
    let graph = gnp(rng, n, p);
    let mut holders: Vec<UnionFind> = (0..colors).map(|_| UnionFind::new(n)).collect();
    let mut holds = vec![vec![false; n]; colors];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut sets = vec![Vec::new(); n];
    let mut names = palette(colors);
    for &v in &order {
        let target = rng.gen_range(1..=max_set.clamp(1, colors));
        let mut candidates: Vec<usize> = (0..colors).collect();
        candidates.shuffle(rng);
        for c in candidates {
            if sets[v].len() == target {
                break;
            }
            let nbrs: Vec<usize> = graph.neighbors(v).iter().copied().filter(|&w| holds[c][w]).collect();
            let mut roots: Vec<usize> = nbrs.iter().map(|&w| holders[c].find(w)).collect();
            roots.sort_unstable();
            roots.dedup();
            if roots.len() == nbrs.len() {
                for &w in &nbrs {
                    holders[c].union(v, w);
                }
                holds[c][v] = true;
                sets[v].push(ColorId(c as u32));
            }
        }
        if sets[v].is_empty() {
            sets[v].push(ColorId(names.len() as u32));
            names.push(format!("p{v}"));
        }
    }
    game_from(graph, names, sets)
}

/// Random pseudoforest: a random forest where some trees receive one extra cycle-closing edge.
pub fn random_pseudoforest<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    colors: usize,
    max_set: usize,
) -> CoordinationGame {
    let forest = random_forest(rng, n, 0.85);
    let mut edges = forest.edges().to_vec();
    for comp in forest.components() {
        if comp.len() < 3 || !rng.gen_bool(0.7) {
            continue;
        }
        let free: Vec<(usize, usize)> = comp
            .iter()
            .flat_map(|&u| comp.iter().map(move |&v| (u, v)))
            .filter(|&(u, v)| u < v && !forest.has_edge(u, v))
            .collect();
        if let Some(&e) = free.choose(rng) {
            edges.push(e);
        }
    }
    let graph = Graph::new(n, edges).expect("simple graph");
    let sets = random_sets(rng, n, colors, max_set);
    game_from(graph, palette(colors), sets)
}

/// Random color-complete game.
///
/// Half the draws use a random cluster graph, where any assignment works.
/// The rest union a few random cliques and resample the sets until every
/// color induces complete components, falling back to a cluster graph.
pub fn random_color_complete<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    colors: usize,
    max_set: usize,
) -> CoordinationGame {
    if rng.gen_bool(0.5) {
        for _ in 0..50 {
            let cliques = rng.gen_range(1..=3);
            let mut edges = Vec::new();
            for _ in 0..cliques {
                let members: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
                for (i, &u) in members.iter().enumerate() {
                    for &v in &members[i + 1..] {
                        edges.push((u, v));
                    }
                }
            }
            edges.sort_unstable();
            edges.dedup();
            let graph = Graph::new(n, edges).expect("simple graph");
            for _ in 0..20 {
                let game = game_from(graph.clone(), palette(colors), random_sets(rng, n, colors, max_set));
                if game.classify().is_color_complete {
                    return game;
                }
            }
        }
    }
    let mut block = vec![0; n];
    let blocks = rng.gen_range(1..=n.max(1));
    for b in block.iter_mut() {
        *b = rng.gen_range(0..blocks);
    }
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if block[u] == block[v] {
                edges.push((u, v));
            }
        }
    }
    let graph = Graph::new(n, edges).expect("simple graph");
    game_from(graph, palette(colors), random_sets(rng, n, colors, max_set))
}

/// A uniformly random feasible profile.
pub fn random_profile<R: Rng + ?Sized>(rng: &mut R, game: &CoordinationGame) -> JointStrategy {
    let colors = (0..game.node_count()).map(|v| *game.assignment().set(v).choose(rng).expect("nonempty")).collect();
    game.profile(colors).expect("colors drawn from the sets")
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.parent[ra] = rb;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn families_have_their_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let n = rng.gen_range(1..=10);
            assert!(random_color_forest(&mut rng, n, 0.5, 3, 3).classify().is_color_forest);
            assert!(random_pseudoforest(&mut rng, n, 3, 2).graph().is_pseudoforest());
            assert!(random_color_complete(&mut rng, n, 3, 2).classify().is_color_complete);
            assert!(random_two_color(&mut rng, n, 0.5).assignment().color_count() <= 2);
        }
    }

    #[test]
    fn same_seed_same_instance() {
        let a = random_game(&mut ChaCha8Rng::seed_from_u64(3), 8, 0.4, 4, 3);
        let b = random_game(&mut ChaCha8Rng::seed_from_u64(3), 8, 0.4, 4, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn profiles_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_game(&mut rng, 6, 0.5, 4, 3);
        for _ in 0..20 {
            g.check(&random_profile(&mut rng, &g)).unwrap();
        }
    }
}
