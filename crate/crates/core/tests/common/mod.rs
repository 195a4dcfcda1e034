//! Brute-force oracles that share no search code with the library.
#![allow(dead_code)]

use coordgame::{ColorId, CoordinationGame, JointStrategy};

fn payoff(game: &CoordinationGame, colors: &[ColorId], v: usize) -> u32 {
    game.graph().neighbors(v).iter().filter(|&&w| colors[w] == colors[v]).count() as u32
}

/// A profitable deviation by exactly the players in `mask`, trying every combination of new colors.
fn deviation_for_mask(game: &CoordinationGame, base: &[ColorId], before: &[u32], mask: u32) -> Option<Vec<ColorId>> {
    let n = game.node_count();
    let members: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
    let options: Vec<Vec<ColorId>> = members
        .iter()
        .map(|&v| game.assignment().set(v).iter().copied().filter(|&c| c != base[v]).collect())
        .collect();
    if options.iter().any(|o| o.is_empty()) {
        return None;
    }
    let mut digits = vec![0usize; members.len()];
    let mut next = base.to_vec();
    loop {
        for (j, &v) in members.iter().enumerate() {
            next[v] = options[j][digits[j]];
        }
        if members.iter().all(|&v| payoff(game, &next, v) > before[v]) {
            return Some(members.iter().map(|&v| next[v]).collect());
        }
        let mut j = 0;
        while j < digits.len() {
            digits[j] += 1;
            if digits[j] < options[j].len() {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
        if j == digits.len() {
            return None;
        }
    }
}

/// Some profitable deviation by at most `k` players, trying every subset and
/// every combination of new colors.
pub fn oracle_deviation(game: &CoordinationGame, s: &JointStrategy, k: usize) -> Option<(Vec<usize>, Vec<ColorId>)> {
    let n = game.node_count();
    assert!(n <= 20, "oracle is exponential");
    let base: Vec<ColorId> = s.colors().to_vec();
    let before: Vec<u32> = (0..n).map(|v| payoff(game, &base, v)).collect();
    (1u32..(1 << n)).filter(|m| m.count_ones() as usize <= k).find_map(|mask| {
        deviation_for_mask(game, &base, &before, mask)
            .map(|colors| ((0..n).filter(|&v| mask >> v & 1 == 1).collect(), colors))
    })
}

/// Size of the smallest profitable coalition, if any.
pub fn oracle_min_coalition(game: &CoordinationGame, s: &JointStrategy) -> Option<usize> {
    let n = game.node_count();
    assert!(n <= 20, "oracle is exponential");
    let base: Vec<ColorId> = s.colors().to_vec();
    let before: Vec<u32> = (0..n).map(|v| payoff(game, &base, v)).collect();
    (1u32..(1 << n))
        .filter(|&mask| deviation_for_mask(game, &base, &before, mask).is_some())
        .map(|mask| mask.count_ones() as usize)
        .min()
}

pub fn oracle_is_k_equilibrium(game: &CoordinationGame, s: &JointStrategy, k: usize) -> bool {
    oracle_deviation(game, s, k).is_none()
}

/// Every feasible profile, by an odometer independent of `profile_at`.
pub fn all_profiles(game: &CoordinationGame) -> Vec<JointStrategy> {
    let n = game.node_count();
    let sets: Vec<&[ColorId]> = (0..n).map(|v| game.assignment().set(v)).collect();
    let mut digits = vec![0usize; n];
    let mut out = Vec::new();
    loop {
        out.push(game.profile(digits.iter().enumerate().map(|(v, &d)| sets[v][d]).collect()).unwrap());
        let mut j = 0;
        while j < n {
            digits[j] += 1;
            if digits[j] < sets[j].len() {
                break;
            }
            digits[j] = 0;
            j += 1;
        }
        if j == n {
            return out;
        }
    }
}

pub fn oracle_max_welfare(game: &CoordinationGame) -> u64 {
    all_profiles(game)
        .iter()
        .map(|s| (0..game.node_count()).map(|v| payoff(game, s.colors(), v) as u64).sum())
        .max()
        .unwrap()
}

pub fn has_k_clique(game_graph: &coordgame::Graph, k: usize) -> bool {
    let n = game_graph.node_count();
    (0u32..(1 << n)).any(|mask| {
        mask.count_ones() as usize == k && {
            let nodes: Vec<usize> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
            nodes.iter().enumerate().all(|(i, &u)| nodes[i + 1..].iter().all(|&v| game_graph.has_edge(u, v)))
        }
    })
}

fn acyclic(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut x = x;
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for &(u, v) in edges {
        let (a, b) = (find(&mut parent, u), find(&mut parent, v));
        if a == b {
            return false;
        }
        parent[a] = b;
    }
    true
}

/// Smallest number of edges whose removal leaves a forest, by trying subsets in size order.
pub fn oracle_min_feedback(n: usize, edges: &[(usize, usize)]) -> usize {
    let m = edges.len();
    assert!(m <= 24, "oracle is exponential");
    (0..=m)
        .find(|&size| {
            (0u32..(1 << m)).any(|mask| {
                mask.count_ones() as usize == size && {
                    let kept: Vec<(usize, usize)> =
                        edges.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 0).map(|(_, &e)| e).collect();
                    acyclic(n, &kept)
                }
            })
        })
        .unwrap()
}
