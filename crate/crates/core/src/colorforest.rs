//! Polynomial-time k-equilibrium verification on color forests.
//!
//! For each color `x`, simple deviations to `x` live inside the forest
//! induced by the nodes that may play `x` but currently do not. Each tree of
//! that forest is rooted at its smallest node and a bottom-up dynamic program
//! computes, for every node `v`:
//!
//! * `D(v)`: the size of a smallest connected coalition inside the subtree of
//!   `v`, containing `v`, whose move to `x` is profitable for every member;
//! * `D^p(v)`: the same, assuming the parent of `v` moves to `x` as well
//!   (the parent itself need not profit).
//!
//! Children are taken greedily in increasing order of `D^p` until the node's
//! own payoff would strictly increase.

use crate::deviation::{DeviationReport, Verdict};
use crate::game::{ColorId, CoordinationGame, JointStrategy};
use crate::{Error, Result};

/// Marks "no valid coalition". Strictly greater than any node count.
pub const UNREACHABLE: usize = usize::MAX;

/// DP tables for one target color.
#[derive(Debug, Clone)]
pub struct DpTables {
    pub color: ColorId,
    /// Node may join a deviation to `color` (eligible and not already playing it).
    pub member: Vec<bool>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// `D(v)`, `UNREACHABLE` when no coalition exists or `v` is not a member.
    pub min_size: Vec<usize>,
    /// `D^p(v)`, parent-assisted variant; `UNREACHABLE` for roots.
    pub min_size_with_parent: Vec<usize>,
    chosen: Vec<Vec<usize>>,
    chosen_with_parent: Vec<Vec<usize>>,
}

impl DpTables {
    /// Runs the dynamic program for deviations to `color`.
    ///
    /// Fails if the members induce a cycle, which cannot happen on a color forest.
    pub fn build(game: &CoordinationGame, s: &JointStrategy, color: ColorId) -> Result<Self> {
        game.check(s)?;
        let g = game.graph();
        let n = game.node_count();
        let member: Vec<bool> = (0..n).map(|v| game.assignment().allows(v, color) && s.color(v) != color).collect();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut order = Vec::new();
        let mut seen = vec![false; n];
        for root in 0..n {
            if !member[root] || seen[root] {
                continue;
            }
            seen[root] = true;
            let start = order.len();
            order.push(root);
            let mut head = start;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &w in g.neighbors(v) {
                    if !member[w] || Some(w) == parent[v] {
                        continue;
                    }
                    if seen[w] {
                        return Err(Error::Structural(format!(
                            "nodes eligible for color `{}` induce a cycle",
                            game.assignment().name(color)
                        )));
                    }
                    seen[w] = true;
                    parent[w] = Some(v);
                    children[v].push(w);
                    order.push(w);
                }
            }
        }

        let mut min_size = vec![UNREACHABLE; n];
        let mut min_size_with_parent = vec![UNREACHABLE; n];
        let mut chosen = vec![Vec::new(); n];
        let mut chosen_with_parent = vec![Vec::new(); n];
        for &v in order.iter().rev() {
            let payoff = game.payoff(s, v) as usize;
            let already = g.neighbors(v).iter().filter(|&&w| s.color(w) == color).count();
            let mut ranked: Vec<usize> =
                children[v].iter().copied().filter(|&u| min_size_with_parent[u] != UNREACHABLE).collect();
            ranked.sort_by_key(|&u| (min_size_with_parent[u], u));

            // v profits iff (joining children) + (neighbors already on x) [+ parent] > payoff
            let need = (payoff + 1).saturating_sub(already);
            if let Some((size, picked)) = greedy(&ranked, need, &min_size_with_parent) {
                min_size[v] = size;
                chosen[v] = picked;
            }
            if parent[v].is_some() {
                let need = (payoff + 1).saturating_sub(already + 1);
                if let Some((size, picked)) = greedy(&ranked, need, &min_size_with_parent) {
                    min_size_with_parent[v] = size;
                    chosen_with_parent[v] = picked;
                }
            }
        }
        Ok(Self { color, member, parent, children, min_size, min_size_with_parent, chosen, chosen_with_parent })
    }

    /// `U(v)`, sorted.
    pub fn coalition(&self, v: usize) -> Option<Vec<usize>> {
        (self.min_size[v] != UNREACHABLE).then(|| self.collect(v, &self.chosen[v]))
    }

    /// `U^p(v)`, sorted.
    pub fn parent_assisted_coalition(&self, v: usize) -> Option<Vec<usize>> {
        (self.min_size_with_parent[v] != UNREACHABLE).then(|| self.collect(v, &self.chosen_with_parent[v]))
    }

    fn collect(&self, v: usize, picked: &[usize]) -> Vec<usize> {
        let mut out = vec![v];
        let mut stack: Vec<usize> = picked.to_vec();
        while let Some(u) = stack.pop() {
            out.push(u);
            stack.extend_from_slice(&self.chosen_with_parent[u]);
        }
        out.sort_unstable();
        out
    }

    /// Node with the smallest finite `D`, lowest id on ties.
    pub fn best(&self) -> Option<(usize, usize)> {
        (0..self.min_size.len())
            .filter(|&v| self.min_size[v] != UNREACHABLE)
            .map(|v| (self.min_size[v], v))
            .min()
    }
}

/// Takes the `need` cheapest children; `ranked` is sorted by cost.
fn greedy(ranked: &[usize], need: usize, cost: &[usize]) -> Option<(usize, Vec<usize>)> {
    if ranked.len() < need {
        return None;
    }
    let picked = ranked[..need].to_vec();
    let size = 1 + picked.iter().map(|&u| cost[u]).sum::<usize>();
    Some((size, picked))
}

fn require_color_forest(game: &CoordinationGame) -> Result<()> {
    if game.classify().is_color_forest {
        Ok(())
    } else {
        Err(Error::Structural("game is not played on a color forest".into()))
    }
}

/// Decides whether `s` is a k-equilibrium of a color-forest game.
///
/// The witness, when `s` is refuted, is the smallest coalition found (lowest
/// color id on ties) and is replayed before being returned.
pub fn verify_color_forest(game: &CoordinationGame, s: &JointStrategy, k: usize) -> Result<Verdict> {
    require_color_forest(game)?;
    game.check(s)?;
    if k == 0 {
        return Err(Error::InvalidParams("coalition size bound must be at least 1".into()));
    }
    let mut best: Option<(usize, usize, ColorId, DpTables)> = None;
    for color in game.assignment().colors() {
        let tables = DpTables::build(game, s, color)?;
        if let Some((size, root)) = tables.best() {
            if best.as_ref().is_none_or(|b| size < b.0) {
                best = Some((size, root, color, tables));
            }
        }
    }
    match best {
        Some((size, root, color, tables)) if size <= k => {
            let coalition = tables.coalition(root).expect("finite D has a coalition");
            if coalition.len() != size {
                return Err(Error::Internal(format!("coalition of size {} recorded as {size}", coalition.len())));
            }
            let report = DeviationReport::evaluate(game, s, &coalition, &vec![color; coalition.len()])?;
            if !report.is_profitable() {
                return Err(Error::Internal(format!("replayed witness {} is not profitable", report.describe(game))));
            }
            Ok(Verdict::Refuted(report))
        }
        _ => Ok(Verdict::Equilibrium),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorForestSolution {
    pub profile: JointStrategy,
    pub steps: usize,
    /// Social welfare of every visited profile, starting with the initial one.
    pub welfare: Vec<u64>,
}

/// Computes a strong equilibrium by applying verifier witnesses until none is left.
///
/// Welfare rises with every step, so at most `2|E|` steps are taken; both
/// facts are checked on every run.
pub fn solve_color_forest(game: &CoordinationGame, s0: Option<&JointStrategy>) -> Result<ColorForestSolution> {
    require_color_forest(game)?;
    let mut s = match s0 {
        Some(s) => {
            game.check(s)?;
            s.clone()
        }
        None => game.default_profile(),
    };
    let limit = 2 * game.graph().edge_count();
    let n = game.node_count().max(1);
    let mut welfare = vec![game.social_welfare(&s)];
    let mut steps = 0;
    while let Verdict::Refuted(report) = verify_color_forest(game, &s, n)? {
        s = report.apply(&s);
        steps += 1;
        let sw = game.social_welfare(&s);
        if sw <= *welfare.last().unwrap() || steps > limit {
            return Err(Error::Internal(format!("improvement step {steps} did not raise welfare within bound")));
        }
        welfare.push(sw);
    }
    Ok(ColorForestSolution { profile: s, steps, welfare })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ColorAssignment;
    use crate::graph::Graph;

    fn game(n: usize, edges: &[(usize, usize)], sets: &[&[&str]]) -> CoordinationGame {
        let sets: Vec<Vec<&str>> = sets.iter().map(|s| s.to_vec()).collect();
        CoordinationGame::new(Graph::new(n, edges.iter().copied()).unwrap(), ColorAssignment::from_names(&sets).unwrap())
            .unwrap()
    }

    #[test]
    fn path_with_split_colors_is_strong() {
        let g = game(3, &[(0, 1), (1, 2)], &[&["a"], &["a", "b"], &["b"]]);
        let s = g.profile_from_names(&["a", "b", "b"]).unwrap();
        for k in 1..=3 {
            assert!(verify_color_forest(&g, &s, k).unwrap().holds());
        }
    }

    #[test]
    fn star_center_deviates_alone() {
        let g = game(3, &[(0, 1), (0, 2)], &[&["a", "b"], &["b"], &["b"]]);
        let s = g.profile_from_names(&["a", "b", "b"]).unwrap();
        let verdict = verify_color_forest(&g, &s, 1).unwrap();
        let w = verdict.witness().unwrap();
        assert_eq!(w.coalition, vec![0]);
        assert!(w.simple);
    }

    #[test]
    fn neighbors_already_on_target_color_count() {
        // center 0 plays a (one a-neighbor), two children already on x; alone it reaches 2 > 1
        let g = game(4, &[(0, 1), (0, 2), (0, 3)], &[&["a", "x"], &["a"], &["x"], &["x"]]);
        let s = g.profile_from_names(&["a", "a", "x", "x"]).unwrap();
        let w = verify_color_forest(&g, &s, 1).unwrap();
        assert_eq!(w.witness().unwrap().coalition, vec![0]);
    }

    #[test]
    fn chain_needs_whole_path() {
        // 0-1-2 all {a,b} playing a, each end has a fixed a-leaf; only all three moving to b... never profits
        // end nodes hold payoff 2, the middle 2: moving three to b gives ends 1, middle 2
        let g = game(
            5,
            &[(0, 1), (1, 2), (0, 3), (2, 4)],
            &[&["a", "b"], &["a", "b"], &["a", "b"], &["a"], &["a"]],
        );
        let s = g.profile_from_names(&["a", "a", "a", "a", "a"]).unwrap();
        assert!(verify_color_forest(&g, &s, 5).unwrap().holds());
    }

    #[test]
    fn rejects_non_color_forest() {
        let g = game(3, &[(0, 1), (1, 2), (0, 2)], &[&["a"], &["a"], &["a"]]);
        assert!(matches!(verify_color_forest(&g, &g.default_profile(), 1), Err(Error::Structural(_))));
    }

    #[test]
    fn shared_color_forest_solves_to_all_same() {
        let g = game(4, &[(0, 1), (1, 2), (1, 3)], &[&["a", "c"], &["b", "c"], &["c"], &["a", "c"]]);
        let sol = solve_color_forest(&g, None).unwrap();
        assert_eq!(g.social_welfare(&sol.profile), 6);
        assert!(sol.steps <= 6);
    }
}
