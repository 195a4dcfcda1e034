//! Strong-equilibrium computation for the tractable graph classes, plus a
//! dispatcher that picks a method from the structural classification.

use std::collections::HashSet;
use std::fmt;

use crate::colorforest::solve_color_forest;
use crate::deviation::{run_improvement_path, DeviationSearch, PathConfig, PotentialKind, Termination};
use crate::game::{ColorId, CoordinationGame, JointStrategy};
use crate::graph::{ordered, Edge};
use crate::{Error, Result};

/// Bottom-up welfare table over a rooted forest:
/// `d_i(c) = Σ_{j child of i} max_{c'} (d_j(c') + 2·[c' = c])`.
#[derive(Debug, Clone)]
pub struct TreeDpTable {
    pub roots: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
    /// Per node, aligned with its color set; empty for nodes outside the forest.
    values: Vec<Vec<u64>>,
}

impl TreeDpTable {
    /// Roots a forest at `roots`, ignoring edges for which `skip` holds.
    ///
    /// Fails when the traversal meets a cycle.
    pub fn build(game: &CoordinationGame, roots: &[usize], skip: impl Fn(Edge) -> bool) -> Result<Self> {
        let g = game.graph();
        let a = game.assignment();
        let n = game.node_count();
        let mut parent = vec![None; n];
        let mut children = vec![Vec::new(); n];
        let mut seen = vec![false; n];
        let mut order = Vec::new();
        for &root in roots {
            if seen[root] {
                return Err(Error::Structural(format!("root {root} reached twice")));
            }
            seen[root] = true;
            let start = order.len();
            order.push(root);
            let mut head = start;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &w in g.neighbors(v) {
                    if Some(w) == parent[v] || skip(ordered(v, w)) {
                        continue;
                    }
                    if seen[w] {
                        return Err(Error::Structural("component has a cycle".into()));
                    }
                    seen[w] = true;
                    parent[w] = Some(v);
                    children[v].push(w);
                    order.push(w);
                }
            }
        }
        let mut values: Vec<Vec<u64>> = vec![Vec::new(); n];
        for &i in order.iter().rev() {
            let row = a
                .set(i)
                .iter()
                .map(|&c| children[i].iter().map(|&j| best_child(game, &values, j, c).1).sum())
                .collect();
            values[i] = row;
        }
        Ok(Self { roots: roots.to_vec(), parent, children, values })
    }

    /// `d_node(color)`.
    pub fn value(&self, game: &CoordinationGame, node: usize, color: ColorId) -> Option<u64> {
        let pos = game.assignment().set(node).binary_search(&color).ok()?;
        self.values[node].get(pos).copied()
    }

    /// Best color at a root, lowest color id on ties.
    pub fn best_root(&self, game: &CoordinationGame, root: usize) -> (ColorId, u64) {
        let set = game.assignment().set(root);
        let mut best = (set[0], self.values[root][0]);
        for (pos, &c) in set.iter().enumerate().skip(1) {
            if self.values[root][pos] > best.1 {
                best = (c, self.values[root][pos]);
            }
        }
        best
    }

    /// Writes an optimal coloring of the subtree of `root` given its color.
    pub fn assign(&self, game: &CoordinationGame, root: usize, color: ColorId, out: &mut [Option<ColorId>]) {
        let mut stack = vec![(root, color)];
        while let Some((i, c)) = stack.pop() {
            out[i] = Some(c);
            for &j in &self.children[i] {
                stack.push((j, best_child(game, &self.values, j, c).0));
            }
        }
    }
}

/// `argmax_{c'} d_j(c') + 2·[c' = parent_color]`, lowest color id on ties.
fn best_child(game: &CoordinationGame, values: &[Vec<u64>], j: usize, parent_color: ColorId) -> (ColorId, u64) {
    let set = game.assignment().set(j);
    let mut best: Option<(ColorId, u64)> = None;
    for (pos, &c) in set.iter().enumerate() {
        let v = values[j][pos] + if c == parent_color { 2 } else { 0 };
        if best.is_none_or(|b| v > b.1) {
            best = Some((c, v));
        }
    }
    best.expect("color sets are nonempty")
}

/// Maximum-welfare profile of a forest game, which is a strong equilibrium there.
pub fn solve_tree(game: &CoordinationGame) -> Result<(JointStrategy, u64)> {
    let roots: Vec<usize> = game.graph().components().iter().map(|c| c[0]).collect();
    let table = TreeDpTable::build(game, &roots, |_| false)?;
    let mut out = vec![None; game.node_count()];
    let mut total = 0;
    for &r in &roots {
        let (c, v) = table.best_root(game, r);
        table.assign(game, r, c, &mut out);
        total += v;
    }
    let profile = game.profile(out.into_iter().map(|c| c.expect("forest covers all nodes")).collect())?;
    Ok((profile, total))
}

/// Outcome for one component with a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudotreeSolution {
    /// Cycle nodes in walk order.
    pub cycle: Vec<usize>,
    /// Best welfare over the trees obtained by deleting one cycle edge.
    pub best_with_edge_removed: u64,
    /// Best welfare with the cycle unicolored; `None` if the cycle nodes share no color.
    pub best_unicolored: Option<u64>,
    /// Colors available to every cycle node.
    pub common_colors: Vec<ColorId>,
    pub cycle_unicolored: bool,
    pub welfare: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoforestSolution {
    pub profile: JointStrategy,
    pub welfare: u64,
    pub pseudotrees: Vec<PseudotreeSolution>,
}

/// A social optimum that unicolors every cycle it can; a strong equilibrium on pseudoforests.
pub fn solve_pseudoforest(game: &CoordinationGame) -> Result<PseudoforestSolution> {
    let g = game.graph();
    let cycles = g.pseudoforest_cycles()?;
    let mut on_cycle = vec![None; game.node_count()];
    for (idx, cycle) in cycles.iter().enumerate() {
        for &v in cycle {
            on_cycle[v] = Some(idx);
        }
    }
    let mut out = vec![None; game.node_count()];
    let mut welfare = 0;
    let mut pseudotrees = Vec::new();
    for comp in g.components() {
        match comp.iter().find_map(|&v| on_cycle[v]) {
            None => {
                let table = TreeDpTable::build(game, &[comp[0]], |_| false)?;
                let (c, v) = table.best_root(game, comp[0]);
                table.assign(game, comp[0], c, &mut out);
                welfare += v;
            }
            Some(idx) => {
                let solution = solve_pseudotree(game, &cycles[idx], &mut out)?;
                welfare += solution.welfare;
                pseudotrees.push(solution);
            }
        }
    }
    let profile = game.profile(out.into_iter().map(|c| c.expect("components cover all nodes")).collect())?;
    Ok(PseudoforestSolution { profile, welfare, pseudotrees })
}

fn solve_pseudotree(game: &CoordinationGame, cycle: &[usize], out: &mut [Option<ColorId>]) -> Result<PseudotreeSolution> {
    let k = cycle.len();
    let cycle_edges: Vec<Edge> = (0..k).map(|j| ordered(cycle[j], cycle[(j + 1) % k])).collect();

    // Delete one cycle edge at a time; the deleted edge's own contribution is ignored.
    let mut removed_best: Option<(u64, TreeDpTable, ColorId)> = None;
    for &e in &cycle_edges {
        let table = TreeDpTable::build(game, &[cycle[0]], |f| f == e)?;
        let (c, v) = table.best_root(game, cycle[0]);
        if removed_best.as_ref().is_none_or(|b| v > b.0) {
            removed_best = Some((v, table, c));
        }
    }
    let (sw1, table1, root_color) = removed_best.expect("a cycle has edges");

    let cycle_set: HashSet<Edge> = cycle_edges.iter().copied().collect();
    let hanging = TreeDpTable::build(game, cycle, |f| cycle_set.contains(&f))?;
    let a = game.assignment();
    let common_colors: Vec<ColorId> =
        a.set(cycle[0]).iter().copied().filter(|&c| cycle.iter().all(|&v| a.allows(v, c))).collect();
    let mut unicolored_best: Option<(u64, ColorId)> = None;
    for &c in &common_colors {
        let v = 2 * k as u64
            + cycle.iter().map(|&i| hanging.value(game, i, c).expect("common color")).sum::<u64>();
        if unicolored_best.is_none_or(|b| v > b.0) {
            unicolored_best = Some((v, c));
        }
    }

    let (cycle_unicolored, welfare) = match unicolored_best {
        Some((sw2, c)) if sw2 >= sw1 => {
            for &i in cycle {
                hanging.assign(game, i, c, out);
            }
            (true, sw2)
        }
        _ => {
            table1.assign(game, cycle[0], root_color, out);
            (false, sw1)
        }
    };
    Ok(PseudotreeSolution {
        cycle: cycle.to_vec(),
        best_with_edge_removed: sw1,
        best_unicolored: unicolored_best.map(|b| b.0),
        common_colors,
        cycle_unicolored,
        welfare,
    })
}

/// A color restricted to one component of the nodes that may play it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirtualResource {
    pub color: ColorId,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorCompleteSolution {
    pub profile: JointStrategy,
    pub resources: Vec<VirtualResource>,
    /// Greedy picks in order: resource index and the players assigned to it.
    pub picks: Vec<(usize, Vec<usize>)>,
}

/// Greedy strong equilibrium on color-complete games.
///
/// Each color is split into one resource per component of the nodes that may
/// play it. The resource with the most unassigned eligible players takes all
/// of them (lowest resource on ties), until every player is placed.
pub fn solve_color_complete(game: &CoordinationGame) -> Result<ColorCompleteSolution> {
    if !game.classify().is_color_complete {
        return Err(Error::Structural("game is not played on a color-complete graph".into()));
    }
    let a = game.assignment();
    let g = game.graph();
    let resources: Vec<VirtualResource> = a
        .colors()
        .flat_map(|color| {
            g.components_within(&a.slice_mask(color)).into_iter().map(move |members| VirtualResource { color, members })
        })
        .collect();
    let mut assigned: Vec<Option<ColorId>> = vec![None; game.node_count()];
    let mut picks = Vec::new();
    loop {
        let best = resources
            .iter()
            .enumerate()
            .map(|(idx, r)| (r.members.iter().filter(|&&v| assigned[v].is_none()).count(), idx))
            .max_by(|x, y| x.0.cmp(&y.0).then(y.1.cmp(&x.1)));
        match best {
            Some((count, idx)) if count > 0 => {
                let players: Vec<usize> =
                    resources[idx].members.iter().copied().filter(|&v| assigned[v].is_none()).collect();
                for &v in &players {
                    assigned[v] = Some(resources[idx].color);
                }
                picks.push((idx, players));
            }
            _ => break,
        }
    }
    let profile = game.profile(assigned.into_iter().map(|c| c.expect("every player has a resource")).collect())?;
    Ok(ColorCompleteSolution { profile, resources, picks })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ColorForest,
    Pseudoforest,
    ColorComplete,
    /// Welfare-tracked improvement dynamics for games with at most two colors.
    TwoColorDynamics,
    BruteForce,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::ColorForest => "colorforest",
            Method::Pseudoforest => "pseudoforest",
            Method::ColorComplete => "colorcomplete",
            Method::TwoColorDynamics => "two-color-dynamics",
            Method::BruteForce => "brute",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub method: Method,
    /// `None` only for brute force, when exhaustive search proved that no strong equilibrium exists.
    pub profile: Option<JointStrategy>,
}

/// Picks the first applicable method: color forest, pseudoforest, color
/// complete, two colors, then exhaustive search within `budget`.
pub fn solve_auto(game: &CoordinationGame, budget: u64) -> Result<Solution> {
    let class = game.classify();
    let method = if class.is_color_forest {
        Method::ColorForest
    } else if class.is_pseudoforest {
        Method::Pseudoforest
    } else if class.is_color_complete {
        Method::ColorComplete
    } else if game.assignment().color_count() <= 2 {
        Method::TwoColorDynamics
    } else {
        Method::BruteForce
    };
    solve_with(game, method, budget)
}

/// Runs one specific method.
pub fn solve_with(game: &CoordinationGame, method: Method, budget: u64) -> Result<Solution> {
    let profile = match method {
        Method::ColorForest => Some(solve_color_forest(game, None)?.profile),
        Method::Pseudoforest => Some(solve_pseudoforest(game)?.profile),
        Method::ColorComplete => Some(solve_color_complete(game)?.profile),
        Method::TwoColorDynamics => {
            if game.assignment().color_count() > 2 {
                return Err(Error::Structural("game uses more than two colors".into()));
            }
            let n = game.node_count().max(1);
            let config = PathConfig::new(n)
                .potential(PotentialKind::Welfare)
                .step_limit(2 * game.graph().edge_count() + 1)
                .budget(budget);
            let trace = run_improvement_path(game, &game.default_profile(), &config)?;
            if trace.termination != Termination::Equilibrium {
                return Err(Error::Internal(format!("two-color dynamics ended with {:?}", trace.termination)));
            }
            Some(trace.terminal)
        }
        Method::BruteForce => brute_force_strong_equilibrium(game, budget)?,
    };
    Ok(Solution { method, profile })
}

/// First strong equilibrium in profile order, or `None` after a complete scan.
pub fn brute_force_strong_equilibrium(game: &CoordinationGame, budget: u64) -> Result<Option<JointStrategy>> {
    let total = game.profile_count();
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { required: total, budget });
    }
    let search = DeviationSearch::new(game).with_budget(budget);
    let n = game.node_count().max(1);
    for index in 0..total {
        let s = game.profile_at(index);
        if search.find(&s, n, true)?.is_none() {
            return Ok(Some(s));
        }
    }
    Ok(None)
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
    fn path_with_split_colors() {
        let g = game(3, &[(0, 1), (1, 2)], &[&["a"], &["a", "b"], &["b"]]);
        let (s, sw) = solve_tree(&g).unwrap();
        assert_eq!(sw, 2);
        assert_eq!(g.social_welfare(&s), 2);
    }

    #[test]
    fn star_with_one_color() {
        let g = game(5, &[(0, 1), (0, 2), (0, 3), (0, 4)], &[&["c"] as &[&str]; 5]);
        let (_, sw) = solve_tree(&g).unwrap();
        assert_eq!(sw, 8);
    }

    #[test]
    fn tree_solver_rejects_cycles() {
        let g = game(3, &[(0, 1), (1, 2), (0, 2)], &[&["a"] as &[&str]; 3]);
        assert!(solve_tree(&g).is_err());
    }

    #[test]
    fn triangle_without_common_color() {
        let g = game(3, &[(0, 1), (1, 2), (0, 2)], &[&["a", "b"], &["b", "c"], &["a", "c"]]);
        let sol = solve_pseudoforest(&g).unwrap();
        assert_eq!(sol.welfare, 2);
        assert_eq!(g.social_welfare(&sol.profile), 2);
        assert_eq!(sol.pseudotrees[0].best_unicolored, None);
        assert!(!sol.pseudotrees[0].cycle_unicolored);
    }

    #[test]
    fn complete_graph_goes_monochrome() {
        let g = game(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], &[&["a", "b"] as &[&str]; 4]);
        let sol = solve_color_complete(&g).unwrap();
        assert_eq!(g.social_welfare(&sol.profile), 12);
    }

    #[test]
    fn matching_unicolors_every_edge() {
        let g = game(4, &[(0, 1), (2, 3)], &[&["p", "q"], &["q", "r"], &["s", "t"], &["t"]]);
        let sol = solve_color_complete(&g).unwrap();
        assert_eq!(g.social_welfare(&sol.profile), 4);
    }

    #[test]
    fn color_complete_rejects_paths() {
        let g = game(3, &[(0, 1), (1, 2)], &[&["a"] as &[&str]; 3]);
        assert!(solve_color_complete(&g).is_err());
    }

    #[test]
    fn dispatch_on_tree_uses_color_forest() {
        let g = game(3, &[(0, 1), (1, 2)], &[&["a", "b"] as &[&str]; 3]);
        assert_eq!(solve_auto(&g, 1000).unwrap().method, Method::ColorForest);
    }
}
