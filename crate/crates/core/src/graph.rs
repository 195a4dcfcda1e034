//! Undirected simple graphs with dense node ids `0..n`.
//!
//! Graphs are immutable once built. Everything the game layer needs lives
//! here: induced subgraphs `G[K]`, internal edges `E[K]`, boundary edges
//! `δ(K)`, components, cycle structure and the structural classification
//! used to dispatch solvers.

use std::collections::VecDeque;

use crate::game::ColorAssignment;
use crate::{Error, Result};

/// An undirected edge stored with `u < v`.
pub type Edge = (usize, usize);

#[inline]
pub(crate) fn ordered(u: usize, v: usize) -> Edge {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    node_count: usize,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<usize>>,
}

/// `G[K]` with node ids relabeled to `0..|K|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedSubgraph {
    pub graph: Graph,
    /// `mapping[new_id]` is the id of the node in the parent graph.
    pub mapping: Vec<usize>,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges and unknown endpoints.
    pub fn new(node_count: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (u, v) in edges {
            for node in [u, v] {
                if node >= node_count {
                    return Err(Error::UnknownNode { node, node_count });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            list.push(ordered(u, v));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &list {
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self { node_count, edges: list, adjacency })
    }

    pub fn empty(node_count: usize) -> Self {
        Self { node_count, edges: Vec::new(), adjacency: vec![Vec::new(); node_count] }
    }

    pub fn path(node_count: usize) -> Self {
        Self::new(node_count, (1..node_count).map(|i| (i - 1, i))).expect("valid path")
    }

    pub fn cycle(node_count: usize) -> Result<Self> {
        if node_count < 3 {
            return Err(Error::InvalidParams(format!("a cycle needs at least 3 nodes, got {node_count}")));
        }
        Self::new(node_count, (0..node_count).map(|i| (i, (i + 1) % node_count)))
    }

    pub fn complete(node_count: usize) -> Self {
        let edges = (0..node_count).flat_map(|u| (u + 1..node_count).map(move |v| (u, v)));
        Self::new(node_count, edges).expect("valid clique")
    }

    pub fn star(leaves: usize) -> Self {
        Self::new(leaves + 1, (1..=leaves).map(|i| (0, i))).expect("valid star")
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, node: usize) -> &[usize] {
        &self.adjacency[node]
    }

    pub fn degree(&self, node: usize) -> usize {
        self.adjacency[node].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.node_count && self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Membership mask for a node set, validating ids.
    pub fn node_mask(&self, nodes: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.node_count];
        for &node in nodes {
            if node >= self.node_count {
                return Err(Error::UnknownNode { node, node_count: self.node_count });
            }
            mask[node] = true;
        }
        Ok(mask)
    }

    pub fn induced_subgraph(&self, nodes: &[usize]) -> Result<InducedSubgraph> {
        let mask = self.node_mask(nodes)?;
        let mapping: Vec<usize> = (0..self.node_count).filter(|&i| mask[i]).collect();
        let mut new_id = vec![usize::MAX; self.node_count];
        for (new, &old) in mapping.iter().enumerate() {
            new_id[old] = new;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| mask[u] && mask[v])
            .map(|&(u, v)| (new_id[u], new_id[v]));
        let graph = Graph::new(mapping.len(), edges)?;
        Ok(InducedSubgraph { graph, mapping })
    }

    /// `E[K]`: edges with both endpoints in `nodes`.
    pub fn internal_edges(&self, nodes: &[usize]) -> Result<Vec<Edge>> {
        let mask = self.node_mask(nodes)?;
        Ok(self.edges.iter().copied().filter(|&(u, v)| mask[u] && mask[v]).collect())
    }

    /// `δ(K)`: edges with exactly one endpoint in `nodes`.
    pub fn boundary_edges(&self, nodes: &[usize]) -> Result<Vec<Edge>> {
        let mask = self.node_mask(nodes)?;
        Ok(self.edges.iter().copied().filter(|&(u, v)| mask[u] != mask[v]).collect())
    }

    /// Connected components, each sorted, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_within(&vec![true; self.node_count])
    }

    /// Components of the subgraph induced by `mask`.
    pub fn components_within(&self, mask: &[bool]) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.node_count];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.node_count {
            if !mask[start] || seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            let mut comp = Vec::new();
            while let Some(v) = queue.pop_front() {
                comp.push(v);
                for &w in &self.adjacency[v] {
                    if mask[w] && !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Whether `G[nodes]` is connected (the empty set is not).
    pub fn is_connected_subset(&self, nodes: &[usize]) -> Result<bool> {
        let mask = self.node_mask(nodes)?;
        let comps = self.components_within(&mask);
        Ok(comps.len() == 1)
    }

    /// Size of a minimum feedback edge set: `|E| - |V| + #components`.
    pub fn feedback_edge_number(&self) -> usize {
        self.edges.len() + self.components().len() - self.node_count
    }

    /// A minimum feedback edge set: the complement of a BFS spanning forest.
    pub fn min_feedback_edge_set(&self) -> Vec<Edge> {
        let mut seen = vec![false; self.node_count];
        let mut tree = Vec::new();
        let mut queue = VecDeque::new();
        for start in 0..self.node_count {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.push_back(start);
            while let Some(v) = queue.pop_front() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        tree.push(ordered(v, w));
                        queue.push_back(w);
                    }
                }
            }
        }
        tree.sort_unstable();
        self.edges.iter().copied().filter(|e| tree.binary_search(e).is_err()).collect()
    }

    pub fn is_forest(&self) -> bool {
        self.feedback_edge_number() == 0
    }

    /// Every component has at most one cycle.
    pub fn is_pseudoforest(&self) -> bool {
        self.components().iter().all(|comp| {
            let edges: usize = comp.iter().map(|&v| self.degree(v)).sum::<usize>() / 2;
            edges <= comp.len()
        })
    }

    /// Biconnected components (blocks) as edge lists. Bridges form one-edge blocks.
    pub fn biconnected_components(&self) -> Vec<Vec<Edge>> {
        const UNSEEN: usize = usize::MAX;
        let n = self.node_count;
        let mut disc = vec![UNSEEN; n];
        let mut low = vec![0usize; n];
        let mut time = 0usize;
        let mut edge_stack: Vec<Edge> = Vec::new();
        let mut blocks = Vec::new();
        for root in 0..n {
            if disc[root] != UNSEEN {
                continue;
            }
            disc[root] = time;
            low[root] = time;
            time += 1;
            // (node, parent, next neighbor index)
            let mut stack = vec![(root, UNSEEN, 0usize)];
            while let Some(&(v, parent, idx)) = stack.last() {
                if idx < self.adjacency[v].len() {
                    stack.last_mut().unwrap().2 += 1;
                    let w = self.adjacency[v][idx];
                    if disc[w] == UNSEEN {
                        edge_stack.push(ordered(v, w));
                        disc[w] = time;
                        low[w] = time;
                        time += 1;
                        stack.push((w, v, 0));
                    } else if w != parent && disc[w] < disc[v] {
                        edge_stack.push(ordered(v, w));
                        low[v] = low[v].min(disc[w]);
                    }
                } else {
                    stack.pop();
                    if let Some(&(u, _, _)) = stack.last() {
                        low[u] = low[u].min(low[v]);
                        if low[v] >= disc[u] {
                            let target = ordered(u, v);
                            let mut block = Vec::new();
                            while let Some(e) = edge_stack.pop() {
                                block.push(e);
                                if e == target {
                                    break;
                                }
                            }
                            block.sort_unstable();
                            blocks.push(block);
                        }
                    }
                }
            }
        }
        blocks.sort();
        blocks
    }

    /// Blocks that contain a cycle.
    fn cyclic_blocks(&self) -> Vec<Vec<Edge>> {
        self.biconnected_components().into_iter().filter(|b| b.len() > 1).collect()
    }

    /// No edge lies on two distinct cycles, i.e. every cyclic block is a simple cycle.
    pub fn cycles_pairwise_edge_disjoint(&self) -> bool {
        self.cyclic_blocks().iter().all(|block| {
            let mut nodes: Vec<usize> = block.iter().flat_map(|&(u, v)| [u, v]).collect();
            nodes.sort_unstable();
            nodes.dedup();
            nodes.len() == block.len()
        })
    }

    /// Length of a shortest cycle, `None` for forests.
    pub fn girth(&self) -> Option<usize> {
        let n = self.node_count;
        let mut best: Option<usize> = None;
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![usize::MAX; n];
        let mut queue = VecDeque::new();
        for root in 0..n {
            dist.iter_mut().for_each(|d| *d = usize::MAX);
            dist[root] = 0;
            parent[root] = usize::MAX;
            queue.clear();
            queue.push_back(root);
            while let Some(v) = queue.pop_front() {
                if let Some(b) = best {
                    if 2 * dist[v] + 1 >= b {
                        break;
                    }
                }
                for &w in &self.adjacency[v] {
                    if dist[w] == usize::MAX {
                        dist[w] = dist[v] + 1;
                        parent[w] = v;
                        queue.push_back(w);
                    } else if parent[v] != w {
                        let len = dist[v] + dist[w] + 1;
                        best = Some(best.map_or(len, |b| b.min(len)));
                    }
                }
            }
        }
        best
    }

    /// An edge on a cycle whose endpoints lie on no other cycle.
    ///
    /// Requires pairwise edge-disjoint cycles; returns `None` on forests.
    pub fn private_edge(&self) -> Result<Option<Edge>> {
        if !self.cycles_pairwise_edge_disjoint() {
            return Err(Error::Structural("two cycles share an edge".into()));
        }
        let cycles = self.cyclic_blocks();
        if cycles.is_empty() {
            return Ok(None);
        }
        let mut on_cycles = vec![0usize; self.node_count];
        for cycle in &cycles {
            for &(u, v) in cycle {
                // each cycle node is an endpoint of exactly two cycle edges
                on_cycles[u] += 1;
                on_cycles[v] += 1;
            }
        }
        for cycle in &cycles {
            if let Some(&e) = cycle.iter().find(|&&(u, v)| on_cycles[u] == 2 && on_cycles[v] == 2) {
                return Ok(Some(e));
            }
        }
        Err(Error::Internal("no private edge found on a graph with edge-disjoint cycles".into()))
    }

    /// The unique cycle of every cyclic component of a pseudoforest, as an
    /// ordered node walk `i_1, ..., i_k` starting at the smallest node.
    pub fn pseudoforest_cycles(&self) -> Result<Vec<Vec<usize>>> {
        if !self.is_pseudoforest() {
            return Err(Error::Structural("graph is not a pseudoforest".into()));
        }
        let n = self.node_count;
        let mut degree: Vec<usize> = (0..n).map(|v| self.degree(v)).collect();
        let mut removed = vec![false; n];
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
        while let Some(v) = queue.pop_front() {
            if removed[v] {
                continue;
            }
            removed[v] = true;
            for &w in &self.adjacency[v] {
                if !removed[w] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        for start in 0..n {
            if removed[start] || visited[start] {
                continue;
            }
            let mut walk = vec![start];
            visited[start] = true;
            let mut prev = start;
            let mut cur = *self.adjacency[start].iter().find(|&&w| !removed[w]).expect("core node");
            while cur != start {
                visited[cur] = true;
                walk.push(cur);
                let next = *self.adjacency[cur]
                    .iter()
                    .find(|&&w| !removed[w] && w != prev)
                    .expect("core nodes have two core neighbors");
                prev = cur;
                cur = next;
            }
            cycles.push(walk);
        }
        Ok(cycles)
    }
}

/// Structural flags that drive solver dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GraphClass {
    pub is_forest: bool,
    pub is_pseudoforest: bool,
    pub cycles_pairwise_edge_disjoint: bool,
    /// Minimum cycle length; `None` stands for infinity.
    pub girth: Option<usize>,
    /// `G[V_x]` is a forest for every color `x`.
    pub is_color_forest: bool,
    /// Every component of every `G[V_x]` is a clique.
    pub is_color_complete: bool,
}

pub fn classify(graph: &Graph, assignment: &ColorAssignment) -> Result<GraphClass> {
    if assignment.node_count() != graph.node_count() {
        return Err(Error::NodeCountMismatch {
            graph: graph.node_count(),
            assignment: assignment.node_count(),
        });
    }
    let mut is_color_forest = true;
    let mut is_color_complete = true;
    for x in assignment.colors() {
        let mask = assignment.slice_mask(x);
        for comp in graph.components_within(&mask) {
            let edges: usize =
                comp.iter().map(|&v| graph.neighbors(v).iter().filter(|&&w| mask[w]).count()).sum::<usize>() / 2;
            if edges + 1 > comp.len() {
                is_color_forest = false;
            }
            if edges != comp.len() * (comp.len() - 1) / 2 {
                is_color_complete = false;
            }
        }
    }
    Ok(GraphClass {
        is_forest: graph.is_forest(),
        is_pseudoforest: graph.is_pseudoforest(),
        cycles_pairwise_edge_disjoint: graph.cycles_pairwise_edge_disjoint(),
        girth: graph.girth(),
        is_color_forest,
        is_color_complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_triangles_with_path() -> Graph {
        // triangles {0,1,2} and {4,5,6} joined through 2-3-4
        Graph::new(7, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 6)]).unwrap()
    }

    #[test]
    fn rejects_bad_edges() {
        assert_eq!(Graph::new(2, [(0, 0)]), Err(Error::SelfLoop(0)));
        assert_eq!(Graph::new(2, [(0, 1), (1, 0)]), Err(Error::DuplicateEdge(0, 1)));
        assert!(matches!(Graph::new(2, [(0, 2)]), Err(Error::UnknownNode { node: 2, .. })));
    }

    #[test]
    fn induced_pair_of_triangle() {
        let sub = Graph::complete(3).induced_subgraph(&[0, 1]).unwrap();
        assert_eq!(sub.graph.edges(), &[(0, 1)]);
        assert_eq!(sub.mapping, vec![0, 1]);
    }

    #[test]
    fn induced_on_all_nodes_is_identity() {
        let g = two_triangles_with_path();
        let all: Vec<usize> = (0..7).collect();
        assert_eq!(g.induced_subgraph(&all).unwrap().graph, g);
    }

    #[test]
    fn induced_triangle_of_four_clique() {
        let sub = Graph::complete(4).induced_subgraph(&[1, 2, 3]).unwrap();
        assert_eq!(sub.graph.edge_count(), 3);
        assert_eq!(sub.mapping, vec![1, 2, 3]);
        assert!(Graph::complete(4).induced_subgraph(&[4]).is_err());
    }

    #[test]
    fn boundary_of_path_center() {
        let g = Graph::path(3);
        assert_eq!(g.boundary_edges(&[1]).unwrap(), vec![(0, 1), (1, 2)]);
        assert!(g.boundary_edges(&[0, 1, 2]).unwrap().is_empty());
        assert!(g.boundary_edges(&[7]).is_err());
    }

    #[test]
    fn feedback_edge_numbers() {
        assert_eq!(Graph::star(5).feedback_edge_number(), 0);
        assert_eq!(Graph::complete(4).feedback_edge_number(), 3);
        let two = Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert_eq!(two.feedback_edge_number(), 2);
        assert_eq!(two.min_feedback_edge_set().len(), 2);
    }

    #[test]
    fn blocks_and_girth() {
        let g = two_triangles_with_path();
        let blocks = g.biconnected_components();
        assert_eq!(blocks.len(), 4);
        assert!(g.cycles_pairwise_edge_disjoint());
        assert_eq!(g.girth(), Some(3));
        assert!(!Graph::complete(4).cycles_pairwise_edge_disjoint());
        assert_eq!(Graph::cycle(5).unwrap().girth(), Some(5));
        assert_eq!(Graph::path(5).girth(), None);
    }

    #[test]
    fn private_edges() {
        let tri = Graph::complete(3);
        let e = tri.private_edge().unwrap().unwrap();
        assert!(tri.edges().contains(&e));
        assert_eq!(Graph::path(4).private_edge().unwrap(), None);
        let e = two_triangles_with_path().private_edge().unwrap().unwrap();
        // avoids the junction nodes 2 and 4
        assert!(e == (0, 1) || e == (5, 6), "{e:?}");
        assert!(Graph::complete(4).private_edge().is_err());
    }

    #[test]
    fn pseudoforest_cycle_walks() {
        let g = Graph::new(6, [(0, 1), (1, 2), (2, 3), (3, 0), (3, 4), (5, 4)]).unwrap();
        assert_eq!(g.pseudoforest_cycles().unwrap(), vec![vec![0, 1, 2, 3]]);
        assert!(Graph::complete(4).pseudoforest_cycles().is_err());
        assert!(Graph::path(3).pseudoforest_cycles().unwrap().is_empty());
    }
}
