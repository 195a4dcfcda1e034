//! The coordination game: color assignments, joint strategies, payoffs and welfare.

use std::collections::HashMap;
use std::fmt;

use crate::graph::{classify, Edge, Graph, GraphClass};
use crate::{Error, Result};

/// Dense color id, an index into the palette.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ColorId(pub u32);

impl ColorId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Palette `M` plus a nonempty color set `A_i` per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColorAssignment {
    palette: Vec<String>,
    sets: Vec<Vec<ColorId>>,
}

impl ColorAssignment {
    /// Interns color names in order of first appearance.
    pub fn from_names<S: AsRef<str>>(sets: &[Vec<S>]) -> Result<Self> {
        let mut palette: Vec<String> = Vec::new();
        let mut index: HashMap<String, ColorId> = HashMap::new();
        let mut out = Vec::with_capacity(sets.len());
        for names in sets {
            let mut set = Vec::with_capacity(names.len());
            for name in names {
                let name = name.as_ref();
                let id = *index.entry(name.to_string()).or_insert_with(|| {
                    palette.push(name.to_string());
                    ColorId(palette.len() as u32 - 1)
                });
                set.push(id);
            }
            out.push(set);
        }
        Self::from_ids(palette, out)
    }

    /// Builds from an explicit palette and per-node id sets (sorted and deduplicated here).
    pub fn from_ids(palette: Vec<String>, mut sets: Vec<Vec<ColorId>>) -> Result<Self> {
        for (node, set) in sets.iter_mut().enumerate() {
            if set.is_empty() {
                return Err(Error::EmptyColorSet(node));
            }
            set.sort_unstable();
            set.dedup();
            if let Some(bad) = set.iter().find(|c| c.index() >= palette.len()) {
                return Err(Error::UnknownColor(format!("#{}", bad.0)));
            }
        }
        Ok(Self { palette, sets })
    }

    pub fn node_count(&self) -> usize {
        self.sets.len()
    }

    /// `m = |M|`.
    pub fn color_count(&self) -> usize {
        self.palette.len()
    }

    pub fn colors(&self) -> impl Iterator<Item = ColorId> {
        (0..self.palette.len() as u32).map(ColorId)
    }

    pub fn palette(&self) -> &[String] {
        &self.palette
    }

    pub fn name(&self, color: ColorId) -> &str {
        &self.palette[color.index()]
    }

    pub fn lookup(&self, name: &str) -> Option<ColorId> {
        self.palette.iter().position(|c| c == name).map(|i| ColorId(i as u32))
    }

    /// `A_i`, sorted by color id.
    pub fn set(&self, node: usize) -> &[ColorId] {
        &self.sets[node]
    }

    pub fn allows(&self, node: usize, color: ColorId) -> bool {
        self.sets[node].binary_search(&color).is_ok()
    }

    /// `V_x`: nodes that may play `color`.
    pub fn slice(&self, color: ColorId) -> Vec<usize> {
        (0..self.sets.len()).filter(|&i| self.allows(i, color)).collect()
    }

    pub fn slice_mask(&self, color: ColorId) -> Vec<bool> {
        (0..self.sets.len()).map(|i| self.allows(i, color)).collect()
    }

    pub fn max_set_size(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }
}

/// One color per node. Only constructible through a game, which checks feasibility.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointStrategy(Vec<ColorId>);

impl JointStrategy {
    pub fn color(&self, node: usize) -> ColorId {
        self.0[node]
    }

    pub fn colors(&self) -> &[ColorId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(s'_K, s_{-K})`. Callers guarantee feasibility of the new colors.
    pub(crate) fn with_moves(&self, coalition: &[usize], colors: &[ColorId]) -> JointStrategy {
        let mut next = self.0.clone();
        for (&node, &color) in coalition.iter().zip(colors) {
            next[node] = color;
        }
        JointStrategy(next)
    }
}

/// `G(G, A)` plus display labels for the nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoordinationGame {
    graph: Graph,
    assignment: ColorAssignment,
    labels: Vec<String>,
}

impl CoordinationGame {
    /// Nodes are labelled by their ids.
    pub fn new(graph: Graph, assignment: ColorAssignment) -> Result<Self> {
        let labels = (0..graph.node_count()).map(|i| i.to_string()).collect();
        Self::with_labels(graph, assignment, labels)
    }

    pub fn with_labels(graph: Graph, assignment: ColorAssignment, labels: Vec<String>) -> Result<Self> {
        if assignment.node_count() != graph.node_count() {
            return Err(Error::NodeCountMismatch {
                graph: graph.node_count(),
                assignment: assignment.node_count(),
            });
        }
        if labels.len() != graph.node_count() {
            return Err(Error::InvalidParams(format!(
                "{} labels for {} nodes",
                labels.len(),
                graph.node_count()
            )));
        }
        let mut sorted = labels.clone();
        sorted.sort();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParams(format!("duplicate node label `{}`", w[0])));
        }
        Ok(Self { graph, assignment, labels })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn assignment(&self) -> &ColorAssignment {
        &self.assignment
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, node: usize) -> &str {
        &self.labels[node]
    }

    pub fn node_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn classify(&self) -> GraphClass {
        classify(&self.graph, &self.assignment).expect("game invariant: assignment covers the graph")
    }

    /// Validates a color vector into a joint strategy.
    pub fn profile(&self, colors: Vec<ColorId>) -> Result<JointStrategy> {
        let s = JointStrategy(colors);
        self.check(&s)?;
        Ok(s)
    }

    pub fn profile_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<JointStrategy> {
        let colors = names
            .iter()
            .map(|n| self.assignment.lookup(n.as_ref()).ok_or_else(|| Error::UnknownColor(n.as_ref().to_string())))
            .collect::<Result<Vec<_>>>()?;
        self.profile(colors)
    }

    /// Every node plays the first color of its set.
    pub fn default_profile(&self) -> JointStrategy {
        JointStrategy((0..self.node_count()).map(|i| self.assignment.set(i)[0]).collect())
    }

    /// Feasibility: right length and `s_i ∈ A_i` for all `i`.
    pub fn check(&self, s: &JointStrategy) -> Result<()> {
        if s.len() != self.node_count() {
            return Err(Error::ProfileLength { expected: self.node_count(), got: s.len() });
        }
        for (node, &color) in s.0.iter().enumerate() {
            if color.index() >= self.assignment.color_count() || !self.assignment.allows(node, color) {
                let name = self.assignment.palette.get(color.index()).cloned().unwrap_or_else(|| format!("#{}", color.0));
                return Err(Error::Infeasible { node, color: name });
            }
        }
        Ok(())
    }

    /// `p_i(s)`: neighbors of `i` sharing its color.
    pub fn payoff(&self, s: &JointStrategy, node: usize) -> u32 {
        let color = s.0[node];
        self.graph.neighbors(node).iter().filter(|&&j| s.0[j] == color).count() as u32
    }

    pub fn payoffs(&self, s: &JointStrategy) -> Vec<u32> {
        (0..self.node_count()).map(|i| self.payoff(s, i)).collect()
    }

    /// `E_s^+`.
    pub fn unicolored_edges(&self, s: &JointStrategy) -> Vec<Edge> {
        self.graph.edges().iter().copied().filter(|&(u, v)| s.0[u] == s.0[v]).collect()
    }

    pub fn is_unicolored(&self, s: &JointStrategy, (u, v): Edge) -> bool {
        s.0[u] == s.0[v]
    }

    /// `SW(s) = 2|E_s^+|`.
    pub fn social_welfare(&self, s: &JointStrategy) -> u64 {
        2 * self.graph.edges().iter().filter(|&&(u, v)| s.0[u] == s.0[v]).count() as u64
    }

    /// `SW_K(s)`: payoffs summed over `nodes`.
    pub fn social_welfare_restricted(&self, s: &JointStrategy, nodes: &[usize]) -> Result<u64> {
        let mask = self.graph.node_mask(nodes)?;
        Ok((0..self.node_count()).filter(|&i| mask[i]).map(|i| self.payoff(s, i) as u64).sum())
    }

    /// Number of unicolored cycles. Defined on pseudoforests only.
    pub fn unicolored_cycle_count(&self, s: &JointStrategy) -> Result<usize> {
        let cycles = self.graph.pseudoforest_cycles()?;
        Ok(cycles.iter().filter(|c| c.iter().all(|&v| s.0[v] == s.0[c[0]])).count())
    }

    /// Number of feasible joint strategies, `Π |A_i|` (saturating).
    pub fn profile_count(&self) -> u128 {
        (0..self.node_count())
            .map(|i| self.assignment.set(i).len() as u128)
            .fold(1u128, |acc, k| acc.saturating_mul(k))
    }

    /// Decodes a mixed-radix index in `0..profile_count()` into a joint strategy.
    /// Node 0 is the most significant digit, so indices follow lexicographic order.
    pub fn profile_at(&self, mut index: u128) -> JointStrategy {
        let n = self.node_count();
        let mut colors = vec![ColorId(0); n];
        for i in (0..n).rev() {
            let set = self.assignment.set(i);
            let radix = set.len() as u128;
            colors[i] = set[(index % radix) as usize];
            index /= radix;
        }
        JointStrategy(colors)
    }

    pub fn display<'a>(&'a self, s: &'a JointStrategy) -> ProfileDisplay<'a> {
        ProfileDisplay { game: self, profile: s }
    }
}

/// Renders a profile as `label=color` pairs.
pub struct ProfileDisplay<'a> {
    game: &'a CoordinationGame,
    profile: &'a JointStrategy,
}

impl fmt::Display for ProfileDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &c) in self.profile.colors().iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}={}", self.game.label(i), self.game.assignment().name(c))?;
        }
        Ok(())
    }
}
