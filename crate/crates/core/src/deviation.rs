//! Coalitional deviations: exhaustive search, k-equilibrium checks, key-lemma
//! audits, uniformity checks and coalitional improvement paths with potential
//! tracking.
//!
//! Every deviation here follows the strict convention that each coalition
//! member changes its color. Simple deviations are those of a connected
//! coalition moving to one common color; restricting the search to them does
//! not change whether a profitable deviation of size at most `k` exists.

use std::collections::HashSet;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::game::{ColorId, CoordinationGame, JointStrategy};
use crate::graph::{ordered, Edge};
use crate::{Error, Result, DEFAULT_BUDGET};

/// A coalition move `s -> s'` with the payoffs of every member before and after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationReport {
    /// Sorted node ids.
    pub coalition: Vec<usize>,
    /// New color per coalition member, aligned with `coalition`.
    pub new_colors: Vec<ColorId>,
    pub payoff_before: Vec<u32>,
    pub payoff_after: Vec<u32>,
    /// `SW(s') - SW(s)`.
    pub delta_sw: i64,
    /// Connected coalition moving to a single color.
    pub simple: bool,
}

impl DeviationReport {
    /// Evaluates the move of `coalition` to `new_colors` from `s`.
    ///
    /// Fails when a member is repeated, keeps its color, or picks a color outside its set.
    pub fn evaluate(
        game: &CoordinationGame,
        s: &JointStrategy,
        coalition: &[usize],
        new_colors: &[ColorId],
    ) -> Result<Self> {
        game.check(s)?;
        if coalition.len() != new_colors.len() {
            return Err(Error::InvalidParams("coalition and color lists differ in length".into()));
        }
        if coalition.is_empty() {
            return Err(Error::InvalidParams("empty coalition".into()));
        }
        let mut moves: Vec<(usize, ColorId)> = coalition.iter().copied().zip(new_colors.iter().copied()).collect();
        moves.sort_unstable();
        for w in moves.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidParams(format!("node {} listed twice", w[0].0)));
            }
        }
        let a = game.assignment();
        for &(node, color) in &moves {
            if node >= game.node_count() {
                return Err(Error::UnknownNode { node, node_count: game.node_count() });
            }
            if color.index() >= a.color_count() || !a.allows(node, color) {
                return Err(Error::Infeasible { node, color: format!("#{}", color.0) });
            }
            if s.color(node) == color {
                return Err(Error::InvalidParams(format!("node {node} does not change its color")));
            }
        }
        let coalition: Vec<usize> = moves.iter().map(|m| m.0).collect();
        let new_colors: Vec<ColorId> = moves.iter().map(|m| m.1).collect();
        let next = s.with_moves(&coalition, &new_colors);
        let payoff_before = coalition.iter().map(|&v| game.payoff(s, v)).collect();
        let payoff_after = coalition.iter().map(|&v| game.payoff(&next, v)).collect();
        let delta_sw = game.social_welfare(&next) as i64 - game.social_welfare(s) as i64;
        let simple = new_colors.iter().all_equal() && game.graph().is_connected_subset(&coalition)?;
        Ok(Self { coalition, new_colors, payoff_before, payoff_after, delta_sw, simple })
    }

    /// Every member strictly gains.
    pub fn is_profitable(&self) -> bool {
        self.payoff_before.iter().zip(&self.payoff_after).all(|(b, a)| a > b)
    }

    pub fn size(&self) -> usize {
        self.coalition.len()
    }

    /// The common target color of a single-color move.
    pub fn target_color(&self) -> Option<ColorId> {
        if self.new_colors.iter().all_equal() {
            self.new_colors.first().copied()
        } else {
            None
        }
    }

    /// `s'` obtained by applying this move to `s`.
    pub fn apply(&self, s: &JointStrategy) -> JointStrategy {
        s.with_moves(&self.coalition, &self.new_colors)
    }

    /// Renders as `{a,b,c} -> x` or `{a->x, b->y}` using node labels.
    pub fn describe(&self, game: &CoordinationGame) -> String {
        let names = game.assignment();
        match self.target_color() {
            Some(c) => format!(
                "{{{}}}->{}",
                self.coalition.iter().map(|&v| game.label(v)).join(","),
                names.name(c)
            ),
            None => format!(
                "{{{}}}",
                self.coalition
                    .iter()
                    .zip(&self.new_colors)
                    .map(|(&v, &c)| format!("{}->{}", game.label(v), names.name(c)))
                    .join(",")
            ),
        }
    }
}

/// Outcome of a k-equilibrium check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equilibrium,
    Refuted(DeviationReport),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Equilibrium)
    }

    pub fn witness(&self) -> Option<&DeviationReport> {
        match self {
            Verdict::Equilibrium => None,
            Verdict::Refuted(r) => Some(r),
        }
    }
}

/// Candidate nodes and base payoffs for simple deviations to one color.
struct SimpleTarget {
    candidate: Vec<bool>,
    /// Neighbors already playing the target color.
    base: Vec<u32>,
    current: Vec<u32>,
}

impl SimpleTarget {
    fn new(game: &CoordinationGame, s: &JointStrategy, color: ColorId) -> Self {
        let g = game.graph();
        let a = game.assignment();
        let n = game.node_count();
        let current: Vec<u32> = (0..n).map(|v| game.payoff(s, v)).collect();
        let base: Vec<u32> =
            (0..n).map(|v| g.neighbors(v).iter().filter(|&&w| s.color(w) == color).count() as u32).collect();
        let mut candidate: Vec<bool> = (0..n).map(|v| a.allows(v, color) && s.color(v) != color).collect();
        // Drop nodes that cannot gain even if every candidate neighbor joins.
        loop {
            let mut changed = false;
            for v in 0..n {
                if !candidate[v] {
                    continue;
                }
                let reach = g.neighbors(v).iter().filter(|&&w| candidate[w]).count() as u32;
                if base[v] + reach <= current[v] {
                    candidate[v] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Self { candidate, base, current }
    }

    /// `cover[v] - 1` is the number of coalition neighbors of a member `v`.
    fn profitable(&self, members: &[usize], cover: &[u32]) -> bool {
        members.iter().all(|&v| self.base[v] + cover[v] - 1 > self.current[v])
    }
}

/// Enumerates every connected node set of a candidate subgraph exactly once
/// (extension-set enumeration anchored at the smallest member).
struct ConnectedSets<'a> {
    game: &'a CoordinationGame,
    candidate: &'a [bool],
    cover: Vec<u32>,
    members: Vec<usize>,
    max_size: usize,
    visited: u64,
    budget: u64,
}

impl<'a> ConnectedSets<'a> {
    fn new(game: &'a CoordinationGame, candidate: &'a [bool], max_size: usize, budget: u64) -> Self {
        Self {
            game,
            candidate,
            cover: vec![0; game.node_count()],
            members: Vec::new(),
            max_size,
            visited: 0,
            budget,
        }
    }

    /// `visit(members, cover, max_size)` may shrink `max_size`; returning `true` stops.
    fn run<F>(&mut self, visit: &mut F) -> Result<bool>
    where
        F: FnMut(&[usize], &[u32], &mut usize) -> bool,
    {
        let g = self.game.graph();
        for anchor in 0..self.game.node_count() {
            if !self.candidate[anchor] || self.max_size == 0 {
                continue;
            }
            let ext: Vec<usize> = g.neighbors(anchor).iter().copied().filter(|&u| u > anchor && self.candidate[u]).collect();
            self.push(anchor);
            let stop = self.extend(anchor, ext, visit);
            self.pop(anchor);
            if stop? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn push(&mut self, v: usize) {
        self.members.push(v);
        self.cover[v] += 1;
        for &u in self.game.graph().neighbors(v) {
            self.cover[u] += 1;
        }
    }

    fn pop(&mut self, v: usize) {
        self.members.pop();
        self.cover[v] -= 1;
        for &u in self.game.graph().neighbors(v) {
            self.cover[u] -= 1;
        }
    }

    fn extend<F>(&mut self, anchor: usize, mut ext: Vec<usize>, visit: &mut F) -> Result<bool>
    where
        F: FnMut(&[usize], &[u32], &mut usize) -> bool,
    {
        self.visited += 1;
        if self.visited > self.budget {
            return Err(Error::BudgetExceeded { required: self.visited as u128, budget: self.budget });
        }
        if visit(&self.members, &self.cover, &mut self.max_size) {
            return Ok(true);
        }
        while let Some(w) = ext.pop() {
            if self.members.len() >= self.max_size {
                break;
            }
            let mut next = ext.clone();
            for &u in self.game.graph().neighbors(w) {
                if u > anchor && self.candidate[u] && self.cover[u] == 0 {
                    next.push(u);
                }
            }
            self.push(w);
            let stop = self.extend(anchor, next, visit);
            self.pop(w);
            if stop? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Exhaustive search for profitable coalitional deviations.
#[derive(Debug, Clone, Copy)]
pub struct DeviationSearch<'g> {
    game: &'g CoordinationGame,
    budget: u64,
}

impl<'g> DeviationSearch<'g> {
    pub fn new(game: &'g CoordinationGame) -> Self {
        Self { game, budget: DEFAULT_BUDGET }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    fn clamp_k(&self, k: usize) -> Result<usize> {
        if k == 0 {
            return Err(Error::InvalidParams("coalition size bound must be at least 1".into()));
        }
        Ok(k.min(self.game.node_count()))
    }

    /// A profitable deviation by at most `k` players, if one exists.
    ///
    /// The witness is minimal: smallest coalition, then lexicographically
    /// smallest member list, then smallest colors.
    pub fn find(&self, s: &JointStrategy, k: usize, simple_only: bool) -> Result<Option<DeviationReport>> {
        self.game.check(s)?;
        let k = self.clamp_k(k)?;
        if simple_only {
            self.min_simple(s, k)
        } else {
            let mut found = None;
            self.general(s, k, &mut |report| {
                found = Some(report);
                true
            })?;
            Ok(found)
        }
    }

    /// The first profitable deviation in enumeration order (colors ascending,
    /// anchors ascending, depth-first growth); not necessarily the smallest.
    pub fn first_found(&self, s: &JointStrategy, k: usize, simple_only: bool) -> Result<Option<DeviationReport>> {
        self.game.check(s)?;
        let k = self.clamp_k(k)?;
        if !simple_only {
            return self.find(s, k, false);
        }
        let mut found = None;
        for color in self.game.assignment().colors() {
            let target = SimpleTarget::new(self.game, s, color);
            let mut sets = ConnectedSets::new(self.game, &target.candidate, k, self.budget);
            let mut hit: Option<Vec<usize>> = None;
            sets.run(&mut |members, cover, _| {
                if target.profitable(members, cover) {
                    hit = Some(members.to_vec());
                    true
                } else {
                    false
                }
            })?;
            if let Some(members) = hit {
                found = Some(self.report(s, &members, color)?);
                break;
            }
        }
        Ok(found)
    }

    /// Every profitable deviation by at most `k` players, sorted by size,
    /// members and colors.
    pub fn all(&self, s: &JointStrategy, k: usize, simple_only: bool) -> Result<Vec<DeviationReport>> {
        self.game.check(s)?;
        let k = self.clamp_k(k)?;
        let mut out = Vec::new();
        if simple_only {
            for color in self.game.assignment().colors() {
                let target = SimpleTarget::new(self.game, s, color);
                let mut sets = ConnectedSets::new(self.game, &target.candidate, k, self.budget);
                let mut hits = Vec::new();
                sets.run(&mut |members, cover, _| {
                    if target.profitable(members, cover) {
                        hits.push(members.to_vec());
                    }
                    false
                })?;
                for members in hits {
                    out.push(self.report(s, &members, color)?);
                }
            }
        } else {
            self.general(s, k, &mut |report| {
                out.push(report);
                false
            })?;
        }
        out.sort_by(|a, b| {
            (a.size(), &a.coalition, &a.new_colors).cmp(&(b.size(), &b.coalition, &b.new_colors))
        });
        Ok(out)
    }

    fn report(&self, s: &JointStrategy, members: &[usize], color: ColorId) -> Result<DeviationReport> {
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        let colors = vec![color; sorted.len()];
        let report = DeviationReport::evaluate(self.game, s, &sorted, &colors)?;
        if !report.is_profitable() {
            return Err(Error::Internal(format!("search produced an unprofitable move {sorted:?}")));
        }
        Ok(report)
    }

    fn min_simple(&self, s: &JointStrategy, k: usize) -> Result<Option<DeviationReport>> {
        let mut bound = k;
        let mut best: Option<(Vec<usize>, ColorId)> = None;
        for color in self.game.assignment().colors() {
            let target = SimpleTarget::new(self.game, s, color);
            let mut sets = ConnectedSets::new(self.game, &target.candidate, bound, self.budget);
            sets.run(&mut |members, cover, max_size| {
                if members.len() <= *max_size && target.profitable(members, cover) {
                    let mut sorted = members.to_vec();
                    sorted.sort_unstable();
                    let better = match &best {
                        None => true,
                        Some((b, _)) => (sorted.len(), &sorted) < (b.len(), b),
                    };
                    if better {
                        *max_size = sorted.len();
                        best = Some((sorted, color));
                    }
                }
                false
            })?;
            bound = sets.max_size;
        }
        best.map(|(members, color)| self.report(s, &members, color)).transpose()
    }

    /// Unrestricted enumeration: coalitions by size then lexicographically,
    /// each member trying every other color in its set.
    fn general<F>(&self, s: &JointStrategy, k: usize, sink: &mut F) -> Result<()>
    where
        F: FnMut(DeviationReport) -> bool,
    {
        let game = self.game;
        let g = game.graph();
        let a = game.assignment();
        let n = game.node_count();
        let current: Vec<u32> = (0..n).map(|v| game.payoff(s, v)).collect();
        let movers: Vec<usize> =
            (0..n).filter(|&v| a.set(v).len() > 1 && (current[v] as usize) < g.degree(v)).collect();
        let alternatives: Vec<Vec<ColorId>> =
            (0..n).map(|v| a.set(v).iter().copied().filter(|&c| c != s.color(v)).collect()).collect();

        let width = a.max_set_size().saturating_sub(1) as u128;
        let mut required: u128 = 0;
        let mut binom: u128 = 1;
        for j in 1..=k.min(movers.len()) {
            binom = binom.saturating_mul((movers.len() + 1 - j) as u128) / j as u128;
            required = required.saturating_add(binom.saturating_mul(width.saturating_pow(j as u32)));
        }
        if required > self.budget as u128 {
            return Err(Error::BudgetExceeded { required, budget: self.budget });
        }

        let mut colors = s.colors().to_vec();
        for size in 1..=k.min(movers.len()) {
            for coalition in movers.iter().copied().combinations(size) {
                let radices: Vec<usize> = coalition.iter().map(|&v| alternatives[v].len()).collect();
                let mut digits = vec![0usize; size];
                loop {
                    for (i, &v) in coalition.iter().enumerate() {
                        colors[v] = alternatives[v][digits[i]];
                    }
                    let profitable = coalition.iter().all(|&v| {
                        let gain = g.neighbors(v).iter().filter(|&&w| colors[w] == colors[v]).count() as u32;
                        gain > current[v]
                    });
                    if profitable {
                        let new_colors: Vec<ColorId> = coalition.iter().map(|&v| colors[v]).collect();
                        let report = DeviationReport::evaluate(game, s, &coalition, &new_colors)?;
                        if sink(report) {
                            for &v in &coalition {
                                colors[v] = s.color(v);
                            }
                            return Ok(());
                        }
                    }
                    // odometer, last member fastest
                    let mut pos = size;
                    let exhausted = loop {
                        if pos == 0 {
                            break true;
                        }
                        pos -= 1;
                        digits[pos] += 1;
                        if digits[pos] < radices[pos] {
                            break false;
                        }
                        digits[pos] = 0;
                    };
                    if exhausted {
                        break;
                    }
                }
                for &v in &coalition {
                    colors[v] = s.color(v);
                }
            }
        }
        Ok(())
    }
}

/// Searches for a profitable deviation by at most `k` players with the default budget.
pub fn find_profitable_deviation(
    game: &CoordinationGame,
    s: &JointStrategy,
    k: usize,
    simple_only: bool,
) -> Result<Option<DeviationReport>> {
    DeviationSearch::new(game).find(s, k, simple_only)
}

/// Whether no coalition of at most `k` players can profitably deviate from `s`.
pub fn is_k_equilibrium(game: &CoordinationGame, s: &JointStrategy, k: usize) -> Result<Verdict> {
    Ok(match find_profitable_deviation(game, s, k, true)? {
        None => Verdict::Equilibrium,
        Some(r) => Verdict::Refuted(r),
    })
}

/// Size of the smallest profitable coalition minus one, or `n` when `s` is a
/// strong equilibrium: the largest `k` for which `s` is a k-equilibrium.
pub fn equilibrium_level(search: &DeviationSearch<'_>, s: &JointStrategy) -> Result<usize> {
    let n = search.game.node_count();
    Ok(match search.find(s, n.max(1), true)? {
        None => n,
        Some(r) => r.size() - 1,
    })
}

/// Both sides of the welfare identity and the feedback-edge-set bounds for one deviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyLemmaAudit {
    /// `ΔSW = SW(s') - SW(s)`.
    pub delta_sw: i64,
    /// `ΔSW_K = SW_K(s') - SW_K(s)`.
    pub delta_sw_coalition: i64,
    /// `|E_s^+ ∩ E[K]|`.
    pub internal_unicolored_before: usize,
    /// `|E_{s'}^+ ∩ E[K]|`.
    pub internal_unicolored_after: usize,
    /// A minimum feedback edge set `F` of `G[K]`, in ids of the game graph.
    pub feedback_set: Vec<Edge>,
    pub feedback_unicolored_before: usize,
    pub feedback_unicolored_after: usize,
    /// `τ(K)`.
    pub tau: usize,
    /// `ΔSW = 2(ΔSW_K − |E_{s'}^+ ∩ E[K]| + |E_s^+ ∩ E[K]|)`.
    pub welfare_identity_holds: bool,
    /// `ΔSW > 2(|F ∩ E_s^+| − |F ∩ E_{s'}^+|)`.
    pub feedback_bound_holds: bool,
    /// `ΔSW > −2τ(K)`.
    pub tau_bound_holds: bool,
}

impl KeyLemmaAudit {
    pub fn all_hold(&self) -> bool {
        self.welfare_identity_holds && self.feedback_bound_holds && self.tau_bound_holds
    }

    /// Right-hand side of the welfare identity.
    pub fn identity_rhs(&self) -> i64 {
        2 * (self.delta_sw_coalition - self.internal_unicolored_after as i64 + self.internal_unicolored_before as i64)
    }
}

/// Recomputes a deviation from scratch and checks the key-lemma relations.
pub fn audit_key_lemma(game: &CoordinationGame, s: &JointStrategy, report: &DeviationReport) -> Result<KeyLemmaAudit> {
    let fresh = DeviationReport::evaluate(game, s, &report.coalition, &report.new_colors)?;
    if !fresh.is_profitable() {
        return Err(Error::NotProfitable(fresh.describe(game)));
    }
    let next = fresh.apply(s);
    let coalition = &fresh.coalition;
    let delta_sw = game.social_welfare(&next) as i64 - game.social_welfare(s) as i64;
    let delta_sw_coalition = game.social_welfare_restricted(&next, coalition)? as i64
        - game.social_welfare_restricted(s, coalition)? as i64;
    let internal = game.graph().internal_edges(coalition)?;
    let count = |edges: &[Edge], p: &JointStrategy| edges.iter().filter(|&&e| game.is_unicolored(p, e)).count();
    let internal_unicolored_before = count(&internal, s);
    let internal_unicolored_after = count(&internal, &next);

    let sub = game.graph().induced_subgraph(coalition)?;
    let feedback_set: Vec<Edge> = sub
        .graph
        .min_feedback_edge_set()
        .into_iter()
        .map(|(u, v)| ordered(sub.mapping[u], sub.mapping[v]))
        .collect();
    let tau = sub.graph.feedback_edge_number();
    let feedback_unicolored_before = count(&feedback_set, s);
    let feedback_unicolored_after = count(&feedback_set, &next);

    let rhs = 2 * (delta_sw_coalition - internal_unicolored_after as i64 + internal_unicolored_before as i64);
    Ok(KeyLemmaAudit {
        delta_sw,
        delta_sw_coalition,
        internal_unicolored_before,
        internal_unicolored_after,
        tau,
        welfare_identity_holds: delta_sw == rhs,
        feedback_bound_holds: delta_sw > 2 * (feedback_unicolored_before as i64 - feedback_unicolored_after as i64),
        tau_bound_holds: delta_sw > -2 * tau as i64,
        feedback_set,
        feedback_unicolored_before,
        feedback_unicolored_after,
    })
}

/// Which generalized ordinal potential to track along an improvement path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialKind {
    /// `SW(s)`; valid on color forests and two-color games.
    Welfare,
    /// `(SW(s), #unicolored cycles)` lexicographically; pseudoforests only.
    WelfareAndCycles,
    /// Payoff vector sorted in decreasing order, lexicographically; uniform games.
    SortedPayoffs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PotentialValue {
    Welfare(u64),
    WelfareAndCycles(u64, usize),
    SortedPayoffs(Vec<u32>),
}

impl PotentialValue {
    pub fn compute(game: &CoordinationGame, s: &JointStrategy, kind: PotentialKind) -> Result<Self> {
        Ok(match kind {
            PotentialKind::Welfare => PotentialValue::Welfare(game.social_welfare(s)),
            PotentialKind::WelfareAndCycles => {
                PotentialValue::WelfareAndCycles(game.social_welfare(s), game.unicolored_cycle_count(s)?)
            }
            PotentialKind::SortedPayoffs => {
                let mut p = game.payoffs(s);
                p.sort_unstable_by(|a, b| b.cmp(a));
                PotentialValue::SortedPayoffs(p)
            }
        })
    }

    /// Strict lexicographic increase over `other` (values of the same kind only).
    pub fn strictly_exceeds(&self, other: &PotentialValue) -> bool {
        match (self, other) {
            (PotentialValue::Welfare(a), PotentialValue::Welfare(b)) => a > b,
            (PotentialValue::WelfareAndCycles(a, c), PotentialValue::WelfareAndCycles(b, d)) => (a, c) > (b, d),
            (PotentialValue::SortedPayoffs(a), PotentialValue::SortedPayoffs(b)) => a > b,
            _ => false,
        }
    }
}

/// How the next profitable deviation is picked.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheduler {
    /// First witness in enumeration order.
    FirstFound,
    /// Smallest coalition, then lexicographically smallest.
    SmallestCoalition,
    /// Largest welfare gain, ties to the smallest coalition.
    MaxWelfareGain,
    /// Uniform over all profitable deviations, reproducible from the seed.
    Random { seed: u64 },
}

#[derive(Debug, Clone)]
pub struct PathConfig {
    pub scheduler: Scheduler,
    pub max_coalition: usize,
    pub step_limit: usize,
    pub potential: Option<PotentialKind>,
    /// Restrict moves to simple deviations.
    pub simple_only: bool,
    pub budget: u64,
}

impl PathConfig {
    pub fn new(max_coalition: usize) -> Self {
        Self {
            scheduler: Scheduler::SmallestCoalition,
            max_coalition,
            step_limit: 10_000,
            potential: None,
            simple_only: true,
            budget: DEFAULT_BUDGET,
        }
    }

    pub fn scheduler(mut self, scheduler: Scheduler) -> Self {
        self.scheduler = scheduler;
        self
    }

    pub fn step_limit(mut self, steps: usize) -> Self {
        self.step_limit = steps;
        self
    }

    pub fn potential(mut self, kind: PotentialKind) -> Self {
        self.potential = Some(kind);
        self
    }

    pub fn simple_only(mut self, simple_only: bool) -> Self {
        self.simple_only = simple_only;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    /// No profitable deviation of at most `max_coalition` players remains.
    Equilibrium,
    StepLimit,
    /// The profile after `step` was already visited.
    CycleDetected { step: usize },
    /// The tracked potential failed to increase strictly at `step`.
    PotentialViolation { step: usize, before: PotentialValue, after: PotentialValue },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub from: JointStrategy,
    pub deviation: DeviationReport,
    /// Potential of the profile reached by this step.
    pub potential: Option<PotentialValue>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImprovementTrace {
    pub initial: JointStrategy,
    pub initial_potential: Option<PotentialValue>,
    pub steps: Vec<TraceStep>,
    pub terminal: JointStrategy,
    pub termination: Termination,
    pub seed: Option<u64>,
}

impl ImprovementTrace {
    pub fn reached_equilibrium(&self) -> bool {
        self.termination == Termination::Equilibrium
    }
}

/// Follows profitable deviations from `s0` until none is left, the step limit
/// is hit, a profile repeats, or the tracked potential fails to increase.
pub fn run_improvement_path(
    game: &CoordinationGame,
    s0: &JointStrategy,
    config: &PathConfig,
) -> Result<ImprovementTrace> {
    game.check(s0)?;
    let search = DeviationSearch::new(game).with_budget(config.budget);
    let k = config.max_coalition;
    let seed = match config.scheduler {
        Scheduler::Random { seed } => Some(seed),
        _ => None,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(0));
    let initial_potential = config.potential.map(|kind| PotentialValue::compute(game, s0, kind)).transpose()?;

    let mut current = s0.clone();
    let mut potential = initial_potential.clone();
    let mut visited: HashSet<JointStrategy> = HashSet::new();
    visited.insert(current.clone());
    let mut steps = Vec::new();
    let termination = loop {
        if steps.len() >= config.step_limit {
            break Termination::StepLimit;
        }
        let next = match config.scheduler {
            Scheduler::FirstFound => search.first_found(&current, k, config.simple_only)?,
            Scheduler::SmallestCoalition => search.find(&current, k, config.simple_only)?,
            Scheduler::MaxWelfareGain => {
                let all = search.all(&current, k, config.simple_only)?;
                // `all` is sorted by size, so max_by_key's last-max rule is undone by reversing.
                all.into_iter().rev().max_by_key(|r| r.delta_sw)
            }
            Scheduler::Random { .. } => {
                let mut all = search.all(&current, k, config.simple_only)?;
                if all.is_empty() {
                    None
                } else {
                    let pick = rng.gen_range(0..all.len());
                    Some(all.swap_remove(pick))
                }
            }
        };
        let Some(deviation) = next else {
            break Termination::Equilibrium;
        };
        let reached = deviation.apply(&current);
        let after = config.potential.map(|kind| PotentialValue::compute(game, &reached, kind)).transpose()?;
        let violation = match (&potential, &after) {
            (Some(before), Some(after)) if !after.strictly_exceeds(before) => Some((before.clone(), after.clone())),
            _ => None,
        };
        steps.push(TraceStep { from: current.clone(), deviation, potential: after.clone() });
        current = reached;
        potential = after;
        if let Some((before, after)) = violation {
            break Termination::PotentialViolation { step: steps.len() - 1, before, after };
        }
        if !visited.insert(current.clone()) {
            break Termination::CycleDetected { step: steps.len() - 1 };
        }
    };
    Ok(ImprovementTrace { initial: s0.clone(), initial_potential, steps, terminal: current, termination, seed })
}

/// Result of the exhaustive uniformity check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniformityReport {
    /// Equal-colored neighbors always have equal payoffs.
    pub uniform: bool,
    /// The structural sufficient condition.
    pub color_complete: bool,
    pub profiles_checked: u128,
    /// A profile and unicolored edge whose endpoints earn different payoffs.
    pub counterexample: Option<(JointStrategy, Edge)>,
}

pub fn is_uniform(game: &CoordinationGame, budget: u64) -> Result<UniformityReport> {
    let total = game.profile_count();
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { required: total, budget });
    }
    let color_complete = game.classify().is_color_complete;
    for index in 0..total {
        let s = game.profile_at(index);
        let payoffs = game.payoffs(&s);
        if let Some(&e) = game.graph().edges().iter().find(|&&(u, v)| s.color(u) == s.color(v) && payoffs[u] != payoffs[v]) {
            return Ok(UniformityReport {
                uniform: false,
                color_complete,
                profiles_checked: index + 1,
                counterexample: Some((s, e)),
            });
        }
    }
    Ok(UniformityReport { uniform: true, color_complete, profiles_checked: total, counterexample: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ColorAssignment;
    use crate::graph::Graph;

    fn game(n: usize, edges: &[(usize, usize)], sets: &[&[&str]]) -> CoordinationGame {
        let sets: Vec<Vec<&str>> = sets.iter().map(|s| s.to_vec()).collect();
        assert_eq!(sets.len(), n);
        CoordinationGame::new(Graph::new(n, edges.iter().copied()).unwrap(), ColorAssignment::from_names(&sets).unwrap())
            .unwrap()
    }

    #[test]
    fn single_fixed_node_never_deviates() {
        let g = game(1, &[], &[&["a"]]);
        let s = g.default_profile();
        for simple in [true, false] {
            assert_eq!(find_profitable_deviation(&g, &s, 1, simple).unwrap(), None);
        }
    }

    #[test]
    fn unilateral_move_off_zero_payoff() {
        // center {a,b} playing a, two b-leaves
        let g = game(3, &[(0, 1), (0, 2)], &[&["a", "b"], &["b"], &["b"]]);
        let s = g.profile_from_names(&["a", "b", "b"]).unwrap();
        let r = find_profitable_deviation(&g, &s, 1, true).unwrap().unwrap();
        assert_eq!(r.coalition, vec![0]);
        assert_eq!(r.payoff_before, vec![0]);
        assert_eq!(r.payoff_after, vec![2]);
        assert_eq!(r.delta_sw, 4);
        assert!(r.simple);
    }

    #[test]
    fn evaluate_rejects_non_moves() {
        let g = game(2, &[(0, 1)], &[&["a", "b"], &["a", "b"]]);
        let s = g.profile_from_names(&["a", "b"]).unwrap();
        assert!(DeviationReport::evaluate(&g, &s, &[0], &[ColorId(0)]).is_err());
        assert!(DeviationReport::evaluate(&g, &s, &[0, 0], &[ColorId(1), ColorId(1)]).is_err());
        let r = DeviationReport::evaluate(&g, &s, &[0], &[ColorId(1)]).unwrap();
        assert!(r.is_profitable());
    }

    #[test]
    fn zero_k_is_rejected() {
        let g = game(2, &[(0, 1)], &[&["a", "b"], &["a", "b"]]);
        assert!(find_profitable_deviation(&g, &g.default_profile(), 0, true).is_err());
    }

    #[test]
    fn connected_set_enumeration_counts() {
        // a path on 4 nodes has 4 + 3 + 2 + 1 connected subsets
        let g = game(4, &[(0, 1), (1, 2), (2, 3)], &[&["a"] as &[&str]; 4]);
        let candidate = vec![true; 4];
        let mut sets = ConnectedSets::new(&g, &candidate, 4, u64::MAX);
        let mut seen = Vec::new();
        sets.run(&mut |m, _, _| {
            let mut m = m.to_vec();
            m.sort();
            seen.push(m);
            false
        })
        .unwrap();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 10);
        // the 4-clique has all 15 nonempty subsets connected
        let g = game(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)], &[&["a"] as &[&str]; 4]);
        let mut sets = ConnectedSets::new(&g, &candidate, 4, u64::MAX);
        let mut count = 0;
        sets.run(&mut |_, _, _| {
            count += 1;
            false
        })
        .unwrap();
        assert_eq!(count, 15);
    }

    #[test]
    fn budget_guard_refuses_large_unrestricted_search() {
        let sets: Vec<Vec<String>> = (0..30).map(|i| vec![format!("x{i}"), "c".into(), "d".into()]).collect();
        let g = CoordinationGame::new(Graph::complete(30), ColorAssignment::from_names(&sets).unwrap()).unwrap();
        let s = g.default_profile();
        let search = DeviationSearch::new(&g).with_budget(1000);
        assert!(matches!(search.find(&s, 30, false), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn potential_ordering() {
        use PotentialValue::*;
        assert!(WelfareAndCycles(4, 1).strictly_exceeds(&WelfareAndCycles(4, 0)));
        assert!(!WelfareAndCycles(4, 1).strictly_exceeds(&WelfareAndCycles(6, 0)));
        assert!(SortedPayoffs(vec![3, 1, 0]).strictly_exceeds(&SortedPayoffs(vec![2, 2, 2])));
        assert!(!Welfare(3).strictly_exceeds(&SortedPayoffs(vec![1])));
    }

    #[test]
    fn uniform_pair() {
        let g = game(2, &[(0, 1)], &[&["x"], &["x"]]);
        let report = is_uniform(&g, 100).unwrap();
        assert!(report.uniform && report.color_complete);
    }

    #[test]
    fn key_lemma_on_single_player_move() {
        let g = game(3, &[(0, 1), (0, 2)], &[&["a", "b"], &["b"], &["b"]]);
        let s = g.profile_from_names(&["a", "b", "b"]).unwrap();
        let r = find_profitable_deviation(&g, &s, 1, true).unwrap().unwrap();
        let audit = audit_key_lemma(&g, &s, &r).unwrap();
        assert_eq!(audit.tau, 0);
        assert!(audit.delta_sw > 0);
        assert!(audit.all_hold());
    }

    #[test]
    fn key_lemma_rejects_unprofitable_moves() {
        let g = game(2, &[(0, 1)], &[&["a", "b"], &["a", "b"]]);
        let s = g.profile_from_names(&["a", "a"]).unwrap();
        let r = DeviationReport::evaluate(&g, &s, &[0], &[ColorId(1)]).unwrap();
        assert!(matches!(audit_key_lemma(&g, &s, &r), Err(Error::NotProfitable(_))));
    }
}
