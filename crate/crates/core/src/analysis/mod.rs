//! Inefficiency of equilibria: social optimum, k-price of anarchy and
//! stability, and the transition value, all by exhaustive enumeration.

mod instances;

pub use instances::{
    clique_reduction, fig1, fig3, generate, keylemma_clique, kpoa_lower, octahedron, parse_base_graph, poa_unbounded,
    weakly_acyclic_fig1, NamedInstance,
};

use std::cmp::Ordering;
use std::fmt;

use rayon::prelude::*;

use crate::deviation::{equilibrium_level, DeviationSearch};
use crate::game::{CoordinationGame, JointStrategy};
use crate::solvers::solve_pseudoforest;
use crate::{Error, Result};

/// Nonnegative ratio with `x/0 = ∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn new(num: u64, den: u64) -> Self {
        Self { num, den }
    }

    pub fn is_infinite(&self) -> bool {
        self.den == 0
    }

    pub fn as_f64(&self) -> f64 {
        if self.is_infinite() {
            f64::INFINITY
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self.is_infinite(), other.is_infinite()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Greater,
            (false, true) => Ordering::Less,
            _ => (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128)),
        }
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            return f.write_str("inf");
        }
        let g = gcd(self.num, self.den);
        let (n, d) = (self.num / g, self.den / g);
        if d == 1 {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct LevelAcc {
    count: u64,
    /// (SW, profile index), lowest index on ties.
    min: Option<(u64, u64)>,
    max: Option<(u64, u64)>,
}

impl LevelAcc {
    fn add(&mut self, sw: u64, index: u64) {
        self.count += 1;
        if self.min.is_none_or(|m| (sw, index) < m) {
            self.min = Some((sw, index));
        }
        if self.max.is_none_or(|m| sw > m.0 || (sw == m.0 && index < m.1)) {
            self.max = Some((sw, index));
        }
    }

    fn merge(&mut self, other: &LevelAcc) {
        self.count += other.count;
        if let Some((sw, i)) = other.min {
            if self.min.is_none_or(|m| (sw, i) < m) {
                self.min = Some((sw, i));
            }
        }
        if let Some((sw, i)) = other.max {
            if self.max.is_none_or(|m| sw > m.0 || (sw == m.0 && i < m.1)) {
                self.max = Some((sw, i));
            }
        }
    }
}

#[derive(Debug, Clone)]
struct ScanAcc {
    all: LevelAcc,
    levels: Vec<LevelAcc>,
}

impl ScanAcc {
    fn new(n: usize) -> Self {
        Self { all: LevelAcc::default(), levels: vec![LevelAcc::default(); n + 1] }
    }

    fn merge(mut self, other: ScanAcc) -> ScanAcc {
        self.all.merge(&other.all);
        for (a, b) in self.levels.iter_mut().zip(&other.levels) {
            a.merge(b);
        }
        self
    }
}

/// SW extremes over the k-equilibria for one `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquilibriumRange {
    pub k: usize,
    pub count: u64,
    /// Worst and best k-equilibrium with their SW; `None` when none exists.
    pub worst: Option<(JointStrategy, u64)>,
    pub best: Option<(JointStrategy, u64)>,
}

/// One pass over every feasible profile.
#[derive(Debug, Clone)]
pub struct ProfileScan {
    game_nodes: usize,
    pub profile_count: u64,
    pub optimum: JointStrategy,
    pub optimum_sw: u64,
    /// Number of profiles whose equilibrium level is exactly `L`, for `L` in `0..=n`.
    pub level_counts: Vec<u64>,
    levels: Vec<LevelAcc>,
}

impl ProfileScan {
    /// Enumerates all profiles, computing each one's equilibrium level and SW.
    ///
    /// Fails with `BudgetExceeded` when `Π|A_i|` exceeds `budget`.
    pub fn run(game: &CoordinationGame, budget: u64) -> Result<Self> {
        let total = game.profile_count();
        if total > budget as u128 {
            return Err(Error::BudgetExceeded { required: total, budget });
        }
        let total = total as u64;
        let n = game.node_count();
        let search = DeviationSearch::new(game).with_budget(budget);
        let acc = (0..total)
            .into_par_iter()
            .try_fold(
                || ScanAcc::new(n),
                |mut acc, index| -> Result<ScanAcc> {
                    let s = game.profile_at(index as u128);
                    let sw = game.social_welfare(&s);
                    let level = equilibrium_level(&search, &s)?;
                    acc.all.add(sw, index);
                    acc.levels[level].add(sw, index);
                    Ok(acc)
                },
            )
            .try_reduce(|| ScanAcc::new(n), |a, b| Ok(a.merge(b)))?;
        let (optimum_sw, opt_index) = acc.all.max.expect("at least one profile");
        Ok(Self {
            game_nodes: n,
            profile_count: total,
            optimum: game.profile_at(opt_index as u128),
            optimum_sw,
            level_counts: acc.levels.iter().map(|l| l.count).collect(),
            levels: acc.levels,
        })
    }

    /// Largest `k` for which some k-equilibrium exists; `n` iff a strong equilibrium exists.
    pub fn transition_value(&self) -> usize {
        self.level_counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    pub fn strong_equilibrium_exists(&self) -> bool {
        self.level_counts[self.game_nodes] > 0
    }

    /// Aggregates the profiles of level at least `k`.
    pub fn equilibria(&self, game: &CoordinationGame, k: usize) -> EquilibriumRange {
        let k = k.min(self.game_nodes);
        let mut acc = LevelAcc::default();
        for level in &self.levels[k..] {
            acc.merge(level);
        }
        let decode = |p: Option<(u64, u64)>| p.map(|(sw, i)| (game.profile_at(i as u128), sw));
        EquilibriumRange { k, count: acc.count, worst: decode(acc.min), best: decode(acc.max) }
    }
}

/// A social optimum with its SW. Pseudoforests use the polynomial solver, other games enumerate.
pub fn social_optimum(game: &CoordinationGame, budget: u64) -> Result<(JointStrategy, u64)> {
    if game.graph().is_pseudoforest() {
        let sol = solve_pseudoforest(game)?;
        return Ok((sol.profile, sol.welfare));
    }
    let total = game.profile_count();
    if total > budget as u128 {
        return Err(Error::BudgetExceeded { required: total, budget });
    }
    let (sw, index) = (0..total as u64)
        .into_par_iter()
        .map(|i| (game.social_welfare(&game.profile_at(i as u128)), i))
        .reduce(|| (0, u64::MAX), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    Ok((game.profile_at(index as u128), sw))
}

/// Largest k with an existing k-equilibrium (`n` when a strong equilibrium exists).
pub fn transition_value(game: &CoordinationGame, budget: u64) -> Result<usize> {
    Ok(ProfileScan::run(game, budget)?.transition_value())
}

/// `2(n−1)/(k−1)` for `k ≥ 2`.
pub fn kpoa_upper_bound(n: usize, k: usize) -> Option<Ratio> {
    (k >= 2).then(|| Ratio::new(2 * (n as u64 - 1), k as u64 - 1))
}

/// `2(n−1)/(k−1) − 1` for `k ≥ 2`.
pub fn kpoa_lower_bound(n: usize, k: usize) -> Option<Ratio> {
    (k >= 2).then(|| Ratio::new((2 * (n as u64 - 1)).saturating_sub(k as u64 - 1), k as u64 - 1))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KInefficiency {
    pub range: EquilibriumRange,
    /// `SW(σ) / SW(worst)`; `None` when no k-equilibrium exists.
    pub poa: Option<Ratio>,
    /// `SW(σ) / SW(best)`.
    pub pos: Option<Ratio>,
    pub upper_bound: Option<Ratio>,
    pub lower_bound: Option<Ratio>,
    /// The worst k-equilibrium breaks the upper bound, compared as
    /// `SW(σ)(k−1) ≤ 2(n−1)SW(s)` so that `0/0` never counts as a violation.
    pub bound_violated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InefficiencyReport {
    pub n: usize,
    pub profile_count: u64,
    pub optimum: JointStrategy,
    pub optimum_sw: u64,
    pub transition_value: usize,
    pub per_k: Vec<KInefficiency>,
}

impl InefficiencyReport {
    pub fn any_violation(&self) -> bool {
        self.per_k.iter().any(|r| r.bound_violated)
    }
}

/// Full inefficiency report for the requested coalition bounds (clamped to `1..=n`).
pub fn inefficiency(game: &CoordinationGame, ks: &[usize], budget: u64) -> Result<InefficiencyReport> {
    let scan = ProfileScan::run(game, budget)?;
    Ok(report_from_scan(game, &scan, ks))
}

pub fn report_from_scan(game: &CoordinationGame, scan: &ProfileScan, ks: &[usize]) -> InefficiencyReport {
    let n = game.node_count();
    let opt = scan.optimum_sw;
    let per_k = ks
        .iter()
        .map(|&k| {
            let range = scan.equilibria(game, k.max(1));
            let k = range.k;
            let poa = range.worst.as_ref().map(|w| Ratio::new(opt, w.1));
            let pos = range.best.as_ref().map(|b| Ratio::new(opt, b.1));
            let bound_violated = match (&range.worst, k >= 2) {
                (Some((_, worst)), true) => {
                    opt as u128 * (k as u128 - 1) > 2 * (n as u128 - 1) * *worst as u128
                }
                _ => false,
            };
            KInefficiency {
                upper_bound: kpoa_upper_bound(n, k),
                lower_bound: kpoa_lower_bound(n, k),
                range,
                poa,
                pos,
                bound_violated,
            }
        })
        .collect();
    InefficiencyReport {
        n,
        profile_count: scan.profile_count,
        optimum: scan.optimum.clone(),
        optimum_sw: opt,
        transition_value: scan.transition_value(),
        per_k,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_convention_and_order() {
        assert!(Ratio::new(0, 0).is_infinite());
        assert_eq!(Ratio::new(8, 4).to_string(), "2");
        assert_eq!(Ratio::new(6, 4).to_string(), "3/2");
        assert!(Ratio::new(3, 2) < Ratio::new(2, 1));
        assert!(Ratio::new(1, 0) > Ratio::new(1_000, 1));
        assert_eq!(Ratio::new(4, 2), Ratio::new(4, 2));
        assert_eq!(Ratio::new(4, 2).cmp(&Ratio::new(2, 1)), Ordering::Equal);
    }

    #[test]
    fn bounds() {
        assert_eq!(kpoa_upper_bound(6, 3), Some(Ratio::new(10, 2)));
        assert_eq!(kpoa_lower_bound(6, 3).unwrap().to_string(), "4");
        assert_eq!(kpoa_upper_bound(6, 1), None);
    }

    #[test]
    fn fig3_strong_poa_is_two() {
        let inst = generate("fig3").unwrap();
        let report = inefficiency(&inst.game, &[4], 1_000).unwrap();
        assert_eq!(report.optimum_sw, 8);
        let r = &report.per_k[0];
        assert_eq!(r.poa, Some(Ratio::new(8, 4)));
        assert_eq!(r.range.worst.as_ref().unwrap().0, inst.game.profile_from_names(&["b", "b", "b", "a"]).unwrap());
        assert!(!r.bound_violated);
    }

    #[test]
    fn poa_unbounded_on_path() {
        let inst = generate("poa-unbounded:base=path-3").unwrap();
        let report = inefficiency(&inst.game, &[1], 1_000).unwrap();
        assert_eq!(report.optimum_sw, 4);
        assert!(report.per_k[0].poa.unwrap().is_infinite());
    }

    #[test]
    fn social_optimum_of_disjoint_edge() {
        let inst = generate("poa-unbounded:base=path-2").unwrap();
        assert_eq!(social_optimum(&inst.game, 100).unwrap().1, 2);
    }

    #[test]
    fn budget_is_enforced() {
        let inst = generate("fig1").unwrap();
        assert!(matches!(ProfileScan::run(&inst.game, 10), Err(Error::BudgetExceeded { .. })));
    }
}
