//! Generators for the named instances and the clique reduction.

use std::collections::BTreeMap;

use crate::game::{ColorAssignment, CoordinationGame, JointStrategy};
use crate::graph::Graph;
use crate::{Error, Result};

/// A generated game with the profiles that come with its construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NamedInstance {
    /// Canonical tag, e.g. `kpoa-lower:n=6,k=3`.
    pub tag: String,
    pub game: CoordinationGame,
    /// The profile the construction is about, if it has one.
    pub reference: Option<JointStrategy>,
    /// Further named profiles (optimum, contrast profile, ...).
    pub extras: Vec<(String, JointStrategy)>,
}

impl NamedInstance {
    pub fn extra(&self, name: &str) -> Option<&JointStrategy> {
        self.extras.iter().find(|(n, _)| n == name).map(|(_, s)| s)
    }
}

fn labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| i.to_string()).collect()
}

fn build(labels: Vec<String>, sets: Vec<Vec<String>>, edges: Vec<(usize, usize)>) -> Result<CoordinationGame> {
    let graph = Graph::new(labels.len(), edges)?;
    CoordinationGame::with_labels(graph, ColorAssignment::from_names(&sets)?, labels)
}

fn sets(spec: &[&[&str]]) -> Vec<Vec<String>> {
    spec.iter().map(|s| s.iter().map(|c| c.to_string()).collect()).collect()
}

/// 1-based edge list to 0-based.
fn edges(list: &[(usize, usize)]) -> Vec<(usize, usize)> {
    list.iter().map(|&(u, v)| (u - 1, v - 1)).collect()
}

const FIG1_SETS: [&[&str]; 8] =
    [&["a", "c"], &["a", "b"], &["a", "b"], &["b", "c"], &["b", "c"], &["c", "a"], &["c", "a"], &["b", "a"]];
const FIG1_EDGES: [(usize, usize); 18] = [
    (1, 2),
    (1, 3),
    (2, 4),
    (2, 5),
    (3, 4),
    (3, 5),
    (4, 5),
    (1, 4),
    (4, 8),
    (1, 5),
    (5, 8),
    (4, 6),
    (5, 6),
    (4, 7),
    (5, 7),
    (6, 8),
    (7, 8),
    (1, 8),
];
const FIG1_PROFILE: [&str; 8] = ["a", "b", "b", "b", "b", "a", "a", "a"];

/// Eight players, three colors; the reference profile is a 4- but not a 5-equilibrium.
pub fn fig1() -> Result<NamedInstance> {
    let game = build(labels(8), sets(&FIG1_SETS), edges(&FIG1_EDGES))?;
    let reference = game.profile_from_names(&FIG1_PROFILE)?;
    Ok(NamedInstance { tag: "fig1".into(), game, reference: Some(reference), extras: Vec::new() })
}

/// Fig1 with an extra color `d` available to everyone; all-`d` is a strong equilibrium.
pub fn weakly_acyclic_fig1() -> Result<NamedInstance> {
    let mut s = sets(&FIG1_SETS);
    for set in &mut s {
        set.push("d".into());
    }
    let game = build(labels(8), s, edges(&FIG1_EDGES))?;
    let reference = game.profile_from_names(&FIG1_PROFILE)?;
    let all_d = game.profile_from_names(&["d"; 8])?;
    Ok(NamedInstance {
        tag: "weakly-acyclic-fig1".into(),
        game,
        reference: Some(reference),
        extras: vec![("all-d".into(), all_d)],
    })
}

/// Ten players, four colors, no 3-equilibrium.
pub fn octahedron() -> Result<NamedInstance> {
    let s = sets(&[
        &["1", "3"],
        &["2", "4"],
        &["1", "4"],
        &["1", "2"],
        &["2", "3"],
        &["3", "4"],
        &["1"],
        &["2"],
        &["3"],
        &["4"],
    ]);
    let e = edges(&[
        (1, 3),
        (1, 4),
        (1, 5),
        (1, 6),
        (2, 3),
        (2, 4),
        (2, 5),
        (2, 6),
        (3, 4),
        (4, 5),
        (5, 6),
        (6, 3),
        (7, 3),
        (8, 4),
        (9, 5),
        (10, 6),
    ]);
    let game = build(labels(10), s, e)?;
    Ok(NamedInstance { tag: "octahedron".into(), game, reference: None, extras: Vec::new() })
}

/// `copies` disjoint 4-cycles with color sets `{a,b},{a,b},{a,b},{a}`.
///
/// The reference profile plays `(b,b,b,a)` on every copy; the extra `optimum` is all-`a`.
pub fn fig3(copies: usize) -> Result<NamedInstance> {
    if copies == 0 {
        return Err(Error::InvalidParams("fig3 needs at least one copy".into()));
    }
    let mut s = Vec::new();
    let mut e = Vec::new();
    let mut reference = Vec::new();
    for c in 0..copies {
        let base = 4 * c;
        s.extend(sets(&[&["a", "b"], &["a", "b"], &["a", "b"], &["a"]]));
        e.extend([(base, base + 1), (base + 1, base + 2), (base + 2, base + 3), (base + 3, base)]);
        reference.extend(["b", "b", "b", "a"]);
    }
    let game = build(labels(4 * copies), s, e)?;
    let reference = game.profile_from_names(&reference)?;
    let optimum = game.profile_from_names(&vec!["a"; 4 * copies])?;
    let tag = if copies == 1 { "fig3".to_string() } else { format!("fig3:copies={copies}") };
    Ok(NamedInstance { tag, game, reference: Some(reference), extras: vec![("optimum".into(), optimum)] })
}

/// Clique on `l` nodes with sets `{c_i, x}`, each with `l−2` pendant leaves `{c_i}`.
///
/// Reference: everyone on `c_i`. Extra `deviation`: the clique on `x`.
pub fn keylemma_clique(l: usize) -> Result<NamedInstance> {
    if l < 3 {
        return Err(Error::InvalidParams("keylemma-clique needs l >= 3".into()));
    }
    let mut names = labels(l);
    let mut s: Vec<Vec<String>> = (1..=l).map(|i| vec![format!("c{i}"), "x".into()]).collect();
    let mut e = Vec::new();
    for u in 0..l {
        for v in u + 1..l {
            e.push((u, v));
        }
    }
    for i in 0..l {
        for j in 1..=l - 2 {
            e.push((i, names.len()));
            names.push(format!("{}.{j}", i + 1));
            s.push(vec![format!("c{}", i + 1)]);
        }
    }
    let game = build(names, s, e)?;
    let owner = |v: usize| if v < l { v + 1 } else { (v - l) / (l - 2) + 1 };
    let mut contrast: Vec<String> = (0..game.node_count()).map(|v| format!("c{}", owner(v))).collect();
    let reference = game.profile_from_names(&contrast)?;
    for c in contrast.iter_mut().take(l) {
        *c = "x".into();
    }
    let contrast = game.profile_from_names(&contrast)?;
    Ok(NamedInstance {
        tag: format!("keylemma-clique:l={l}"),
        game,
        reference: Some(reference),
        extras: vec![("deviation".into(), contrast)],
    })
}

/// `V_1` (first `k` nodes, `{a,c}`) is a clique and fully joined to `V_2` (`{b,c}`).
///
/// Reference: `V_1 → a`, `V_2 → b`, a k-equilibrium. Extra `optimum`: all-`c`.
pub fn kpoa_lower(n: usize, k: usize) -> Result<NamedInstance> {
    if k < 2 || k > n {
        return Err(Error::InvalidParams(format!("kpoa-lower needs 2 <= k <= n, got n={n}, k={k}")));
    }
    let s = (0..n).map(|v| if v < k { vec!["a".into(), "c".into()] } else { vec!["b".into(), "c".into()] }).collect();
    let mut e = Vec::new();
    for u in 0..k {
        for v in u + 1..n {
            e.push((u, v));
        }
    }
    let game = build(labels(n), s, e)?;
    let reference = game.profile_from_names(&(0..n).map(|v| if v < k { "a" } else { "b" }).collect::<Vec<_>>())?;
    let optimum = game.profile_from_names(&vec!["c"; n])?;
    Ok(NamedInstance {
        tag: format!("kpoa-lower:n={n},k={k}"),
        game,
        reference: Some(reference),
        extras: vec![("optimum".into(), optimum)],
    })
}

/// Every node of `base` gets `{x_v, c}`. Reference: all private colors, a Nash equilibrium with SW 0.
pub fn poa_unbounded(base: &Graph, base_labels: &[String], base_tag: &str) -> Result<NamedInstance> {
    let s = base_labels.iter().map(|l| vec![format!("x{l}"), "c".into()]).collect();
    let game = build(base_labels.to_vec(), s, base.edges().to_vec())?;
    let reference = game.profile_from_names(&base_labels.iter().map(|l| format!("x{l}")).collect::<Vec<_>>())?;
    let optimum = game.profile_from_names(&vec!["c"; game.node_count()])?;
    Ok(NamedInstance {
        tag: format!("poa-unbounded:base={base_tag}"),
        game,
        reference: Some(reference),
        extras: vec![("optimum".into(), optimum)],
    })
}

/// Every node `v` of `base` gets `{x_v, y}` plus `k−2` leaves with `{x_v}`.
///
/// The reference profile (all `x_v`) is a k-equilibrium iff `base` has no k-clique.
pub fn clique_reduction(base: &Graph, base_labels: &[String], k: usize, base_tag: &str) -> Result<NamedInstance> {
    if k < 2 {
        return Err(Error::InvalidParams("clique-reduction needs k >= 2".into()));
    }
    let mut names = base_labels.to_vec();
    let mut s: Vec<Vec<String>> = base_labels.iter().map(|l| vec![format!("x{l}"), "y".into()]).collect();
    let mut e = base.edges().to_vec();
    for (v, label) in base_labels.iter().enumerate() {
        for j in 1..=k - 2 {
            e.push((v, names.len()));
            names.push(format!("{label}.{j}"));
            s.push(vec![format!("x{label}")]);
        }
    }
    let private: Vec<String> = s.iter().map(|set| set[0].clone()).collect();
    let game = build(names, s, e)?;
    let reference = game.profile_from_names(&private)?;
    Ok(NamedInstance { tag: format!("clique-reduction:base={base_tag},k={k}"), game, reference: Some(reference), extras: Vec::new() })
}

/// `path-N`, `cycle-N`, `complete-N`, `star-N` (N leaves), or the graph of a parameterless named instance.
pub fn parse_base_graph(spec: &str) -> Result<(Graph, Vec<String>)> {
    if let Some((family, size)) = spec.rsplit_once('-') {
        if let Ok(size) = size.parse::<usize>() {
            let graph = match family {
                "path" => Some(Graph::path(size)),
                "cycle" => Some(Graph::cycle(size)?),
                "complete" => Some(Graph::complete(size)),
                "star" => Some(Graph::star(size)),
                _ => None,
            };
            if let Some(graph) = graph {
                let n = graph.node_count();
                return Ok((graph, labels(n)));
            }
        }
    }
    match spec {
        "fig1" | "octahedron" | "fig3" | "weakly-acyclic-fig1" => {
            let inst = generate(spec)?;
            Ok((inst.game.graph().clone(), inst.game.labels().to_vec()))
        }
        _ => Err(Error::InvalidParams(format!("unknown base graph `{spec}`"))),
    }
}

fn parse_params<'a>(tag: &str, text: &'a str, allowed: &[&str]) -> Result<BTreeMap<&'a str, &'a str>> {
    let mut out = BTreeMap::new();
    if text.is_empty() {
        return Ok(out);
    }
    for item in text.split(',') {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| Error::InvalidParams(format!("`{tag}`: expected key=value, got `{item}`")))?;
        if !allowed.contains(&key) {
            return Err(Error::InvalidParams(format!("`{tag}` has no parameter `{key}`")));
        }
        if out.insert(key, value).is_some() {
            return Err(Error::InvalidParams(format!("`{tag}`: parameter `{key}` given twice")));
        }
    }
    Ok(out)
}

fn number(params: &BTreeMap<&str, &str>, key: &str, default: Option<usize>) -> Result<usize> {
    match params.get(key) {
        Some(v) => v.parse().map_err(|_| Error::InvalidParams(format!("parameter `{key}` must be an integer, got `{v}`"))),
        None => default.ok_or_else(|| Error::InvalidParams(format!("missing parameter `{key}`"))),
    }
}

/// Builds an instance from a tag such as `fig1`, `fig3:copies=2`,
/// `keylemma-clique:l=4`, `kpoa-lower:n=6,k=3`, `poa-unbounded:base=cycle-5`
/// or `clique-reduction:base=complete-4,k=3`.
pub fn generate(tag: &str) -> Result<NamedInstance> {
    let (name, rest) = tag.split_once(':').unwrap_or((tag, ""));
    match name {
        "fig1" => {
            parse_params(name, rest, &[])?;
            fig1()
        }
        "weakly-acyclic-fig1" => {
            parse_params(name, rest, &[])?;
            weakly_acyclic_fig1()
        }
        "octahedron" => {
            parse_params(name, rest, &[])?;
            octahedron()
        }
        "fig3" => {
            let p = parse_params(name, rest, &["copies"])?;
            fig3(number(&p, "copies", Some(1))?)
        }
        "keylemma-clique" => {
            let p = parse_params(name, rest, &["l"])?;
            keylemma_clique(number(&p, "l", None)?)
        }
        "kpoa-lower" => {
            let p = parse_params(name, rest, &["n", "k"])?;
            kpoa_lower(number(&p, "n", None)?, number(&p, "k", None)?)
        }
        "poa-unbounded" => {
            let p = parse_params(name, rest, &["base"])?;
            let base = p.get("base").ok_or_else(|| Error::InvalidParams("missing parameter `base`".into()))?;
            let (graph, labels) = parse_base_graph(base)?;
            poa_unbounded(&graph, &labels, base)
        }
        "clique-reduction" => {
            let p = parse_params(name, rest, &["base", "k"])?;
            let base = p.get("base").ok_or_else(|| Error::InvalidParams("missing parameter `base`".into()))?;
            let (graph, labels) = parse_base_graph(base)?;
            clique_reduction(&graph, &labels, number(&p, "k", None)?, base)
        }
        _ => Err(Error::InvalidParams(format!("unknown instance `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_match_constructions() {
        let f = fig1().unwrap();
        assert_eq!((f.game.node_count(), f.game.graph().edge_count()), (8, 18));
        let o = octahedron().unwrap();
        assert_eq!((o.game.node_count(), o.game.graph().edge_count(), o.game.profile_count()), (10, 16, 64));
        assert_eq!(o.game.assignment().color_count(), 4);
        let k = keylemma_clique(4).unwrap();
        assert_eq!(k.game.node_count(), 4 + 4 * 2);
        let c = generate("clique-reduction:base=complete-4,k=3").unwrap();
        assert_eq!(c.game.node_count(), 8);
        assert_eq!(c.game.graph().edge_count(), 6 + 4);
    }

    #[test]
    fn fig1_reference_payoffs() {
        let f = fig1().unwrap();
        assert_eq!(f.game.payoffs(f.reference.as_ref().unwrap()), vec![1, 2, 2, 3, 3, 1, 1, 3]);
    }

    #[test]
    fn fig3_copies_and_tags() {
        let f = generate("fig3:copies=3").unwrap();
        assert_eq!(f.game.node_count(), 12);
        assert_eq!(f.tag, "fig3:copies=3");
        assert_eq!(generate("fig3:copies=1").unwrap().tag, "fig3");
    }

    #[test]
    fn kpoa_lower_welfare() {
        let inst = generate("kpoa-lower:n=6,k=3").unwrap();
        assert_eq!(inst.game.social_welfare(inst.extra("optimum").unwrap()), 24);
        assert_eq!(inst.game.social_welfare(inst.reference.as_ref().unwrap()), 6);
    }

    #[test]
    fn rejects_bad_params() {
        for tag in ["keylemma-clique:l=2", "kpoa-lower:n=3,k=4", "fig1:x=1", "nope", "fig3:copies=x", "poa-unbounded:base=wheel-3"] {
            assert!(generate(tag).is_err(), "{tag}");
        }
    }

    #[test]
    fn base_graph_from_named_instance() {
        let inst = generate("poa-unbounded:base=fig3").unwrap();
        assert_eq!(inst.game.graph().edge_count(), 4);
        assert_eq!(inst.game.social_welfare(inst.reference.as_ref().unwrap()), 0);
    }
}
