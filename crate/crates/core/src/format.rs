//! Line-based text format for instances and profiles.
//!
//! ```text
//! coordgame 1
//! name fig3
//! provenance generated
//! colors a b
//! node 1: a b
//! node 2: a b
//! edge 1 2
//! profile 1 a
//! profile 2 b
//! ```
//!
//! The version line comes first. `name`, `provenance` and `colors` are
//! optional; `colors` fixes the palette order, which otherwise follows first
//! appearance. Nodes must be declared before the edges and profile entries
//! that mention them. If any `profile` line is present, nodes without one
//! must have a single color. `#` starts a comment.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::game::{ColorAssignment, ColorId, CoordinationGame, JointStrategy};
use crate::graph::Graph;
use crate::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFile {
    pub game: CoordinationGame,
    pub profile: Option<JointStrategy>,
    pub name: Option<String>,
    pub provenance: Option<String>,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn valid_token(t: &str) -> bool {
    !t.is_empty() && !t.contains(|c: char| c.is_whitespace() || matches!(c, ':' | '=' | ',' | '#'))
}

/// Parses an instance, with line numbers in every diagnostic.
pub fn parse_instance(text: &str) -> Result<InstanceFile> {
    let mut version_seen = false;
    let mut name = None;
    let mut provenance = None;
    let mut declared_palette: Option<Vec<String>> = None;
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut color_sets: Vec<Vec<String>> = Vec::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut profile: Vec<Option<(String, usize)>> = Vec::new();
    let mut any_profile = false;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (keyword, rest) = content.split_once(char::is_whitespace).unwrap_or((content, ""));
        let rest = rest.trim();
        if !version_seen {
            if keyword != "coordgame" {
                return Err(err(line, "expected `coordgame <version>` header"));
            }
            match rest.parse::<u32>() {
                Ok(FORMAT_VERSION) => version_seen = true,
                _ => return Err(err(line, format!("unsupported format version `{rest}`"))),
            }
            continue;
        }
        let label_of = |token: &str| -> Result<usize> {
            index.get(token).copied().ok_or_else(|| err(line, format!("unknown node `{token}`")))
        };
        match keyword {
            "coordgame" => return Err(err(line, "duplicate header")),
            "name" | "provenance" => {
                let slot = if keyword == "name" { &mut name } else { &mut provenance };
                if slot.is_some() {
                    return Err(err(line, format!("duplicate `{keyword}`")));
                }
                *slot = Some(rest.to_string());
            }
            "colors" => {
                if declared_palette.is_some() || !labels.is_empty() {
                    return Err(err(line, "`colors` must appear once, before any node"));
                }
                let names: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
                if let Some(bad) = names.iter().find(|n| !valid_token(n)) {
                    return Err(err(line, format!("invalid color name `{bad}`")));
                }
                let mut sorted = names.clone();
                sorted.sort();
                if sorted.windows(2).any(|w| w[0] == w[1]) {
                    return Err(err(line, "duplicate color in `colors`"));
                }
                declared_palette = Some(names);
            }
            "node" => {
                let (label, colors) =
                    rest.split_once(':').ok_or_else(|| err(line, "expected `node <label>: <colors...>`"))?;
                let label = label.trim();
                if !valid_token(label) {
                    return Err(err(line, format!("invalid node label `{label}`")));
                }
                if index.contains_key(label) {
                    return Err(err(line, format!("node `{label}` declared twice")));
                }
                let colors: Vec<String> = colors.split_whitespace().map(str::to_string).collect();
                if colors.is_empty() {
                    return Err(err(line, format!("node `{label}` has an empty color set")));
                }
                if let Some(bad) = colors.iter().find(|c| !valid_token(c)) {
                    return Err(err(line, format!("invalid color name `{bad}`")));
                }
                if let Some(palette) = &declared_palette {
                    if let Some(bad) = colors.iter().find(|c| !palette.contains(c)) {
                        return Err(err(line, format!("color `{bad}` is not in the declared palette")));
                    }
                }
                index.insert(label.to_string(), labels.len());
                labels.push(label.to_string());
                color_sets.push(colors);
                profile.push(None);
            }
            "edge" => {
                let ends: Vec<&str> = rest.split_whitespace().collect();
                if ends.len() != 2 {
                    return Err(err(line, "expected `edge <label> <label>`"));
                }
                edges.push((label_of(ends[0])?, label_of(ends[1])?, line));
            }
            "profile" => {
                let parts: Vec<&str> = rest.split_whitespace().collect();
                if parts.len() != 2 {
                    return Err(err(line, "expected `profile <label> <color>`"));
                }
                let v = label_of(parts[0])?;
                if profile[v].is_some() {
                    return Err(err(line, format!("node `{}` has two profile entries", parts[0])));
                }
                profile[v] = Some((parts[1].to_string(), line));
                any_profile = true;
            }
            other => return Err(err(line, format!("unknown keyword `{other}`"))),
        }
    }
    if !version_seen {
        return Err(err(0, "missing `coordgame <version>` header"));
    }

    let assignment = match declared_palette {
        Some(palette) => {
            let lookup: HashMap<&str, ColorId> =
                palette.iter().enumerate().map(|(i, c)| (c.as_str(), ColorId(i as u32))).collect();
            let sets = color_sets.iter().map(|set| set.iter().map(|c| lookup[c.as_str()]).collect()).collect();
            ColorAssignment::from_ids(palette.clone(), sets)?
        }
        None => ColorAssignment::from_names(&color_sets)?,
    };
    let mut seen_edges: HashMap<(usize, usize), usize> = HashMap::new();
    for &(u, v, line) in &edges {
        if u == v {
            return Err(err(line, format!("self-loop at `{}`", labels[u])));
        }
        if let Some(first) = seen_edges.insert((u.min(v), u.max(v)), line) {
            return Err(err(line, format!("duplicate edge {} {} (first on line {first})", labels[u], labels[v])));
        }
    }
    let graph = Graph::new(labels.len(), edges.iter().map(|&(u, v, _)| (u, v)))?;
    let game = CoordinationGame::with_labels(graph, assignment, labels)?;

    let profile = if any_profile {
        let mut colors = Vec::with_capacity(game.node_count());
        for (v, entry) in profile.iter().enumerate() {
            colors.push(resolve_entry(&game, v, entry.as_ref().map(|(c, l)| (c.as_str(), *l)))?);
        }
        Some(game.profile(colors)?)
    } else {
        None
    };
    Ok(InstanceFile { game, profile, name, provenance })
}

fn resolve_entry(game: &CoordinationGame, v: usize, entry: Option<(&str, usize)>) -> Result<ColorId> {
    let a = game.assignment();
    match entry {
        Some((color, line)) => {
            let c = a.lookup(color).ok_or_else(|| err(line, format!("unknown color `{color}`")))?;
            if !a.allows(v, c) {
                return Err(err(line, format!("node `{}` may not play `{color}`", game.label(v))));
            }
            Ok(c)
        }
        None if a.set(v).len() == 1 => Ok(a.set(v)[0]),
        None => Err(err(0, format!("profile gives no color for node `{}`", game.label(v)))),
    }
}

/// Canonical text: nodes in id order, edges sorted, profile in node order.
pub fn serialize_instance(
    game: &CoordinationGame,
    profile: Option<&JointStrategy>,
    name: Option<&str>,
    provenance: Option<&str>,
) -> String {
    let a = game.assignment();
    let mut out = format!("coordgame {FORMAT_VERSION}\n");
    if let Some(name) = name {
        writeln!(out, "name {name}").unwrap();
    }
    if let Some(p) = provenance {
        writeln!(out, "provenance {p}").unwrap();
    }
    writeln!(out, "colors {}", a.palette().join(" ")).unwrap();
    for v in 0..game.node_count() {
        let colors: Vec<&str> = a.set(v).iter().map(|&c| a.name(c)).collect();
        writeln!(out, "node {}: {}", game.label(v), colors.join(" ")).unwrap();
    }
    for &(u, v) in game.graph().edges() {
        writeln!(out, "edge {} {}", game.label(u), game.label(v)).unwrap();
    }
    if let Some(s) = profile {
        for v in 0..game.node_count() {
            writeln!(out, "profile {} {}", game.label(v), a.name(s.color(v))).unwrap();
        }
    }
    out
}

/// Parses a profile for `game`: either `profile <label> <color>` lines or
/// `label=color` pairs separated by commas or whitespace.
pub fn parse_profile(game: &CoordinationGame, text: &str) -> Result<JointStrategy> {
    let mut entries: Vec<Option<(String, usize)>> = vec![None; game.node_count()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() || content.starts_with("coordgame") {
            continue;
        }
        let pairs: Vec<(String, String)> = if let Some(rest) = content.strip_prefix("profile ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(err(line, "expected `profile <label> <color>`"));
            }
            vec![(parts[0].to_string(), parts[1].to_string())]
        } else {
            content
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| {
                    t.split_once('=')
                        .map(|(l, c)| (l.to_string(), c.to_string()))
                        .ok_or_else(|| err(line, format!("expected `label=color`, got `{t}`")))
                })
                .collect::<Result<_>>()?
        };
        for (label, color) in pairs {
            let v = game.node_by_label(&label).ok_or_else(|| err(line, format!("unknown node `{label}`")))?;
            if entries[v].is_some() {
                return Err(err(line, format!("node `{label}` has two profile entries")));
            }
            entries[v] = Some((color, line));
        }
    }
    let colors = entries
        .iter()
        .enumerate()
        .map(|(v, e)| resolve_entry(game, v, e.as_ref().map(|(c, l)| (c.as_str(), *l))))
        .collect::<Result<Vec<_>>>()?;
    game.profile(colors)
}
