use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use coordgame::analysis::generate;
use coordgame::format::{parse_instance, parse_profile};
use coordgame::{CoordinationGame, JointStrategy};

pub const BUILTINS: [&str; 8] = [
    "fig1",
    "octahedron",
    "fig3",
    "keylemma-clique",
    "poa-unbounded",
    "kpoa-lower",
    "weakly-acyclic-fig1",
    "clique-reduction",
];

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Lib(coordgame::Error),
    Io(String, io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(coordgame::Error::BudgetExceeded { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(what, e) => write!(f, "{what}: {e}"),
        }
    }
}

impl From<coordgame::Error> for CliError {
    fn from(e: coordgame::Error) -> Self {
        CliError::Lib(e)
    }
}

pub struct Loaded {
    pub name: String,
    pub game: CoordinationGame,
    pub profile: Option<JointStrategy>,
    pub extras: Vec<(String, JointStrategy)>,
}

/// Built-in tags are tried before the file system.
pub fn load_instance(spec: &str) -> Result<Loaded, CliError> {
    let base = spec.split(':').next().unwrap_or(spec);
    if BUILTINS.contains(&base) {
        let inst = generate(spec)?;
        return Ok(Loaded { name: inst.tag, game: inst.game, profile: inst.reference, extras: inst.extras });
    }
    let text = fs::read_to_string(spec).map_err(|e| CliError::Io(format!("cannot read instance `{spec}`"), e))?;
    let file = parse_instance(&text)?;
    let name = file.name.unwrap_or_else(|| {
        Path::new(spec).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| spec.to_string())
    });
    Ok(Loaded { name, game: file.game, profile: file.profile, extras: Vec::new() })
}

/// `reference`, a named extra of a built-in, a profile file, or inline `label=color,...`.
pub fn resolve_profile(loaded: &Loaded, spec: Option<&str>) -> Result<Option<JointStrategy>, CliError> {
    let Some(spec) = spec else {
        return Ok(loaded.profile.clone());
    };
    if spec == "reference" {
        return loaded
            .profile
            .clone()
            .map(Some)
            .ok_or_else(|| CliError::Usage(format!("`{}` has no reference profile", loaded.name)));
    }
    if let Some((_, s)) = loaded.extras.iter().find(|(n, _)| n == spec) {
        return Ok(Some(s.clone()));
    }
    if spec == "default" {
        return Ok(Some(loaded.game.default_profile()));
    }
    let text = if Path::new(spec).is_file() {
        fs::read_to_string(spec).map_err(|e| CliError::Io(format!("cannot read profile `{spec}`"), e))?
    } else {
        spec.to_string()
    };
    Ok(Some(parse_profile(&loaded.game, &text)?))
}

pub fn require_profile(loaded: &Loaded, spec: Option<&str>) -> Result<JointStrategy, CliError> {
    resolve_profile(loaded, spec)?
        .ok_or_else(|| CliError::Usage(format!("`{}` carries no profile; pass --profile", loaded.name)))
}
