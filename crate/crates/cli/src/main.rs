//! `coordgame`: command-line front end.
//!
//! Exit codes: 0 the property holds or the command succeeded, 1 the property
//! is refuted, 2 usage or parse error, 3 budget exceeded.

mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use coordgame::analysis::{inefficiency, ProfileScan};
use coordgame::colorforest::verify_color_forest;
use coordgame::deviation::{
    audit_key_lemma, run_improvement_path, DeviationReport, DeviationSearch, PathConfig, PotentialKind, Scheduler,
    Termination, Verdict,
};
use coordgame::format::serialize_instance;
use coordgame::random;
use coordgame::solvers::{solve_auto, solve_with, Method};
use coordgame::{CoordinationGame, JointStrategy, DEFAULT_BUDGET};

use input::{load_instance, require_profile, resolve_profile, CliError, Loaded};
use report::{Emitter, Format, Record};

#[derive(Parser)]
#[command(name = "coordgame", version, about = "Coordination games on graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Cap on enumerated profiles or coalitions.
    #[arg(long, global = true, env = "COORDGAME_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: u64,
}

#[derive(Args)]
struct InstanceArgs {
    /// Built-in tag (e.g. `fig1`, `kpoa-lower:n=6,k=3`) or instance file.
    #[arg(long)]
    instance: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Auto,
    Colorforest,
    Pseudoforest,
    Colorcomplete,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchedulerArg {
    FirstFound,
    Smallest,
    MaxGain,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PotentialArg {
    Welfare,
    Pair,
    Sorted,
}

#[derive(Subcommand)]
enum Command {
    /// Check whether a profile is a k-equilibrium.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Profile file, inline `label=color,...`, or a named profile of a built-in.
        #[arg(long)]
        profile: Option<String>,
        /// Largest coalition size; defaults to n (strong equilibrium).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Compute a strong equilibrium.
    Solve {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
        method: MethodArg,
    },
    /// Follow an improvement path.
    Dynamics {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Starting profile; defaults to the instance's profile, else first colors.
        #[arg(long)]
        profile: Option<String>,
        /// Largest coalition allowed to move; defaults to n.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = SchedulerArg::Smallest)]
        scheduler: SchedulerArg,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        /// Potential to check at every step.
        #[arg(long, value_enum)]
        potential: Option<PotentialArg>,
        /// Allow non-simple deviations.
        #[arg(long)]
        general: bool,
    },
    /// k-price of anarchy and stability by enumeration.
    Poa {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Coalition bounds to report; defaults to 1..=n.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
    },
    /// Largest k for which a k-equilibrium exists.
    Transition {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Structural classification of the instance.
    Classify {
        #[command(flatten)]
        instance: InstanceArgs,
    },
    /// Print a built-in or random instance in the text format.
    Gen {
        /// Built-in tag, or `random:family=<general|two-color|colorforest|pseudoforest|colorcomplete>,n=..`.
        tag: String,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Audit the welfare identity and feedback-edge bounds for one deviation.
    AuditKeylemma {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long)]
        profile: Option<String>,
        /// Profile after the deviation; defaults to the built-in's `deviation`
        /// profile, else the smallest profitable deviation.
        #[arg(long)]
        target: Option<String>,
    },
}

struct Ctx {
    emitter: Emitter,
    budget: u64,
}

impl Ctx {
    fn emit(
        &mut self,
        loaded: &Loaded,
        k: Option<usize>,
        property: &str,
        value: impl ToString,
        witness: Option<String>,
        start: Instant,
    ) -> Result<(), CliError> {
        let record = Record {
            instance: loaded.name.clone(),
            n: loaded.game.node_count(),
            m_colors: loaded.game.assignment().color_count(),
            k,
            property: property.to_string(),
            value: value.to_string(),
            witness,
            runtime_ms: start.elapsed().as_millis(),
        };
        self.emitter.record(&record).map_err(|e| CliError::Io("write failed".into(), e))
    }

    fn note(&mut self, line: &str) -> Result<(), CliError> {
        self.emitter.note(line).map_err(|e| CliError::Io("write failed".into(), e))
    }
}

fn shown(game: &CoordinationGame, s: &JointStrategy) -> String {
    game.display(s).to_string()
}

fn verify(ctx: &mut Ctx, loaded: &Loaded, profile: Option<&str>, k: Option<usize>, method: MethodArg) -> Result<i32, CliError> {
    let start = Instant::now();
    let game = &loaded.game;
    let s = require_profile(loaded, profile)?;
    let k = k.unwrap_or(game.node_count()).max(1);
    let use_forest = match method {
        MethodArg::Colorforest => true,
        MethodArg::Brute => false,
        MethodArg::Auto => game.classify().is_color_forest,
        other => return Err(CliError::Usage(format!("verify supports auto, colorforest or brute, not {other:?}"))),
    };
    let verdict = if use_forest {
        verify_color_forest(game, &s, k)?
    } else {
        match DeviationSearch::new(game).with_budget(ctx.budget).find(&s, k, true)? {
            None => Verdict::Equilibrium,
            Some(r) => Verdict::Refuted(r),
        }
    };
    let code = match &verdict {
        Verdict::Equilibrium => {
            ctx.emit(loaded, Some(k), "k-equilibrium", "holds", None, start)?;
            0
        }
        Verdict::Refuted(r) => {
            ctx.emit(loaded, Some(k), "k-equilibrium", "refuted", Some(r.describe(game)), start)?;
            ctx.note(&format!("payoffs {:?} -> {:?}", r.payoff_before, r.payoff_after))?;
            1
        }
    };
    Ok(code)
}

fn solve(ctx: &mut Ctx, loaded: &Loaded, method: MethodArg) -> Result<i32, CliError> {
    let start = Instant::now();
    let game = &loaded.game;
    let solution = match method {
        MethodArg::Auto => solve_auto(game, ctx.budget)?,
        MethodArg::Colorforest => solve_with(game, Method::ColorForest, ctx.budget)?,
        MethodArg::Pseudoforest => solve_with(game, Method::Pseudoforest, ctx.budget)?,
        MethodArg::Colorcomplete => solve_with(game, Method::ColorComplete, ctx.budget)?,
        MethodArg::Brute => solve_with(game, Method::BruteForce, ctx.budget)?,
    };
    match &solution.profile {
        Some(s) => {
            ctx.emit(loaded, None, "strong-equilibrium", game.social_welfare(s), Some(shown(game, s)), start)?;
            ctx.note(&format!("method {}", solution.method))?;
            Ok(0)
        }
        None => {
            ctx.emit(loaded, None, "strong-equilibrium", "none", None, start)?;
            ctx.note(&format!("method {}: exhaustive search found no strong equilibrium", solution.method))?;
            Ok(1)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn dynamics(
    ctx: &mut Ctx,
    loaded: &Loaded,
    profile: Option<&str>,
    k: Option<usize>,
    scheduler: SchedulerArg,
    seed: Option<u64>,
    steps: usize,
    potential: Option<PotentialArg>,
    general: bool,
) -> Result<i32, CliError> {
    let start = Instant::now();
    let game = &loaded.game;
    let s0 = resolve_profile(loaded, profile)?.unwrap_or_else(|| game.default_profile());
    let k = k.unwrap_or(game.node_count()).max(1);
    let scheduler = match scheduler {
        SchedulerArg::FirstFound => Scheduler::FirstFound,
        SchedulerArg::Smallest => Scheduler::SmallestCoalition,
        SchedulerArg::MaxGain => Scheduler::MaxWelfareGain,
        SchedulerArg::Random => Scheduler::Random {
            seed: seed.ok_or_else(|| CliError::Usage("--scheduler random requires --seed".into()))?,
        },
    };
    let mut config = PathConfig::new(k).scheduler(scheduler).step_limit(steps).simple_only(!general).budget(ctx.budget);
    if let Some(p) = potential {
        config = config.potential(match p {
            PotentialArg::Welfare => PotentialKind::Welfare,
            PotentialArg::Pair => PotentialKind::WelfareAndCycles,
            PotentialArg::Sorted => PotentialKind::SortedPayoffs,
        });
    }
    let trace = run_improvement_path(game, &s0, &config)?;
    for (i, step) in trace.steps.iter().enumerate() {
        ctx.emit(loaded, Some(k), &format!("step-{}", i + 1), step.deviation.delta_sw, Some(step.deviation.describe(game)), start)?;
    }
    let (value, code) = match &trace.termination {
        Termination::Equilibrium => ("equilibrium".to_string(), 0),
        Termination::StepLimit => ("step-limit".to_string(), 1),
        Termination::CycleDetected { step } => (format!("cycle-at-step-{}", step + 1), 1),
        Termination::PotentialViolation { step, .. } => (format!("potential-violation-at-step-{}", step + 1), 1),
    };
    ctx.emit(loaded, Some(k), "termination", value, Some(shown(game, &trace.terminal)), start)?;
    ctx.note(&format!("steps {}, welfare {} -> {}", trace.steps.len(), game.social_welfare(&s0), game.social_welfare(&trace.terminal)))?;
    Ok(code)
}

fn poa(ctx: &mut Ctx, loaded: &Loaded, ks: &[usize]) -> Result<i32, CliError> {
    let start = Instant::now();
    let game = &loaded.game;
    let n = game.node_count();
    let ks: Vec<usize> = if ks.is_empty() { (1..=n).collect() } else { ks.to_vec() };
    if let Some(bad) = ks.iter().find(|&&k| k == 0 || k > n) {
        return Err(CliError::Usage(format!("k must lie in 1..={n}, got {bad}")));
    }
    let report = inefficiency(game, &ks, ctx.budget)?;
    ctx.emit(loaded, None, "optimum", report.optimum_sw, Some(shown(game, &report.optimum)), start)?;
    for r in &report.per_k {
        let k = Some(r.range.k);
        match (&r.range.worst, &r.range.best, r.poa, r.pos) {
            (Some((worst, _)), Some((best, _)), Some(poa), Some(pos)) => {
                ctx.emit(loaded, k, "poa", poa, Some(shown(game, worst)), start)?;
                ctx.emit(loaded, k, "pos", pos, Some(shown(game, best)), start)?;
            }
            _ => ctx.emit(loaded, k, "poa", "no-equilibrium", None, start)?,
        }
        if let (Some(lo), Some(hi)) = (r.lower_bound, r.upper_bound) {
            ctx.emit(loaded, k, "bounds", format!("{lo}..{hi}"), None, start)?;
        }
        if r.bound_violated {
            ctx.emit(loaded, k, "bound-violation", "yes", None, start)?;
        }
    }
    Ok(if report.any_violation() { 1 } else { 0 })
}

fn transition(ctx: &mut Ctx, loaded: &Loaded) -> Result<i32, CliError> {
    let start = Instant::now();
    let scan = ProfileScan::run(&loaded.game, ctx.budget)?;
    let tv = scan.transition_value();
    ctx.emit(loaded, None, "transition-value", tv, None, start)?;
    if tv == loaded.game.node_count() {
        ctx.note("a strong equilibrium exists")?;
    }
    Ok(0)
}

fn classify(ctx: &mut Ctx, loaded: &Loaded) -> Result<i32, CliError> {
    let start = Instant::now();
    let game = &loaded.game;
    let c = game.classify();
    let g = game.graph();
    let rows: [(&str, String); 9] = [
        ("edges", g.edge_count().to_string()),
        ("forest", c.is_forest.to_string()),
        ("pseudoforest", c.is_pseudoforest.to_string()),
        ("color-forest", c.is_color_forest.to_string()),
        ("color-complete", c.is_color_complete.to_string()),
        ("cycles-edge-disjoint", c.cycles_pairwise_edge_disjoint.to_string()),
        ("girth", c.girth.map_or("inf".into(), |g| g.to_string())),
        ("feedback-edge-number", g.feedback_edge_number().to_string()),
        ("profiles", game.profile_count().to_string()),
    ];
    for (property, value) in rows {
        ctx.emit(loaded, None, property, value, None, start)?;
    }
    Ok(0)
}

fn random_instance(spec: &str, seed: Option<u64>) -> Result<(CoordinationGame, String), CliError> {
    let seed = seed.ok_or_else(|| CliError::Usage("random instances require --seed".into()))?;
    let mut params = std::collections::BTreeMap::new();
    for item in spec.split(',').filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| CliError::Usage(format!("expected key=value, got `{item}`")))?;
        params.insert(k.to_string(), v.to_string());
    }
    let get = |key: &str, default: &str| params.get(key).cloned().unwrap_or_else(|| default.to_string());
    let num = |key: &str, default: &str| -> Result<usize, CliError> {
        get(key, default).parse().map_err(|_| CliError::Usage(format!("`{key}` must be an integer")))
    };
    let n = num("n", "8")?;
    let colors = num("colors", "3")?.max(1);
    let max_set = num("max-set", "2")?.max(1);
    let p: f64 = get("p", "0.5").parse().map_err(|_| CliError::Usage("`p` must be a number".into()))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(CliError::Usage("`p` must lie in [0, 1]".into()));
    }
    let family = get("family", "general");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let game = match family.as_str() {
        "general" => random::random_game(&mut rng, n, p, colors, max_set),
        "two-color" => random::random_two_color(&mut rng, n, p),
        "colorforest" => random::random_color_forest(&mut rng, n, p, colors, max_set),
        "pseudoforest" => random::random_pseudoforest(&mut rng, n, colors, max_set),
        "colorcomplete" => random::random_color_complete(&mut rng, n, colors, max_set),
        other => return Err(CliError::Usage(format!("unknown random family `{other}`"))),
    };
    Ok((game, format!("random:{spec} seed={seed}")))
}

fn gen(ctx: &mut Ctx, tag: &str, seed: Option<u64>) -> Result<i32, CliError> {
    let text = if let Some(spec) = tag.strip_prefix("random").map(|r| r.trim_start_matches(':')) {
        let (game, provenance) = random_instance(spec, seed)?;
        serialize_instance(&game, None, Some("random"), Some(&provenance))
    } else {
        let loaded = load_instance(tag)?;
        serialize_instance(&loaded.game, loaded.profile.as_ref(), Some(&loaded.name), Some("built-in generator"))
    };
    ctx.emitter.raw(&text).map_err(|e| CliError::Io("write failed".into(), e))?;
    Ok(0)
}

fn audit(ctx: &mut Ctx, loaded: &Loaded, profile: Option<&str>, target: Option<&str>) -> Result<i32, CliError> {
    let start = Instant::now();
    let game = &loaded.game;
    let s = require_profile(loaded, profile)?;
    let target = match target {
        Some(t) => resolve_profile(loaded, Some(t))?,
        None => loaded.extras.iter().find(|(n, _)| n == "deviation").map(|(_, t)| t.clone()),
    };
    let report = match target {
        Some(t) => {
            let coalition: Vec<usize> = (0..game.node_count()).filter(|&v| s.color(v) != t.color(v)).collect();
            let colors: Vec<_> = coalition.iter().map(|&v| t.color(v)).collect();
            DeviationReport::evaluate(game, &s, &coalition, &colors)?
        }
        None => DeviationSearch::new(game)
            .with_budget(ctx.budget)
            .find(&s, game.node_count(), true)?
            .ok_or_else(|| CliError::Usage("the profile admits no profitable deviation to audit".into()))?,
    };
    let witness = Some(report.describe(game));
    let audit = audit_key_lemma(game, &s, &report)?;
    let k = Some(report.size());
    ctx.emit(loaded, k, "delta-sw", audit.delta_sw, witness.clone(), start)?;
    ctx.emit(loaded, k, "delta-sw-coalition", audit.delta_sw_coalition, None, start)?;
    ctx.emit(loaded, k, "tau", audit.tau, None, start)?;
    ctx.emit(loaded, k, "identity-rhs", audit.identity_rhs(), None, start)?;
    ctx.emit(loaded, k, "welfare-identity", audit.welfare_identity_holds, None, start)?;
    ctx.emit(loaded, k, "feedback-bound", audit.feedback_bound_holds, None, start)?;
    ctx.emit(loaded, k, "tau-bound", audit.tau_bound_holds, None, start)?;
    Ok(if audit.all_hold() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let emitter = Emitter::new(cli.output.format, cli.output.out.as_deref())
        .map_err(|e| CliError::Io("cannot open output".into(), e))?;
    let mut ctx = Ctx { emitter, budget: cli.output.budget };
    let code = match &cli.command {
        Command::Verify { instance, profile, k, method } => {
            verify(&mut ctx, &load_instance(&instance.instance)?, profile.as_deref(), *k, *method)?
        }
        Command::Solve { instance, method } => solve(&mut ctx, &load_instance(&instance.instance)?, *method)?,
        Command::Dynamics { instance, profile, k, scheduler, seed, steps, potential, general } => dynamics(
            &mut ctx,
            &load_instance(&instance.instance)?,
            profile.as_deref(),
            *k,
            *scheduler,
            *seed,
            *steps,
            *potential,
            *general,
        )?,
        Command::Poa { instance, k } => poa(&mut ctx, &load_instance(&instance.instance)?, k)?,
        Command::Transition { instance } => transition(&mut ctx, &load_instance(&instance.instance)?)?,
        Command::Classify { instance } => classify(&mut ctx, &load_instance(&instance.instance)?)?,
        Command::Gen { tag, seed } => gen(&mut ctx, tag, *seed)?,
        Command::AuditKeylemma { instance, profile, target } => {
            audit(&mut ctx, &load_instance(&instance.instance)?, profile.as_deref(), target.as_deref())?
        }
    };
    ctx.emitter.finish().map_err(|e| CliError::Io("write failed".into(), e))?;
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
