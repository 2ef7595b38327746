//! Command-line interface: argument parsing, TOML run configs, command
//! execution and the machine-readable error document.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::contraction::{certify, theorem1_radii, AnchorPolicy, ContractionCertificate, TheoremOneBounds};
use crate::cournot::{run_experiment, ExperimentConfig, ExperimentReport, Mode, MuSpec, StartSpec};
use crate::dynamics::{
    detect_cycle, iterate, verify_near_potential_limit, BetterSelector, CycleReport, Estimator, IterateOptions,
    NearPotentialLimitReport, Schedule, StopCriteria, Termination, UpdateRule,
};
use crate::game::{potential_residual, FiniteGame, PotentialCandidate, VectorFn};
use crate::io::{emit_plot_data, load_game, load_potential, write_json, write_trajectory_csv, PlotFiles, ReportEnvelope};
use crate::repeated::{
    build_invariant_set_on_points, l_zero, lemma6_check, theorem4_verify, InvariantMode, InvariantOptions,
    InvariantSetSpec, Lemma6Report, Theorem4Report,
};
use crate::verify::{run_suite, SuiteReport};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "gamedyn", version, about = "Response dynamics in noncooperative games")]
pub struct Cli {
    /// Seed for every random choice of the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Directory receiving all output files.
    #[arg(long = "out", global = true, default_value = "out")]
    pub output_dir: PathBuf,
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Iterate a response rule on a finite game.
    Simulate(SimulateArgs),
    /// Fit a contractive proxy to simultaneous best response of a finite game.
    AnalyzeContraction(ContractionArgs),
    /// Build the potential level set that traps simultaneous best response.
    InvariantSets(InvariantArgs),
    /// Run the Cournot duopoly experiment.
    Cournot(CournotArgs),
    /// Run the property suite.
    Verify(VerifyArgs),
    /// Execute a TOML run configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleName {
    SequentialBest,
    /// Sequential better response moving to the lowest-index improving action.
    SequentialBetter,
    /// Sequential better response moving to an improving best response.
    SequentialBetterMax,
    SimultaneousBest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScheduleName {
    RoundRobin,
    Random,
}

fn rule_of(rule: RuleName, schedule: ScheduleName) -> UpdateRule {
    let base = match rule {
        RuleName::SequentialBest => UpdateRule::sequential_best(),
        RuleName::SequentialBetter => UpdateRule::sequential_better(BetterSelector::FirstImproving),
        RuleName::SequentialBetterMax => UpdateRule::sequential_better(BetterSelector::MaxImproving),
        RuleName::SimultaneousBest => UpdateRule::simultaneous_best(),
    };
    base.with_schedule(match schedule {
        ScheduleName::RoundRobin => Schedule::RoundRobinEligible,
        ScheduleName::Random => Schedule::SeededRandomEligible,
    })
}

fn default_rule() -> RuleName {
    RuleName::SequentialBetter
}

fn default_schedule() -> ScheduleName {
    ScheduleName::RoundRobin
}

fn default_steps() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulateArgs {
    /// Game file (JSON).
    #[arg(long)]
    pub game: PathBuf,
    #[arg(long, value_enum, default_value = "sequential-better")]
    #[serde(default = "default_rule")]
    pub rule: RuleName,
    #[arg(long, value_enum, default_value = "round-robin")]
    #[serde(default = "default_schedule")]
    pub schedule: ScheduleName,
    /// Initial action values, comma separated; defaults to every player's first action.
    #[arg(long)]
    #[serde(default)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 1000)]
    #[serde(default = "default_steps")]
    pub steps: usize,
    /// Potential candidate file; enables k^t and the near-potential limit check.
    #[arg(long)]
    #[serde(default)]
    pub potential: Option<PathBuf>,
}

fn default_margin() -> f64 {
    0.1
}

fn default_samples() -> usize {
    21
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Sampled box "lo:hi,lo:hi,…"; defaults to the hull of the action sets.
    #[arg(long)]
    #[serde(default)]
    pub domain: Option<String>,
    /// Contraction margin m₀ ∈ (0, 1).
    #[arg(long, default_value_t = 0.1)]
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Grid nodes per axis of the sampled domain.
    #[arg(long, default_value_t = 21)]
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Distance δ₁ of the perturbed map from the analysed one.
    #[arg(long, default_value_t = 0.0)]
    #[serde(default)]
    pub delta1: f64,
}

fn default_t0() -> usize {
    0
}

fn default_eps() -> f64 {
    1.0
}

fn default_grid() -> usize {
    200
}

fn default_invariant_steps() -> usize {
    100
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InvariantModeName {
    Sup,
    Limsup,
}

fn default_invariant_mode() -> InvariantModeName {
    InvariantModeName::Sup
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvariantArgs {
    #[arg(long)]
    pub game: PathBuf,
    /// Potential candidate file.
    #[arg(long)]
    pub phi: PathBuf,
    #[arg(long, default_value_t = 0)]
    #[serde(default = "default_t0")]
    pub t0: usize,
    #[arg(long, default_value_t = 1.0)]
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Grid nodes per axis over the action hull.
    #[arg(long, default_value_t = 200)]
    #[serde(default = "default_grid")]
    pub grid: usize,
    #[arg(long)]
    #[serde(default)]
    pub x0: Option<String>,
    #[arg(long, default_value_t = 100)]
    #[serde(default = "default_invariant_steps")]
    pub steps: usize,
    #[arg(long, value_enum, default_value = "sup")]
    #[serde(default = "default_invariant_mode")]
    pub mode: InvariantModeName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    Repeated,
    Sequential,
    Both,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CournotArgs {
    #[arg(long)]
    #[serde(default)]
    pub d: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub c1: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub c2: Option<f64>,
    #[arg(long)]
    #[serde(default)]
    pub a_bar: Option<f64>,
    /// Bump centre: "auto" (the nominal equilibrium) or "x,y".
    #[arg(long)]
    #[serde(default)]
    pub mu: Option<String>,
    #[arg(long, value_enum)]
    #[serde(default)]
    pub mode: Option<ModeName>,
    #[arg(long)]
    #[serde(default)]
    pub steps: Option<usize>,
    /// Grid nodes per axis for the δ₁ search.
    #[arg(long)]
    #[serde(default)]
    pub grid_resolution: Option<usize>,
    /// Estimation noise: "geometric:RHO,MAGNITUDE" or "harmonic:C".
    #[arg(long)]
    #[serde(default)]
    pub estimator: Option<String>,
}

fn default_suite() -> String {
    "all".to_string()
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// "all" or a single check name.
    #[arg(long, default_value = "all")]
    #[serde(default = "default_suite")]
    pub suite: String,
}

/// Overrides for numerical defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Step length below which a smooth trajectory counts as resting.
    pub fixed_point: f64,
    /// Banach iteration stopping tolerance.
    pub banach: f64,
    pub banach_max_iterations: usize,
    /// Matching tolerance for action values given on the command line.
    pub action_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { fixed_point: 1e-10, banach: 1e-12, banach_max_iterations: 10_000, action_match: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    Simulate(SimulateArgs),
    AnalyzeContraction(ContractionArgs),
    InvariantSets(InvariantArgs),
    Cournot(CournotArgs),
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::AnalyzeContraction(_) => "analyze-contraction",
            Command::InvariantSets(_) => "invariant-sets",
            Command::Cournot(_) => "cournot",
            Command::Verify(_) => "verify",
        }
    }
}

/// A complete, validated description of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub command: Command,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    pub fn from_toml(path: &Path, text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
            Error::Parse { path: path.to_path_buf(), line, column, message: e.message().to_string() }
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: 0,
            column: 0,
            message: format!("cannot read file: {e}"),
        })?;
        Self::from_toml(path, &text)
    }

    /// Resolves parsed command-line arguments into a run configuration.
    pub fn from_cli(cli: Cli) -> Result<Self> {
        let command = match cli.command {
            CliCommand::Simulate(a) => Command::Simulate(a),
            CliCommand::AnalyzeContraction(a) => Command::AnalyzeContraction(a),
            CliCommand::InvariantSets(a) => Command::InvariantSets(a),
            CliCommand::Cournot(a) => Command::Cournot(a),
            CliCommand::Verify(a) => Command::Verify(a),
            CliCommand::Run { config } => return Self::load(&config),
        };
        Ok(RunConfig { seed: cli.seed, output_dir: cli.output_dir, tolerances: Tolerances::default(), command })
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
    (line, column)
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| Error::config(format!("{what}: cannot parse {t:?}: {e}"))))
        .collect()
}

fn parse_domain(s: &str) -> Result<Vec<(f64, f64)>> {
    s.split(',')
        .map(|part| {
            let (lo, hi) = part
                .split_once(':')
                .ok_or_else(|| Error::config(format!("domain: expected lo:hi, got {part:?}")))?;
            let lo: f64 = lo.trim().parse().map_err(|e| Error::config(format!("domain: {lo:?}: {e}")))?;
            let hi: f64 = hi.trim().parse().map_err(|e| Error::config(format!("domain: {hi:?}: {e}")))?;
            if !(lo <= hi) {
                return Err(Error::config(format!("domain: empty interval {lo}:{hi}")));
            }
            Ok((lo, hi))
        })
        .collect()
}

fn parse_estimator(s: &str) -> Result<Estimator> {
    let (kind, args) = s
        .split_once(':')
        .ok_or_else(|| Error::config(format!("estimator: expected kind:args, got {s:?}")))?;
    let v = parse_list(args, "estimator")?;
    match (kind, v.as_slice()) {
        ("geometric", [rho, magnitude]) => Ok(Estimator::Geometric { rho: *rho, magnitude: *magnitude }),
        ("harmonic", [c]) => Ok(Estimator::Harmonic { c: *c }),
        _ => Err(Error::config(format!("estimator: unknown form {s:?}"))),
    }
}

fn initial_profile(game: &FiniteGame, x0: Option<&str>, tol: f64) -> Result<Vec<usize>> {
    match x0 {
        None => Ok(vec![0; game.player_count()]),
        Some(s) => game.indices_of_values(&parse_list(s, "x0")?, tol),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub termination: Termination,
    pub steps: usize,
    pub initial: Vec<f64>,
    pub last: Vec<f64>,
    pub cycle: CycleReport,
    pub delta: Option<f64>,
    pub near_potential_limit: Option<NearPotentialLimitReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub certificate: ContractionCertificate,
    pub bounds: TheoremOneBounds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantReport {
    pub delta: f64,
    pub invariant_set: InvariantSetSpec,
    pub theorem4: Theorem4Report,
    pub lemma6: Lemma6Report,
}

/// Compact description of one experiment run for the summary document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub start: [f64; 2],
    pub termination: Termination,
    pub steps: usize,
    pub trap_entry: Option<usize>,
    pub max_tail_distance: f64,
    pub final_distance_to_center: f64,
    pub clamped_steps: Vec<usize>,
    pub max_condition_residual: f64,
    pub csv: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CournotSummary {
    pub x_tilde: Vec<f64>,
    pub delta1: f64,
    pub radius: f64,
    pub estimated_radius: Option<f64>,
    pub report: ExperimentSummaryHeader,
    pub runs: Vec<RunSummary>,
    pub plots: Vec<PlotFiles>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummaryHeader {
    pub params: crate::cournot::CournotParams,
    pub mu: [f64; 2],
    pub certificate: ContractionCertificate,
    pub delta1: crate::cournot::Delta1Bound,
    pub bounds: TheoremOneBounds,
    pub tail_from: usize,
}

/// What a successful run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    /// One line per result for the terminal.
    pub lines: Vec<String>,
    /// Nonzero when a verification failed without an error.
    pub exit_code: i32,
}

/// Relative to the output directory, so reports do not depend on where it lives.
fn relative(out: &Path, p: &Path) -> PathBuf {
    p.strip_prefix(out).map(Path::to_path_buf).unwrap_or_else(|_| p.to_path_buf())
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    fs::create_dir_all(&config.output_dir)?;
    match &config.command {
        Command::Simulate(a) => simulate(config, a),
        Command::AnalyzeContraction(a) => analyze_contraction(config, a),
        Command::InvariantSets(a) => invariant_sets(config, a),
        Command::Cournot(a) => cournot(config, a),
        Command::Verify(a) => verify(config, a),
    }
}

fn envelope<P>(config: &RunConfig, payload: P) -> ReportEnvelope<&RunConfig, P> {
    ReportEnvelope::new(config.command.name(), config, payload)
}

fn simulate(config: &RunConfig, a: &SimulateArgs) -> Result<Outcome> {
    let game = load_game(&a.game)?;
    let phi = a.potential.as_deref().map(|p| load_potential(p, &game)).transpose()?;
    let x0 = initial_profile(&game, a.x0.as_deref(), config.tolerances.action_match)?;
    let rule = rule_of(a.rule, a.schedule);
    let phi_fn = phi.clone().map(|t| {
        let g = game.clone();
        move |p: &[usize]| t.at(&g, p)
    });
    let mut opts = IterateOptions::new(a.steps).with_seed(config.seed);
    if let Some(f) = &phi_fn {
        opts = opts.with_potential(f);
    }
    let traj = iterate(rule, &game, &x0, &opts)?;
    let (delta, limit) = match &phi {
        Some(t) if rule.is_sequential() => {
            let cand = PotentialCandidate::from(t.clone());
            let report = verify_near_potential_limit(&game, &cand, &traj)?;
            (Some(report.delta), Some(report))
        }
        Some(t) => (Some(potential_residual(&game, &PotentialCandidate::from(t.clone()))?), None),
        None => (None, None),
    };
    let report = SimulateReport {
        termination: traj.termination,
        steps: traj.steps.len(),
        initial: traj.points[0].clone(),
        last: traj.last_point().to_vec(),
        cycle: detect_cycle(&traj),
        delta,
        near_potential_limit: limit,
    };
    let csv = config.output_dir.join("trajectory.csv");
    write_trajectory_csv(&csv, &traj)?;
    let json = config.output_dir.join("report.json");
    write_json(&json, &envelope(config, &report))?;
    let mut lines = vec![format!("{:?} after {} steps at {:?}", report.termination, report.steps, report.last)];
    if let Some(l) = &report.near_potential_limit {
        lines.push(format!("near-potential limit: {:?} (δ = {}, bound δ|𝒜| = {})", l.outcome, l.delta, l.bound));
    }
    Ok(Outcome { files: vec![csv, json], lines, exit_code: 0 })
}

fn grid_samples(domain: &[(f64, f64)], per_axis: usize) -> Vec<Vec<f64>> {
    let n = per_axis.max(2);
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for &(lo, hi) in domain {
        let nodes: Vec<f64> = (0..n).map(|k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 }).collect();
        out = out.into_iter().flat_map(|p| nodes.iter().map(move |&v| [p.clone(), vec![v]].concat())).collect();
    }
    out
}

fn analyze_contraction(config: &RunConfig, a: &ContractionArgs) -> Result<Outcome> {
    let game = load_game(&a.game)?;
    let smooth = Arc::new(game.interpolated());
    let domain = match &a.domain {
        Some(s) => parse_domain(s)?,
        None => smooth.bounds().to_vec(),
    };
    if domain.len() != game.player_count() {
        return Err(Error::config(format!("domain has {} axes for {} players", domain.len(), game.player_count())));
    }
    let samples = grid_samples(&domain, a.samples);
    let z_game = Arc::clone(&smooth);
    let z: VectorFn = Arc::new(move |x: &[f64]| {
        let mut y = x.to_vec();
        z_game.clamp(&mut y);
        (0..y.len()).map(|i| z_game.best_deviation(i, &y).map_or(f64::NAN, |(b, _)| b)).collect()
    });
    let tol = &config.tolerances;
    let (_, certificate) = certify(z, &samples, AnchorPolicy::Centroid, a.margin, None, tol.banach, tol.banach_max_iterations)?;
    let bounds = theorem1_radii(a.delta1, certificate.delta2, certificate.lipschitz)?;
    let report = ContractionReport { certificate, bounds };
    let json = config.output_dir.join("contraction.json");
    write_json(&json, &envelope(config, &report))?;
    let lines = vec![format!(
        "L_C = {}, δ₂ = {}, x* = {:?}, r_K = {}",
        report.certificate.lipschitz, report.certificate.delta2, report.certificate.x_star, report.bounds.r_k
    )];
    Ok(Outcome { files: vec![json], lines, exit_code: 0 })
}

fn invariant_sets(config: &RunConfig, a: &InvariantArgs) -> Result<Outcome> {
    let game = load_game(&a.game)?;
    let table = load_potential(&a.phi, &game)?;
    let delta = potential_residual(&game, &PotentialCandidate::from(table.clone()))?;
    let x0 = initial_profile(&game, a.x0.as_deref(), config.tolerances.action_match)?;
    let stop = StopCriteria { fixed_point: false, cycle: false };
    let phi_idx = |p: &[usize]| table.at(&game, p);
    let opts = IterateOptions::new(a.steps).with_stop(stop).with_seed(config.seed).with_potential(&phi_idx);
    let traj = iterate(UpdateRule::simultaneous_best(), &game, &x0, &opts)?;
    let smooth = game.interpolated();
    let phi_real = table.interpolated(&game)?;
    let l0 = l_zero(&smooth, 2000, config.seed)?;
    let mut inv = InvariantOptions::new(a.t0, a.eps, delta, l0);
    inv.grid = a.grid;
    inv.mode = match a.mode {
        InvariantModeName::Sup => InvariantMode::Sup,
        InvariantModeName::Limsup => InvariantMode::LimsupWindowed,
    };
    let spec = build_invariant_set_on_points(&smooth, phi_real.as_ref(), &traj.points, &inv)?;
    let theorem4 = theorem4_verify(&smooth, phi_real.as_ref(), &traj.points, &spec)?;
    let lemma6 = lemma6_check(&game, &traj, &phi_idx, delta, a.eps)?;
    let report = InvariantReport { delta, invariant_set: spec, theorem4, lemma6 };
    let csv = config.output_dir.join("trajectory.csv");
    write_trajectory_csv(&csv, &traj)?;
    let json = config.output_dir.join("invariant_sets.json");
    write_json(&json, &envelope(config, &report))?;
    let lines = vec![
        format!(
            "R4 = {}, R5 = {}, R6 = {}, φ threshold = {}",
            report.invariant_set.r4, report.invariant_set.r5, report.invariant_set.r6, report.invariant_set.phi_threshold
        ),
        format!(
            "entry index {:?}, {} post-entry violations, {} lemma violations",
            report.theorem4.entry_index,
            report.theorem4.post_entry_violations.len(),
            report.lemma6.violations.len()
        ),
    ];
    Ok(Outcome { files: vec![csv, json], lines, exit_code: 0 })
}

fn experiment_config(seed: u64, a: &CournotArgs) -> Result<ExperimentConfig> {
    let mut c = ExperimentConfig { seed, ..ExperimentConfig::default() };
    c.d = a.d.unwrap_or(c.d);
    c.c1 = a.c1.unwrap_or(c.c1);
    c.c2 = a.c2.unwrap_or(c.c2);
    c.a_bar = a.a_bar.unwrap_or(c.a_bar);
    c.max_steps = a.steps.unwrap_or(c.max_steps);
    c.grid_resolution = a.grid_resolution.unwrap_or(c.grid_resolution);
    if let Some(mu) = a.mu.as_deref() {
        c.mu = match mu {
            "auto" | "auto_ne" => MuSpec::Auto,
            s => match parse_list(s, "mu")?.as_slice() {
                [x, y] => MuSpec::Point([*x, *y]),
                _ => return Err(Error::config(format!("mu: expected auto or x,y, got {s:?}"))),
            },
        };
    }
    c.modes = match a.mode.unwrap_or(ModeName::Both) {
        ModeName::Repeated => vec![Mode::Repeated],
        ModeName::Sequential => vec![Mode::Sequential],
        ModeName::Both => vec![Mode::Repeated, Mode::Sequential],
    };
    c.estimator = a.estimator.as_deref().map(parse_estimator).transpose()?;
    c.starts = StartSpec::DefaultGrid;
    Ok(c)
}

fn cournot(config: &RunConfig, a: &CournotArgs) -> Result<Outcome> {
    let exp = experiment_config(config.seed, a)?;
    let report: ExperimentReport = run_experiment(&exp)?;
    let out = &config.output_dir;
    let runs_dir = out.join("runs");
    fs::create_dir_all(&runs_dir)?;
    let mut files = Vec::new();
    let mut runs = Vec::new();
    for run in &report.runs {
        let csv = runs_dir.join(format!("{}.csv", run.label));
        write_trajectory_csv(&csv, &run.trajectory)?;
        runs.push(RunSummary {
            label: run.label.clone(),
            start: run.start,
            termination: run.trajectory.termination,
            steps: run.trajectory.steps.len(),
            trap_entry: run.trap.all_inside_after,
            max_tail_distance: run.trap.max_tail_distance,
            final_distance_to_center: run.final_distance_to_center,
            clamped_steps: run.clamped_steps.clone(),
            max_condition_residual: run.max_condition_residual,
            csv: relative(out, &csv),
        });
        files.push(csv);
    }
    let traces: Vec<(String, Vec<Vec<f64>>)> =
        report.runs.iter().map(|r| (r.label.clone(), r.trajectory.points.clone())).collect();
    let mut plots = emit_plot_data(&out.join("plot"), &traces, &report.x_tilde, report.radius, report.tail_from)?;
    for p in &mut plots {
        files.extend(p.trajectories.iter().cloned());
        files.push(p.circle.clone());
        p.trajectories = p.trajectories.iter().map(|f| relative(out, f)).collect();
        p.circle = relative(out, &p.circle);
    }
    let summary = CournotSummary {
        x_tilde: report.x_tilde.clone(),
        delta1: report.delta1.delta1,
        radius: report.radius,
        estimated_radius: report.estimated_radius.map(|r| r.radius),
        report: ExperimentSummaryHeader {
            params: report.params,
            mu: report.mu,
            certificate: report.certificate.clone(),
            delta1: report.delta1,
            bounds: report.bounds.clone(),
            tail_from: report.tail_from,
        },
        runs,
        plots,
    };
    let json = out.join("summary.json");
    write_json(&json, &envelope(config, &summary))?;
    files.push(json);
    let mut lines = vec![format!(
        "x̃ = {:?}, δ₁ = {}, trap radius 2δ₁ = {}",
        summary.x_tilde, summary.delta1, summary.radius
    )];
    for r in &summary.runs {
        lines.push(format!(
            "{}: {:?} after {} steps, inside from {:?}, final distance {:.6e}",
            r.label, r.termination, r.steps, r.trap_entry, r.final_distance_to_center
        ));
    }
    Ok(Outcome { files, lines, exit_code: 0 })
}

fn verify(config: &RunConfig, a: &VerifyArgs) -> Result<Outcome> {
    let report: SuiteReport = run_suite(&a.suite, config.seed)?;
    let json = config.output_dir.join("verify.json");
    write_json(&json, &envelope(config, &report))?;
    let mut lines: Vec<String> = report
        .checks
        .iter()
        .map(|c| format!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail))
        .collect();
    lines.push(format!("{} passed, {} failed", report.passed, report.failed));
    Ok(Outcome { files: vec![json], lines, exit_code: i32::from(report.failed > 0) })
}

/// The JSON document describing a failed run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorDocument {
    pub kind: String,
    pub exit_code: i32,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
}

impl ErrorDocument {
    pub fn of(e: &Error) -> Self {
        let mut doc = ErrorDocument {
            kind: e.kind().to_string(),
            exit_code: e.exit_code(),
            message: e.to_string(),
            path: None,
            line: None,
            column: None,
            trajectory: None,
            step: None,
        };
        match e {
            Error::Parse { path, line, column, .. } => {
                doc.path = Some(path.clone());
                doc.line = Some(*line);
                doc.column = Some(*column);
            }
            Error::Experiment { trajectory, step, .. } => {
                doc.trajectory = Some(trajectory.clone());
                doc.step = Some(*step);
            }
            Error::Step { step, .. } => doc.step = Some(*step),
            _ => {}
        }
        doc
    }
}

/// Parses `args`, runs the command and returns the process exit status. The
/// error document goes to stderr and, when possible, to `error.json` in the
/// output directory.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let fallback_dir = cli.output_dir.clone();
    let result = RunConfig::from_cli(cli).and_then(|config| run(&config).map(|o| (config, o)));
    match result {
        Ok((_, outcome)) => {
            let mut stdout = std::io::stdout().lock();
            for l in &outcome.lines {
                if writeln!(stdout, "{l}").is_err() {
                    break;
                }
            }
            outcome.exit_code
        }
        Err(e) => {
            let doc = ErrorDocument::of(&e);
            let text = serde_json::to_string_pretty(&doc).unwrap_or_else(|_| e.to_string());
            eprintln!("{text}");
            if fs::create_dir_all(&fallback_dir).is_ok() {
                let _ = fs::write(fallback_dir.join("error.json"), text + "\n");
            }
            doc.exit_code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_config_is_strict() {
        let ok = "seed = 7\noutput_dir = \"x\"\n[command]\nname = \"verify\"\nsuite = \"contraction_machinery\"\n";
        let c = RunConfig::from_toml(Path::new("c.toml"), ok).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.command, Command::Verify(VerifyArgs { suite: "contraction_machinery".into() }));

        let defaults = "[command]\nname = \"cournot\"\n";
        let c = RunConfig::from_toml(Path::new("c.toml"), defaults).unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.tolerances, Tolerances::default());

        for bad in [
            "bogus = 1\n[command]\nname = \"verify\"\n",
            "[command]\nname = \"verify\"\nsuit = \"all\"\n",
            "[command]\nname = \"nope\"\n",
            "[tolerances]\nbanach = 1e-9\nextra = 2\n[command]\nname = \"verify\"\n",
        ] {
            match RunConfig::from_toml(Path::new("c.toml"), bad) {
                Err(Error::Parse { line, .. }) => assert!(line > 0, "{bad}"),
                other => panic!("{bad}: {other:?}"),
            }
        }
    }

    #[test]
    fn argument_helpers() {
        assert_eq!(parse_domain("0:1, -2:3").unwrap(), vec![(0.0, 1.0), (-2.0, 3.0)]);
        assert!(parse_domain("1:0").is_err());
        assert_eq!(parse_estimator("geometric:0.5,10").unwrap(), Estimator::Geometric { rho: 0.5, magnitude: 10.0 });
        assert_eq!(parse_estimator("harmonic:2").unwrap(), Estimator::Harmonic { c: 2.0 });
        assert!(parse_estimator("geometric:0.5").is_err());
        let s = grid_samples(&[(0.0, 1.0), (2.0, 4.0)], 3);
        assert_eq!(s.len(), 9);
        assert_eq!(s[0], vec![0.0, 2.0]);
        assert_eq!(s[8], vec![1.0, 4.0]);
    }

    #[test]
    fn cournot_flags_map_onto_the_experiment() {
        let args = CournotArgs {
            d: Some(300.0),
            c1: None,
            c2: None,
            a_bar: None,
            mu: Some("10,20".into()),
            mode: Some(ModeName::Sequential),
            steps: Some(50),
            grid_resolution: None,
            estimator: None,
        };
        let c = experiment_config(3, &args).unwrap();
        assert_eq!((c.d, c.c1, c.max_steps, c.seed), (300.0, 200.0, 50, 3));
        assert_eq!(c.mu, MuSpec::Point([10.0, 20.0]));
        assert_eq!(c.modes, vec![Mode::Sequential]);
    }
}
