use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    delta1_bound, nominal_br_step, nominal_game, perturbed_condition, perturbed_game, CournotParams,
    CournotPerturbation, Delta1Bound, NoPerturbation, SigmoidBump,
};
use crate::contraction::{
    certify, estimated_response_radius, theorem1_radii, verify_trap, AnchorPolicy, ContractionCertificate,
    EstimatedResponseRadius, TheoremOneBounds, TrapReport,
};
use crate::dynamics::{
    estimated_response_iterate, iterate, Estimator, IterateOptions, Mover, Trajectory, UpdateRule,
};
use crate::game::VectorFn;
use crate::{distance, stream_seed, Error, Result};

/// First step shown in the close-up view of the trajectories.
pub const TAIL_FROM: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Both firms respond simultaneously.
    Repeated,
    /// Firms take turns.
    Sequential,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Nominal,
    Perturbed,
    NominalEstimated,
    PerturbedEstimated,
}

/// Bump centre: the nominal equilibrium or an explicit point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MuSpec {
    #[serde(with = "auto_ne")]
    Auto,
    Point([f64; 2]),
}

mod auto_ne {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("auto_ne")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "auto_ne" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected \"auto_ne\" or [x, y], got \"{s}\"")))
        }
    }
}

/// Initial profiles: the default 3×3 grid minus its centre, or an explicit list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StartSpec {
    #[serde(with = "default_grid")]
    DefaultGrid,
    List(Vec<[f64; 2]>),
}

mod default_grid {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("default_grid")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let s = String::deserialize(d)?;
        if s == "default_grid" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!("expected \"default_grid\" or a list of [x, y], got \"{s}\"")))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    pub a_bar: f64,
    pub mu: MuSpec,
    pub starts: StartSpec,
    pub modes: Vec<Mode>,
    pub max_steps: usize,
    /// Nodes per axis for the δ₁ gradient search.
    pub grid_resolution: usize,
    /// Adds runs that respond to noisy estimates of the profile.
    pub estimator: Option<Estimator>,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let p = CournotParams::default();
        ExperimentConfig {
            d: p.d,
            c1: p.c1,
            c2: p.c2,
            a_bar: p.a_bar,
            mu: MuSpec::Auto,
            starts: StartSpec::DefaultGrid,
            modes: vec![Mode::Repeated, Mode::Sequential],
            max_steps: 200,
            grid_resolution: 400,
            estimator: None,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn params(&self) -> CournotParams {
        CournotParams { d: self.d, c1: self.c1, c2: self.c2, a_bar: self.a_bar }
    }

    pub fn mu(&self) -> [f64; 2] {
        match self.mu {
            MuSpec::Auto => self.params().nash_equilibrium(),
            MuSpec::Point(p) => p,
        }
    }

    pub fn starts(&self) -> Vec<[f64; 2]> {
        match &self.starts {
            StartSpec::DefaultGrid => default_starts(self.a_bar),
            StartSpec::List(l) => l.clone(),
        }
    }
}

/// {0, ā/2, ā}² without its centre, in row-major order.
pub fn default_starts(a_bar: f64) -> Vec<[f64; 2]> {
    let levels = [0.0, a_bar / 2.0, a_bar];
    let mut out = Vec::with_capacity(8);
    for (i, &x) in levels.iter().enumerate() {
        for (j, &y) in levels.iter().enumerate() {
            if (i, j) != (1, 1) {
                out.push([x, y]);
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRun {
    pub label: String,
    pub variant: Variant,
    pub mode: Mode,
    pub start: [f64; 2],
    pub trajectory: Trajectory<f64>,
    pub trap: TrapReport,
    /// Steps where a mover's first-order condition had no nonnegative root.
    pub clamped_steps: Vec<usize>,
    /// Largest plug-back residual of the first-order conditions over all moves.
    pub max_condition_residual: f64,
    pub final_distance_to_center: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub params: CournotParams,
    pub mu: [f64; 2],
    /// Fixed point x̃ of the nominal map with its certificate.
    pub certificate: ContractionCertificate,
    pub x_tilde: Vec<f64>,
    pub delta1: Delta1Bound,
    pub bounds: TheoremOneBounds,
    /// r_K = 2δ₁ for the contraction factor ½.
    pub radius: f64,
    pub estimated_radius: Option<EstimatedResponseRadius>,
    pub tail_from: usize,
    pub runs: Vec<ExperimentRun>,
}

impl ExperimentReport {
    pub fn runs_of(&self, variant: Variant) -> impl Iterator<Item = &ExperimentRun> {
        self.runs.iter().filter(move |r| r.variant == variant)
    }
}

fn variant_name(v: Variant) -> &'static str {
    match v {
        Variant::Nominal => "nominal",
        Variant::Perturbed => "perturbed",
        Variant::NominalEstimated => "nominal-estimated",
        Variant::PerturbedEstimated => "perturbed-estimated",
    }
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Repeated => "repeated",
        Mode::Sequential => "sequential",
    }
}

fn rule_for(mode: Mode) -> UpdateRule {
    match mode {
        Mode::Repeated => UpdateRule::simultaneous_best(),
        Mode::Sequential => UpdateRule::sequential_best(),
    }
}

/// Plug-back residuals of the first-order conditions along a trajectory, and the
/// steps where a mover was clamped to zero.
fn condition_diagnostics(
    params: &CournotParams,
    pert: &dyn CournotPerturbation,
    traj: &Trajectory<f64>,
) -> (f64, Vec<usize>) {
    let mut worst: f64 = 0.0;
    let mut clamped = Vec::new();
    for (t, step) in traj.steps.iter().enumerate() {
        let (cur, next) = (&traj.states[t], &traj.states[t + 1]);
        let movers: Vec<usize> = match step.mover {
            Mover::Player(i) => vec![i],
            Mover::All => vec![0, 1],
            Mover::Idle => vec![],
        };
        let mut any_clamped = false;
        for i in movers {
            let g = perturbed_condition(params, pert, i, cur, next[i]);
            if next[i] == 0.0 && g <= 0.0 {
                any_clamped |= perturbed_condition(params, pert, i, cur, 0.0) < 0.0;
                continue;
            }
            worst = worst.max(g.abs());
        }
        if any_clamped {
            clamped.push(t);
        }
    }
    (worst, clamped)
}

/// Runs nominal and perturbed dynamics from every start in every requested mode
/// and checks where their tails settle.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    let params = config.params();
    params.validate()?;
    if config.max_steps == 0 {
        return Err(Error::domain("max_steps must be at least 1"));
    }
    if config.modes.is_empty() {
        return Err(Error::config("no dynamics mode requested"));
    }
    let starts = config.starts();
    if starts.is_empty() {
        return Err(Error::config("no initial states"));
    }
    for s in &starts {
        if s.iter().any(|v| !(0.0..=params.a_bar).contains(v)) {
            return Err(Error::domain(format!("initial state {s:?} outside [0, {}]²", params.a_bar)));
        }
    }
    let mu = config.mu();
    let bump: Arc<dyn CournotPerturbation> = Arc::new(SigmoidBump { mu });
    let delta1 = delta1_bound(bump.as_ref(), &params.bounds(), config.grid_resolution);

    // The nominal map is affine with slope ½ per coordinate.
    let z: VectorFn = Arc::new(move |a: &[f64]| nominal_br_step(&params, a).to_vec());
    let samples: Vec<Vec<f64>> = default_starts(params.a_bar)
        .into_iter()
        .chain(std::iter::once([params.a_bar / 2.0; 2]))
        .map(|s| s.to_vec())
        .collect();
    let (_, certificate) = certify(z, &samples, AnchorPolicy::Centroid, 0.1, Some(0.5), 1e-12, 1000)?;
    let x_tilde = certificate.x_star.clone();
    let bounds = theorem1_radii(delta1.delta1, certificate.delta2, certificate.lipschitz)?;
    let radius = bounds.r_k;
    let estimated_radius = match config.estimator {
        Some(_) => Some(estimated_response_radius(delta1.delta1, certificate.delta2, certificate.lipschitz)?),
        None => None,
    };

    let nominal = nominal_game(&params);
    let perturbed = perturbed_game(&params, Arc::clone(&bump), &delta1);

    let mut jobs: Vec<(Variant, Mode, usize)> = Vec::new();
    for variant in [Variant::Nominal, Variant::Perturbed] {
        for &mode in &config.modes {
            jobs.extend((0..starts.len()).map(|k| (variant, mode, k)));
        }
    }
    if config.estimator.is_some() {
        for variant in [Variant::NominalEstimated, Variant::PerturbedEstimated] {
            jobs.extend((0..starts.len()).map(|k| (variant, Mode::Repeated, k)));
        }
    }

    let runs = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(variant, mode, k))| -> Result<ExperimentRun> {
            let label = format!("{}-{}-{}", variant_name(variant), mode_name(mode), k + 1);
            let start = starts[k];
            let opts = IterateOptions::new(config.max_steps);
            let rule = rule_for(mode);
            let (game, pert): (_, &dyn CournotPerturbation) = match variant {
                Variant::Nominal | Variant::NominalEstimated => (&nominal, &NoPerturbation),
                Variant::Perturbed | Variant::PerturbedEstimated => (&perturbed, bump.as_ref()),
            };
            let result = match (variant, config.estimator) {
                (Variant::NominalEstimated | Variant::PerturbedEstimated, Some(est)) => {
                    estimated_response_iterate(rule, game, &start, est, stream_seed(config.seed, index as u64), &opts)
                }
                _ => iterate(rule, game, &start, &opts),
            };
            let trajectory = result.map_err(|e| match e {
                Error::Step { step, source } => Error::Experiment { trajectory: label.clone(), step, source },
                other => Error::Experiment { trajectory: label.clone(), step: 0, source: Box::new(other) },
            })?;
            let circle = match variant {
                Variant::NominalEstimated | Variant::PerturbedEstimated => {
                    estimated_radius.map_or(radius, |r| r.radius)
                }
                _ => radius,
            };
            let trap = verify_trap(&trajectory.points, &x_tilde, circle, 0)?;
            let (max_condition_residual, clamped_steps) = match variant {
                Variant::Nominal | Variant::Perturbed => condition_diagnostics(&params, pert, &trajectory),
                // Responses there solve the conditions at the estimate, not at the state.
                _ => (0.0, Vec::new()),
            };
            let final_distance_to_center = distance(trajectory.last_point(), &x_tilde);
            Ok(ExperimentRun {
                label,
                variant,
                mode,
                start,
                trajectory,
                trap,
                clamped_steps,
                max_condition_residual,
                final_distance_to_center,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        params,
        mu,
        certificate,
        x_tilde,
        delta1,
        bounds,
        radius,
        estimated_radius,
        tail_from: TAIL_FROM,
        runs,
    })
}
