//! Named property checks over the whole library, runnable from the CLI.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::contraction::{
    build_contraction, estimated_response_radius, fixed_point, theorem1_part2_radius, theorem1_radii, verify_trap,
    AnchorPolicy, ContractiveMap,
};
use crate::cournot::{
    cournot_potential, cournot_utility, delta1_bound, discretized_game, discretized_potential, nominal_game,
    perturbed_game, run_experiment, CournotParams, CournotPerturbation, ExperimentConfig, SigmoidBump, Variant,
};
use crate::dynamics::{
    estimated_response_iterate, iterate, verify_near_potential_limit, BetterSelector, Estimator, IterateOptions,
    StopCriteria, UpdateRule,
};
use crate::game::{potential_residual, FiniteGame, PotentialCandidate, PotentialTable, VectorFn};
use crate::repeated::{build_invariant_set_on_points, l_zero, lemma6_check, taylor_residual_k, InvariantOptions};
use crate::{distance, stream_seed, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<CheckResult>,
}

type Check = fn(u64) -> Result<CheckResult>;

/// Every check, in execution order.
pub const CHECKS: &[(&str, Check)] = &[
    ("cournot_nominal_convergence", cournot_nominal_convergence),
    ("cournot_perturbed_trap", cournot_perturbed_trap),
    ("near_potential_limit", near_potential_limit),
    ("exact_potential_identities", exact_potential_identities),
    ("lemma6_theorem4", lemma6_theorem4),
    ("taylor_residual_exactness", taylor_residual_exactness),
    ("contraction_machinery", contraction_machinery),
    ("perturbation_gradients", perturbation_gradients),
    ("estimated_response", estimated_response),
    ("experiment_determinism", experiment_determinism),
];

pub fn suite_names() -> Vec<&'static str> {
    std::iter::once("all").chain(CHECKS.iter().map(|(n, _)| *n)).collect()
}

/// Runs `suite` ("all" or one check name). A check that errors counts as failed.
pub fn run_suite(suite: &str, seed: u64) -> Result<SuiteReport> {
    let selected: Vec<&(&str, Check)> = CHECKS.iter().filter(|(n, _)| suite == "all" || *n == suite).collect();
    if selected.is_empty() {
        return Err(Error::config(format!("unknown suite {suite:?}; expected one of {}", suite_names().join(", "))));
    }
    let checks: Vec<CheckResult> = selected
        .iter()
        .map(|(name, f)| {
            f(seed).unwrap_or_else(|e| CheckResult { name: name.to_string(), passed: false, detail: format!("error: {e}") })
        })
        .collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    Ok(SuiteReport { suite: suite.to_string(), seed, passed, failed: checks.len() - passed, checks })
}

fn result(name: &str, passed: bool, detail: String) -> Result<CheckResult> {
    Ok(CheckResult { name: name.to_string(), passed, detail })
}

fn cournot_nominal_convergence(_seed: u64) -> Result<CheckResult> {
    let params = CournotParams::default();
    let ne = params.nash_equilibrium();
    let game = nominal_game(&params);
    let mut worst = 0;
    let mut ok = true;
    for start in crate::cournot::default_starts(params.a_bar) {
        let traj = iterate(UpdateRule::simultaneous_best(), &game, &start, &IterateOptions::new(60))?;
        match traj.points.iter().position(|p| distance(p, &ne) <= 1e-6) {
            Some(t) => worst = worst.max(t),
            None => ok = false,
        }
    }
    result("cournot_nominal_convergence", ok, format!("all 8 starts within 1e-6 of {ne:?} by step {worst}"))
}

fn cournot_perturbed_trap(seed: u64) -> Result<CheckResult> {
    let report = run_experiment(&ExperimentConfig { seed, ..ExperimentConfig::default() })?;
    let mut latest = 0;
    let mut ok = true;
    for run in report.runs_of(Variant::Perturbed) {
        match run.trap.all_inside_after {
            Some(t) if t <= 200 => latest = latest.max(t),
            _ => ok = false,
        }
    }
    result(
        "cournot_perturbed_trap",
        ok,
        format!("δ₁ = {:.6}, radius 2δ₁ = {:.6}, all perturbed tails inside from step {latest}", report.delta1.delta1, report.radius),
    )
}

/// A seeded game at controlled distance from an exact potential game: φ plus a
/// per-player term independent of the player's own action, plus uniform noise
/// of the given magnitude.
pub fn near_potential_case(seed: u64, actions: &[usize], magnitude: f64) -> Result<(FiniteGame, PotentialTable)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let action_sets: Vec<Vec<f64>> = actions.iter().map(|&n| (0..n).map(|k| k as f64).collect()).collect();
    let base = FiniteGame::from_fn(action_sets.clone(), |_, _| 0.0)?;
    let total = base.profile_count();
    let phi: Vec<f64> = (0..total).map(|_| rng.gen_range(0.0..10.0)).collect();
    let mut tables = Vec::with_capacity(actions.len());
    for i in 0..actions.len() {
        let mut own_free = vec![0.0; total];
        for (idx, slot) in own_free.iter_mut().enumerate() {
            let mut profile = base.profile_at(idx);
            if profile[i] == 0 {
                *slot = rng.gen_range(0.0..10.0);
            } else {
                profile[i] = 0;
                *slot = f64::NAN;
            }
        }
        for idx in 0..total {
            if own_free[idx].is_nan() {
                let mut profile = base.profile_at(idx);
                profile[i] = 0;
                own_free[idx] = own_free[base.index_of(&profile)];
            }
        }
        tables.push((0..total).map(|idx| phi[idx] + own_free[idx] + magnitude * rng.gen_range(-1.0..=1.0)).collect());
    }
    let game = FiniteGame::new(action_sets, tables)?;
    let table = PotentialTable::new(game.shape(), phi)?;
    Ok((game, table))
}

const MAGNITUDES: [f64; 5] = [0.0, 0.01, 0.1, 1.0, 5.0];

fn near_potential_limit(seed: u64) -> Result<CheckResult> {
    let rules = [
        UpdateRule::sequential_better(BetterSelector::FirstImproving),
        UpdateRule::sequential_better(BetterSelector::MaxImproving),
        UpdateRule::sequential_best(),
    ];
    let mut trajectories = 0;
    let mut cycles = 0;
    let mut counterexamples = Vec::new();
    for case in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, case));
        let players = rng.gen_range(2..=3);
        let actions: Vec<usize> = (0..players).map(|_| rng.gen_range(2..=4)).collect();
        let magnitude = MAGNITUDES[case as usize % MAGNITUDES.len()];
        let (game, phi) = near_potential_case(rng.gen(), &actions, magnitude)?;
        let candidate = PotentialCandidate::from(phi);
        let budget = 4 * game.profile_count() * players + 8;
        for (r, rule) in rules.iter().enumerate() {
            for _ in 0..3 {
                let start: Vec<usize> = actions.iter().map(|&n| rng.gen_range(0..n)).collect();
                let traj = iterate(*rule, &game, &start, &IterateOptions::new(budget))?;
                let report = verify_near_potential_limit(&game, &candidate, &traj)?;
                trajectories += 1;
                cycles += usize::from(report.cycle.period.is_some_and(|p| p > 1));
                if !report.holds {
                    counterexamples.push(format!("case {case} rule {r} start {start:?}: {:?}", report.outcome));
                }
            }
        }
    }
    result(
        "near_potential_limit",
        counterexamples.is_empty(),
        format!(
            "{trajectories} trajectories on 100 games, {cycles} ending in cycles, {} counterexamples{}",
            counterexamples.len(),
            counterexamples.first().map(|c| format!(" (first: {c})")).unwrap_or_default()
        ),
    )
}

fn exact_potential_identities(seed: u64) -> Result<CheckResult> {
    let params = CournotParams::default();
    // On [0, 200]² the price floor never binds, so φ is exact there.
    let grid: Vec<f64> = (0..=50).map(|k| 4.0 * k as f64).collect();
    let game = discretized_game(&params, &grid, None)?;
    let phi = discretized_potential(&params, &game)?;
    let residual = potential_residual(&game, &PotentialCandidate::from(phi))?;

    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, 1));
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let i = rng.gen_range(0..2);
        let a = [rng.gen_range(0.0..200.0), rng.gen_range(0.0..200.0)];
        let mut b = a;
        b[i] = rng.gen_range(0.0..200.0);
        let du = cournot_utility(&params, i, &b) - cournot_utility(&params, i, &a);
        let dphi = cournot_potential(&params, &b) - cournot_potential(&params, &a);
        worst = worst.max((du - dphi).abs());
    }
    result(
        "exact_potential_identities",
        residual <= 1e-9 && worst <= 1e-9,
        format!("potential residual {residual:e} on a 51² grid, worst unilateral mismatch {worst:e} over 10⁴ deviations"),
    )
}

/// First step of the suprema defining the invariant set.
const T0: usize = 10;

fn lemma6_theorem4(_seed: u64) -> Result<CheckResult> {
    let params = CournotParams::default();
    let bump = SigmoidBump { mu: params.nash_equilibrium() };
    let grid: Vec<f64> = (0..=100).map(|k| 2.0 * k as f64).collect();
    let game = discretized_game(&params, &grid, Some(&bump))?;
    let phi_table = discretized_potential(&params, &game)?;
    let delta = potential_residual(&game, &PotentialCandidate::from(phi_table.clone()))?;
    let phi_idx = |p: &[usize]| phi_table.at(&game, p);
    let phi_real = |x: &[f64]| cournot_potential(&params, x);
    let epsilon = 1.0;
    let stop = StopCriteria { fixed_point: false, cycle: false };
    let smooth = game.interpolated();
    let l0 = l_zero(&smooth, 0, 0)?;
    let mut violations = 0;
    let mut detail = Vec::new();
    for start in [[0usize, 0], [100, 100], [0, 100], [100, 0]] {
        let traj = iterate(UpdateRule::simultaneous_best(), &game, &start, &IterateOptions::new(60).with_stop(stop))?;
        let l6 = lemma6_check(&game, &traj, &phi_idx, delta, epsilon)?;
        let mut opts = InvariantOptions::new(T0, epsilon, delta, l0);
        opts.grid = 200;
        let spec = build_invariant_set_on_points(&smooth, &phi_real, &traj.points, &opts)?;
        let t4 = crate::repeated::theorem4_verify(&smooth, &phi_real, &traj.points, &spec)?;
        let bad = l6.violations.len() + usize::from(t4.entry_index.is_none()) + t4.post_entry_violations.len();
        violations += bad;
        detail.push(format!(
            "start {start:?}: {} lemma checks, R5 = {:.3}, entry {:?}",
            l6.checked_steps, spec.r5, t4.entry_index
        ));
    }
    result("lemma6_theorem4", violations == 0, format!("δ = {delta:.6}; {}", detail.join("; ")))
}

fn taylor_residual_exactness(seed: u64) -> Result<CheckResult> {
    let params = CournotParams::default();
    let phi = |x: &[f64]| cournot_potential(&params, x);
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, 2));
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = [rng.gen_range(0.0..400.0), rng.gen_range(0.0..400.0)];
        let y: [f64; 2] = [rng.gen_range(0.0..400.0), rng.gen_range(0.0..400.0)];
        let exact = ((y[0] - x[0]) * (y[1] - x[1])).abs();
        worst = worst.max((taylor_residual_k(&phi, &x, &y) - exact).abs());
    }
    result("taylor_residual_exactness", worst <= 1e-9, format!("worst |k − |Δa₁Δa₂|| = {worst:e} over 10³ pairs"))
}

fn affine(a: [[f64; 2]; 2], b: [f64; 2]) -> VectorFn {
    Arc::new(move |x: &[f64]| vec![a[0][0] * x[0] + a[0][1] * x[1] + b[0], a[1][0] * x[0] + a[1][1] * x[1] + b[1]])
}

fn unit_grid(n: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            out.push(vec![i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64]);
        }
    }
    out
}

fn contraction_machinery(_seed: u64) -> Result<CheckResult> {
    let samples = unit_grid(11);
    let margin = 0.2;
    let (c, delta2) = build_contraction(Arc::new(|x: &[f64]| x.to_vec()), &samples, AnchorPolicy::Centroid, margin)?;
    let alpha_ok = (c.alpha() - (1.0 - margin)).abs() <= 1e-12;
    let delta2_ok = (delta2 - margin * 0.5f64.hypot(0.5)).abs() <= 1e-12;

    let a = [[0.3, 0.1], [-0.2, 0.4]];
    let b = [1.0, -2.0];
    let det = (1.0 - a[0][0]) * (1.0 - a[1][1]) - a[0][1] * a[1][0];
    let exact = [((1.0 - a[1][1]) * b[0] + a[0][1] * b[1]) / det, (a[1][0] * b[0] + (1.0 - a[0][0]) * b[1]) / det];
    let (map, _): (ContractiveMap, f64) = build_contraction(affine(a, b), &samples, AnchorPolicy::Centroid, 0.1)?;
    let fp = fixed_point(&map, &[0.0, 0.0], 1e-12, 10_000)?;
    let fp_ok = map.alpha() == 1.0 && distance(&fp.x, &exact) <= 1e-9;

    let r = theorem1_radii(0.3, 0.0, 0.5)?;
    let radii_ok = (r.r_k - 0.6).abs() <= 1e-12 && r.r_z == 0.0 && (r.r_tilde - 0.6).abs() <= 1e-12;
    let r2 = theorem1_radii(0.1, 0.2, 0.75)?;
    let radii2_ok = (r2.r_z - 0.8).abs() <= 1e-12 && (r2.r_k - 1.2).abs() <= 1e-12 && (r2.r_tilde - 2.0).abs() <= 1e-12;
    let p2 = theorem1_part2_radius(3, 1, 0.5, 0.9, 0.8, 0.1, 0.05)?;
    let p2_expected = 0.8 * (1.0 + 0.9 + 0.81) * 0.1 / 0.5 + 0.05;
    let p2_ok = (p2 - p2_expected).abs() <= 1e-12;
    let est = estimated_response_radius(0.3, 0.1, 0.5)?;
    let est_ok = (est.radius - 0.4 * 2.0 / 0.5).abs() <= 1e-12;
    let ok = alpha_ok && delta2_ok && fp_ok && radii_ok && radii2_ok && p2_ok && est_ok;
    result(
        "contraction_machinery",
        ok,
        format!(
            "identity scaling {alpha_ok}/{delta2_ok}, affine fixed point {fp_ok}, radii {radii_ok}/{radii2_ok}, part two {p2_ok}, estimated {est_ok}"
        ),
    )
}

fn perturbation_gradients(_seed: u64) -> Result<CheckResult> {
    let params = CournotParams::default();
    let mu = params.nash_equilibrium();
    let bump = SigmoidBump { mu };
    let h = 1e-5;
    let worst_on = |lo: [f64; 2], width: f64| {
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            for j in 0..50 {
                let a = [lo[0] + width * i as f64 / 49.0, lo[1] + width * j as f64 / 49.0];
                let g = bump.half_gradients(&a);
                for (k, gk) in g.iter().enumerate() {
                    let (mut up, mut dn) = (a, a);
                    up[k] += h;
                    dn[k] -= h;
                    let fd = 0.5 * (bump.value(0, &up) - bump.value(0, &dn)) / (2.0 * h);
                    worst = worst.max((fd - gk).abs());
                }
            }
        }
        worst
    };
    let full = worst_on([0.0, 0.0], 400.0);
    // The bump is only felt within about one unit of μ.
    let near = worst_on([mu[0] - 2.0, mu[1] - 2.0], 4.0);
    result(
        "perturbation_gradients",
        full <= 1e-6 && near <= 1e-6,
        format!("worst mismatch {full:e} on a 50×50 grid of the box, {near:e} on a 50×50 grid around μ"),
    )
}

fn estimated_response(seed: u64) -> Result<CheckResult> {
    let params = CournotParams::default();
    let ne = params.nash_equilibrium();
    let est = Estimator::Geometric { rho: 0.5, magnitude: 10.0 };
    let nominal = nominal_game(&params);
    let bump: Arc<dyn CournotPerturbation> = Arc::new(SigmoidBump { mu: ne });
    let d1 = delta1_bound(bump.as_ref(), &params.bounds(), 400);
    let perturbed = perturbed_game(&params, bump, &d1);
    let radius = estimated_response_radius(d1.delta1, 0.0, 0.5)?.radius;
    let opts = IterateOptions::new(200);
    let mut worst_nominal: f64 = 0.0;
    let mut trapped = true;
    for (k, start) in crate::cournot::default_starts(params.a_bar).into_iter().enumerate() {
        let s = stream_seed(seed, k as u64);
        let t = estimated_response_iterate(UpdateRule::simultaneous_best(), &nominal, &start, est, s, &opts)?;
        worst_nominal = worst_nominal.max(distance(t.last_point(), &ne));
        let t = estimated_response_iterate(UpdateRule::simultaneous_best(), &perturbed, &start, est, s, &opts)?;
        trapped &= verify_trap(&t.points, &ne, radius, 0)?.all_inside_after.is_some();
    }
    result(
        "estimated_response",
        worst_nominal <= 1e-4 && trapped,
        format!("nominal final distance ≤ {worst_nominal:e}; perturbed tails inside radius {radius:.6}: {trapped}"),
    )
}

fn experiment_determinism(seed: u64) -> Result<CheckResult> {
    let config = ExperimentConfig {
        seed,
        estimator: Some(Estimator::Geometric { rho: 0.5, magnitude: 10.0 }),
        ..ExperimentConfig::default()
    };
    let a = serde_json::to_string(&run_experiment(&config)?)?;
    let b = serde_json::to_string(&run_experiment(&config)?)?;
    result("experiment_determinism", a == b, format!("two runs serialize to {} and {} bytes", a.len(), b.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_potential_case_is_exact_without_noise() {
        let (game, phi) = near_potential_case(3, &[3, 2, 4], 0.0).unwrap();
        let delta = potential_residual(&game, &PotentialCandidate::from(phi)).unwrap();
        assert!(delta < 1e-12);
        let (game, phi) = near_potential_case(3, &[3, 2, 4], 0.5).unwrap();
        let delta = potential_residual(&game, &PotentialCandidate::from(phi)).unwrap();
        assert!(delta > 0.0 && delta <= 2.0 + 1e-12);
    }

    #[test]
    fn unknown_suite_is_a_config_error() {
        assert!(matches!(run_suite("nope", 0), Err(Error::Config(_))));
    }

    #[test]
    fn cheap_checks_pass() {
        for name in ["taylor_residual_exactness", "contraction_machinery", "perturbation_gradients"] {
            let r = run_suite(name, 0).unwrap();
            assert_eq!(r.failed, 0, "{:?}", r.checks);
        }
    }
}
