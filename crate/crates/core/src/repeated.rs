//! Repeated simultaneous best response through the lens of a potential: the
//! multilinear extension U(f), the exact second-order residual k^t, the
//! per-step improvement bound, the ν-inflation of ε-equilibrium sets, and the
//! potential level sets that eventually hold the path of play.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contraction::Provenance;
use crate::dynamics::Trajectory;
use crate::game::{lipschitz_estimate, nu, FiniteGame, Game, PotentialTable, SmoothGame};
use crate::{distance, Error, Result};

/// U(f) = Σ_a φ(a)·f₁(a₁)⋯f_N(a_N) for per-player weight vectors `f`.
pub fn mixed_potential_u(phi: &PotentialTable, f: &[Vec<f64>]) -> Result<f64> {
    let shape = phi.shape();
    if f.len() != shape.len() || f.iter().zip(shape).any(|(fj, &n)| fj.len() != n) {
        return Err(Error::shape(format!(
            "weights of shape {:?} do not match potential of shape {shape:?}",
            f.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    let n = shape.len();
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    for &value in phi.values() {
        let w: f64 = idx.iter().enumerate().map(|(j, &a)| f[j][a]).product();
        total += w * value;
        for j in (0..n).rev() {
            idx[j] += 1;
            if idx[j] < shape[j] {
                break;
            }
            idx[j] = 0;
        }
    }
    Ok(total)
}

/// The 0/1 indicator weights of a finite-game profile.
pub fn one_hot(game: &FiniteGame, profile: &[usize]) -> Result<Vec<Vec<f64>>> {
    game.check_profile(profile)?;
    Ok(profile
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            let mut f = vec![0.0; game.action_count(j)];
            f[a] = 1.0;
            f
        })
        .collect())
}

/// k = |φ(y) − φ(x) − Σ_m [φ(y_m, x₋ₘ) − φ(x)]|, the part of a simultaneous
/// step's potential change not explained by the unilateral changes.
pub fn taylor_residual_k<A, F>(phi: &F, x: &[A], y: &[A]) -> f64
where
    A: Copy + PartialEq,
    F: Fn(&[A]) -> f64 + ?Sized,
{
    let base = phi(x);
    let mut unilateral = 0.0;
    let mut probe = x.to_vec();
    for m in 0..x.len() {
        if x[m] == y[m] {
            continue;
        }
        probe[m] = y[m];
        unilateral += phi(&probe) - base;
        probe[m] = x[m];
    }
    ((phi(y) - base) - unilateral).abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Violation {
    pub t: usize,
    pub increment: f64,
    /// ε − Nδ − k^t.
    pub bound: f64,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma6Report {
    pub delta: f64,
    pub epsilon: f64,
    /// Steps whose start lies outside 𝒳_ε.
    pub checked_steps: usize,
    /// Smallest increment − bound over checked steps.
    pub min_slack: Option<f64>,
    pub violations: Vec<Lemma6Violation>,
}

/// Checks φ(x^{t+1}) − φ(x^t) ≥ ε − Nδ − k^t at every step starting outside 𝒳_ε.
pub fn lemma6_check<G, F>(
    game: &G,
    trajectory: &Trajectory<G::Action>,
    phi: &F,
    delta: f64,
    epsilon: f64,
) -> Result<Lemma6Report>
where
    G: Game,
    F: Fn(&[G::Action]) -> f64 + ?Sized,
{
    if !(epsilon >= 0.0 && delta >= 0.0) {
        return Err(Error::domain(format!("need ε ≥ 0 and δ ≥ 0, got ε = {epsilon}, δ = {delta}")));
    }
    let n = game.player_count() as f64;
    let mut report = Lemma6Report { delta, epsilon, checked_steps: 0, min_slack: None, violations: Vec::new() };
    for (t, pair) in trajectory.states.windows(2).enumerate() {
        let (x, y) = (&pair[0], &pair[1]);
        if game.unilateral_max_gain(x)? <= epsilon {
            continue;
        }
        let (px, py) = (phi(x), phi(y));
        let k = taylor_residual_k(phi, x, y);
        let increment = py - px;
        let bound = epsilon - n * delta - k;
        let tol = 1e-9 * (1.0 + px.abs().max(py.abs()));
        report.checked_steps += 1;
        let slack = increment - bound;
        report.min_slack = Some(report.min_slack.map_or(slack, |s: f64| s.min(slack)));
        if slack < -tol {
            report.violations.push(Lemma6Violation { t, increment, bound, k });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L0Constant {
    pub value: f64,
    pub provenance: Provenance,
}

/// L⁰ = max_m 2·L_{u_m}, from the game's declared constants when every player has
/// one, otherwise from sampled estimates.
pub fn l_zero(game: &SmoothGame, sample_count: usize, seed: u64) -> Result<L0Constant> {
    let declared: Option<Vec<f64>> = game.lipschitz().iter().copied().collect();
    if let Some(ls) = declared {
        return Ok(L0Constant { value: 2.0 * ls.iter().copied().fold(0.0, f64::max), provenance: Provenance::Analytic });
    }
    let mut best: f64 = 0.0;
    for (m, u) in game.utilities().iter().enumerate() {
        let l = lipschitz_estimate(|x: &[f64]| u(x), game.bounds(), sample_count, seed.wrapping_add(m as u64))?;
        best = best.max(l);
    }
    Ok(L0Constant { value: 2.0 * best, provenance: Provenance::Sampled })
}

/// Whether y ∈ 𝒳_{α + L⁰‖x−y‖} given x ∈ 𝒳_α.
pub fn lemma7_check(game: &SmoothGame, x: &[f64], y: &[f64], alpha: f64, l0: f64) -> Result<bool> {
    let nu_x = nu(game, x)?;
    let tol = 1e-9 * (1.0 + alpha.abs());
    if nu_x < -alpha - tol {
        return Err(Error::domain(format!("x is not in 𝒳_α: ν(x) = {nu_x}, α = {alpha}")));
    }
    let radius = alpha + l0 * distance(x, y);
    Ok(nu(game, y)? >= -radius - 1e-9 * (1.0 + radius.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvariantMode {
    /// Suprema over t ≥ T₀ (R₅).
    Sup,
    /// Suprema over a final window as limsup surrogates (R₆).
    LimsupWindowed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantOptions {
    pub t0: usize,
    pub epsilon: f64,
    /// Potential residual of the game against φ.
    pub delta: f64,
    pub l0: L0Constant,
    pub mode: InvariantMode,
    /// Grid nodes per axis over Conv(𝒜).
    pub grid: usize,
    /// Fraction of the trajectory, counted from the end, used for limsup surrogates.
    pub window_fraction: f64,
}

impl InvariantOptions {
    pub fn new(t0: usize, epsilon: f64, delta: f64, l0: L0Constant) -> Self {
        InvariantOptions {
            t0,
            epsilon,
            delta,
            l0,
            mode: InvariantMode::Sup,
            grid: 200,
            window_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSetSpec {
    pub player_count: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub t0: usize,
    pub sup_k: f64,
    pub sup_w: f64,
    /// First step of the limsup window.
    pub window_start: usize,
    pub limsup_k: f64,
    pub limsup_w: f64,
    pub l0: L0Constant,
    #[serde(rename = "R4")]
    pub r4: f64,
    #[serde(rename = "R5")]
    pub r5: f64,
    #[serde(rename = "R6")]
    pub r6: f64,
    pub mode: InvariantMode,
    /// R₅ or R₆, depending on the mode.
    pub radius: f64,
    pub grid_resolution: usize,
    /// Grid nodes found in 𝒳_radius.
    pub grid_members: usize,
    /// Trajectory states found in 𝒳_radius.
    pub trajectory_members: usize,
    pub phi_threshold: f64,
    pub argmin: Vec<f64>,
}

impl InvariantSetSpec {
    pub fn contains(&self, phi_value: f64) -> bool {
        phi_value >= self.phi_threshold - 1e-9 * (1.0 + self.phi_threshold.abs())
    }
}

fn tail_sup(values: &[f64], from: usize) -> f64 {
    values[from..].iter().copied().fold(0.0, f64::max)
}

/// Builds the invariant set C = {x ∈ Conv(𝒜) : φ(x) ≥ min_{𝒳_R} φ}, where the
/// minimum is taken over a uniform grid of the game's box together with the
/// trajectory's own states.
pub fn build_invariant_set<F>(
    game: &SmoothGame,
    phi: &F,
    trajectory: &Trajectory<f64>,
    opts: &InvariantOptions,
) -> Result<InvariantSetSpec>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    build_invariant_set_on_points(game, phi, &trajectory.points, opts)
}

/// [`build_invariant_set`] for a path given by its real coordinates.
pub fn build_invariant_set_on_points<F>(
    game: &SmoothGame,
    phi: &F,
    points: &[Vec<f64>],
    opts: &InvariantOptions,
) -> Result<InvariantSetSpec>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    if !(opts.epsilon >= 0.0 && opts.delta >= 0.0 && opts.l0.value >= 0.0) {
        return Err(Error::domain("ε, δ and L⁰ must be nonnegative"));
    }
    if !(opts.window_fraction > 0.0 && opts.window_fraction <= 1.0) {
        return Err(Error::domain(format!("window fraction {} outside (0, 1]", opts.window_fraction)));
    }
    if opts.grid < 2 {
        return Err(Error::domain("grid needs at least 2 nodes per axis"));
    }
    let steps = points.len().saturating_sub(1);
    if opts.t0 >= steps {
        return Err(Error::domain(format!("T₀ = {} leaves no steps in a path of {steps} steps", opts.t0)));
    }
    let w: Vec<f64> = points.windows(2).map(|p| distance(&p[0], &p[1])).collect();
    let k: Vec<f64> = points.windows(2).map(|p| taylor_residual_k(phi, &p[0], &p[1])).collect();
    if let Some(t) = (0..steps).find(|&t| !(w[t].is_finite() && k[t].is_finite())) {
        return Err(Error::domain(format!("w^t or k^t is not finite at t = {t}")));
    }

    let n = game.player_count() as f64;
    let sup_k = tail_sup(&k, opts.t0);
    let sup_w = tail_sup(&w, opts.t0);
    let window_len = ((steps as f64 * opts.window_fraction).ceil() as usize).max(1);
    let window_start = (steps - window_len.min(steps)).max(opts.t0);
    let limsup_k = tail_sup(&k, window_start);
    let limsup_w = tail_sup(&w, window_start);
    let r4 = n * opts.delta + sup_k + opts.epsilon;
    let r5 = r4 + opts.l0.value * sup_w;
    let r6 = n * opts.delta + limsup_k + opts.epsilon + opts.l0.value * limsup_w;
    let radius = match opts.mode {
        InvariantMode::Sup => r5,
        InvariantMode::LimsupWindowed => r6,
    };

    let (grid_members, grid_best) = grid_min_phi(game, phi, radius, opts.grid)?;
    if grid_members == 0 {
        return Err(Error::Resolution(format!(
            "no node of the {}-per-axis grid lies in 𝒳_{radius}",
            opts.grid
        )));
    }
    let mut best = grid_best.expect("members found");
    let mut trajectory_members = 0;
    for p in points {
        if nu(game, p)? >= -radius {
            trajectory_members += 1;
            let v = phi(p);
            if v < best.0 {
                best = (v, p.clone());
            }
        }
    }

    Ok(InvariantSetSpec {
        player_count: game.player_count(),
        delta: opts.delta,
        epsilon: opts.epsilon,
        t0: opts.t0,
        sup_k,
        sup_w,
        window_start,
        limsup_k,
        limsup_w,
        l0: opts.l0,
        r4,
        r5,
        r6,
        mode: opts.mode,
        radius,
        grid_resolution: opts.grid,
        grid_members,
        trajectory_members,
        phi_threshold: best.0,
        argmin: best.1,
    })
}

/// Number of grid nodes in 𝒳_radius and the (φ, node) minimum among them.
fn grid_min_phi<F>(game: &SmoothGame, phi: &F, radius: f64, per_axis: usize) -> Result<(usize, Option<(f64, Vec<f64>)>)>
where
    F: Fn(&[f64]) -> f64 + Sync + ?Sized,
{
    let bounds = game.bounds();
    let dim = bounds.len();
    let total = per_axis
        .checked_pow(dim as u32)
        .filter(|&t| t <= 50_000_000)
        .ok_or_else(|| Error::domain(format!("grid of {per_axis}^{dim} nodes is too large")))?;
    let node = |k: usize| -> Vec<f64> {
        let mut rem = k;
        let mut x = vec![0.0; dim];
        for axis in (0..dim).rev() {
            let j = rem % per_axis;
            rem /= per_axis;
            let (lo, hi) = bounds[axis];
            x[axis] = if j + 1 == per_axis { hi } else { lo + (hi - lo) * j as f64 / (per_axis - 1) as f64 };
        }
        x
    };
    let found: Vec<Option<(f64, usize)>> = (0..total)
        .into_par_iter()
        .map(|k| {
            let x = node(k);
            nu(game, &x).map(|v| (v >= -radius).then(|| (phi(&x), k)))
        })
        .collect::<Result<_>>()?;
    let members = found.iter().flatten().count();
    let best = found
        .into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
        .map(|(v, k)| (v, node(k)));
    Ok((members, best))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem4Report {
    /// First index T₁ ≥ T₀ with x^{T₁} ∈ C.
    pub entry_index: Option<usize>,
    /// Indices after the entry whose state leaves C.
    pub post_entry_violations: Vec<usize>,
    /// First index ≥ T₀ at which the path is in 𝒳_{R₄}.
    pub r4_visit_index: Option<usize>,
    pub holds: bool,
}

/// Checks that the path enters C at or after T₀ and never leaves it, and that it
/// visits 𝒳_{R₄} at least once after T₀.
pub fn theorem4_verify<F>(game: &SmoothGame, phi: &F, points: &[Vec<f64>], spec: &InvariantSetSpec) -> Result<Theorem4Report>
where
    F: Fn(&[f64]) -> f64 + ?Sized,
{
    let mut entry_index = None;
    let mut post_entry_violations = Vec::new();
    let mut r4_visit_index = None;
    for (t, p) in points.iter().enumerate().skip(spec.t0) {
        let inside = spec.contains(phi(p));
        match entry_index {
            None if inside => entry_index = Some(t),
            Some(_) if !inside => post_entry_violations.push(t),
            _ => {}
        }
        if r4_visit_index.is_none() && nu(game, p)? >= -spec.r4 - 1e-9 * (1.0 + spec.r4) {
            r4_visit_index = Some(t);
        }
    }
    Ok(Theorem4Report {
        holds: entry_index.is_some() && post_entry_violations.is_empty() && r4_visit_index.is_some(),
        entry_index,
        post_entry_violations,
        r4_visit_index,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_game() -> FiniteGame {
        FiniteGame::from_fn(vec![vec![0.0, 1.0, 2.0], vec![0.0, 1.0]], |i, v| v[0] * v[1] - (i as f64) * v[0]).unwrap()
    }

    #[test]
    fn one_hot_weights_pick_the_table_entry() {
        let g = small_game();
        let phi = PotentialTable::from_fn(&g, |v| 3.0 * v[0] - v[1] * v[1] + v[0] * v[1]).unwrap();
        for p in g.profiles() {
            let f = one_hot(&g, &p).unwrap();
            assert_eq!(mixed_potential_u(&phi, &f).unwrap(), phi.at(&g, &p));
        }
        let uniform = vec![vec![1.0 / 3.0; 3], vec![0.5; 2]];
        let mean = phi.values().iter().sum::<f64>() / 6.0;
        assert!((mixed_potential_u(&phi, &uniform).unwrap() - mean).abs() < 1e-12);
        assert!(mixed_potential_u(&phi, &[vec![1.0; 3]]).is_err());
    }

    #[test]
    fn residual_of_cross_term() {
        let phi = |a: &[f64]| 400.0 * (a[0] + a[1]) - a[0] * a[0] - a[1] * a[1] - a[0] * a[1];
        assert_eq!(taylor_residual_k(&phi, &[0.0, 0.0], &[100.0, 150.0]), 15000.0);
        assert_eq!(taylor_residual_k(&phi, &[3.0, 7.0], &[3.0, 7.0]), 0.0);
        assert_eq!(taylor_residual_k(&phi, &[3.0, 7.0], &[5.5, 7.0]), 0.0);
    }

    #[test]
    fn lemma7_rejects_unverified_premise() {
        let g = small_game().interpolated();
        let x = [0.0, 0.0];
        let gain = g.max_gain(&x).unwrap();
        assert!(lemma7_check(&g, &x, &x, gain, 0.0).unwrap());
        if gain > 0.0 {
            assert!(lemma7_check(&g, &x, &x, 0.5 * gain, 0.0).is_err());
        }
    }
}
