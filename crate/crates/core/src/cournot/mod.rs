//! Cournot duopoly: inverse demand P = max{d − Q, 0}, constant marginal costs,
//! best-response dynamics with and without additive payoff shifters.

mod experiment;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use experiment::{
    default_starts, run_experiment, ExperimentConfig, ExperimentReport, ExperimentRun, Mode, MuSpec,
    StartSpec, Variant, TAIL_FROM,
};

use crate::game::{FiniteGame, PotentialTable, Responder, ScalarFn, SmoothGame};
use crate::rootfind::{safeguarded_newton, NewtonOptions, RootFindError};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CournotParams {
    /// Demand intercept.
    pub d: f64,
    pub c1: f64,
    pub c2: f64,
    /// Upper end of each player's quantity interval.
    pub a_bar: f64,
}

impl Default for CournotParams {
    fn default() -> Self {
        CournotParams { d: 400.0, c1: 200.0, c2: 100.0, a_bar: 400.0 }
    }
}

impl CournotParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.d, self.c1, self.c2, self.a_bar];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("Cournot parameters must be finite"));
        }
        if !(self.c1 >= 0.0 && self.c2 >= 0.0 && self.d >= self.c1.max(self.c2)) {
            return Err(Error::domain(format!(
                "need d ≥ max(c1, c2) ≥ 0, got d = {}, c1 = {}, c2 = {}",
                self.d, self.c1, self.c2
            )));
        }
        if !(self.a_bar > 0.0) {
            return Err(Error::domain(format!("a_bar = {} must be positive", self.a_bar)));
        }
        Ok(())
    }

    pub fn cost(&self, player: usize) -> f64 {
        if player == 0 {
            self.c1
        } else {
            self.c2
        }
    }

    pub fn bounds(&self) -> Vec<(f64, f64)> {
        vec![(0.0, self.a_bar); 2]
    }

    /// Closed-form Nash equilibrium ((d−2c₁+c₂)/3, (d−2c₂+c₁)/3) of the interior regime.
    pub fn nash_equilibrium(&self) -> [f64; 2] {
        [
            (self.d - 2.0 * self.c1 + self.c2) / 3.0,
            (self.d - 2.0 * self.c2 + self.c1) / 3.0,
        ]
    }
}

fn check_player(player: usize) -> Result<()> {
    if player > 1 {
        return Err(Error::domain(format!("player {player} out of range for a duopoly")));
    }
    Ok(())
}

/// uᵢ(a) = aᵢ·(max{d − a₁ − a₂, 0} − cᵢ).
pub fn cournot_utility(params: &CournotParams, player: usize, a: &[f64]) -> f64 {
    let price = (params.d - a[0] - a[1]).max(0.0);
    a[player] * (price - params.cost(player))
}

/// φ(a) = d(a₁+a₂) − (a₁²+a₂²) − a₁a₂ − c₁a₁ − c₂a₂.
pub fn cournot_potential(params: &CournotParams, a: &[f64]) -> f64 {
    let (a1, a2) = (a[0], a[1]);
    params.d * (a1 + a2) - (a1 * a1 + a2 * a2) - a1 * a2 - params.c1 * a1 - params.c2 * a2
}

/// max{0, (d − aⱼ − cᵢ)/2}, capped at a_bar.
pub fn nominal_best_response(params: &CournotParams, player: usize, a: &[f64]) -> f64 {
    let other = a[1 - player];
    ((params.d - other - params.cost(player)) / 2.0).clamp(0.0, params.a_bar)
}

/// Simultaneous nominal best response Z(a).
pub fn nominal_br_step(params: &CournotParams, a: &[f64]) -> [f64; 2] {
    [nominal_best_response(params, 0, a), nominal_best_response(params, 1, a)]
}

/// Nominal best response of `player` only; the other quantity is kept.
pub fn nominal_br_sequential(params: &CournotParams, a: &[f64], player: usize) -> Result<[f64; 2]> {
    check_player(player)?;
    let mut next = [a[0], a[1]];
    next[player] = nominal_best_response(params, player, a);
    Ok(next)
}

/// A-priori bound M = |∫₀^ā₁∫₀^ā₂ φ| used for the second-order remainder, with a
/// single cost `c` (default (c₁+c₂)/2).
pub fn taylor_m(params: &CournotParams, a_bar1: f64, a_bar2: f64, c: Option<f64>) -> f64 {
    let c = c.unwrap_or((params.c1 + params.c2) / 2.0);
    let (x, y) = (a_bar1, a_bar2);
    ((params.d - c) * (x * x * y + x * y * y) / 2.0
        - ((x.powi(3) * y + x * y.powi(3)) / 3.0 + x * x * y * y / 4.0))
        .abs()
}

/// An additive payoff shifter Δuᵢ with the derivatives the perturbed response needs.
pub trait CournotPerturbation: Send + Sync + std::fmt::Debug {
    fn value(&self, player: usize, a: &[f64]) -> f64;

    /// ∇Δuᵢ(a).
    fn gradient(&self, player: usize, a: &[f64]) -> [f64; 2];

    /// ½·∂Δuᵢ/∂aᵢ.
    fn half_gradient(&self, player: usize, a: &[f64]) -> f64 {
        0.5 * self.gradient(player, a)[player]
    }

    /// ∂/∂aᵢ of [`Self::half_gradient`].
    fn half_gradient_derivative(&self, player: usize, a: &[f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct NoPerturbation;

impl CournotPerturbation for NoPerturbation {
    fn value(&self, _player: usize, _a: &[f64]) -> f64 {
        0.0
    }

    fn gradient(&self, _player: usize, _a: &[f64]) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn half_gradient_derivative(&self, _player: usize, _a: &[f64]) -> f64 {
        0.0
    }
}

/// Δu₁ = Δu₂ = σ(s²) with s = (a₁−μ₁)² + (a₂−μ₂)² and σ the logistic function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidBump {
    pub mu: [f64; 2],
}

/// σ(z) and σ'(z) for z ≥ 0, written in terms of e^{−z} ≤ 1.
fn logistic(z: f64) -> (f64, f64) {
    let e = (-z).exp();
    let s = 1.0 / (1.0 + e);
    (s, e / ((1.0 + e) * (1.0 + e)))
}

impl SigmoidBump {
    fn offsets(&self, a: &[f64]) -> (f64, f64, f64) {
        let x = a[0] - self.mu[0];
        let y = a[1] - self.mu[1];
        (x, y, x * x + y * y)
    }

    /// The displayed half partial derivatives (g₁, g₂) = ½·(∂Δu/∂a₁, ∂Δu/∂a₂).
    pub fn half_gradients(&self, a: &[f64]) -> [f64; 2] {
        let (x, y, s) = self.offsets(a);
        let (_, ds) = logistic(s * s);
        [2.0 * x * s * ds, 2.0 * y * s * ds]
    }
}

impl CournotPerturbation for SigmoidBump {
    fn value(&self, _player: usize, a: &[f64]) -> f64 {
        let (_, _, s) = self.offsets(a);
        logistic(s * s).0
    }

    fn gradient(&self, _player: usize, a: &[f64]) -> [f64; 2] {
        let [g1, g2] = self.half_gradients(a);
        [2.0 * g1, 2.0 * g2]
    }

    fn half_gradient(&self, player: usize, a: &[f64]) -> f64 {
        self.half_gradients(a)[player]
    }

    fn half_gradient_derivative(&self, player: usize, a: &[f64]) -> f64 {
        let (x, y, s) = self.offsets(a);
        let v = if player == 0 { x } else { y };
        let (sig, ds) = logistic(s * s);
        let dds = ds * (1.0 - 2.0 * sig);
        2.0 * ds * (s + 2.0 * v * v) + 8.0 * v * v * s * s * dds
    }
}

/// Outcome of one perturbed best-response solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbedResponse {
    pub action: f64,
    /// |g(action)| for the first-order condition g; zero when clamped.
    pub residual: f64,
    /// The condition had no nonnegative root and the action was set to 0.
    pub clamped: bool,
    pub iterations: usize,
}

/// gᵢ(t) = −t + (d − aⱼ − cᵢ)/2 + ½·∂Δuᵢ/∂aᵢ evaluated with aᵢ = t.
pub fn perturbed_condition(
    params: &CournotParams,
    pert: &dyn CournotPerturbation,
    player: usize,
    a: &[f64],
    t: f64,
) -> f64 {
    let mut p = [a[0], a[1]];
    p[player] = t;
    -t + (params.d - a[1 - player] - params.cost(player)) / 2.0 + pert.half_gradient(player, &p)
}

/// Solves the perturbed first-order condition of `player` against `a` on [0, d].
pub fn perturbed_best_response(
    params: &CournotParams,
    pert: &dyn CournotPerturbation,
    player: usize,
    a: &[f64],
) -> Result<PerturbedResponse> {
    check_player(player)?;
    let g = |t: f64| perturbed_condition(params, pert, player, a, t);
    let dg = |t: f64| {
        let mut p = [a[0], a[1]];
        p[player] = t;
        -1.0 + pert.half_gradient_derivative(player, &p)
    };
    let hi = params.d;
    let g0 = g(0.0);
    if !g0.is_finite() {
        return Err(RootFindError::NonFinite { x: 0.0 }.into());
    }
    if g0 <= 0.0 {
        return Ok(PerturbedResponse { action: 0.0, residual: 0.0, clamped: g0 < 0.0, iterations: 0 });
    }
    let x0 = nominal_best_response(params, player, a).clamp(0.0, hi);
    let root = safeguarded_newton(g, dg, 0.0, hi, x0, NewtonOptions::default())?;
    Ok(PerturbedResponse {
        action: root.x.min(params.a_bar),
        residual: root.residual.abs(),
        clamped: false,
        iterations: root.iterations,
    })
}

/// Simultaneous perturbed best response K(a).
pub fn perturbed_br_step(params: &CournotParams, pert: &dyn CournotPerturbation, a: &[f64]) -> Result<[f64; 2]> {
    Ok([
        perturbed_best_response(params, pert, 0, a)?.action,
        perturbed_best_response(params, pert, 1, a)?.action,
    ])
}

/// Lipschitz constants of the nominal utilities on the box.
///
/// On {a₁+a₂ ≤ d} each ‖∇uᵢ‖² is a convex quadratic, so its maximum over the
/// polygon box ∩ {a₁+a₂ ≤ d} sits at a vertex; beyond the price floor
/// ∇uᵢ = (−cᵢ) eᵢ.
pub fn utility_lipschitz(params: &CournotParams) -> [f64; 2] {
    let (d, ab) = (params.d, params.a_bar);
    let mut vertices: Vec<[f64; 2]> = [[0.0, 0.0], [ab, 0.0], [0.0, ab], [ab, ab]]
        .into_iter()
        .filter(|v| v[0] + v[1] <= d)
        .collect();
    for (fixed, free) in [(0.0, 0), (ab, 0), (0.0, 1), (ab, 1)] {
        let t = d - fixed;
        if (0.0..=ab).contains(&t) {
            let mut v = [0.0; 2];
            v[free] = t;
            v[1 - free] = fixed;
            vertices.push(v);
        }
    }
    let beyond_floor = 2.0 * ab > d;
    let mut out = [0.0f64; 2];
    for (i, l) in out.iter_mut().enumerate() {
        let ci = params.cost(i);
        for v in &vertices {
            let own = d - 2.0 * v[i] - v[1 - i] - ci;
            *l = l.max(own.hypot(v[i]));
        }
        if beyond_floor {
            *l = l.max(ci);
        }
    }
    out
}

/// Largest ‖∇Δuᵢ‖ over a `per_axis`² grid of the box, per player.
pub fn perturbation_gradient_max(pert: &dyn CournotPerturbation, bounds: &[(f64, f64)], per_axis: usize) -> [f64; 2] {
    let n = per_axis.max(2);
    let node = |(lo, hi): (f64, f64), j: usize| if j + 1 == n { hi } else { lo + (hi - lo) * j as f64 / (n - 1) as f64 };
    let mut out = [0.0f64; 2];
    for j1 in 0..n {
        for j2 in 0..n {
            let a = [node(bounds[0], j1), node(bounds[1], j2)];
            for (i, o) in out.iter_mut().enumerate() {
                let g = pert.gradient(i, &a);
                *o = o.max(g[0].hypot(g[1]));
            }
        }
    }
    out
}

/// Safety factor applied to grid maxima of ‖∇Δuᵢ‖.
pub const DELTA1_SAFETY: f64 = 1.05;

/// Per-player Lipschitz bounds L_{Δuᵢ} and δ₁ = √(L²_{Δu₁} + L²_{Δu₂}).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Delta1Bound {
    pub lipschitz: [f64; 2],
    pub delta1: f64,
    pub grid_per_axis: usize,
}

pub fn delta1_bound(pert: &dyn CournotPerturbation, bounds: &[(f64, f64)], per_axis: usize) -> Delta1Bound {
    let g = perturbation_gradient_max(pert, bounds, per_axis);
    let lipschitz = [DELTA1_SAFETY * g[0], DELTA1_SAFETY * g[1]];
    Delta1Bound { lipschitz, delta1: lipschitz[0].hypot(lipschitz[1]), grid_per_axis: per_axis.max(2) }
}

/// The nominal duopoly on [0, a_bar]² with closed-form best responses.
pub fn nominal_game(params: &CournotParams) -> SmoothGame {
    let p = *params;
    let utilities: Vec<ScalarFn> = (0..2)
        .map(|i| Arc::new(move |a: &[f64]| cournot_utility(&p, i, a)) as ScalarFn)
        .collect();
    let responders: Vec<Option<Responder>> = (0..2)
        .map(|i| Some(Arc::new(move |a: &[f64]| Ok(nominal_best_response(&p, i, a))) as Responder))
        .collect();
    let l = utility_lipschitz(params);
    SmoothGame::new(params.bounds(), utilities)
        .expect("validated parameters give a valid box")
        .with_responders(responders)
        .expect("two responders")
        .with_lipschitz(vec![Some(l[0]), Some(l[1])])
        .expect("two constants")
}

/// The perturbed duopoly u^M = u + Δu whose responses solve the perturbed
/// first-order conditions.
pub fn perturbed_game(params: &CournotParams, pert: Arc<dyn CournotPerturbation>, delta: &Delta1Bound) -> SmoothGame {
    let p = *params;
    let utilities: Vec<ScalarFn> = (0..2)
        .map(|i| {
            let pert = Arc::clone(&pert);
            Arc::new(move |a: &[f64]| cournot_utility(&p, i, a) + pert.value(i, a)) as ScalarFn
        })
        .collect();
    let responders: Vec<Option<Responder>> = (0..2)
        .map(|i| {
            let pert = Arc::clone(&pert);
            Some(Arc::new(move |a: &[f64]| Ok(perturbed_best_response(&p, pert.as_ref(), i, a)?.action)) as Responder)
        })
        .collect();
    let l = utility_lipschitz(params);
    SmoothGame::new(params.bounds(), utilities)
        .expect("validated parameters give a valid box")
        .with_responders(responders)
        .expect("two responders")
        .with_lipschitz(vec![Some(l[0] + delta.lipschitz[0]), Some(l[1] + delta.lipschitz[1])])
        .expect("two constants")
}

/// Integer quantities 0, 1, …, `max_quantity` for both players.
pub fn integer_grid(max_quantity: usize) -> Vec<f64> {
    (0..=max_quantity).map(|q| q as f64).collect()
}

/// The duopoly restricted to `grid` × `grid`, optionally with payoff shifters.
pub fn discretized_game(params: &CournotParams, grid: &[f64], pert: Option<&dyn CournotPerturbation>) -> Result<FiniteGame> {
    FiniteGame::from_fn(vec![grid.to_vec(), grid.to_vec()], |i, a| {
        cournot_utility(params, i, a) + pert.map_or(0.0, |p| p.value(i, a))
    })
}

/// φ tabulated over a discretized game.
pub fn discretized_potential(params: &CournotParams, game: &FiniteGame) -> Result<PotentialTable> {
    PotentialTable::from_fn(game, |a| cournot_potential(params, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> CournotParams {
        CournotParams::default()
    }

    #[test]
    fn closed_forms() {
        let p = params();
        assert_eq!(cournot_utility(&p, 0, &[100.0, 150.0]), -5000.0);
        assert_eq!(cournot_utility(&p, 0, &[0.0, 77.0]), 0.0);
        assert_eq!(cournot_utility(&p, 1, &[300.0, 200.0]), -200.0 * 100.0);
        assert_eq!(nominal_br_step(&p, &[0.0, 0.0]), [100.0, 150.0]);
        assert_eq!(nominal_best_response(&p, 0, &[0.0, 250.0]), 0.0);
        let ne = p.nash_equilibrium();
        let z = nominal_br_step(&p, &ne);
        assert!((z[0] - ne[0]).abs() < 1e-12 && (z[1] - ne[1]).abs() < 1e-12);
        assert_eq!(cournot_potential(&p, &[0.0, 0.0]), 0.0);
        assert!(nominal_br_sequential(&p, &[0.0, 0.0], 2).is_err());
        assert_eq!(nominal_br_sequential(&p, &[0.0, 0.0], 1).unwrap(), [0.0, 150.0]);
    }

    #[test]
    fn symmetric_cost_potential_peak() {
        let p = CournotParams { c1: 100.0, c2: 100.0, ..params() };
        let peak = (p.d - 100.0) / 3.0;
        let top = cournot_potential(&p, &[peak, peak]);
        assert!((top - 300.0f64.powi(2) / 3.0).abs() < 1e-9);
        for (dx, dy) in [(1.0, 0.0), (0.0, -1.0), (0.5, 0.5), (-0.3, 0.7)] {
            assert!(cournot_potential(&p, &[peak + dx, peak + dy]) < top);
        }
    }

    #[test]
    fn taylor_m_cases() {
        let p = params();
        let c = 150.0;
        for a in [0.0f64, 1.0, 50.0, 400.0] {
            let special = ((p.d - c) * a.powi(3) - 11.0 / 12.0 * a.powi(4)).abs();
            assert!((taylor_m(&p, a, a, None) - special).abs() <= 1e-12 * (1.0 + special));
        }
        assert_eq!(taylor_m(&p, 0.0, 0.0, Some(100.0)), 0.0);
    }

    #[test]
    fn zero_perturbation_reproduces_nominal() {
        let p = params();
        for a in [[0.0, 0.0], [400.0, 0.0], [10.0, 250.0], [123.4, 56.7]] {
            let k = perturbed_br_step(&p, &NoPerturbation, &a).unwrap();
            let z = nominal_br_step(&p, &a);
            assert!((k[0] - z[0]).abs() < 1e-12 && (k[1] - z[1]).abs() < 1e-12, "{a:?}");
        }
    }

    #[test]
    fn bump_derivatives_match_finite_differences() {
        let b = SigmoidBump { mu: [100.0 / 3.0, 400.0 / 3.0] };
        for a in [[33.0, 133.5], [34.1, 132.9], [32.5, 134.0], [100.0, 100.0]] {
            for i in 0..2 {
                let h = 1e-6;
                let mut up = a;
                let mut dn = a;
                up[i] += h;
                dn[i] -= h;
                let fd = (b.half_gradient(i, &up) - b.half_gradient(i, &dn)) / (2.0 * h);
                assert!((fd - b.half_gradient_derivative(i, &a)).abs() < 1e-5, "{a:?} {i}");
            }
        }
        assert_eq!(b.half_gradients(&b.mu), [0.0, 0.0]);
    }

    #[test]
    fn lipschitz_vertices() {
        let l = utility_lipschitz(&params());
        assert!((l[0] - 600.0f64.hypot(400.0)).abs() < 1e-9);
        assert!((l[1] - 400.0f64.hypot(500.0)).abs() < 1e-9);
    }
}
