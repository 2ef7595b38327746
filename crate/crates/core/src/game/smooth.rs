use std::sync::Arc;

use super::{Game, ScalarFn};
use crate::{Error, Result};

/// Best-response oracle for one player: maps a full profile to that player's response.
pub type Responder = Arc<dyn Fn(&[f64]) -> Result<f64> + Send + Sync>;

/// Two real actions closer than this are the same action.
pub const DEFAULT_ACTION_TOL: f64 = 1e-9;

/// A game on a box of real actions, given by utility evaluators.
///
/// Inner maximisation (best responses, ν) uses, in order of preference: a
/// per-player oracle, an explicit list of admissible actions, or a uniform grid
/// refined once around its best node.
#[derive(Clone)]
pub struct SmoothGame {
    bounds: Vec<(f64, f64)>,
    utilities: Vec<ScalarFn>,
    responders: Vec<Option<Responder>>,
    action_lists: Option<Vec<Vec<f64>>>,
    grid_points: Option<usize>,
    lipschitz: Vec<Option<f64>>,
    action_tol: f64,
}

impl std::fmt::Debug for SmoothGame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SmoothGame")
            .field("bounds", &self.bounds)
            .field("oracles", &self.responders.iter().map(Option::is_some).collect::<Vec<_>>())
            .field("action_lists", &self.action_lists.as_ref().map(|l| l.iter().map(Vec::len).collect::<Vec<_>>()))
            .field("grid_points", &self.grid_points)
            .field("lipschitz", &self.lipschitz)
            .field("action_tol", &self.action_tol)
            .finish()
    }
}

impl SmoothGame {
    pub fn new(bounds: Vec<(f64, f64)>, utilities: Vec<ScalarFn>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::shape("a game needs at least one player"));
        }
        if utilities.len() != bounds.len() {
            return Err(Error::shape(format!(
                "{} utility evaluators for {} players",
                utilities.len(),
                bounds.len()
            )));
        }
        for (i, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::domain(format!("invalid interval [{lo}, {hi}] for player {i}")));
            }
        }
        let n = bounds.len();
        Ok(SmoothGame {
            bounds,
            utilities,
            responders: vec![None; n],
            action_lists: None,
            grid_points: None,
            lipschitz: vec![None; n],
            action_tol: DEFAULT_ACTION_TOL,
        })
    }

    pub fn with_responders(mut self, responders: Vec<Option<Responder>>) -> Result<Self> {
        if responders.len() != self.bounds.len() {
            return Err(Error::shape("one (optional) responder per player is required"));
        }
        self.responders = responders;
        Ok(self)
    }

    /// Restricts deviations to explicit per-player action lists.
    pub fn with_action_lists(mut self, lists: Vec<Vec<f64>>) -> Result<Self> {
        if lists.len() != self.bounds.len() {
            return Err(Error::shape("one action list per player is required"));
        }
        for (i, (list, &(lo, hi))) in lists.iter().zip(&self.bounds).enumerate() {
            if list.is_empty() {
                return Err(Error::shape(format!("empty action list for player {i}")));
            }
            if list.iter().any(|&a| !(a >= lo - self.action_tol && a <= hi + self.action_tol)) {
                return Err(Error::domain(format!("action list of player {i} leaves [{lo}, {hi}]")));
            }
        }
        self.action_lists = Some(lists);
        Ok(self)
    }

    /// Enables two-stage grid maximisation with `points` nodes per stage.
    pub fn with_grid(mut self, points: usize) -> Self {
        self.grid_points = Some(points.max(2));
        self
    }

    pub fn with_lipschitz(mut self, constants: Vec<Option<f64>>) -> Result<Self> {
        if constants.len() != self.bounds.len() {
            return Err(Error::shape("one (optional) Lipschitz constant per player is required"));
        }
        self.lipschitz = constants;
        Ok(self)
    }

    pub fn with_action_tol(mut self, tol: f64) -> Self {
        self.action_tol = tol;
        self
    }

    pub fn player_count(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn utilities(&self) -> &[ScalarFn] {
        &self.utilities
    }

    pub fn responders(&self) -> &[Option<Responder>] {
        &self.responders
    }

    pub fn action_lists(&self) -> Option<&[Vec<f64>]> {
        self.action_lists.as_deref()
    }

    pub fn grid_points(&self) -> Option<usize> {
        self.grid_points
    }

    pub fn lipschitz(&self) -> &[Option<f64>] {
        &self.lipschitz
    }

    pub fn action_tol(&self) -> f64 {
        self.action_tol
    }

    pub fn utility_at(&self, player: usize, x: &[f64]) -> f64 {
        (self.utilities[player])(x)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (xi, &(lo, hi)) in x.iter_mut().zip(&self.bounds) {
            *xi = xi.clamp(lo, hi);
        }
    }

    pub fn check_profile(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.player_count() {
            return Err(Error::domain(format!(
                "profile has {} coordinates, game has {} players",
                x.len(),
                self.player_count()
            )));
        }
        for (i, (&xi, &(lo, hi))) in x.iter().zip(&self.bounds).enumerate() {
            if !(xi >= lo - self.action_tol && xi <= hi + self.action_tol) {
                return Err(Error::domain(format!("action {xi} of player {i} outside [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.player_count() {
            return Err(Error::domain(format!(
                "player {player} out of range for a {}-player game",
                self.player_count()
            )));
        }
        Ok(())
    }

    fn deviated(&self, player: usize, x: &[f64], a: f64) -> f64 {
        let mut y = x.to_vec();
        y[player] = a;
        self.utility_at(player, &y)
    }

    /// Argmax over a candidate list; ties go to the earliest candidate and the
    /// incumbent wins when nothing beats it.
    fn argmax_over<I: IntoIterator<Item = f64>>(&self, player: usize, x: &[f64], candidates: I) -> (f64, f64) {
        let incumbent_u = self.utility_at(player, x);
        let mut best = (x[player], incumbent_u);
        let mut found_better = false;
        for a in candidates {
            let u = self.deviated(player, x, a);
            if u > best.1 {
                best = (a, u);
                found_better = true;
            }
        }
        if !found_better {
            return (x[player], incumbent_u);
        }
        best
    }

    fn grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
        let n = n.max(2);
        (0..n).map(move |k| if k + 1 == n { hi } else { lo + (hi - lo) * k as f64 / (n - 1) as f64 })
    }

    /// Best action for `player` against `x` and its utility.
    pub fn best_deviation(&self, player: usize, x: &[f64]) -> Result<(f64, f64)> {
        self.check_player(player)?;
        if let Some(r) = &self.responders[player] {
            let (lo, hi) = self.bounds[player];
            let a = r(x)?.clamp(lo, hi);
            return Ok((a, self.deviated(player, x, a)));
        }
        if let Some(lists) = &self.action_lists {
            return Ok(self.argmax_over(player, x, lists[player].iter().copied()));
        }
        if let Some(n) = self.grid_points {
            let (lo, hi) = self.bounds[player];
            if hi <= lo {
                return Ok((lo, self.deviated(player, x, lo)));
            }
            let coarse = self.argmax_over(player, x, Self::grid(lo, hi, n));
            let h = (hi - lo) / (n.max(2) - 1) as f64;
            let (rlo, rhi) = ((coarse.0 - h).max(lo), (coarse.0 + h).min(hi));
            let mut probe = x.to_vec();
            probe[player] = coarse.0;
            let refined = self.argmax_over(player, &probe, Self::grid(rlo, rhi, n));
            let incumbent_u = self.utility_at(player, x);
            return Ok(if refined.1 > incumbent_u { refined } else { (x[player], incumbent_u) });
        }
        Err(Error::config(format!(
            "player {player} has no best-response oracle, action list or grid"
        )))
    }

    /// Largest unilateral gain available at `x` (−ν(x)).
    pub fn max_gain(&self, x: &[f64]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for i in 0..self.player_count() {
            let (_, u) = self.best_deviation(i, x)?;
            worst = worst.max(u - self.utility_at(i, x));
        }
        Ok(worst)
    }
}

/// ν(x) = −max over players m and deviations pₘ of uₘ(pₘ, x₋ₘ) − uₘ(x); x ∈ 𝒳_ε iff ν(x) ≥ −ε.
pub fn nu(game: &SmoothGame, x: &[f64]) -> Result<f64> {
    if x.len() != game.player_count() {
        return Err(Error::domain("profile length does not match player count"));
    }
    Ok(-game.max_gain(x)?)
}

impl Game for SmoothGame {
    type Action = f64;

    fn player_count(&self) -> usize {
        self.bounds.len()
    }

    fn validate_profile(&self, profile: &[f64]) -> Result<()> {
        self.check_profile(profile)
    }

    fn action_value(&self, _player: usize, action: f64) -> f64 {
        action
    }

    fn utility(&self, player: usize, profile: &[f64]) -> f64 {
        self.utility_at(player, profile)
    }

    fn best_action(&self, player: usize, profile: &[f64]) -> Result<f64> {
        Ok(self.best_deviation(player, profile)?.0)
    }

    fn first_improving_action(&self, player: usize, profile: &[f64]) -> Result<Option<f64>> {
        self.check_player(player)?;
        let base = self.utility_at(player, profile);
        let incumbent = profile[player];
        let scan = |mut cands: &mut dyn Iterator<Item = f64>| {
            Iterator::find(&mut cands, |&a| {
                (a - incumbent).abs() > self.action_tol && self.deviated(player, profile, a) > base
            })
        };
        if let Some(lists) = &self.action_lists {
            return Ok(scan(&mut lists[player].iter().copied()));
        }
        if let Some(n) = self.grid_points {
            let (lo, hi) = self.bounds[player];
            return Ok(scan(&mut Self::grid(lo, hi, n)));
        }
        if self.responders[player].is_some() {
            let a = self.best_action(player, profile)?;
            return Ok(self.improves(player, profile, a).then_some(a));
        }
        Err(Error::config(format!(
            "player {player} has no best-response oracle, action list or grid"
        )))
    }

    fn improves(&self, player: usize, profile: &[f64], candidate: f64) -> bool {
        if self.same_action(candidate, profile[player]) {
            return false;
        }
        // An oracle's response is a move by definition; otherwise require a strict gain.
        self.responders[player].is_some() || self.deviated(player, profile, candidate) > self.utility_at(player, profile)
    }

    fn unilateral_max_gain(&self, profile: &[f64]) -> Result<f64> {
        self.max_gain(profile)
    }

    fn same_action(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.action_tol
    }

    fn action_key(&self, _action: f64) -> Option<u64> {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic() -> SmoothGame {
        // u_i = -(x_i - 0.3 x_j - 1)^2
        let u = |i: usize| -> ScalarFn {
            Arc::new(move |x: &[f64]| {
                let j = 1 - i;
                -(x[i] - 0.3 * x[j] - 1.0).powi(2)
            })
        };
        SmoothGame::new(vec![(0.0, 4.0), (0.0, 4.0)], vec![u(0), u(1)]).unwrap()
    }

    #[test]
    fn missing_oracle_is_config_error() {
        let g = quadratic();
        assert!(matches!(nu(&g, &[0.0, 0.0]), Err(Error::Config(_))));
    }

    #[test]
    fn two_stage_grid_finds_interior_maximum() {
        let g = quadratic().with_grid(101);
        let (a, _) = g.best_deviation(0, &[0.0, 2.0]).unwrap();
        // The refined stage has spacing 2h/(n-1) = 0.0016.
        assert!((a - 1.6).abs() < 1e-3, "{a}");
    }

    #[test]
    fn nu_is_nonpositive_and_zero_at_ne() {
        let g = quadratic().with_grid(201);
        let ne = 1.0 / 0.7;
        assert!(nu(&g, &[ne, ne]).unwrap().abs() < 1e-4);
        assert!(nu(&g, &[3.0, 0.5]).unwrap() < 0.0);
    }

    #[test]
    fn incumbent_kept_when_optimal() {
        let g = quadratic().with_action_lists(vec![vec![0.0, 1.0, 2.0]; 2]).unwrap();
        assert_eq!(g.best_action(0, &[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(g.best_action(0, &[0.0, 0.0]).unwrap(), 1.0);
    }
}
