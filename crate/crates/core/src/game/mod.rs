//! Game representations and the static equilibrium machinery.
//!
//! Profiles are plain slices with one entry per player in a fixed player order.
//! A [`FiniteGame`] works on action *indices* (so equality is exact), a
//! [`SmoothGame`] on real actions inside a box. Both implement [`Game`], which is
//! all the dynamics engine needs.

mod finite;
mod lipschitz;
mod perturbed;
mod smooth;

use std::fmt::Debug;
use std::sync::Arc;

pub use finite::{
    epsilon_ne_set, mpd, potential_residual, FiniteGame, PotentialCandidate, PotentialTable,
};
pub use lipschitz::{lipschitz_estimate, map_lipschitz_on_samples};
pub use perturbed::{PerturbedGame, Perturbation};
pub use smooth::{nu, Responder, SmoothGame, DEFAULT_ACTION_TOL};

use crate::Result;

/// A real-valued function of a full profile.
pub type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A map from profiles to profiles (a dynamics step).
pub type VectorFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Common surface of finite and smooth games used by the dynamics engine.
pub trait Game: Sync {
    /// An action index for finite games, a real action for smooth games.
    type Action: Copy + PartialEq + Debug + Send + Sync;

    fn player_count(&self) -> usize;

    /// Checks length and per-coordinate admissibility of a profile.
    fn validate_profile(&self, profile: &[Self::Action]) -> Result<()>;

    /// Real coordinate of `action` for `player`.
    fn action_value(&self, player: usize, action: Self::Action) -> f64;

    fn utility(&self, player: usize, profile: &[Self::Action]) -> f64;

    /// An argmax of the player's utility against `profile`. Ties go to the lowest
    /// action index; the incumbent is returned when it is already optimal.
    fn best_action(&self, player: usize, profile: &[Self::Action]) -> Result<Self::Action>;

    /// The first action (in index order) that strictly improves on the incumbent.
    fn first_improving_action(
        &self,
        player: usize,
        profile: &[Self::Action],
    ) -> Result<Option<Self::Action>>;

    /// Whether switching the player's action to `candidate` counts as a move.
    fn improves(&self, player: usize, profile: &[Self::Action], candidate: Self::Action) -> bool;

    fn same_action(&self, a: Self::Action, b: Self::Action) -> bool;

    /// Largest unilateral gain at `profile` (zero at a Nash equilibrium).
    fn unilateral_max_gain(&self, profile: &[Self::Action]) -> Result<f64>;

    /// Exact recurrence key, available only for discrete action spaces.
    fn action_key(&self, action: Self::Action) -> Option<u64>;

    fn coords(&self, profile: &[Self::Action]) -> Vec<f64> {
        profile
            .iter()
            .enumerate()
            .map(|(i, &a)| self.action_value(i, a))
            .collect()
    }

    /// Utility of `player` after unilaterally switching to `action`.
    fn utility_with(&self, player: usize, profile: &[Self::Action], action: Self::Action) -> f64 {
        let mut p = profile.to_vec();
        p[player] = action;
        self.utility(player, &p)
    }
}
