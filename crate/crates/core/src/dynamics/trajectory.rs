use serde::{Deserialize, Serialize};

/// Who changed the profile on a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mover {
    Player(usize),
    /// Simultaneous update of every player.
    All,
    /// No eligible player; the profile was carried over.
    Idle,
}

/// Diagnostics for the transition from state t to state t+1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub mover: Mover,
    /// ‖x^{t+1} − x^t‖.
    pub w: f64,
    /// Exact second-order residual of the potential, when a potential was supplied.
    pub k: Option<f64>,
    /// Utility change of the mover (sum of unilateral gains for simultaneous moves).
    pub improvement: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    FixedPoint,
    /// The full dynamical state (profile and scheduler position) recurred.
    Cycle,
    Budget,
}

/// Path of play x⁰, …, x^T with per-step diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<A> {
    /// Profiles in the game's native action type.
    pub states: Vec<Vec<A>>,
    /// The same profiles as real coordinates.
    pub points: Vec<Vec<f64>>,
    /// `steps[t]` describes `states[t] → states[t + 1]`.
    pub steps: Vec<StepRecord>,
    pub termination: Termination,
}

impl<A: Clone> Trajectory<A> {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last_point(&self) -> &[f64] {
        self.points.last().map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn player_count(&self) -> usize {
        self.points.first().map_or(0, Vec::len)
    }

    pub fn w_values(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.w).collect()
    }

    /// k^t for every step, or `None` if any step lacks it.
    pub fn k_values(&self) -> Option<Vec<f64>> {
        self.steps.iter().map(|s| s.k).collect()
    }
}
