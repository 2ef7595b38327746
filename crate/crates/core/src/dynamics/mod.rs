//! Iterating response maps: sequential better/best response, simultaneous best
//! response, cycle detection over finite action spaces, and responses to noisy
//! estimates of the current profile.

mod cycle;
mod engine;
mod estimated;
mod step;
mod theorem2;
mod trajectory;

use serde::{Deserialize, Serialize};

pub use cycle::{detect_cycle, CycleKind, CycleReport};
pub use engine::{iterate, IterateOptions, StopCriteria};
pub use estimated::{estimated_response_iterate, Estimator};
pub use step::{step_sequential_best, step_sequential_better, step_simultaneous_best};
pub use theorem2::{verify_near_potential_limit, LimitOutcome, LimitWitness, NearPotentialLimitReport};
pub use trajectory::{Mover, StepRecord, Termination, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleKind {
    SequentialBest,
    SequentialBetter,
    SimultaneousBest,
}

/// How the mover is picked among players with an improving action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    /// Cycle through players starting after the previous mover; the first
    /// eligible one moves. Every eligible player is served infinitely often.
    RoundRobinEligible,
    /// Uniform choice among eligible players from the run's seeded generator.
    SeededRandomEligible,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetterSelector {
    /// Lowest-index action that strictly improves.
    FirstImproving,
    /// An improving best response.
    MaxImproving,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct UpdateRule {
    pub kind: RuleKind,
    pub schedule: Schedule,
    /// Only consulted for [`RuleKind::SequentialBetter`].
    pub selector: BetterSelector,
}

impl UpdateRule {
    pub fn sequential_best() -> Self {
        UpdateRule {
            kind: RuleKind::SequentialBest,
            schedule: Schedule::RoundRobinEligible,
            selector: BetterSelector::MaxImproving,
        }
    }

    pub fn sequential_better(selector: BetterSelector) -> Self {
        UpdateRule {
            kind: RuleKind::SequentialBetter,
            schedule: Schedule::RoundRobinEligible,
            selector,
        }
    }

    pub fn simultaneous_best() -> Self {
        UpdateRule {
            kind: RuleKind::SimultaneousBest,
            schedule: Schedule::RoundRobinEligible,
            selector: BetterSelector::MaxImproving,
        }
    }

    pub fn with_schedule(mut self, schedule: Schedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn is_sequential(&self) -> bool {
        self.kind != RuleKind::SimultaneousBest
    }
}
