use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    FixedPoint,
    Cycle,
    /// No profile recurred within the recorded steps.
    Undetermined,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub kind: CycleKind,
    /// Index of the first occurrence of the recurring profile.
    pub entry_index: Option<usize>,
    pub period: Option<usize>,
    /// The profiles of one period, starting at `entry_index`.
    pub cycle_states: Vec<Vec<usize>>,
}

/// Locates the first recurrence of a profile along a finite-game trajectory.
///
/// A recurrence at consecutive indices is a fixed point (period 1).
pub fn detect_cycle(trajectory: &Trajectory<usize>) -> CycleReport {
    let mut first_seen: HashMap<&[usize], usize> = HashMap::new();
    for (t, state) in trajectory.states.iter().enumerate() {
        if let Some(&s) = first_seen.get(state.as_slice()) {
            let period = t - s;
            return CycleReport {
                kind: if period == 1 { CycleKind::FixedPoint } else { CycleKind::Cycle },
                entry_index: Some(s),
                period: Some(period),
                cycle_states: trajectory.states[s..t].to_vec(),
            };
        }
        first_seen.insert(state, t);
    }
    CycleReport {
        kind: CycleKind::Undetermined,
        entry_index: None,
        period: None,
        cycle_states: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Termination;

    fn traj(states: Vec<Vec<usize>>) -> Trajectory<usize> {
        Trajectory {
            points: states.iter().map(|s| s.iter().map(|&a| a as f64).collect()).collect(),
            states,
            steps: Vec::new(),
            termination: Termination::Budget,
        }
    }

    #[test]
    fn no_recurrence_is_undetermined() {
        let r = detect_cycle(&traj(vec![vec![0, 0], vec![0, 1], vec![1, 1]]));
        assert_eq!(r.kind, CycleKind::Undetermined);
        assert_eq!(r.period, None);
    }

    #[test]
    fn entry_after_transient() {
        let r = detect_cycle(&traj(vec![vec![2], vec![0], vec![1], vec![0]]));
        assert_eq!(r.kind, CycleKind::Cycle);
        assert_eq!(r.entry_index, Some(1));
        assert_eq!(r.period, Some(2));
        assert_eq!(r.cycle_states, vec![vec![0], vec![1]]);
    }
}
