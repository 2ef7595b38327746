use serde::{Deserialize, Serialize};

use super::{detect_cycle, CycleKind, CycleReport, Trajectory};
use crate::game::{potential_residual, FiniteGame, PotentialCandidate};
use crate::{Error, Result};

/// Absolute slack for the floating-point comparisons below.
const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitOutcome {
    Holds,
    Violated,
    /// No profile recurred on the recorded trajectory.
    Inconclusive,
}

/// One state of the limit set with its largest unilateral gain in Γ^M.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitWitness {
    pub profile: Vec<usize>,
    pub max_gain: f64,
    /// Improvement α of the move leaving this state along the cycle.
    pub alpha: Option<f64>,
    /// max_gain ≤ δ|𝒜|.
    pub within_bound: bool,
    /// max_gain ≤ πδ.
    pub within_pi_delta: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NearPotentialLimitReport {
    pub outcome: LimitOutcome,
    pub holds: bool,
    /// Potential residual of the perturbed game against φ.
    pub delta: f64,
    pub profile_count: usize,
    /// δ|𝒜|.
    pub bound: f64,
    pub cycle: CycleReport,
    /// πδ, for cycles.
    pub pi_delta: Option<f64>,
    /// Every cycle move satisfies α_r < πδ.
    pub alpha_below_pi_delta: Option<bool>,
    /// Every cycle state lies in 𝒳_{πδ}.
    pub cycle_in_pi_delta_set: Option<bool>,
    pub witnesses: Vec<LimitWitness>,
}

/// Checks that a better-response path of play of Γ^M ends at a NE of Γ^M or in a
/// cycle inside 𝒳_{δ|𝒜|}, where δ is the potential residual of Γ^M against φ.
pub fn verify_near_potential_limit(
    perturbed: &FiniteGame,
    phi: &PotentialCandidate,
    trajectory: &Trajectory<usize>,
) -> Result<NearPotentialLimitReport> {
    let delta = potential_residual(perturbed, phi)?;
    for s in &trajectory.states {
        perturbed.check_profile(s)?;
    }
    let profile_count = perturbed.profile_count();
    let bound = delta * profile_count as f64;
    let cycle = detect_cycle(trajectory);

    let mut report = NearPotentialLimitReport {
        outcome: LimitOutcome::Inconclusive,
        holds: false,
        delta,
        profile_count,
        bound,
        cycle: cycle.clone(),
        pi_delta: None,
        alpha_below_pi_delta: None,
        cycle_in_pi_delta_set: None,
        witnesses: Vec::new(),
    };

    match cycle.kind {
        CycleKind::Undetermined => {}
        CycleKind::FixedPoint => {
            let x = &cycle.cycle_states[0];
            let gain = perturbed.max_gain(x)?;
            let is_ne = gain <= TOL;
            report.witnesses.push(LimitWitness {
                profile: x.clone(),
                max_gain: gain,
                alpha: None,
                within_bound: gain <= bound + TOL,
                within_pi_delta: gain <= delta + TOL,
            });
            report.holds = is_ne;
        }
        CycleKind::Cycle => {
            let states = &cycle.cycle_states;
            let pi = states.len();
            let pi_delta = pi as f64 * delta;
            let mut alphas_ok = true;
            for (r, x) in states.iter().enumerate() {
                let next = &states[(r + 1) % pi];
                let movers: Vec<usize> = (0..x.len()).filter(|&i| x[i] != next[i]).collect();
                let [mover] = movers[..] else {
                    return Err(Error::domain(format!(
                        "cycle step {r} changes {} coordinates; expected a unilateral move",
                        movers.len()
                    )));
                };
                let alpha = perturbed.utility_of(mover, next) - perturbed.utility_of(mover, x);
                alphas_ok &= alpha < pi_delta + TOL;
                let gain = perturbed.max_gain(x)?;
                report.witnesses.push(LimitWitness {
                    profile: x.clone(),
                    max_gain: gain,
                    alpha: Some(alpha),
                    within_bound: gain <= bound + TOL,
                    within_pi_delta: gain <= pi_delta + TOL,
                });
            }
            report.pi_delta = Some(pi_delta);
            report.alpha_below_pi_delta = Some(alphas_ok);
            report.cycle_in_pi_delta_set = Some(report.witnesses.iter().all(|w| w.within_pi_delta));
            report.holds = report.witnesses.iter().all(|w| w.within_bound);
        }
    }
    if cycle.kind != CycleKind::Undetermined {
        report.outcome = if report.holds { LimitOutcome::Holds } else { LimitOutcome::Violated };
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{iterate, BetterSelector, IterateOptions, UpdateRule};
    use crate::game::PotentialTable;

    #[test]
    fn exact_potential_game_ends_at_ne() {
        let g = FiniteGame::from_fn(vec![vec![0.0, 1.0, 2.0]; 2], |_, v| -(v[0] - v[1]).powi(2) + v[0]).unwrap();
        // Identical interests: the common utility is a potential.
        let phi = PotentialTable::from_fn(&g, |v| -(v[0] - v[1]).powi(2) + v[0]).unwrap();
        let traj = iterate(
            UpdateRule::sequential_better(BetterSelector::FirstImproving),
            &g,
            &[0, 2],
            &IterateOptions::new(100),
        )
        .unwrap();
        let r = verify_near_potential_limit(&g, &phi.into(), &traj).unwrap();
        assert!(r.delta.abs() < 1e-12);
        assert_eq!(r.cycle.kind, CycleKind::FixedPoint);
        assert!(r.holds);
    }

    #[test]
    fn unresolved_run_is_inconclusive() {
        let g = FiniteGame::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        )
        .unwrap();
        let traj = iterate(UpdateRule::sequential_best(), &g, &[0, 0], &IterateOptions::new(2)).unwrap();
        let zero = PotentialTable::new(vec![2, 2], vec![0.0; 4]).unwrap();
        let r = verify_near_potential_limit(&g, &zero.into(), &traj).unwrap();
        assert_eq!(r.outcome, LimitOutcome::Inconclusive);
        assert!(!r.holds);
    }

    #[test]
    fn matching_pennies_cycle_is_covered_by_bound() {
        // Against φ ≡ 0, δ = 2 and δ|𝒜| = 8 dominates every gain.
        let g = FiniteGame::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        )
        .unwrap();
        let traj = iterate(UpdateRule::sequential_best(), &g, &[0, 0], &IterateOptions::new(20)).unwrap();
        let zero = PotentialTable::new(vec![2, 2], vec![0.0; 4]).unwrap();
        let r = verify_near_potential_limit(&g, &zero.into(), &traj).unwrap();
        assert_eq!(r.delta, 2.0);
        assert_eq!(r.cycle.period, Some(4));
        assert!(r.holds);
        assert_eq!(r.alpha_below_pi_delta, Some(true));
    }
}
