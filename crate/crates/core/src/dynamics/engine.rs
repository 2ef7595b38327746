use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::step::{step_sequential_better, step_simultaneous_best};
use super::{Mover, RuleKind, Schedule, StepRecord, Termination, Trajectory, UpdateRule};
use crate::game::Game;
use crate::repeated::taylor_residual_k;
use crate::{distance, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopCriteria {
    /// Stop at a rest point (exact for finite games, `patience` small steps otherwise).
    pub fixed_point: bool,
    /// Stop when the full state recurs (finite games only).
    pub cycle: bool,
}

impl Default for StopCriteria {
    fn default() -> Self {
        StopCriteria { fixed_point: true, cycle: true }
    }
}

pub struct IterateOptions<'a, A> {
    pub max_steps: usize,
    pub stop: StopCriteria,
    /// A smooth-game step with w ≤ this counts toward the rest condition.
    pub fixed_point_tol: f64,
    /// Consecutive small steps required to declare a smooth-game rest point.
    pub fixed_point_patience: usize,
    /// Seeds the random schedule.
    pub seed: u64,
    /// Potential used to fill in k^t.
    pub potential: Option<&'a (dyn Fn(&[A]) -> f64 + Sync)>,
}

impl<'a, A> IterateOptions<'a, A> {
    pub fn new(max_steps: usize) -> Self {
        IterateOptions {
            max_steps,
            stop: StopCriteria::default(),
            fixed_point_tol: 1e-10,
            fixed_point_patience: 3,
            seed: 0,
            potential: None,
        }
    }

    pub fn with_potential(mut self, phi: &'a (dyn Fn(&[A]) -> f64 + Sync)) -> Self {
        self.potential = Some(phi);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_stop(mut self, stop: StopCriteria) -> Self {
        self.stop = stop;
        self
    }
}

/// Iterates `rule` from `x0` until a stop criterion or the step budget is hit.
pub fn iterate<G: Game>(
    rule: UpdateRule,
    game: &G,
    x0: &[G::Action],
    opts: &IterateOptions<'_, G::Action>,
) -> Result<Trajectory<G::Action>> {
    run(rule, game, x0, opts, &mut |_, x| x.to_vec())
}

enum Scheduler {
    RoundRobin { start: usize },
    Random(ChaCha8Rng),
}

fn candidate<G: Game>(rule: UpdateRule, game: &G, obs: &[G::Action], player: usize) -> Result<Option<G::Action>> {
    match rule.kind {
        RuleKind::SequentialBest => {
            let a = game.best_action(player, obs)?;
            Ok(game.improves(player, obs, a).then_some(a))
        }
        RuleKind::SequentialBetter => {
            Ok(step_sequential_better(game, obs, player, rule.selector)?.map(|p| p[player]))
        }
        RuleKind::SimultaneousBest => unreachable!("simultaneous rules have no single mover"),
    }
}

/// Shared engine: the rule is applied to `observe(t, x^t)` while movers' new
/// actions are written into the true profile.
pub(crate) fn run<G: Game>(
    rule: UpdateRule,
    game: &G,
    x0: &[G::Action],
    opts: &IterateOptions<'_, G::Action>,
    observe: &mut dyn FnMut(usize, &[G::Action]) -> Vec<G::Action>,
) -> Result<Trajectory<G::Action>> {
    if opts.max_steps == 0 {
        return Err(Error::domain("max_steps must be at least 1"));
    }
    game.validate_profile(x0)?;
    let n = game.player_count();
    let discrete = x0.iter().all(|&a| game.action_key(a).is_some());

    let mut scheduler = match rule.schedule {
        Schedule::RoundRobinEligible => Scheduler::RoundRobin { start: 0 },
        Schedule::SeededRandomEligible => Scheduler::Random(ChaCha8Rng::seed_from_u64(opts.seed)),
    };
    let mut states = vec![x0.to_vec()];
    let mut points = vec![game.coords(x0)];
    let mut steps = Vec::new();
    let mut seen: HashMap<(Vec<u64>, Option<usize>), usize> = HashMap::new();
    let state_key = |x: &[G::Action], sched: &Scheduler| -> Option<(Vec<u64>, Option<usize>)> {
        let keys: Option<Vec<u64>> = x.iter().map(|&a| game.action_key(a)).collect();
        let pos = match sched {
            Scheduler::RoundRobin { start } => Some(*start),
            Scheduler::Random(_) => None,
        };
        keys.map(|k| (k, if rule.is_sequential() { pos } else { None }))
    };
    if opts.stop.cycle && discrete {
        if let Some(k) = state_key(x0, &scheduler) {
            seen.insert(k, 0);
        }
    }

    let mut small_steps = 0;
    let mut termination = Termination::Budget;
    for t in 0..opts.max_steps {
        let cur = states.last().expect("trajectory starts non-empty").clone();
        let obs = observe(t, &cur);
        let wrap = |e: Error| Error::Step { step: t, source: Box::new(e) };

        let (next, mover) = if rule.kind == RuleKind::SimultaneousBest {
            (step_simultaneous_best(game, &obs).map_err(wrap)?, Mover::All)
        } else {
            let chosen = match &mut scheduler {
                Scheduler::RoundRobin { start } => {
                    let mut found = None;
                    for off in 0..n {
                        let i = (*start + off) % n;
                        if let Some(a) = candidate(rule, game, &obs, i).map_err(wrap)? {
                            found = Some((i, a));
                            break;
                        }
                    }
                    if let Some((i, _)) = found {
                        *start = (i + 1) % n;
                    }
                    found
                }
                Scheduler::Random(rng) => {
                    let mut eligible = Vec::new();
                    for i in 0..n {
                        if let Some(a) = candidate(rule, game, &obs, i).map_err(wrap)? {
                            eligible.push((i, a));
                        }
                    }
                    if eligible.is_empty() {
                        None
                    } else {
                        Some(eligible[rng.gen_range(0..eligible.len())])
                    }
                }
            };
            match chosen {
                Some((i, a)) => {
                    let mut next = cur.clone();
                    next[i] = a;
                    (next, Mover::Player(i))
                }
                None => (cur.clone(), Mover::Idle),
            }
        };

        let next_point = game.coords(&next);
        let w = distance(&next_point, points.last().expect("non-empty"));
        let k = opts.potential.map(|phi| taylor_residual_k(phi, &cur, &next));
        let improvement = match mover {
            Mover::Player(i) => game.utility(i, &next) - game.utility(i, &cur),
            Mover::All => (0..n)
                .map(|i| game.utility_with(i, &cur, next[i]) - game.utility(i, &cur))
                .sum(),
            Mover::Idle => 0.0,
        };
        let unchanged = next.iter().zip(&cur).all(|(&a, &b)| game.same_action(a, b));
        steps.push(StepRecord { mover, w, k, improvement });
        states.push(next);
        points.push(next_point);

        if opts.stop.fixed_point {
            if discrete {
                if next_is_exact(&states) {
                    termination = Termination::FixedPoint;
                    break;
                }
            } else {
                small_steps = if w <= opts.fixed_point_tol || unchanged { small_steps + 1 } else { 0 };
                if small_steps >= opts.fixed_point_patience.max(1) {
                    termination = Termination::FixedPoint;
                    break;
                }
            }
        }
        if opts.stop.cycle && discrete {
            if let Some(key) = state_key(states.last().expect("non-empty"), &scheduler) {
                if seen.insert(key, t + 1).is_some() {
                    termination = Termination::Cycle;
                    break;
                }
            }
        }
    }

    Ok(Trajectory { states, points, steps, termination })
}

fn next_is_exact<A: PartialEq>(states: &[Vec<A>]) -> bool {
    let n = states.len();
    n >= 2 && states[n - 1] == states[n - 2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{detect_cycle, BetterSelector, CycleKind};
    use crate::game::FiniteGame;

    fn matching_pennies() -> FiniteGame {
        FiniteGame::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        )
        .unwrap()
    }

    #[test]
    fn zero_budget_rejected() {
        let g = matching_pennies();
        let opts = IterateOptions::new(0);
        assert!(matches!(iterate(UpdateRule::sequential_best(), &g, &[0, 0], &opts), Err(Error::Domain(_))));
    }

    #[test]
    fn matching_pennies_sequential_cycle() {
        let g = matching_pennies();
        let traj = iterate(UpdateRule::sequential_best(), &g, &[0, 0], &IterateOptions::new(50)).unwrap();
        assert_eq!(traj.termination, Termination::Cycle);
        assert_eq!(&traj.states[..5], &[vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0], vec![0, 0]]);
        let report = detect_cycle(&traj);
        assert_eq!(report.kind, CycleKind::Cycle);
        assert_eq!(report.period, Some(4));
        assert_eq!(report.entry_index, Some(0));
    }

    #[test]
    fn matching_pennies_simultaneous_period_four() {
        let g = matching_pennies();
        let traj = iterate(UpdateRule::simultaneous_best(), &g, &[0, 0], &IterateOptions::new(50)).unwrap();
        let report = detect_cycle(&traj);
        assert_eq!(report.period, Some(4));
        assert_eq!(report.cycle_states, vec![vec![0, 0], vec![0, 1], vec![1, 1], vec![1, 0]]);
    }

    #[test]
    fn ne_is_fixed_point() {
        let g = FiniteGame::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![2.0, 0.0, 0.0, 1.0], vec![2.0, 0.0, 0.0, 1.0]],
        )
        .unwrap();
        for rule in [
            UpdateRule::sequential_best(),
            UpdateRule::sequential_better(BetterSelector::FirstImproving),
            UpdateRule::simultaneous_best(),
        ] {
            let traj = iterate(rule, &g, &[1, 1], &IterateOptions::new(10)).unwrap();
            assert_eq!(traj.termination, Termination::FixedPoint);
            assert_eq!(traj.states, vec![vec![1, 1], vec![1, 1]]);
            assert_eq!(detect_cycle(&traj).kind, CycleKind::FixedPoint);
        }
    }

    #[test]
    fn seeded_schedule_is_deterministic() {
        let g = FiniteGame::from_fn(vec![vec![0.0, 1.0, 2.0]; 3], |i, v| {
            ((v[0] + 2.0 * v[1] + 3.0 * v[2] + i as f64) * 1.7).sin()
        })
        .unwrap();
        let rule = UpdateRule::sequential_better(BetterSelector::FirstImproving)
            .with_schedule(Schedule::SeededRandomEligible);
        let opts = IterateOptions::new(100).with_seed(42);
        let a = iterate(rule, &g, &[0, 0, 0], &opts).unwrap();
        let b = iterate(rule, &g, &[0, 0, 0], &opts).unwrap();
        assert_eq!(a, b);
    }
}
