use proptest::prelude::*;

use gamedyn::contraction::{estimated_response_radius, theorem1_radii};
use gamedyn::cournot::{cournot_potential, discretized_game, discretized_potential, CournotParams, SigmoidBump};
use gamedyn::dynamics::{iterate, BetterSelector, IterateOptions, StopCriteria, Termination, UpdateRule};
use gamedyn::game::{potential_residual, FiniteGame, PotentialCandidate, PotentialTable};
use gamedyn::io::{load_game, save_game};
use gamedyn::repeated::{build_invariant_set_on_points, l_zero, taylor_residual_k, InvariantOptions};

/// Potential plus, for each player, a term that ignores the player's own action.
fn exact_potential_game(shape: &[usize], phi: &[f64], noise: &[f64]) -> (FiniteGame, PotentialTable) {
    let sets: Vec<Vec<f64>> = shape.iter().map(|&n| (0..n).map(|k| k as f64).collect()).collect();
    let probe = FiniteGame::from_fn(sets.clone(), |_, _| 0.0).unwrap();
    let tables = (0..shape.len())
        .map(|i| {
            (0..probe.profile_count())
                .map(|idx| {
                    let mut p = probe.profile_at(idx);
                    p[i] = 0;
                    phi[idx] + noise[(probe.index_of(&p) + i * 7) % noise.len()]
                })
                .collect()
        })
        .collect();
    let game = FiniteGame::new(sets, tables).unwrap();
    let table = PotentialTable::new(shape.to_vec(), phi.to_vec()).unwrap();
    (game, table)
}

fn game_inputs() -> impl Strategy<Value = (Vec<usize>, Vec<f64>, Vec<f64>)> {
    prop::collection::vec(2usize..=4, 2..=3).prop_flat_map(|shape| {
        let total: usize = shape.iter().product();
        (
            Just(shape),
            prop::collection::vec(-10.0f64..10.0, total),
            prop::collection::vec(-10.0f64..10.0, 1..20),
        )
    })
}

proptest! {
    #[test]
    fn exact_potential_games_have_zero_residual((shape, phi, noise) in game_inputs()) {
        let (game, table) = exact_potential_game(&shape, &phi, &noise);
        let delta = potential_residual(&game, &PotentialCandidate::from(table)).unwrap();
        prop_assert!(delta <= 1e-9, "δ = {delta}");
    }

    #[test]
    fn better_response_in_potential_games_stops_at_equilibria(
        (shape, phi, noise) in game_inputs(),
        seed in 0usize..1000,
        max_improving in any::<bool>(),
    ) {
        let (game, _) = exact_potential_game(&shape, &phi, &noise);
        let x0: Vec<usize> = shape.iter().enumerate().map(|(i, n)| (seed / (i + 1)) % n).collect();
        let selector = if max_improving { BetterSelector::MaxImproving } else { BetterSelector::FirstImproving };
        let opts = IterateOptions::new(10 * game.profile_count() * shape.len());
        let traj = iterate(UpdateRule::sequential_better(selector), &game, &x0, &opts).unwrap();
        prop_assert_eq!(traj.termination, Termination::FixedPoint);
        prop_assert!(game.max_gain(traj.states.last().unwrap()).unwrap() <= 1e-12);
    }

    #[test]
    fn finite_games_round_trip_through_files((shape, phi, noise) in game_inputs()) {
        let (game, _) = exact_potential_game(&shape, &phi, &noise);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.json");
        save_game(&path, &game).unwrap();
        prop_assert_eq!(load_game(&path).unwrap(), game);
    }

    #[test]
    fn taylor_residual_is_the_cross_term(a in prop::array::uniform4(0.0f64..400.0)) {
        let p = CournotParams::default();
        let phi = |x: &[f64]| cournot_potential(&p, x);
        let (x, y) = ([a[0], a[1]], [a[2], a[3]]);
        let k = taylor_residual_k(&phi, &x, &y);
        prop_assert!(k >= 0.0);
        prop_assert!((k - ((y[0] - x[0]) * (y[1] - x[1])).abs()).abs() <= 1e-8);
        prop_assert!(taylor_residual_k(&phi, &x, &x).abs() <= 1e-12);
    }

    #[test]
    fn trap_radii_are_ordered(d1 in 0.0f64..10.0, d2 in 0.0f64..10.0, l in 0.0f64..0.99) {
        let r = theorem1_radii(d1, d2, l).unwrap();
        prop_assert!(r.r_z <= r.r_k && r.r_k <= r.r_tilde);
        prop_assert!(r.r_z <= r.r_tilde);
        let e = estimated_response_radius(d1, d2, l).unwrap();
        prop_assert!(e.radius + 1e-12 >= r.r_k);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn windowed_radius_never_exceeds_the_supremum_radius(start in (0usize..26, 0usize..26), t0 in 0usize..6) {
        let p = CournotParams::default();
        let bump = SigmoidBump { mu: [100.0 / 3.0, 400.0 / 3.0] };
        let grid: Vec<f64> = (0..=25).map(|k| 8.0 * k as f64).collect();
        let game = discretized_game(&p, &grid, Some(&bump)).unwrap();
        let table = discretized_potential(&p, &game).unwrap();
        let delta = potential_residual(&game, &PotentialCandidate::from(table)).unwrap();
        let stop = StopCriteria { fixed_point: false, cycle: false };
        let opts = IterateOptions::new(20).with_stop(stop);
        let traj = iterate(UpdateRule::simultaneous_best(), &game, &[start.0, start.1], &opts).unwrap();
        let smooth = game.interpolated();
        let l0 = l_zero(&smooth, 0, 0).unwrap();
        let mut inv = InvariantOptions::new(t0, 5.0, delta, l0);
        inv.grid = 60;
        let phi = |x: &[f64]| cournot_potential(&p, x);
        let spec = build_invariant_set_on_points(&smooth, &phi, &traj.points, &inv).unwrap();
        prop_assert!(spec.r4 <= spec.r5 + 1e-12);
        prop_assert!(spec.r6 <= spec.r5 + 1e-12);
    }
}
