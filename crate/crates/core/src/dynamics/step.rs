use super::BetterSelector;
use crate::game::Game;
use crate::{Error, Result};

fn check<G: Game>(game: &G, profile: &[G::Action], player: usize) -> Result<()> {
    if profile.len() != game.player_count() {
        return Err(Error::domain(format!(
            "profile has {} coordinates, game has {} players",
            profile.len(),
            game.player_count()
        )));
    }
    if player >= game.player_count() {
        return Err(Error::domain(format!("player {player} out of range")));
    }
    Ok(())
}

/// Moves `player` to a best response against the rest of `profile`.
pub fn step_sequential_best<G: Game>(game: &G, profile: &[G::Action], player: usize) -> Result<Vec<G::Action>> {
    check(game, profile, player)?;
    let mut next = profile.to_vec();
    next[player] = game.best_action(player, profile)?;
    Ok(next)
}

/// Moves `player` to a strictly improving action, or `None` when there is none.
pub fn step_sequential_better<G: Game>(
    game: &G,
    profile: &[G::Action],
    player: usize,
    selector: BetterSelector,
) -> Result<Option<Vec<G::Action>>> {
    check(game, profile, player)?;
    let candidate = match selector {
        BetterSelector::FirstImproving => game.first_improving_action(player, profile)?,
        BetterSelector::MaxImproving => {
            let best = game.best_action(player, profile)?;
            game.improves(player, profile, best).then_some(best)
        }
    };
    Ok(candidate.map(|a| {
        let mut next = profile.to_vec();
        next[player] = a;
        next
    }))
}

/// Every player best-responds to `profile` at once.
pub fn step_simultaneous_best<G: Game>(game: &G, profile: &[G::Action]) -> Result<Vec<G::Action>> {
    check(game, profile, 0)?;
    (0..game.player_count()).map(|i| game.best_action(i, profile)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::FiniteGame;

    fn coordination() -> FiniteGame {
        FiniteGame::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![1.0, 0.0, 0.0, 1.0], vec![1.0, 0.0, 0.0, 1.0]],
        )
        .unwrap()
    }

    #[test]
    fn coordination_best_response() {
        let g = coordination();
        // u1(row0, col1) = 0 < u1(row1, col1) = 1, so player 0 switches.
        assert_eq!(step_sequential_best(&g, &[0, 1], 0).unwrap(), vec![1, 1]);
        for p in [[0, 0], [1, 1]] {
            for i in 0..2 {
                assert_eq!(step_sequential_best(&g, &p, i).unwrap(), p.to_vec());
                assert_eq!(step_sequential_better(&g, &p, i, BetterSelector::FirstImproving).unwrap(), None);
            }
        }
    }

    #[test]
    fn matching_pennies_simultaneous() {
        let g = FiniteGame::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![1.0, -1.0, -1.0, 1.0], vec![-1.0, 1.0, 1.0, -1.0]],
        )
        .unwrap();
        assert_eq!(step_simultaneous_best(&g, &[0, 0]).unwrap(), vec![0, 1]);
        assert_eq!(step_simultaneous_best(&g, &[0, 1]).unwrap(), vec![1, 1]);
    }

    #[test]
    fn rejects_bad_player() {
        assert!(matches!(step_sequential_best(&coordination(), &[0, 0], 5), Err(Error::Domain(_))));
    }
}
