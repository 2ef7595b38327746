use std::sync::Arc;

use super::{FiniteGame, ScalarFn, SmoothGame};
use crate::{Error, Result};

/// Additive payoff shifters Δuᵢ with declared Lipschitz bounds.
#[derive(Clone)]
pub struct Perturbation {
    evaluators: Vec<ScalarFn>,
    lipschitz: Vec<f64>,
}

impl std::fmt::Debug for Perturbation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Perturbation").field("lipschitz", &self.lipschitz).finish_non_exhaustive()
    }
}

impl Perturbation {
    pub fn new(evaluators: Vec<ScalarFn>, lipschitz: Vec<f64>) -> Result<Self> {
        if evaluators.len() != lipschitz.len() {
            return Err(Error::shape("one Lipschitz bound per perturbation is required"));
        }
        if let Some(l) = lipschitz.iter().find(|l| !(**l >= 0.0)) {
            return Err(Error::domain(format!("Lipschitz bound must be nonnegative, got {l}")));
        }
        Ok(Perturbation { evaluators, lipschitz })
    }

    pub fn player_count(&self) -> usize {
        self.evaluators.len()
    }

    pub fn value(&self, player: usize, x: &[f64]) -> f64 {
        (self.evaluators[player])(x)
    }

    pub fn evaluators(&self) -> &[ScalarFn] {
        &self.evaluators
    }

    pub fn lipschitz(&self) -> &[f64] {
        &self.lipschitz
    }
}

/// u^M_i = u_i + Δu_i over a finite or smooth base game.
#[derive(Debug, Clone)]
pub struct PerturbedGame<G> {
    base: G,
    perturbation: Perturbation,
}

impl<G> PerturbedGame<G> {
    pub fn base(&self) -> &G {
        &self.base
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }
}

impl PerturbedGame<FiniteGame> {
    pub fn new(base: FiniteGame, perturbation: Perturbation) -> Result<Self> {
        if base.player_count() != perturbation.player_count() {
            return Err(Error::shape("perturbation and game have different player counts"));
        }
        Ok(PerturbedGame { base, perturbation })
    }

    pub fn utility(&self, player: usize, profile: &[usize]) -> f64 {
        let values = self.base.values(profile);
        self.base.utility_of(player, profile) + self.perturbation.value(player, &values)
    }

    /// The perturbed game Γ^M as a plain finite game.
    pub fn materialize(&self) -> FiniteGame {
        self.base.with_perturbation(|i, v| self.perturbation.value(i, v))
    }
}

impl PerturbedGame<SmoothGame> {
    pub fn new(base: SmoothGame, perturbation: Perturbation) -> Result<Self> {
        if base.player_count() != perturbation.player_count() {
            return Err(Error::shape("perturbation and game have different player counts"));
        }
        Ok(PerturbedGame { base, perturbation })
    }

    pub fn utility(&self, player: usize, x: &[f64]) -> f64 {
        self.base.utility_at(player, x) + self.perturbation.value(player, x)
    }

    /// Γ^M as a smooth game. Base oracles are dropped (they answer for the
    /// unperturbed utilities); action lists and grids carry over, and declared
    /// Lipschitz constants add up.
    pub fn materialize(&self) -> SmoothGame {
        let utilities: Vec<ScalarFn> = self
            .base
            .utilities()
            .iter()
            .zip(self.perturbation.evaluators())
            .map(|(u, du)| {
                let (u, du) = (Arc::clone(u), Arc::clone(du));
                Arc::new(move |x: &[f64]| u(x) + du(x)) as ScalarFn
            })
            .collect();
        let mut game = SmoothGame::new(self.base.bounds().to_vec(), utilities)
            .expect("base game bounds are valid")
            .with_action_tol(self.base.action_tol());
        if let Some(lists) = self.base.action_lists() {
            game = game.with_action_lists(lists.to_vec()).expect("lists were valid for the base");
        }
        if let Some(n) = self.base.grid_points() {
            game = game.with_grid(n);
        }
        let lipschitz = self
            .base
            .lipschitz()
            .iter()
            .zip(self.perturbation.lipschitz())
            .map(|(l, dl)| l.map(|l| l + dl))
            .collect();
        game.with_lipschitz(lipschitz).expect("one constant per player")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perturbed_utility_is_sum() {
        let base = FiniteGame::from_fn(vec![vec![0.0, 1.0], vec![0.0, 2.0]], |i, v| v[i] - v[1 - i]).unwrap();
        let du: Vec<ScalarFn> = vec![Arc::new(|x: &[f64]| 0.25 * x[0]), Arc::new(|x: &[f64]| -0.5 * x[1])];
        let game = PerturbedGame::<FiniteGame>::new(base.clone(), Perturbation::new(du, vec![0.25, 0.5]).unwrap())
            .unwrap();
        let m = game.materialize();
        for p in base.profiles() {
            for i in 0..2 {
                let v = base.values(&p);
                let expected = base.utility_of(i, &p) + if i == 0 { 0.25 * v[0] } else { -0.5 * v[1] };
                assert_eq!(m.utility_of(i, &p), expected);
                assert_eq!(game.utility(i, &p), expected);
            }
        }
    }

    #[test]
    fn negative_bound_rejected() {
        let du: Vec<ScalarFn> = vec![Arc::new(|_: &[f64]| 0.0)];
        assert!(Perturbation::new(du, vec![-1.0]).is_err());
    }
}
