use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::engine::{run, IterateOptions};
use super::{Trajectory, UpdateRule};
use crate::game::SmoothGame;
use crate::{Error, Result};

/// Vanishing schedule for the size of the estimation error ‖eₙ‖.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Estimator {
    /// ‖eₙ‖ = magnitude·ρⁿ.
    Geometric { rho: f64, magnitude: f64 },
    /// ‖eₙ‖ = c/(n+1).
    Harmonic { c: f64 },
}

impl Estimator {
    fn validate(&self) -> Result<()> {
        match *self {
            Estimator::Geometric { rho, magnitude } => {
                if !(rho > 0.0 && rho < 1.0) {
                    return Err(Error::domain(format!("geometric rate {rho} outside (0, 1)")));
                }
                if !(magnitude >= 0.0 && magnitude.is_finite()) {
                    return Err(Error::domain(format!("invalid error magnitude {magnitude}")));
                }
            }
            Estimator::Harmonic { c } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(Error::domain(format!("harmonic constant {c} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// ‖eₙ‖ at step `n`.
    pub fn magnitude(&self, n: usize) -> f64 {
        match *self {
            Estimator::Geometric { rho, magnitude } => magnitude * rho.powi(n.min(i32::MAX as usize) as i32),
            Estimator::Harmonic { c } => c / (n as f64 + 1.0),
        }
    }
}

fn unit_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        let r = crate::norm(&v);
        if r > 1e-12 && r <= 1.0 {
            return v.into_iter().map(|c| c / r).collect();
        }
    }
}

/// Iterates `rule` where every step responds to a noisy estimate of the
/// current profile: x̂ⁿ = clip(xⁿ + eₙ) with eₙ of the scheduled length and a
/// seeded uniform direction.
pub fn estimated_response_iterate(
    rule: UpdateRule,
    game: &SmoothGame,
    x0: &[f64],
    estimator: Estimator,
    seed: u64,
    opts: &IterateOptions<'_, f64>,
) -> Result<Trajectory<f64>> {
    estimator.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = game.player_count();
    let mut observe = |n: usize, x: &[f64]| -> Vec<f64> {
        let m = estimator.magnitude(n);
        if m == 0.0 {
            return x.to_vec();
        }
        let dir = unit_direction(&mut rng, dim);
        let mut y: Vec<f64> = x.iter().zip(&dir).map(|(xi, di)| xi + m * di).collect();
        game.clamp(&mut y);
        y
    };
    run(rule, game, x0, opts, &mut observe)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cournot::{nominal_game, CournotParams};
    use crate::dynamics::iterate;

    #[test]
    fn rho_outside_unit_interval_rejected() {
        let g = nominal_game(&CournotParams::default());
        let opts = IterateOptions::new(5);
        for rho in [0.0, 1.0, 1.5, -0.2] {
            let e = Estimator::Geometric { rho, magnitude: 1.0 };
            let r = estimated_response_iterate(UpdateRule::simultaneous_best(), &g, &[0.0, 0.0], e, 0, &opts);
            assert!(matches!(r, Err(Error::Domain(_))));
        }
    }

    #[test]
    fn zero_magnitude_matches_plain_iteration() {
        let g = nominal_game(&CournotParams::default());
        let opts = IterateOptions::new(60);
        let e = Estimator::Geometric { rho: 0.5, magnitude: 0.0 };
        let noisy = estimated_response_iterate(UpdateRule::simultaneous_best(), &g, &[400.0, 0.0], e, 9, &opts).unwrap();
        let plain = iterate(UpdateRule::simultaneous_best(), &g, &[400.0, 0.0], &opts).unwrap();
        assert_eq!(noisy, plain);
    }

    #[test]
    fn error_lengths_follow_schedule() {
        let e = Estimator::Harmonic { c: 3.0 };
        assert_eq!(e.magnitude(0), 3.0);
        assert_eq!(e.magnitude(2), 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let d = unit_direction(&mut rng, 2);
            assert!((crate::norm(&d) - 1.0).abs() < 1e-12);
        }
    }
}
