use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{distance, Error, Result};

/// Maximum grid nodes per axis used by the finite-difference pass.
const MAX_GRID_PER_AXIS: usize = 64;

/// Sampled *lower* estimate of the Lipschitz constant of `f` on a box.
///
/// Takes the larger of the worst difference quotient over `sample_count` seeded
/// random pairs and the largest central-difference gradient norm on a regular
/// grid. True constants can only be larger; callers with a closed form should
/// prefer it.
pub fn lipschitz_estimate<F>(f: F, bounds: &[(f64, f64)], sample_count: usize, seed: u64) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    if sample_count < 2 {
        return Err(Error::domain(format!("need at least 2 samples, got {sample_count}")));
    }
    if bounds.is_empty() {
        return Err(Error::domain("empty box"));
    }
    if let Some((lo, hi)) = bounds.iter().find(|(lo, hi)| !(hi - lo > 0.0)) {
        return Err(Error::domain(format!("degenerate box side [{lo}, {hi}]")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
        bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..=hi)).collect()
    };
    let mut best: f64 = 0.0;
    for _ in 0..sample_count {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let d = distance(&x, &y);
        if d > 0.0 {
            best = best.max((f(&x) - f(&y)).abs() / d);
        }
    }

    let n = bounds.len();
    let per_axis = ((sample_count as f64).powf(1.0 / n as f64).ceil() as usize).clamp(2, MAX_GRID_PER_AXIS);
    let total = per_axis.pow(n as u32);
    let mut node = vec![0.0; n];
    for k in 0..total {
        let mut rem = k;
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            let j = rem % per_axis;
            rem /= per_axis;
            node[axis] = lo + (hi - lo) * j as f64 / (per_axis - 1) as f64;
        }
        let mut grad2 = 0.0;
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            let h = 1e-5 * (hi - lo);
            let mut plus = node.clone();
            let mut minus = node.clone();
            plus[axis] = (node[axis] + h).min(hi);
            minus[axis] = (node[axis] - h).max(lo);
            let g = (f(&plus) - f(&minus)) / (plus[axis] - minus[axis]);
            grad2 += g * g;
        }
        best = best.max(grad2.sqrt());
    }
    Ok(best)
}

/// Largest ‖Z(x) − Z(y)‖ / ‖x − y‖ over all pairs of distinct samples.
pub fn map_lipschitz_on_samples<Z>(map: Z, samples: &[Vec<f64>]) -> f64
where
    Z: Fn(&[f64]) -> Vec<f64>,
{
    let images: Vec<Vec<f64>> = samples.iter().map(|x| map(x)).collect();
    let mut best: f64 = 0.0;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let d = distance(&samples[i], &samples[j]);
            if d > 0.0 {
                best = best.max(distance(&images[i], &images[j]) / d);
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function() {
        assert_eq!(lipschitz_estimate(|_| 3.0, &[(0.0, 1.0), (0.0, 2.0)], 100, 1).unwrap(), 0.0);
    }

    #[test]
    fn identity_on_unit_interval() {
        let l = lipschitz_estimate(|x| x[0], &[(0.0, 1.0)], 100, 7).unwrap();
        assert!((l - 1.0).abs() < 1e-6);
    }

    #[test]
    fn cournot_best_response_slope() {
        let (d, c1) = (400.0, 200.0);
        let l = lipschitz_estimate(|x| (d - x[0] - c1) / 2.0, &[(0.0, d)], 500, 3).unwrap();
        assert!((l - 0.5).abs() < 1e-6);
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(matches!(lipschitz_estimate(|x| x[0], &[(1.0, 1.0)], 10, 0), Err(Error::Domain(_))));
        assert!(matches!(lipschitz_estimate(|x| x[0], &[(0.0, 1.0)], 1, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn pairwise_map_estimate() {
        let samples: Vec<Vec<f64>> = (0..5).map(|k| vec![k as f64, 0.5 * k as f64]).collect();
        let l = map_lipschitz_on_samples(|x| vec![0.5 * x[0], 0.5 * x[1]], &samples);
        assert!((l - 0.5).abs() < 1e-15);
    }
}
