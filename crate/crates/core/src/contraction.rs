//! Contractive proxies for dynamics maps and the trap radii they imply.
//!
//! A dynamics map Z is replaced by C(x) = c₀ + α·(Z(x) − c₀), with α chosen so
//! that C is a contraction; δ₂ = sup ‖Z(x) − C(x)‖ over the sampled domain
//! measures what the replacement costs. Iterates of a map K within δ₁ of Z are
//! then eventually trapped in balls around the fixed point of C.

use serde::{Deserialize, Serialize};

use crate::game::{map_lipschitz_on_samples, VectorFn};
use crate::{distance, Error, Result};

/// Where the scaling of Z is centred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorPolicy {
    /// Centroid of the domain samples.
    Centroid,
    /// A caller-supplied approximate fixed point of Z.
    FixedPointGuess(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Analytic,
    Sampled,
}

/// C(x) = c₀ + α·(Z(x) − c₀).
#[derive(Clone)]
pub struct ContractiveMap {
    base: VectorFn,
    anchor: Vec<f64>,
    alpha: f64,
    base_lipschitz: f64,
    provenance: Provenance,
}

impl std::fmt::Debug for ContractiveMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ContractiveMap")
            .field("anchor", &self.anchor)
            .field("alpha", &self.alpha)
            .field("base_lipschitz", &self.base_lipschitz)
            .field("provenance", &self.provenance)
            .finish()
    }
}

impl ContractiveMap {
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        let z = (self.base)(x);
        if self.alpha == 1.0 {
            return z;
        }
        z.iter()
            .zip(&self.anchor)
            .map(|(zi, ci)| ci + self.alpha * (zi - ci))
            .collect()
    }

    pub fn base(&self) -> &VectorFn {
        &self.base
    }

    pub fn anchor(&self) -> &[f64] {
        &self.anchor
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// L̂_Z, the (estimated or declared) Lipschitz constant of the base map.
    pub fn base_lipschitz(&self) -> f64 {
        self.base_lipschitz
    }

    /// L_C = α·L̂_Z.
    pub fn lipschitz(&self) -> f64 {
        self.alpha * self.base_lipschitz
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Fits a contraction to `z` on `samples`, estimating L̂_Z from all sample pairs.
/// Returns the map and δ₂.
pub fn build_contraction(
    z: VectorFn,
    samples: &[Vec<f64>],
    anchor: AnchorPolicy,
    margin: f64,
) -> Result<(ContractiveMap, f64)> {
    build_contraction_with(z, samples, anchor, margin, None)
}

/// Like [`build_contraction`], with an optional analytic Lipschitz constant of `z`
/// replacing the sampled estimate.
pub fn build_contraction_with(
    z: VectorFn,
    samples: &[Vec<f64>],
    anchor: AnchorPolicy,
    margin: f64,
    lipschitz: Option<f64>,
) -> Result<(ContractiveMap, f64)> {
    if samples.len() < 2 {
        return Err(Error::domain(format!("need at least 2 domain samples, got {}", samples.len())));
    }
    if !(margin > 0.0 && margin < 1.0) {
        return Err(Error::domain(format!("margin {margin} outside (0, 1)")));
    }
    let dim = samples[0].len();
    if samples.iter().any(|s| s.len() != dim) {
        return Err(Error::shape("domain samples differ in dimension"));
    }
    let images: Vec<Vec<f64>> = samples.iter().map(|x| z(x)).collect();
    if images.iter().any(|y| y.len() != dim) {
        return Err(Error::shape("map output dimension differs from its input"));
    }
    let (base_lipschitz, provenance) = match lipschitz {
        Some(l) if l >= 0.0 && l.is_finite() => (l, Provenance::Analytic),
        Some(l) => return Err(Error::domain(format!("invalid Lipschitz constant {l}"))),
        None => (map_lipschitz_on_samples(|x| z(x), samples), Provenance::Sampled),
    };
    let anchor = match anchor {
        AnchorPolicy::Centroid => {
            let mut c = vec![0.0; dim];
            for s in samples {
                for (ci, si) in c.iter_mut().zip(s) {
                    *ci += si;
                }
            }
            c.iter_mut().for_each(|ci| *ci /= samples.len() as f64);
            c
        }
        AnchorPolicy::FixedPointGuess(g) => {
            if g.len() != dim {
                return Err(Error::shape("anchor dimension differs from the samples"));
            }
            g
        }
    };
    let alpha = if base_lipschitz <= 1.0 - margin { 1.0 } else { (1.0 - margin) / base_lipschitz };
    let delta2 = images
        .iter()
        .map(|y| (1.0 - alpha) * distance(y, &anchor))
        .fold(0.0, f64::max);
    Ok((
        ContractiveMap { base: z, anchor, alpha, base_lipschitz, provenance },
        delta2,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub x: Vec<f64>,
    /// A-posteriori bound ‖x_{n+1} − x_n‖·L/(1−L) on the distance to the true fixed point.
    pub residual: f64,
    pub iterations: usize,
}

/// Banach iteration of `c` from `x0` until the a-posteriori bound drops to `tol`.
pub fn fixed_point(c: &ContractiveMap, x0: &[f64], tol: f64, max_iters: usize) -> Result<FixedPoint> {
    let l = c.lipschitz();
    if !(l < 1.0) {
        return Err(Error::domain(format!("map is not contractive (L = {l})")));
    }
    let mut x = x0.to_vec();
    let mut bound = f64::INFINITY;
    for n in 1..=max_iters {
        let next = c.eval(&x);
        let step = distance(&next, &x);
        bound = step * l / (1.0 - l);
        x = next;
        if bound <= tol {
            return Ok(FixedPoint { x, residual: bound, iterations: n });
        }
    }
    Err(Error::Convergence { iterations: max_iters, residual: bound })
}

/// Description of the sampled domain D'.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainSpec {
    pub sample_count: usize,
    /// Axis-aligned bounding box of the samples.
    pub bounds: Vec<(f64, f64)>,
}

impl DomainSpec {
    pub fn of(samples: &[Vec<f64>]) -> Self {
        let dim = samples.first().map_or(0, Vec::len);
        let bounds = (0..dim)
            .map(|i| {
                samples
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(s[i]), hi.max(s[i])))
            })
            .collect();
        DomainSpec { sample_count: samples.len(), bounds }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionCertificate {
    #[serde(rename = "L_C")]
    pub lipschitz: f64,
    #[serde(rename = "L_Z")]
    pub base_lipschitz: f64,
    pub provenance: Provenance,
    pub alpha: f64,
    pub anchor: Vec<f64>,
    pub delta2: f64,
    pub x_star: Vec<f64>,
    /// Upper bound on ‖C(x*) − x*‖ and on the distance to the true fixed point.
    pub fixed_point_residual: f64,
    pub iterations: usize,
    pub domain: DomainSpec,
}

/// Fits C to `z`, iterates it to its fixed point from the anchor, and packages the result.
pub fn certify(
    z: VectorFn,
    samples: &[Vec<f64>],
    anchor: AnchorPolicy,
    margin: f64,
    lipschitz: Option<f64>,
    tol: f64,
    max_iters: usize,
) -> Result<(ContractiveMap, ContractionCertificate)> {
    let (map, delta2) = build_contraction_with(z, samples, anchor, margin, lipschitz)?;
    let fp = fixed_point(&map, map.anchor(), tol, max_iters)?;
    let step = distance(&map.eval(&fp.x), &fp.x);
    let cert = ContractionCertificate {
        lipschitz: map.lipschitz(),
        base_lipschitz: map.base_lipschitz(),
        provenance: map.provenance(),
        alpha: map.alpha(),
        anchor: map.anchor().to_vec(),
        delta2,
        x_star: fp.x,
        fixed_point_residual: fp.residual.max(step),
        iterations: fp.iterations,
        domain: DomainSpec::of(samples),
    };
    Ok((map, cert))
}

/// sup over `samples` of ‖K(x) − Z(x)‖.
pub fn sampled_map_distance<K, Z>(k: K, z: Z, samples: &[Vec<f64>]) -> f64
where
    K: Fn(&[f64]) -> Vec<f64>,
    Z: Fn(&[f64]) -> Vec<f64>,
{
    samples.iter().map(|x| distance(&k(x), &z(x))).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartTwoBounds {
    pub m: usize,
    #[serde(rename = "L_K")]
    pub l_k: f64,
    /// L_{K^r} for r = 1, …, m−1.
    #[serde(rename = "L_K_r")]
    pub l_k_r: Vec<f64>,
    /// ‖K^r(x̃) − x̃‖ for r = 1, …, m−1.
    pub dist_k_r: Vec<f64>,
    #[serde(rename = "R_r")]
    pub radii: Vec<f64>,
    pub max_radius: f64,
    /// The Lipschitz inputs are sampled estimates rather than analytic constants.
    pub estimated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremOneBounds {
    pub delta1: f64,
    pub delta2: f64,
    #[serde(rename = "L_C")]
    pub lipschitz: f64,
    pub r_z: f64,
    pub r_k: f64,
    pub r_tilde: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part2: Option<PartTwoBounds>,
}

fn check_contraction_inputs(delta1: f64, delta2: f64, l_c: f64) -> Result<()> {
    if !(0.0..1.0).contains(&l_c) {
        return Err(Error::domain(format!("L_C = {l_c} outside [0, 1)")));
    }
    if !(delta1 >= 0.0 && delta2 >= 0.0 && delta1.is_finite() && delta2.is_finite()) {
        return Err(Error::domain(format!("δ₁ = {delta1}, δ₂ = {delta2} must be finite and nonnegative")));
    }
    Ok(())
}

/// r_Z = δ₂/(1−L_C), r_K = (δ₁+δ₂)/(1−L_C), r̃ = (2δ₂+δ₁)/(1−L_C).
pub fn theorem1_radii(delta1: f64, delta2: f64, l_c: f64) -> Result<TheoremOneBounds> {
    check_contraction_inputs(delta1, delta2, l_c)?;
    let s = 1.0 - l_c;
    Ok(TheoremOneBounds {
        delta1,
        delta2,
        lipschitz: l_c,
        r_z: delta2 / s,
        r_k: (delta1 + delta2) / s,
        r_tilde: (2.0 * delta2 + delta1) / s,
        part2: None,
    })
}

/// R_r = L_{K^r}·(1 + L_K + … + L_K^{m−1})·δ₁/(1−L_C) + ‖K^r(x̃) − x̃‖.
///
/// The finite geometric sum equals (1−L_K^m)/(1−L_K) whenever L_K ≠ 1.
#[allow(clippy::too_many_arguments)]
pub fn theorem1_part2_radius(
    m: usize,
    r: usize,
    l_c: f64,
    l_k: f64,
    l_k_r: f64,
    delta1: f64,
    dist_k_r: f64,
) -> Result<f64> {
    if !(r > 0 && r < m) {
        return Err(Error::domain(format!("need 0 < r < m, got r = {r}, m = {m}")));
    }
    check_contraction_inputs(delta1, 0.0, l_c)?;
    if !(l_k >= 0.0 && l_k_r >= 0.0 && dist_k_r >= 0.0) {
        return Err(Error::domain("Lipschitz constants and distances must be nonnegative"));
    }
    let geometric: f64 = if l_k == 1.0 {
        m as f64
    } else {
        (1.0 - l_k.powi(m as i32)) / (1.0 - l_k)
    };
    Ok(l_k_r * geometric * delta1 / (1.0 - l_c) + dist_k_r)
}

/// Evaluates R_r for every r in 1..m and attaches them to `bounds`.
pub fn attach_part2(
    mut bounds: TheoremOneBounds,
    m: usize,
    l_k: f64,
    l_k_r: &[f64],
    dist_k_r: &[f64],
    estimated: bool,
) -> Result<TheoremOneBounds> {
    if m < 2 || l_k_r.len() != m - 1 || dist_k_r.len() != m - 1 {
        return Err(Error::shape(format!("part-2 data needs m ≥ 2 and m−1 = {} entries per list", m.saturating_sub(1))));
    }
    let radii = (1..m)
        .map(|r| theorem1_part2_radius(m, r, bounds.lipschitz, l_k, l_k_r[r - 1], bounds.delta1, dist_k_r[r - 1]))
        .collect::<Result<Vec<_>>>()?;
    let max_radius = radii.iter().copied().fold(0.0, f64::max);
    bounds.part2 = Some(PartTwoBounds {
        m,
        l_k,
        l_k_r: l_k_r.to_vec(),
        dist_k_r: dist_k_r.to_vec(),
        radii,
        max_radius,
        estimated,
    });
    Ok(bounds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatedResponseRadius {
    /// (δ₁+δ₂)(3−2L_C)/(1−L_C).
    pub radius: f64,
    /// 2(δ₁+δ₂), the inflation of S_d.
    pub sd_inflation: f64,
}

/// Trap radius for dynamics that respond to vanishing-error estimates of the profile.
pub fn estimated_response_radius(delta1: f64, delta2: f64, l_c: f64) -> Result<EstimatedResponseRadius> {
    check_contraction_inputs(delta1, delta2, l_c)?;
    let d = delta1 + delta2;
    Ok(EstimatedResponseRadius {
        radius: d * (3.0 - 2.0 * l_c) / (1.0 - l_c),
        sd_inflation: 2.0 * d,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrapReport {
    pub center: Vec<f64>,
    pub radius: f64,
    pub burn_in: usize,
    /// First index from which every later state lies in the closed ball.
    pub all_inside_after: Option<usize>,
    /// Largest distance to the centre over states with index ≥ burn_in.
    pub max_tail_distance: f64,
}

/// Checks when a path enters and stays in the closed ball N_radius[center].
pub fn verify_trap(points: &[Vec<f64>], center: &[f64], radius: f64, burn_in: usize) -> Result<TrapReport> {
    if burn_in >= points.len() {
        return Err(Error::domain(format!("burn-in {burn_in} not below trajectory length {}", points.len())));
    }
    let dists: Vec<f64> = points.iter().map(|p| distance(p, center)).collect();
    let max_tail_distance = dists[burn_in..].iter().copied().fold(0.0, f64::max);
    let mut all_inside_after = None;
    for t in (burn_in..points.len()).rev() {
        if dists[t] <= radius {
            all_inside_after = Some(t);
        } else {
            break;
        }
    }
    Ok(TrapReport {
        center: center.to_vec(),
        radius,
        burn_in,
        all_inside_after,
        max_tail_distance,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Report {
    /// p_n ≤ L^n p₀ + Σ_{k<n} δ_k L^{n−k} for every recorded n.
    pub premise_holds: bool,
    /// Tail supremum of p.
    pub lhs: f64,
    /// Tail supremum of δ divided by (1−L).
    pub rhs: f64,
    pub holds: bool,
    /// Tail supremum of δ times L/(1−L).
    pub tight_rhs: f64,
    pub tight_holds: bool,
    /// First index of the tail window.
    pub window_start: usize,
}

/// Finite-prefix check of limsup p ≤ limsup δ/(1−L) for sequences obeying the
/// contraction recursion; limsups are tail suprema over the final half.
pub fn lemma1_limsup_bound(p: &[f64], delta: &[f64], l_f: f64) -> Result<Lemma1Report> {
    if !(0.0..1.0).contains(&l_f) {
        return Err(Error::domain(format!("L_F = {l_f} outside [0, 1)")));
    }
    if p.is_empty() || p.len() != delta.len() {
        return Err(Error::shape("p and δ must be nonempty and equally long"));
    }
    if p.iter().chain(delta).any(|v| !(*v >= 0.0)) {
        return Err(Error::domain("sequences must be nonnegative"));
    }
    let scale = p.iter().chain(delta).copied().fold(1.0, f64::max);
    let tol = 1e-9 * scale;

    let mut premise_holds = true;
    let mut bound = p[0];
    for n in 1..p.len() {
        bound = l_f * (bound + delta[n - 1]);
        premise_holds &= p[n] <= bound + tol;
    }

    let window_start = p.len() / 2;
    let sup = |s: &[f64]| s[window_start..].iter().copied().fold(0.0, f64::max);
    let lhs = sup(p);
    let d = sup(delta);
    let rhs = d / (1.0 - l_f);
    let tight_rhs = d * l_f / (1.0 - l_f);
    Ok(Lemma1Report {
        premise_holds,
        lhs,
        rhs,
        holds: lhs <= rhs + tol,
        tight_rhs,
        tight_holds: lhs <= tight_rhs + tol,
        window_start,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma0Report {
    /// Tail supremum over the final half, the limsup surrogate.
    pub alpha: f64,
    pub epsilon: f64,
    pub count_above_alpha_minus_eps: usize,
    /// Some index in the tail window exceeds α − ε, the finite witness of "infinitely often".
    pub recurs_in_tail: bool,
    pub count_above_alpha_plus_eps: usize,
    pub last_above_alpha_plus_eps: Option<usize>,
}

/// Counts how often a bounded sequence exceeds its limsup surrogate ∓ ε.
pub fn lemma0_limsup_utility(seq: &[f64], epsilon: f64) -> Result<Lemma0Report> {
    if seq.is_empty() {
        return Err(Error::domain("empty sequence"));
    }
    if !(epsilon > 0.0) {
        return Err(Error::domain(format!("ε = {epsilon} must be positive")));
    }
    let window_start = seq.len() / 2;
    let alpha = seq[window_start..].iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let above_minus: Vec<usize> = (0..seq.len()).filter(|&i| seq[i] > alpha - epsilon).collect();
    let above_plus: Vec<usize> = (0..seq.len()).filter(|&i| seq[i] > alpha + epsilon).collect();
    Ok(Lemma0Report {
        alpha,
        epsilon,
        count_above_alpha_minus_eps: above_minus.len(),
        recurs_in_tail: above_minus.iter().any(|&i| i >= window_start),
        count_above_alpha_plus_eps: above_plus.len(),
        last_above_alpha_plus_eps: above_plus.last().copied(),
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;

    fn unit_square_grid(n: usize) -> Vec<Vec<f64>> {
        let mut out = Vec::new();
        for i in 0..n {
            for j in 0..n {
                out.push(vec![i as f64 / (n - 1) as f64, j as f64 / (n - 1) as f64]);
            }
        }
        out
    }

    #[test]
    fn identity_is_scaled_toward_anchor() {
        let samples = unit_square_grid(5);
        let (c, d2) = build_contraction(Arc::new(|x: &[f64]| x.to_vec()), &samples, AnchorPolicy::Centroid, 0.1).unwrap();
        assert!((c.alpha() - 0.9).abs() < 1e-12);
        assert_eq!(c.anchor(), &[0.5, 0.5]);
        assert!((d2 - 0.1 * 0.5f64.sqrt()).abs() < 1e-12);
        assert!((c.lipschitz() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn constant_map_needs_no_scaling() {
        let samples = unit_square_grid(3);
        let (c, d2) = build_contraction(Arc::new(|_: &[f64]| vec![3.0, 4.0]), &samples, AnchorPolicy::Centroid, 0.1).unwrap();
        assert_eq!(c.alpha(), 1.0);
        assert_eq!(d2, 0.0);
        assert_eq!(c.base_lipschitz(), 0.0);
        let fp = fixed_point(&c, &[0.0, 0.0], 1e-12, 10).unwrap();
        assert_eq!(fp.x, vec![3.0, 4.0]);
        assert_eq!(fp.iterations, 1);
    }

    #[test]
    fn bad_inputs_rejected() {
        let id: VectorFn = Arc::new(|x: &[f64]| x.to_vec());
        assert!(matches!(build_contraction(id.clone(), &[], AnchorPolicy::Centroid, 0.1), Err(Error::Domain(_))));
        assert!(matches!(
            build_contraction(id, &unit_square_grid(2), AnchorPolicy::Centroid, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(theorem1_radii(0.0, 0.0, 1.0).is_err());
        assert!(estimated_response_radius(0.0, 0.0, 1.2).is_err());
        assert!(theorem1_part2_radius(2, 2, 0.5, 0.5, 0.5, 1.0, 0.0).is_err());
        assert!(lemma1_limsup_bound(&[1.0], &[0.0], 1.0).is_err());
        assert!(lemma0_limsup_utility(&[], 0.1).is_err());
    }

    #[test]
    fn scalar_affine_fixed_point() {
        let samples: Vec<Vec<f64>> = (0..11).map(|i| vec![i as f64]).collect();
        let (c, _) = build_contraction(Arc::new(|x: &[f64]| vec![0.5 * x[0] + 1.0]), &samples, AnchorPolicy::Centroid, 0.1).unwrap();
        let fp = fixed_point(&c, &[0.0], 1e-12, 200).unwrap();
        assert!((fp.x[0] - 2.0).abs() <= 1e-12);
    }

    #[test]
    fn expanding_budget_reports_convergence_error() {
        let samples: Vec<Vec<f64>> = (0..11).map(|i| vec![i as f64]).collect();
        let (c, _) = build_contraction(Arc::new(|x: &[f64]| vec![0.5 * x[0] + 1.0]), &samples, AnchorPolicy::Centroid, 0.1).unwrap();
        assert!(matches!(fixed_point(&c, &[1e6], 1e-12, 3), Err(Error::Convergence { iterations: 3, .. })));
    }

    #[test]
    fn radii_arithmetic() {
        let b = theorem1_radii(1.0, 0.5, 0.5).unwrap();
        assert_eq!((b.r_z, b.r_k, b.r_tilde), (1.0, 3.0, 4.0));
        let b = theorem1_radii(0.7, 0.0, 0.5).unwrap();
        assert_eq!(b.r_k, 1.4);
        assert_eq!(theorem1_part2_radius(2, 1, 0.5, 0.5, 0.5, 1.0, 0.0).unwrap(), 1.5);
        assert_eq!(theorem1_part2_radius(3, 1, 0.0, 1.0, 1.0, 1.0, 0.25).unwrap(), 3.25);
        let e = estimated_response_radius(1.0, 0.0, 0.5).unwrap();
        assert_eq!(e.radius, 4.0);
        assert_eq!(e.sd_inflation, 2.0);
    }

    #[test]
    fn part2_attaches_every_r() {
        let b = attach_part2(theorem1_radii(1.0, 0.0, 0.5).unwrap(), 3, 0.5, &[0.5, 0.25], &[0.0, 0.1], false).unwrap();
        let p = b.part2.unwrap();
        assert_eq!(p.radii.len(), 2);
        assert!((p.radii[0] - 0.5 * 1.75 / 0.5).abs() < 1e-12);
        assert!((p.radii[1] - (0.25 * 1.75 / 0.5 + 0.1)).abs() < 1e-12);
        assert_eq!(p.max_radius, p.radii[0]);
    }

    #[test]
    fn trap_reports() {
        let c = vec![vec![1.0, 1.0]; 5];
        let r = verify_trap(&c, &[1.0, 1.0], 0.0, 0).unwrap();
        assert_eq!(r.all_inside_after, Some(0));
        let moving: Vec<Vec<f64>> = (0..5).map(|i| vec![i as f64, 0.0]).collect();
        assert_eq!(verify_trap(&moving, &[0.0, 0.0], 0.0, 0).unwrap().all_inside_after, None);
        let r = verify_trap(&moving, &[4.0, 0.0], 1.5, 1).unwrap();
        assert_eq!(r.all_inside_after, Some(3));
        assert_eq!(r.max_tail_distance, 3.0);
        assert!(verify_trap(&moving, &[0.0, 0.0], 1.0, 5).is_err());
    }

    #[test]
    fn lemma1_geometric_cases() {
        let l: f64 = 0.5;
        let p: Vec<f64> = (0..200).map(|n| 3.0 * l.powi(n)).collect();
        let r = lemma1_limsup_bound(&p, &vec![0.0; 200], l).unwrap();
        assert!(r.premise_holds && r.holds && r.tight_holds);

        let d = 2.0;
        let mut p = vec![0.0];
        for _ in 1..200 {
            let last = *p.last().unwrap();
            p.push(l * (last + d));
        }
        let r = lemma1_limsup_bound(&p, &vec![d; 200], l).unwrap();
        assert!(r.premise_holds && r.holds && r.tight_holds);
        assert!((r.lhs - d * l / (1.0 - l)).abs() < 1e-9);
    }

    #[test]
    fn lemma0_counts() {
        let r = lemma0_limsup_utility(&[2.0; 10], 0.1).unwrap();
        assert_eq!((r.count_above_alpha_minus_eps, r.count_above_alpha_plus_eps), (10, 0));
        let alt: Vec<f64> = (0..20).map(|i| (i % 2) as f64).collect();
        let r = lemma0_limsup_utility(&alt, 0.1).unwrap();
        assert_eq!(r.alpha, 1.0);
        assert_eq!(r.count_above_alpha_minus_eps, 10);
        let harmonic: Vec<f64> = (1..=10_000).map(|n| 1.0 / n as f64).collect();
        let r = lemma0_limsup_utility(&harmonic, 0.01).unwrap();
        assert!(r.alpha < 1e-3);
        assert!(r.count_above_alpha_plus_eps < 100);
    }
}
