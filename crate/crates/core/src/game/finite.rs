use std::sync::Arc;

use super::{Game, ScalarFn, SmoothGame};
use crate::{Error, Result};

/// A game with finitely many actions per player and dense utility tables.
///
/// Tables are indexed in row-major joint-action order: player 0's action index
/// varies slowest, the last player's fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteGame {
    action_sets: Vec<Vec<f64>>,
    utilities: Vec<Vec<f64>>,
    strides: Vec<usize>,
}

fn strides_for(shape: &[usize]) -> Vec<usize> {
    let mut strides = vec![1; shape.len()];
    for i in (0..shape.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * shape[i + 1];
    }
    strides
}

fn validate_action_sets(action_sets: &[Vec<f64>]) -> Result<()> {
    if action_sets.is_empty() {
        return Err(Error::shape("a game needs at least one player"));
    }
    for (i, set) in action_sets.iter().enumerate() {
        if set.is_empty() {
            return Err(Error::shape(format!("player {i} has an empty action set")));
        }
        if let Some(v) = set.iter().find(|v| !v.is_finite()) {
            return Err(Error::domain(format!("player {i} has a non-finite action {v}")));
        }
        for (j, a) in set.iter().enumerate() {
            if set[..j].contains(a) {
                return Err(Error::shape(format!("player {i} lists action {a} twice")));
            }
        }
    }
    Ok(())
}

impl FiniteGame {
    pub fn new(action_sets: Vec<Vec<f64>>, utilities: Vec<Vec<f64>>) -> Result<Self> {
        validate_action_sets(&action_sets)?;
        if utilities.len() != action_sets.len() {
            return Err(Error::shape(format!(
                "{} utility tables for {} players",
                utilities.len(),
                action_sets.len()
            )));
        }
        let shape: Vec<usize> = action_sets.iter().map(Vec::len).collect();
        let count: usize = shape.iter().product();
        for (i, table) in utilities.iter().enumerate() {
            if table.len() != count {
                return Err(Error::shape(format!(
                    "utility table of player {i} has {} entries, expected {count}",
                    table.len()
                )));
            }
            if table.iter().any(|u| !u.is_finite()) {
                return Err(Error::domain(format!("utility table of player {i} has non-finite entries")));
            }
        }
        Ok(FiniteGame {
            strides: strides_for(&shape),
            action_sets,
            utilities,
        })
    }

    /// Tabulates `utility(player, action values)` over every joint action.
    pub fn from_fn<F>(action_sets: Vec<Vec<f64>>, utility: F) -> Result<Self>
    where
        F: Fn(usize, &[f64]) -> f64,
    {
        validate_action_sets(&action_sets)?;
        let shape: Vec<usize> = action_sets.iter().map(Vec::len).collect();
        let strides = strides_for(&shape);
        let count: usize = shape.iter().product();
        let n = action_sets.len();
        let mut utilities = vec![Vec::with_capacity(count); n];
        let mut values = vec![0.0; n];
        for idx in 0..count {
            for i in 0..n {
                values[i] = action_sets[i][(idx / strides[i]) % shape[i]];
            }
            for (i, table) in utilities.iter_mut().enumerate() {
                table.push(utility(i, &values));
            }
        }
        FiniteGame::new(action_sets, utilities)
    }

    pub fn player_count(&self) -> usize {
        self.action_sets.len()
    }

    pub fn action_sets(&self) -> &[Vec<f64>] {
        &self.action_sets
    }

    pub fn action_count(&self, player: usize) -> usize {
        self.action_sets[player].len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.action_sets.iter().map(Vec::len).collect()
    }

    /// |𝒜|, the number of joint action profiles.
    pub fn profile_count(&self) -> usize {
        self.action_sets.iter().map(Vec::len).product()
    }

    pub fn table(&self, player: usize) -> &[f64] {
        &self.utilities[player]
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.utilities
    }

    pub fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.player_count() {
            return Err(Error::domain(format!(
                "player {player} out of range for a {}-player game",
                self.player_count()
            )));
        }
        Ok(())
    }

    pub fn check_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.player_count() {
            return Err(Error::domain(format!(
                "profile has {} coordinates, game has {} players",
                profile.len(),
                self.player_count()
            )));
        }
        for (i, &a) in profile.iter().enumerate() {
            if a >= self.action_count(i) {
                return Err(Error::domain(format!(
                    "action index {a} out of range for player {i} ({} actions)",
                    self.action_count(i)
                )));
            }
        }
        Ok(())
    }

    pub fn index_of(&self, profile: &[usize]) -> usize {
        profile.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn profile_at(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.action_sets)
            .map(|(s, set)| (index / s) % set.len())
            .collect()
    }

    pub fn profiles(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.profile_count()).map(move |i| self.profile_at(i))
    }

    /// Index of the profile obtained from `index` by switching `player` to `action`.
    pub(crate) fn deviate_index(&self, index: usize, player: usize, action: usize) -> usize {
        let s = self.strides[player];
        let current = (index / s) % self.action_count(player);
        index - current * s + action * s
    }

    pub fn values(&self, profile: &[usize]) -> Vec<f64> {
        profile
            .iter()
            .enumerate()
            .map(|(i, &a)| self.action_sets[i][a])
            .collect()
    }

    /// Maps action values to indices, requiring each value to be a declared action
    /// (within `tol`).
    pub fn indices_of_values(&self, values: &[f64], tol: f64) -> Result<Vec<usize>> {
        if values.len() != self.player_count() {
            return Err(Error::domain(format!(
                "profile has {} coordinates, game has {} players",
                values.len(),
                self.player_count()
            )));
        }
        values
            .iter()
            .enumerate()
            .map(|(i, v)| {
                self.action_sets[i]
                    .iter()
                    .position(|a| (a - v).abs() <= tol)
                    .ok_or_else(|| Error::domain(format!("{v} is not an action of player {i}")))
            })
            .collect()
    }

    pub fn utility_of(&self, player: usize, profile: &[usize]) -> f64 {
        self.utilities[player][self.index_of(profile)]
    }

    /// uᵢ(a'ᵢ, a₋ᵢ) − uᵢ(aᵢ, a₋ᵢ).
    pub fn deviation_gain(&self, player: usize, profile: &[usize], alt: usize) -> Result<f64> {
        self.check_player(player)?;
        self.check_profile(profile)?;
        if alt >= self.action_count(player) {
            return Err(Error::domain(format!(
                "alternative action {alt} out of range for player {player}"
            )));
        }
        let idx = self.index_of(profile);
        let dev = self.deviate_index(idx, player, alt);
        let table = &self.utilities[player];
        Ok(table[dev] - table[idx])
    }

    /// Largest unilateral gain available at the profile with the given table index.
    pub(crate) fn max_gain_at(&self, index: usize) -> f64 {
        let mut best: f64 = 0.0;
        for (i, table) in self.utilities.iter().enumerate() {
            let base = table[index];
            for alt in 0..self.action_count(i) {
                let g = table[self.deviate_index(index, i, alt)] - base;
                if g > best {
                    best = g;
                }
            }
        }
        best
    }

    /// maxᵢ maxₐ'ᵢ [uᵢ(a'ᵢ, a₋ᵢ) − uᵢ(a)] ≥ 0; a profile is an ε-NE iff this is ≤ ε.
    pub fn max_gain(&self, profile: &[usize]) -> Result<f64> {
        self.check_profile(profile)?;
        Ok(self.max_gain_at(self.index_of(profile)))
    }

    pub fn is_epsilon_ne(&self, profile: &[usize], epsilon: f64) -> Result<bool> {
        Ok(self.max_gain(profile)? <= epsilon)
    }

    /// Largest deviation gain anywhere in the game.
    pub fn max_deviation_gain(&self) -> f64 {
        (0..self.profile_count())
            .map(|i| self.max_gain_at(i))
            .fold(0.0, f64::max)
    }

    pub fn same_structure(&self, other: &FiniteGame) -> bool {
        self.action_sets == other.action_sets
    }

    /// u^M = u + Δu, tabulated.
    pub fn with_perturbation<F>(&self, delta: F) -> FiniteGame
    where
        F: Fn(usize, &[f64]) -> f64,
    {
        let mut utilities = self.utilities.clone();
        for idx in 0..self.profile_count() {
            let values = self.values(&self.profile_at(idx));
            for (i, table) in utilities.iter_mut().enumerate() {
                table[idx] += delta(i, &values);
            }
        }
        FiniteGame {
            action_sets: self.action_sets.clone(),
            utilities,
            strides: self.strides.clone(),
        }
    }

    /// Extends the game to Conv(𝒜) by multilinear interpolation of its tables.
    ///
    /// Deviations in the returned smooth game range over the original action
    /// sets, so best responses agree with the finite game on 𝒜.
    pub fn interpolated(&self) -> SmoothGame {
        let interp = Arc::new(Interpolator::new(&self.action_sets, self.strides.clone()));
        let bounds = interp.bounds();
        let utilities: Vec<ScalarFn> = self
            .utilities
            .iter()
            .map(|table| {
                let table = Arc::new(table.clone());
                let interp = Arc::clone(&interp);
                Arc::new(move |x: &[f64]| interp.eval(&table, x)) as ScalarFn
            })
            .collect();
        let lipschitz = (0..self.player_count())
            .map(|i| Some(self.interpolation_lipschitz(&interp, i)))
            .collect();
        SmoothGame::new(bounds, utilities)
            .expect("bounds of a validated finite game are well formed")
            .with_action_lists(self.action_sets.clone())
            .expect("action lists lie inside their own hull")
            .with_lipschitz(lipschitz)
            .expect("one constant per player")
    }

    /// Lipschitz constant of the multilinear interpolant of a player's table.
    ///
    /// Inside a cell each partial derivative is a convex combination of slopes
    /// along grid edges, so √(Σⱼ Dⱼ²) with Dⱼ the steepest edge slope along axis
    /// j bounds the gradient norm everywhere.
    fn interpolation_lipschitz(&self, interp: &Interpolator, player: usize) -> f64 {
        let table = &self.utilities[player];
        let mut sum = 0.0;
        for (axis, sorted) in interp.axes.iter().enumerate() {
            let stride = self.strides[axis];
            let mut steepest: f64 = 0.0;
            for idx in 0..self.profile_count() {
                if (idx / stride) % sorted.len() != sorted[0].1 {
                    continue;
                }
                for w in sorted.windows(2) {
                    let (lo, hi) = (w[0], w[1]);
                    let u_lo = table[self.deviate_index(idx, axis, lo.1)];
                    let u_hi = table[self.deviate_index(idx, axis, hi.1)];
                    steepest = steepest.max((u_hi - u_lo).abs() / (hi.0 - lo.0));
                }
            }
            sum += steepest * steepest;
        }
        sum.sqrt()
    }
}

impl Game for FiniteGame {
    type Action = usize;

    fn player_count(&self) -> usize {
        self.action_sets.len()
    }

    fn validate_profile(&self, profile: &[usize]) -> Result<()> {
        self.check_profile(profile)
    }

    fn action_value(&self, player: usize, action: usize) -> f64 {
        self.action_sets[player][action]
    }

    fn utility(&self, player: usize, profile: &[usize]) -> f64 {
        self.utility_of(player, profile)
    }

    fn best_action(&self, player: usize, profile: &[usize]) -> Result<usize> {
        self.check_player(player)?;
        self.check_profile(profile)?;
        let idx = self.index_of(profile);
        let table = &self.utilities[player];
        let incumbent = profile[player];
        let mut best = incumbent;
        let mut best_u = table[idx];
        for alt in 0..self.action_count(player) {
            let u = table[self.deviate_index(idx, player, alt)];
            if u > best_u {
                best = alt;
                best_u = u;
            }
        }
        if best == incumbent {
            return Ok(incumbent);
        }
        // Lowest index among the maximisers.
        Ok((0..self.action_count(player))
            .find(|&alt| table[self.deviate_index(idx, player, alt)] == best_u)
            .unwrap_or(best))
    }

    fn first_improving_action(&self, player: usize, profile: &[usize]) -> Result<Option<usize>> {
        self.check_player(player)?;
        self.check_profile(profile)?;
        let idx = self.index_of(profile);
        let table = &self.utilities[player];
        let base = table[idx];
        Ok((0..self.action_count(player)).find(|&alt| table[self.deviate_index(idx, player, alt)] > base))
    }

    fn improves(&self, player: usize, profile: &[usize], candidate: usize) -> bool {
        let idx = self.index_of(profile);
        let table = &self.utilities[player];
        table[self.deviate_index(idx, player, candidate)] > table[idx]
    }

    fn unilateral_max_gain(&self, profile: &[usize]) -> Result<f64> {
        self.max_gain(profile)
    }

    fn same_action(&self, a: usize, b: usize) -> bool {
        a == b
    }

    fn action_key(&self, action: usize) -> Option<u64> {
        Some(action as u64)
    }
}

/// Multilinear interpolation over a tensor grid whose axes need not be sorted.
#[derive(Debug)]
struct Interpolator {
    /// Per axis: (value, original index) sorted by value.
    axes: Vec<Vec<(f64, usize)>>,
    strides: Vec<usize>,
}

impl Interpolator {
    fn new(action_sets: &[Vec<f64>], strides: Vec<usize>) -> Self {
        let axes = action_sets
            .iter()
            .map(|set| {
                let mut axis: Vec<(f64, usize)> = set.iter().copied().zip(0..).collect();
                axis.sort_by(|a, b| a.0.total_cmp(&b.0));
                axis
            })
            .collect();
        Interpolator { axes, strides }
    }

    fn bounds(&self) -> Vec<(f64, f64)> {
        self.axes
            .iter()
            .map(|axis| (axis[0].0, axis[axis.len() - 1].0))
            .collect()
    }

    /// Per axis: two (table offset, weight) corners.
    fn corners(&self, x: &[f64]) -> Vec<[(usize, f64); 2]> {
        self.axes
            .iter()
            .zip(&self.strides)
            .zip(x)
            .map(|((axis, &stride), &xi)| {
                if axis.len() == 1 {
                    return [(axis[0].1 * stride, 1.0), (0, 0.0)];
                }
                let k = axis.partition_point(|(v, _)| *v <= xi).clamp(1, axis.len() - 1);
                let (lo, hi) = (axis[k - 1], axis[k]);
                let t = ((xi - lo.0) / (hi.0 - lo.0)).clamp(0.0, 1.0);
                [(lo.1 * stride, 1.0 - t), (hi.1 * stride, t)]
            })
            .collect()
    }

    fn eval(&self, table: &[f64], x: &[f64]) -> f64 {
        let corners = self.corners(x);
        let n = corners.len();
        let mut total = 0.0;
        for mask in 0..(1usize << n) {
            let mut w = 1.0;
            let mut offset = 0;
            for (axis, c) in corners.iter().enumerate() {
                let (o, wi) = c[(mask >> axis) & 1];
                w *= wi;
                offset += o;
            }
            if w != 0.0 {
                total += w * table[offset];
            }
        }
        total
    }
}

/// A candidate potential given as a dense table over a finite game's profiles.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialTable {
    shape: Vec<usize>,
    values: Vec<f64>,
}

impl PotentialTable {
    pub fn new(shape: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let count: usize = shape.iter().product();
        if values.len() != count {
            return Err(Error::shape(format!(
                "potential table has {} entries, expected {count}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("potential table has non-finite entries"));
        }
        Ok(PotentialTable { shape, values })
    }

    /// Tabulates `phi(action values)` over the game's profiles.
    pub fn from_fn<F: Fn(&[f64]) -> f64>(game: &FiniteGame, phi: F) -> Result<Self> {
        let values = game.profiles().map(|p| phi(&game.values(&p))).collect();
        PotentialTable::new(game.shape(), values)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn check_game(&self, game: &FiniteGame) -> Result<()> {
        if self.shape != game.shape() {
            return Err(Error::shape(format!(
                "potential table shape {:?} does not match game shape {:?}",
                self.shape,
                game.shape()
            )));
        }
        Ok(())
    }

    pub fn at(&self, game: &FiniteGame, profile: &[usize]) -> f64 {
        self.values[game.index_of(profile)]
    }

    /// The potential extended to Conv(𝒜) by the same interpolation as
    /// [`FiniteGame::interpolated`].
    pub fn interpolated(&self, game: &FiniteGame) -> Result<ScalarFn> {
        self.check_game(game)?;
        let interp = Interpolator::new(game.action_sets(), strides_for(&self.shape));
        let values = self.values.clone();
        Ok(Arc::new(move |x: &[f64]| interp.eval(&values, x)))
    }
}

/// φ: 𝒜 → ℝ, as a table or as a function of action values.
#[derive(Clone)]
pub enum PotentialCandidate {
    Table(PotentialTable),
    Function(ScalarFn),
}

impl std::fmt::Debug for PotentialCandidate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PotentialCandidate::Table(t) => f.debug_tuple("Table").field(t).finish(),
            PotentialCandidate::Function(_) => f.write_str("Function(..)"),
        }
    }
}

impl PotentialCandidate {
    pub fn tabulate(&self, game: &FiniteGame) -> Result<PotentialTable> {
        match self {
            PotentialCandidate::Table(t) => {
                t.check_game(game)?;
                Ok(t.clone())
            }
            PotentialCandidate::Function(phi) => PotentialTable::from_fn(game, |v| phi(v)),
        }
    }
}

impl From<PotentialTable> for PotentialCandidate {
    fn from(t: PotentialTable) -> Self {
        PotentialCandidate::Table(t)
    }
}

/// max over i, a'ᵢ, a of |[fᵢ(a'ᵢ,a₋ᵢ) − fᵢ(a)] − [gᵢ(a'ᵢ,a₋ᵢ) − gᵢ(a)]|.
fn max_pairwise<F, G>(game: &FiniteGame, f: F, g: G) -> f64
where
    F: Fn(usize, usize) -> f64,
    G: Fn(usize, usize) -> f64,
{
    let mut worst: f64 = 0.0;
    for idx in 0..game.profile_count() {
        for i in 0..game.player_count() {
            let (f0, g0) = (f(i, idx), g(i, idx));
            for alt in 0..game.action_count(i) {
                let dev = game.deviate_index(idx, i, alt);
                let d = ((f(i, dev) - f0) - (g(i, dev) - g0)).abs();
                if d > worst {
                    worst = d;
                }
            }
        }
    }
    worst
}

/// Maximum pairwise difference between two games on the same players and actions.
pub fn mpd(g: &FiniteGame, h: &FiniteGame) -> Result<f64> {
    if g.player_count() != h.player_count() {
        return Err(Error::shape(format!(
            "games have {} and {} players",
            g.player_count(),
            h.player_count()
        )));
    }
    if !g.same_structure(h) {
        return Err(Error::shape("games have different action sets"));
    }
    Ok(max_pairwise(g, |i, idx| g.utilities[i][idx], |i, idx| h.utilities[i][idx]))
}

/// Distance δ between a game and the exact potential game induced by φ.
///
/// Zero iff φ is an exact potential of `game`.
pub fn potential_residual(game: &FiniteGame, phi: &PotentialCandidate) -> Result<f64> {
    let table = phi.tabulate(game)?;
    Ok(max_pairwise(game, |i, idx| game.utilities[i][idx], |_, idx| table.values[idx]))
}

/// 𝒳_ε: every profile at which no unilateral deviation gains more than ε.
pub fn epsilon_ne_set(game: &FiniteGame, epsilon: f64) -> Result<Vec<Vec<usize>>> {
    if !(epsilon >= 0.0) {
        return Err(Error::domain(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    Ok((0..game.profile_count())
        .filter(|&idx| game.max_gain_at(idx) <= epsilon)
        .map(|idx| game.profile_at(idx))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_by_two(u1: [[f64; 2]; 2], u2: [[f64; 2]; 2]) -> FiniteGame {
        FiniteGame::new(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![
                vec![u1[0][0], u1[0][1], u1[1][0], u1[1][1]],
                vec![u2[0][0], u2[0][1], u2[1][0], u2[1][1]],
            ],
        )
        .unwrap()
    }

    fn matching_pennies() -> FiniteGame {
        two_by_two([[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]])
    }

    #[test]
    fn row_major_indexing() {
        let g = FiniteGame::from_fn(vec![vec![0.0, 1.0], vec![0.0, 1.0, 2.0]], |i, v| {
            (i as f64) * 100.0 + v[0] * 10.0 + v[1]
        })
        .unwrap();
        assert_eq!(g.index_of(&[1, 2]), 5);
        assert_eq!(g.profile_at(4), vec![1, 1]);
        assert_eq!(g.utility_of(0, &[1, 2]), 12.0);
        assert_eq!(g.utility_of(1, &[0, 1]), 101.0);
    }

    #[test]
    fn rejects_bad_tables() {
        let err = FiniteGame::new(vec![vec![0.0, 1.0]], vec![vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
        let err = FiniteGame::new(vec![vec![0.0, 0.0]], vec![vec![1.0, 2.0]]).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
        let err = FiniteGame::new(vec![vec![0.0]], vec![vec![f64::NAN]]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn deviation_gain_table_lookup() {
        let g = two_by_two([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(g.deviation_gain(0, &[0, 0], 1).unwrap(), -1.0);
        assert_eq!(g.deviation_gain(0, &[0, 0], 0).unwrap(), 0.0);
        assert!(matches!(g.deviation_gain(2, &[0, 0], 0), Err(Error::Domain(_))));
        assert!(matches!(g.deviation_gain(0, &[0, 0], 2), Err(Error::Domain(_))));
    }

    #[test]
    fn mpd_is_zero_for_opponent_only_shift() {
        let g = matching_pennies();
        let shifted = g.with_perturbation(|i, v| if i == 0 { 3.0 * v[1] } else { -7.0 * v[0] + 1.0 });
        assert_eq!(mpd(&g, &g).unwrap(), 0.0);
        assert_eq!(mpd(&g, &shifted).unwrap(), 0.0);
    }

    #[test]
    fn mpd_shape_mismatch() {
        let g = matching_pennies();
        let h = FiniteGame::new(vec![vec![0.0, 2.0], vec![0.0, 1.0]], g.tables().to_vec()).unwrap();
        assert!(matches!(mpd(&g, &h), Err(Error::Shape(_))));
    }

    #[test]
    fn zero_potential_residual_is_max_gain() {
        let g = two_by_two([[3.0, 0.0], [5.0, 1.0]], [[3.0, 5.0], [0.0, 1.0]]);
        let zero = PotentialCandidate::Table(PotentialTable::new(vec![2, 2], vec![0.0; 4]).unwrap());
        let mut expected: f64 = 0.0;
        for p in g.profiles() {
            for i in 0..2 {
                for alt in 0..2 {
                    expected = expected.max(g.deviation_gain(i, &p, alt).unwrap().abs());
                }
            }
        }
        assert_eq!(potential_residual(&g, &zero).unwrap(), expected);
    }

    #[test]
    fn potential_shape_mismatch() {
        let g = matching_pennies();
        let phi = PotentialCandidate::Table(PotentialTable::new(vec![4], vec![0.0; 4]).unwrap());
        assert!(matches!(potential_residual(&g, &phi), Err(Error::Shape(_))));
    }

    #[test]
    fn matching_pennies_has_no_pure_ne() {
        assert!(epsilon_ne_set(&matching_pennies(), 0.0).unwrap().is_empty());
        assert_eq!(epsilon_ne_set(&matching_pennies(), 2.0).unwrap().len(), 4);
        assert!(matches!(epsilon_ne_set(&matching_pennies(), -1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn best_action_ties_and_incumbent() {
        let g = FiniteGame::new(vec![vec![0.0, 1.0, 2.0], vec![0.0]], vec![vec![1.0, 5.0, 5.0], vec![0.0; 3]])
            .unwrap();
        assert_eq!(g.best_action(0, &[0, 0]).unwrap(), 1);
        assert_eq!(g.best_action(0, &[2, 0]).unwrap(), 2);
        assert_eq!(g.first_improving_action(0, &[0, 0]).unwrap(), Some(1));
        assert_eq!(g.first_improving_action(0, &[1, 0]).unwrap(), None);
    }

    #[test]
    fn interpolation_matches_tables_on_grid() {
        let g = FiniteGame::from_fn(vec![vec![2.0, 0.0, 1.0], vec![0.0, 3.0]], |i, v| {
            (i as f64 + 1.0) * v[0] * v[1] - v[0]
        })
        .unwrap();
        let s = g.interpolated();
        for p in g.profiles() {
            let x = g.values(&p);
            for i in 0..2 {
                assert_eq!(s.utility_at(i, &x), g.utility_of(i, &p));
            }
        }
        // Bilinear function is reproduced exactly between nodes.
        let u = s.utility_at(0, &[0.5, 1.5]);
        assert!((u - (0.5 * 1.5 - 0.5)).abs() < 1e-12);
    }
}
