//! Nash equilibria of small two-player normal-form games.
//!
//! [`support_enumeration`] finds *all* equilibria of games up to 4x4 by
//! walking every pair of equal-cardinality supports, solving the
//! indifference system on each, and keeping the solutions that stay on the
//! simplex and survive a best-response check. Completeness matters here:
//! corrigibility is a statement about the *unique* equilibrium of a game,
//! so a path-following solver that returns one sample equilibrium would
//! not be enough.
//!
//! Games with payoff ties can carry continua of equilibria; those make an
//! indifference system singular, which is reported through
//! [`EquilibriumSet::degenerate`] instead of an error.

use serde::Serialize;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::game::Bimatrix;

/// Default tolerance for equilibrium checks.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Equilibria closer than this (L-infinity) are considered duplicates.
pub const DEDUP_TOL: f64 = 1e-7;
/// Largest game side supported by the enumerating solver.
pub const SIZE_CAP: usize = 4;

/// A probability distribution over one player's actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    /// Validates entries in `[0, 1]` summing to 1 within `1e-9`.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution(
                "strategy needs at least one action".to_string(),
            ));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0 || *p > 1.0) {
            return Err(Error::InvalidDistribution(format!(
                "strategy entries must lie in [0, 1], got {probs:?}"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "strategy entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self(probs))
    }

    /// The pure strategy playing action `action` out of `n`.
    pub fn pure(action: usize, n: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[action] = 1.0;
        Self(probs)
    }

    /// The uniform strategy over `n` actions.
    pub fn uniform(n: usize) -> Self {
        Self(vec![1.0 / n as f64; n])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Index of the action carrying (weakly) the most probability mass.
    pub fn argmax(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(Ordering::Equal))
            .map(|(i, _)| i)
            .unwrap_or(0)
    }
}

/// One strategy profile satisfying the mutual best-response condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
}

/// All equilibria found for a game, plus a degeneracy marker set whenever
/// some support's indifference system was singular (a continuum of
/// solutions may exist that is not listed).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumSet {
    pub equilibria: Vec<Equilibrium>,
    pub degenerate: bool,
}

/// Expected payoffs `(row, col)` of a mixed profile: the bilinear form
/// `x' U_k y` for each player `k`.
pub fn expected_payoff(g: &Bimatrix, row: &MixedStrategy, col: &MixedStrategy) -> (f64, f64) {
    let mut v1 = 0.0;
    let mut v2 = 0.0;
    for (i, &xi) in row.probs().iter().enumerate() {
        if xi == 0.0 {
            continue;
        }
        for (j, &yj) in col.probs().iter().enumerate() {
            if yj == 0.0 {
                continue;
            }
            let (u1, u2) = g.get(i, j);
            v1 += xi * yj * u1;
            v2 += xi * yj * u2;
        }
    }
    (v1, v2)
}

/// Largest payoff gain either player can obtain by a unilateral pure
/// deviation from `(row, col)`. Non-positive at an exact equilibrium.
pub fn deviation_gain(g: &Bimatrix, row: &MixedStrategy, col: &MixedStrategy) -> f64 {
    let (v1, v2) = expected_payoff(g, row, col);
    let mut gain = f64::NEG_INFINITY;
    for i in 0..g.rows() {
        let u: f64 = col
            .probs()
            .iter()
            .enumerate()
            .map(|(j, &yj)| yj * g.u1(i, j))
            .sum();
        gain = gain.max(u - v1);
    }
    for j in 0..g.cols() {
        let u: f64 = row
            .probs()
            .iter()
            .enumerate()
            .map(|(i, &xi)| xi * g.u2(i, j))
            .sum();
        gain = gain.max(u - v2);
    }
    gain
}

/// True iff no pure deviation improves either player's expected payoff by
/// more than `tol`.
pub fn is_equilibrium(g: &Bimatrix, row: &MixedStrategy, col: &MixedStrategy, tol: f64) -> bool {
    assert_eq!(row.len(), g.rows(), "row strategy length mismatch");
    assert_eq!(col.len(), g.cols(), "column strategy length mismatch");
    deviation_gain(g, row, col) <= tol
}

/// All pure profiles `(i, j)` where each player's action is a weak best
/// response to the other's (exact payoff comparison).
pub fn pure_equilibria(g: &Bimatrix) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            let row_best = (0..g.rows()).all(|i2| g.u1(i2, j) <= g.u1(i, j));
            let col_best = (0..g.cols()).all(|j2| g.u2(i, j2) <= g.u2(i, j));
            if row_best && col_best {
                out.push((i, j));
            }
        }
    }
    out
}

enum LinearSolution {
    Unique(Vec<f64>),
    /// Rank deficient but consistent: a continuum of solutions.
    Underdetermined,
    /// Rank deficient and contradictory: no solution at all.
    Inconsistent,
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting,
/// classifying rank-deficient systems by consistency.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> LinearSolution {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0_f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    let eps = 1e-12 * scale;
    let mut rank = 0;
    for col in 0..n {
        let pivot_row = (rank..n)
            .max_by(|&r1, &r2| {
                a[r1][col]
                    .abs()
                    .partial_cmp(&a[r2][col].abs())
                    .unwrap_or(Ordering::Equal)
            })
            .unwrap();
        if a[pivot_row][col].abs() < eps {
            continue;
        }
        a.swap(rank, pivot_row);
        b.swap(rank, pivot_row);
        let (pivot_part, rest) = a.split_at_mut(rank + 1);
        let pivot = &pivot_part[rank];
        for (offset, target) in rest.iter_mut().enumerate() {
            let factor = target[col] / pivot[col];
            if factor == 0.0 {
                continue;
            }
            for (t, p) in target[col..].iter_mut().zip(&pivot[col..]) {
                *t -= factor * p;
            }
            b[rank + 1 + offset] -= factor * b[rank];
        }
        rank += 1;
        if rank == n {
            break;
        }
    }
    if rank < n {
        // Zeroed-out rows with a nonzero right-hand side are contradictions.
        let consistent = (rank..n).all(|row| b[row].abs() <= 1e-9 * scale);
        return if consistent {
            LinearSolution::Underdetermined
        } else {
            LinearSolution::Inconsistent
        };
    }
    // Full rank: the pivots occupy columns 0..n in order.
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    LinearSolution::Unique(x)
}

/// All k-subsets of `0..n` in lexicographic order.
fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

enum SupportSolution {
    Point(Vec<f64>),
    Continuum,
    None,
}

/// Solves the indifference system for one support pair: the
/// opponent-facing strategy supported on `own_support` that makes the
/// *other* player indifferent across `other_support`.
///
/// `payoff(other_action, own_action)` reads the indifferent player's
/// payoff table.
fn support_solution(
    other_support: &[usize],
    own_support: &[usize],
    payoff: impl Fn(usize, usize) -> f64,
) -> SupportSolution {
    let k = own_support.len();
    // Unknowns: k probabilities followed by the indifferent player's value.
    let mut a = vec![vec![0.0; k + 1]; k + 1];
    let mut b = vec![0.0; k + 1];
    for (row, &other_action) in other_support.iter().enumerate() {
        for (col, &own_action) in own_support.iter().enumerate() {
            a[row][col] = payoff(other_action, own_action);
        }
        a[row][k] = -1.0;
    }
    a[k][..k].fill(1.0);
    b[k] = 1.0;
    match solve_linear(a, b) {
        LinearSolution::Unique(solution) => SupportSolution::Point(solution[..k].to_vec()),
        LinearSolution::Underdetermined => SupportSolution::Continuum,
        LinearSolution::Inconsistent => SupportSolution::None,
    }
}

fn lex_cmp(a: &Equilibrium, b: &Equilibrium) -> Ordering {
    let left = a.row.probs().iter().chain(a.col.probs());
    let right = b.row.probs().iter().chain(b.col.probs());
    for (x, y) in left.zip(right) {
        match x.partial_cmp(y).unwrap_or(Ordering::Equal) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn linf_distance(a: &Equilibrium, b: &Equilibrium) -> f64 {
    a.row
        .probs()
        .iter()
        .chain(a.col.probs())
        .zip(b.row.probs().iter().chain(b.col.probs()))
        .fold(0.0_f64, |acc, (x, y)| acc.max((x - y).abs()))
}

/// Enumerates all Nash equilibria of a game of at most 4x4.
///
/// Supports of equal cardinality are enumerated in lexicographic order;
/// each candidate must solve its indifference system, stay within `tol`
/// of the simplex, and pass [`is_equilibrium`] at `tol`. Near-duplicates
/// (within [`DEDUP_TOL`]) keep the lexicographically smallest
/// representative, and the returned list is sorted lexicographically.
pub fn support_enumeration(g: &Bimatrix, tol: f64) -> Result<EquilibriumSet> {
    if g.rows() > SIZE_CAP || g.cols() > SIZE_CAP {
        return Err(Error::SizeCap {
            rows: g.rows(),
            cols: g.cols(),
            cap: SIZE_CAP,
            what: "support enumeration",
        });
    }
    let mut degenerate = false;
    let mut found: Vec<Equilibrium> = Vec::new();

    for k in 1..=g.rows().min(g.cols()) {
        for row_support in subsets(g.rows(), k) {
            for col_support in subsets(g.cols(), k) {
                // Column strategy that makes the row player indifferent
                // across its support, and vice versa.
                let col_sol = support_solution(&row_support, &col_support, |i, j| g.u1(i, j));
                let row_sol = support_solution(&col_support, &row_support, |j, i| g.u2(i, j));
                if matches!(col_sol, SupportSolution::Continuum)
                    || matches!(row_sol, SupportSolution::Continuum)
                {
                    degenerate = true;
                }
                let (SupportSolution::Point(col_probs), SupportSolution::Point(row_probs)) =
                    (col_sol, row_sol)
                else {
                    continue;
                };
                if row_probs.iter().chain(&col_probs).any(|&p| p < -tol) {
                    continue;
                }
                let expand = |probs: &[f64], support: &[usize], n: usize| {
                    let mut full = vec![0.0; n];
                    let mut sum = 0.0;
                    for (&action, &p) in support.iter().zip(probs) {
                        let p = p.max(0.0);
                        full[action] = p;
                        sum += p;
                    }
                    for p in &mut full {
                        *p /= sum;
                    }
                    full
                };
                let row = MixedStrategy(expand(&row_probs, &row_support, g.rows()));
                let col = MixedStrategy(expand(&col_probs, &col_support, g.cols()));
                if is_equilibrium(g, &row, &col, tol) {
                    found.push(Equilibrium { row, col });
                }
            }
        }
    }

    // Deduplicate, keeping the lexicographically smallest of each cluster.
    let mut kept: Vec<Equilibrium> = Vec::new();
    for candidate in found {
        if let Some(existing) = kept
            .iter_mut()
            .find(|e| linf_distance(e, &candidate) < DEDUP_TOL)
        {
            if lex_cmp(&candidate, existing) == Ordering::Less {
                *existing = candidate;
            }
        } else {
            kept.push(candidate);
        }
    }
    kept.sort_by(lex_cmp);
    Ok(EquilibriumSet {
        equilibria: kept,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ReducedGame, SymmetricGame};

    fn matching_pennies() -> Bimatrix {
        ReducedGame::new([1.0, -1.0, -1.0, 1.0], [-1.0, 1.0, 1.0, -1.0]).expand()
    }

    #[test]
    fn pure_equilibria_examples() {
        let dominant = ReducedGame::shared([4.0, 3.0, 2.0, 1.0]).expand();
        assert_eq!(pure_equilibria(&dominant), vec![(0, 0)]);

        let harmonic = ReducedGame::new([2.0, 3.0, 4.0, 1.0], [3.0, 2.0, 1.0, 4.0]).expand();
        assert!(pure_equilibria(&harmonic).is_empty());

        let bos = SymmetricGame::new([2.0, 4.0, 3.0, 1.0]).expand();
        assert_eq!(pure_equilibria(&bos), vec![(0, 1), (1, 0)]);
    }

    #[test]
    fn expected_payoff_pure_and_uniform() {
        let g = ReducedGame::shared([3.0, 4.0, 1.0, 2.0]).expand();
        let p = expected_payoff(&g, &MixedStrategy::pure(0, 2), &MixedStrategy::pure(1, 2));
        assert_eq!(p, (4.0, 4.0));
        let u = expected_payoff(&g, &MixedStrategy::uniform(2), &MixedStrategy::uniform(2));
        assert!((u.0 - 2.5).abs() < 1e-12 && (u.1 - 2.5).abs() < 1e-12);
        let zero = ReducedGame::shared([0.0; 4]).expand();
        assert_eq!(
            expected_payoff(
                &zero,
                &MixedStrategy::uniform(2),
                &MixedStrategy::uniform(2)
            ),
            (0.0, 0.0)
        );
    }

    #[test]
    fn is_equilibrium_examples() {
        let dominant = ReducedGame::shared([4.0, 3.0, 2.0, 1.0]).expand();
        assert!(is_equilibrium(
            &dominant,
            &MixedStrategy::pure(0, 2),
            &MixedStrategy::pure(0, 2),
            DEFAULT_TOL
        ));
        assert!(!is_equilibrium(
            &matching_pennies(),
            &MixedStrategy::pure(0, 2),
            &MixedStrategy::pure(0, 2),
            DEFAULT_TOL
        ));
    }

    #[test]
    fn matching_pennies_has_unique_uniform_equilibrium() {
        let set = support_enumeration(&matching_pennies(), DEFAULT_TOL).unwrap();
        assert_eq!(set.equilibria.len(), 1);
        assert!(!set.degenerate);
        let eq = &set.equilibria[0];
        for p in eq.row.probs().iter().chain(eq.col.probs()) {
            assert!((p - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn dominant_game_has_unique_pure_equilibrium() {
        let g = ReducedGame::shared([3.0, 4.0, 1.0, 2.0]).expand();
        let set = support_enumeration(&g, DEFAULT_TOL).unwrap();
        assert_eq!(set.equilibria.len(), 1);
        let eq = &set.equilibria[0];
        assert_eq!(eq.row.probs(), &[1.0, 0.0]);
        assert_eq!(eq.col.probs(), &[0.0, 1.0]);
    }

    #[test]
    fn battle_of_the_sexes_has_three_equilibria() {
        let g = SymmetricGame::new([2.0, 4.0, 3.0, 1.0]).expand();
        let set = support_enumeration(&g, DEFAULT_TOL).unwrap();
        assert_eq!(set.equilibria.len(), 3);
        // Grid oracle at step 1e-3: every near-equilibrium grid profile
        // lies next to a returned equilibrium, and vice versa.
        let mut hits: Vec<(f64, f64)> = Vec::new();
        for qi in 0..=1000 {
            let x = qi as f64 / 1000.0;
            let row = MixedStrategy::new(vec![x, 1.0 - x]).unwrap();
            for qj in 0..=1000 {
                let y = qj as f64 / 1000.0;
                let col = MixedStrategy::new(vec![y, 1.0 - y]).unwrap();
                if deviation_gain(&g, &row, &col) <= 1e-9 {
                    hits.push((x, y));
                }
            }
        }
        assert_eq!(hits.len(), 3);
        for eq in &set.equilibria {
            let (x, y) = (eq.row.probs()[0], eq.col.probs()[0]);
            assert!(hits
                .iter()
                .any(|&(hx, hy)| (hx - x).abs() < 2e-3 && (hy - y).abs() < 2e-3));
        }
        // The mixed equilibrium sits at (3/4, 3/4) for both players.
        assert!(set.equilibria.iter().any(|eq| {
            (eq.row.probs()[0] - 0.75).abs() < 1e-9 && (eq.col.probs()[0] - 0.75).abs() < 1e-9
        }));
    }

    #[test]
    fn solver_outputs_pass_is_equilibrium() {
        let games = [
            ReducedGame::shared([3.0, 4.0, 1.0, 2.0]).expand(),
            matching_pennies(),
            SymmetricGame::new([2.0, 4.0, 3.0, 1.0]).expand(),
            ReducedGame::new([2.0, 3.0, 4.0, 1.0], [3.0, 2.0, 1.0, 4.0]).expand(),
        ];
        for g in &games {
            let set = support_enumeration(g, DEFAULT_TOL).unwrap();
            assert!(!set.equilibria.is_empty());
            for eq in &set.equilibria {
                assert!(is_equilibrium(g, &eq.row, &eq.col, DEFAULT_TOL));
            }
        }
    }

    #[test]
    fn degenerate_games_are_flagged_not_failed() {
        let constant = ReducedGame::shared([1.0; 4]).expand();
        let set = support_enumeration(&constant, DEFAULT_TOL).unwrap();
        assert!(set.degenerate);
        // All four pure profiles are equilibria of the constant game.
        assert!(set.equilibria.len() >= 4);
    }

    #[test]
    fn size_cap_is_enforced() {
        let g = Bimatrix::new(5, 5, vec![(0.0, 0.0); 25]).unwrap();
        assert!(matches!(
            support_enumeration(&g, DEFAULT_TOL),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn mixed_strategy_validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.5]).is_ok());
        assert!(MixedStrategy::new(vec![0.6, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![-0.1, 1.1]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
    }
}
