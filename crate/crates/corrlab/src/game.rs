//! Payoff tables and the reduced game notations.
//!
//! A [`Bimatrix`] is the universal carrier: an `m x n` table of
//! `(u1, u2)` payoff pairs, `u1` for the row player and `u2` for the
//! column player. Two shorthand notations expand into it:
//!
//! * [`ReducedGame`] — `<(a,b,c,d),(a~,b~,c~,d~)>` lays the first tuple
//!   down the row player's entries and the second down the column
//!   player's. With a single tuple `(a,b,c,d)` both players share every
//!   payoff (a common-payoff game).
//! * [`SymmetricGame`] — `(a,b,c,d)` expands to
//!   `[[(a,a),(b,c)],[(c,b),(d,d)]]`, i.e. the column player's table is
//!   the transpose of the row player's.
//!
//! The module also classifies 2x2 games as monotone (both players have a
//! strictly dominant action), harmonic (no pure equilibrium, play cycles)
//! or other, and builds the response graph whose sinks are exactly the
//! pure Nash equilibria.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two players a value or deviation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Player {
    Row,
    Col,
}

/// An `m x n` two-player payoff table; entry `(i, j)` holds
/// `(u1, u2)` where `u1` rewards the row player and `u2` the column player.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bimatrix {
    rows: usize,
    cols: usize,
    payoffs: Vec<(f64, f64)>,
}

impl Bimatrix {
    /// Builds a payoff table from row-major entries.
    pub fn new(rows: usize, cols: usize, payoffs: Vec<(f64, f64)>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGame(format!(
                "dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if payoffs.len() != rows * cols {
            return Err(Error::InvalidGame(format!(
                "expected {} entries for a {rows}x{cols} table, got {}",
                rows * cols,
                payoffs.len()
            )));
        }
        if payoffs
            .iter()
            .any(|(a, b)| !a.is_finite() || !b.is_finite())
        {
            return Err(Error::InvalidGame(
                "payoff entries must be finite".to_string(),
            ));
        }
        Ok(Self {
            rows,
            cols,
            payoffs,
        })
    }

    /// Builds a table from nested rows.
    pub fn from_rows(rows: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidGame("ragged payoff rows".to_string()));
        }
        Self::new(nrows, ncols, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// The `(u1, u2)` pair at profile `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        self.payoffs[i * self.cols + j]
    }

    /// Row player's payoff at `(i, j)`.
    pub fn u1(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).0
    }

    /// Column player's payoff at `(i, j)`.
    pub fn u2(&self, i: usize, j: usize) -> f64 {
        self.get(i, j).1
    }

    /// Payoff for `player` at `(i, j)`.
    pub fn payoff(&self, player: Player, i: usize, j: usize) -> f64 {
        match player {
            Player::Row => self.u1(i, j),
            Player::Col => self.u2(i, j),
        }
    }

    /// True when the column player's table is the transpose of the row
    /// player's, i.e. `u2(i, j) == u1(j, i)` for every profile.
    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.u2(i, j) == self.u1(j, i)))
    }

    /// Applies a positive-affine transform `u -> scale * u + shift` to one
    /// player's payoffs.
    pub fn affine_transform(&self, player: Player, scale: f64, shift: f64) -> Result<Self> {
        if scale <= 0.0 || !scale.is_finite() || !shift.is_finite() {
            return Err(Error::InvalidGame(
                "affine transform needs a finite positive scale and finite shift".to_string(),
            ));
        }
        let payoffs = self
            .payoffs
            .iter()
            .map(|&(u1, u2)| match player {
                Player::Row => (scale * u1 + shift, u2),
                Player::Col => (u1, scale * u2 + shift),
            })
            .collect();
        Self::new(self.rows, self.cols, payoffs)
    }
}

/// The `<(a,b,c,d),(a~,b~,c~,d~)>` notation for 2x2 games; `shared`
/// marks the single-tuple `(a,b,c,d)` common-payoff form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedGame {
    pub row_payoffs: [f64; 4],
    pub col_payoffs: [f64; 4],
    pub shared: bool,
}

impl ReducedGame {
    pub fn new(row_payoffs: [f64; 4], col_payoffs: [f64; 4]) -> Self {
        Self {
            row_payoffs,
            col_payoffs,
            shared: row_payoffs == col_payoffs,
        }
    }

    /// Common-payoff shorthand: both players read from the same tuple.
    pub fn shared(payoffs: [f64; 4]) -> Self {
        Self {
            row_payoffs: payoffs,
            col_payoffs: payoffs,
            shared: true,
        }
    }

    /// Expands to the 2x2 bimatrix `[[(a,a~),(b,b~)],[(c,c~),(d,d~)]]`.
    pub fn expand(&self) -> Bimatrix {
        let [a, b, c, d] = self.row_payoffs;
        let [ta, tb, tc, td] = self.col_payoffs;
        Bimatrix::new(2, 2, vec![(a, ta), (b, tb), (c, tc), (d, td)])
            .expect("reduced expansion is always a valid 2x2 table")
    }
}

/// Recovers the reduced notation from a 2x2 bimatrix.
pub fn reduce(g: &Bimatrix) -> Option<ReducedGame> {
    if g.rows() != 2 || g.cols() != 2 {
        return None;
    }
    let row = [g.u1(0, 0), g.u1(0, 1), g.u1(1, 0), g.u1(1, 1)];
    let col = [g.u2(0, 0), g.u2(0, 1), g.u2(1, 0), g.u2(1, 1)];
    Some(ReducedGame::new(row, col))
}

/// The symmetric `(a,b,c,d)` notation: the column player's payoffs are the
/// transpose of the row player's.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetricGame {
    pub ordinal: [f64; 4],
}

impl SymmetricGame {
    pub fn new(ordinal: [f64; 4]) -> Self {
        Self { ordinal }
    }

    /// Expands to `[[(a,a),(b,c)],[(c,b),(d,d)]]`.
    pub fn expand(&self) -> Bimatrix {
        let [a, b, c, d] = self.ordinal;
        Bimatrix::new(2, 2, vec![(a, a), (b, c), (c, b), (d, d)])
            .expect("symmetric expansion is always a valid 2x2 table")
    }
}

/// Coarse 2x2 taxonomy used throughout the phase diagrams.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GameClass {
    /// Each player has a strictly dominant pure action; play converges
    /// independently of the opponent.
    Monotone,
    /// No pure Nash equilibrium; best responses chase each other around an
    /// improvement cycle.
    Harmonic,
    /// Everything else, e.g. coordination games with two pure equilibria
    /// or games with payoff ties.
    Other,
}

/// Classifies a 2x2 game. Ties break dominance strictness, so games with
/// repeated payoffs land in `Other` unless a strict structure survives.
pub fn classify(g: &Bimatrix) -> Result<GameClass> {
    if g.rows() != 2 || g.cols() != 2 {
        return Err(Error::SizeCap {
            rows: g.rows(),
            cols: g.cols(),
            cap: 2,
            what: "the monotone/harmonic classifier",
        });
    }
    let row_dominant = (0..2).any(|i| (0..2).all(|j| g.u1(i, j) > g.u1(1 - i, j)));
    let col_dominant = (0..2).any(|j| (0..2).all(|i| g.u2(i, j) > g.u2(i, 1 - j)));
    if row_dominant && col_dominant {
        return Ok(GameClass::Monotone);
    }
    let graph = response_graph(g);
    if graph.sinks().is_empty() && graph.has_cycle() {
        return Ok(GameClass::Harmonic);
    }
    Ok(GameClass::Other)
}

/// A strictly improving unilateral deviation between two pure profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResponseEdge {
    /// Index of the origin profile in [`ResponseGraph::nodes`].
    pub from: usize,
    /// Index of the destination profile.
    pub to: usize,
    /// The player that deviates.
    pub player: Player,
    /// Strictly positive payoff improvement for the deviating player.
    pub gain: f64,
}

/// Directed graph over pure action profiles whose edges are strictly
/// improving unilateral deviations; sinks are the pure Nash equilibria.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseGraph {
    /// Pure profiles in row-major order.
    pub nodes: Vec<(usize, usize)>,
    pub edges: Vec<ResponseEdge>,
}

impl ResponseGraph {
    /// Node indices with no outgoing edge.
    pub fn sinks(&self) -> Vec<usize> {
        let mut outgoing = vec![false; self.nodes.len()];
        for e in &self.edges {
            outgoing[e.from] = true;
        }
        (0..self.nodes.len()).filter(|&n| !outgoing[n]).collect()
    }

    /// True when some improvement cycle exists.
    pub fn has_cycle(&self) -> bool {
        // Iterative DFS with colouring; the graphs are tiny.
        let n = self.nodes.len();
        let mut adj = vec![Vec::new(); n];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
        for start in 0..n {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some(&mut (node, ref mut next)) = stack.last_mut() {
                if *next < adj[node].len() {
                    let succ = adj[node][*next];
                    *next += 1;
                    match state[succ] {
                        0 => {
                            state[succ] = 1;
                            stack.push((succ, 0));
                        }
                        1 => return true,
                        _ => {}
                    }
                } else {
                    state[node] = 2;
                    stack.pop();
                }
            }
        }
        false
    }
}

/// Builds the response graph of a game; nodes are enumerated row-major and
/// edges in (origin, player, destination) order, so output is deterministic.
pub fn response_graph(g: &Bimatrix) -> ResponseGraph {
    let mut nodes = Vec::with_capacity(g.rows() * g.cols());
    for i in 0..g.rows() {
        for j in 0..g.cols() {
            nodes.push((i, j));
        }
    }
    let index = |i: usize, j: usize| i * g.cols() + j;
    let mut edges = Vec::new();
    for &(i, j) in &nodes {
        for i2 in 0..g.rows() {
            let gain = g.u1(i2, j) - g.u1(i, j);
            if i2 != i && gain > 0.0 {
                edges.push(ResponseEdge {
                    from: index(i, j),
                    to: index(i2, j),
                    player: Player::Row,
                    gain,
                });
            }
        }
        for j2 in 0..g.cols() {
            let gain = g.u2(i, j2) - g.u2(i, j);
            if j2 != j && gain > 0.0 {
                edges.push(ResponseEdge {
                    from: index(i, j),
                    to: index(i, j2),
                    player: Player::Col,
                    gain,
                });
            }
        }
    }
    ResponseGraph { nodes, edges }
}

/// All 24 assignments of the ordinal values 1..4 to `(a,b,c,d)`, in
/// lexicographic order.
pub fn enumerate_symmetric_ordinals() -> Vec<SymmetricGame> {
    let mut out = Vec::with_capacity(24);
    let vals = [1.0, 2.0, 3.0, 4.0];
    for &a in &vals {
        for &b in &vals {
            for &c in &vals {
                for &d in &vals {
                    let mut sorted = [a, b, c, d];
                    sorted.sort_by(|x, y| x.partial_cmp(y).unwrap());
                    if sorted == vals {
                        out.push(SymmetricGame::new([a, b, c, d]));
                    }
                }
            }
        }
    }
    out
}

/// Samples `count` symmetric `n x n` games whose row-player payoffs are a
/// uniform random permutation of the ordinals `1..=n*n`; the column player
/// reads the transpose. Deterministic for a fixed seed.
pub fn sample_symmetric_games(n_actions: usize, count: usize, seed: u64) -> Result<Vec<Bimatrix>> {
    if n_actions < 2 {
        return Err(Error::InvalidGame(format!(
            "need at least 2 actions to sample symmetric games, got {n_actions}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slots = n_actions * n_actions;
    let mut games = Vec::with_capacity(count);
    for _ in 0..count {
        let mut ordinals: Vec<f64> = (1..=slots).map(|v| v as f64).collect();
        ordinals.shuffle(&mut rng);
        let payoffs = (0..n_actions)
            .flat_map(|i| {
                let ordinals = &ordinals;
                (0..n_actions)
                    .map(move |j| (ordinals[i * n_actions + j], ordinals[j * n_actions + i]))
            })
            .collect();
        games.push(Bimatrix::new(n_actions, n_actions, payoffs)?);
    }
    Ok(games)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic_example() -> Bimatrix {
        ReducedGame::new([2.0, 3.0, 4.0, 1.0], [3.0, 2.0, 1.0, 4.0]).expand()
    }

    #[test]
    fn expand_reduced_lays_out_per_notation() {
        let g = harmonic_example();
        assert_eq!(g.get(0, 0), (2.0, 3.0));
        assert_eq!(g.get(0, 1), (3.0, 2.0));
        assert_eq!(g.get(1, 0), (4.0, 1.0));
        assert_eq!(g.get(1, 1), (1.0, 4.0));
    }

    #[test]
    fn expand_shared_zero_game() {
        let g = ReducedGame::shared([0.0; 4]).expand();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.get(i, j), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn expand_shared_duplicates_payoffs() {
        let g = ReducedGame::shared([3.0, 4.0, 1.0, 2.0]).expand();
        assert_eq!(g.get(0, 0), (3.0, 3.0));
        assert_eq!(g.get(0, 1), (4.0, 4.0));
        assert_eq!(g.get(1, 0), (1.0, 1.0));
        assert_eq!(g.get(1, 1), (2.0, 2.0));
    }

    #[test]
    fn expand_symmetric_transposes_column_player() {
        let g = SymmetricGame::new([4.0, 3.0, 2.0, 1.0]).expand();
        assert_eq!(g.get(0, 0), (4.0, 4.0));
        assert_eq!(g.get(0, 1), (3.0, 2.0));
        assert_eq!(g.get(1, 0), (2.0, 3.0));
        assert_eq!(g.get(1, 1), (1.0, 1.0));

        let bos = SymmetricGame::new([2.0, 4.0, 3.0, 1.0]).expand();
        assert_eq!(bos.get(0, 0), (2.0, 2.0));
        assert_eq!(bos.get(0, 1), (4.0, 3.0));
        assert_eq!(bos.get(1, 0), (3.0, 4.0));
        assert_eq!(bos.get(1, 1), (1.0, 1.0));
        assert!(bos.is_symmetric());
    }

    #[test]
    fn expand_symmetric_constant_game() {
        let g = SymmetricGame::new([7.0; 4]).expand();
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(g.get(i, j), (7.0, 7.0));
            }
        }
    }

    #[test]
    fn reduce_is_left_inverse_of_expand() {
        let r = ReducedGame::new([2.0, 3.0, 4.0, 1.0], [3.0, 2.0, 1.0, 4.0]);
        assert_eq!(reduce(&r.expand()), Some(r));
        let s = ReducedGame::shared([3.0, 4.0, 1.0, 2.0]);
        let back = reduce(&s.expand()).unwrap();
        assert_eq!(back, s);
        assert!(back.shared);
    }

    #[test]
    fn classify_monotone_harmonic_other() {
        // Row alpha dominates (3>1, 4>2); column beta dominates (4>3, 2>1).
        let monotone = ReducedGame::shared([3.0, 4.0, 1.0, 2.0]).expand();
        assert_eq!(classify(&monotone).unwrap(), GameClass::Monotone);

        assert_eq!(classify(&harmonic_example()).unwrap(), GameClass::Harmonic);

        // Battle of the sexes: two pure equilibria, no dominant action.
        let bos = SymmetricGame::new([2.0, 4.0, 3.0, 1.0]).expand();
        assert_eq!(classify(&bos).unwrap(), GameClass::Other);
    }

    #[test]
    fn classify_rejects_non_2x2() {
        let g = Bimatrix::new(2, 3, vec![(0.0, 0.0); 6]).unwrap();
        assert!(matches!(classify(&g), Err(Error::SizeCap { .. })));
    }

    #[test]
    fn classify_ties_fall_into_other() {
        // Weak dominance only: row payoffs tie in the second column.
        let g = ReducedGame::new([2.0, 1.0, 1.0, 1.0], [2.0, 1.0, 1.0, 1.0]).expand();
        assert_eq!(classify(&g).unwrap(), GameClass::Other);
    }

    #[test]
    fn response_graph_single_sink_for_dominant_game() {
        let g = ReducedGame::shared([4.0, 3.0, 2.0, 1.0]).expand();
        let graph = response_graph(&g);
        assert_eq!(graph.nodes, vec![(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(graph.sinks(), vec![0]);
        assert!(!graph.has_cycle());
        // Every deviation strictly improves toward (alpha, alpha).
        assert!(graph.edges.iter().all(|e| e.gain > 0.0));
    }

    #[test]
    fn response_graph_harmonic_four_cycle() {
        let graph = response_graph(&harmonic_example());
        assert!(graph.sinks().is_empty());
        assert!(graph.has_cycle());
        // One improving deviation out of each of the four profiles.
        assert_eq!(graph.edges.len(), 4);
    }

    #[test]
    fn response_graph_constant_game_has_no_edges() {
        let g = ReducedGame::shared([1.0; 4]).expand();
        let graph = response_graph(&g);
        assert!(graph.edges.is_empty());
        assert_eq!(graph.sinks().len(), 4);
    }

    #[test]
    fn ordinal_enumeration_is_lexicographic_and_complete() {
        let games = enumerate_symmetric_ordinals();
        assert_eq!(games.len(), 24);
        assert_eq!(games[0].ordinal, [1.0, 2.0, 3.0, 4.0]);
        assert!(games.iter().any(|g| g.ordinal == [4.0, 3.0, 2.0, 1.0]));
        assert!(games.iter().any(|g| g.ordinal == [2.0, 3.0, 4.0, 1.0]));
        let mut sorted = games.clone();
        sorted.sort_by(|a, b| a.ordinal.partial_cmp(&b.ordinal).unwrap());
        assert_eq!(
            sorted.iter().map(|g| g.ordinal).collect::<Vec<_>>(),
            games.iter().map(|g| g.ordinal).collect::<Vec<_>>()
        );
    }

    #[test]
    fn sampling_is_deterministic_for_a_seed() {
        let a = sample_symmetric_games(3, 10, 7).unwrap();
        let b = sample_symmetric_games(3, 10, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_2x2_games_are_ordinal_permutations() {
        let ordinals: Vec<[f64; 4]> = enumerate_symmetric_ordinals()
            .iter()
            .map(|g| g.ordinal)
            .collect();
        for g in sample_symmetric_games(2, 200, 3).unwrap() {
            assert!(g.is_symmetric());
            let tuple = [g.u1(0, 0), g.u1(0, 1), g.u1(1, 0), g.u1(1, 1)];
            assert!(ordinals.contains(&tuple));
        }
    }

    #[test]
    fn sampling_rejects_single_action() {
        assert!(sample_symmetric_games(1, 1, 0).is_err());
    }

    #[test]
    fn sampled_2x2_frequencies_are_near_uniform() {
        // Multinomial oracle: each of the 24 ordinal games should appear
        // about 1000/24 times; allow 3 sigma of binomial noise.
        let ordinals: Vec<[f64; 4]> = enumerate_symmetric_ordinals()
            .iter()
            .map(|g| g.ordinal)
            .collect();
        let mut counts = [0usize; 24];
        for g in sample_symmetric_games(2, 1000, 1).unwrap() {
            let tuple = [g.u1(0, 0), g.u1(0, 1), g.u1(1, 0), g.u1(1, 1)];
            let idx = ordinals.iter().position(|o| *o == tuple).unwrap();
            counts[idx] += 1;
        }
        let mean = 1000.0 / 24.0;
        let sigma = (1000.0_f64 * (1.0 / 24.0) * (23.0 / 24.0)).sqrt();
        for (idx, &count) in counts.iter().enumerate() {
            let dev = (count as f64 - mean).abs();
            assert!(
                dev <= 3.0 * sigma,
                "ordinal game {idx} occurred {count} times (mean {mean:.1}, sigma {sigma:.1})"
            );
        }
    }

    #[test]
    fn bimatrix_rejects_bad_shapes_and_values() {
        assert!(Bimatrix::new(0, 2, vec![]).is_err());
        assert!(Bimatrix::new(2, 2, vec![(0.0, 0.0); 3]).is_err());
        assert!(Bimatrix::new(1, 1, vec![(f64::NAN, 0.0)]).is_err());
        assert!(Bimatrix::new(1, 1, vec![(0.0, f64::INFINITY)]).is_err());
    }
}
