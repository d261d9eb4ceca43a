//! The two-agent supervision game.
//!
//! A 2x2 base game is augmented with a third action for each agent: ask
//! the human. When an agent asks, the human steers it to one of its two
//! base actions — toward the agent's best payoff if the human acts in the
//! agent's favour, toward the worst otherwise. Taking the per-player max
//! (`F`) or min (`G`) over the relevant base entries yields the four 3x3
//! subgame variants FF, FG, GF and GG.
//!
//! Agents hold a belief over which base game is being played and a belief
//! about human rationality. [`expected_nfg`] mixes the subgames
//! accordingly into a single 3x3 expected game, and
//! [`corrigibility_verdict`] solves it: the system is corrigible exactly
//! when the unique Nash equilibrium has both agents asking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::Bimatrix;
use crate::nash::{support_enumeration, EquilibriumSet, MixedStrategy};

/// A finite belief over 2x2 base games.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GameBelief {
    games: Vec<Bimatrix>,
    weights: Vec<f64>,
}

impl GameBelief {
    /// Validates one weight per game, all nonnegative, summing to 1
    /// within `1e-12`.
    pub fn new(games: Vec<Bimatrix>, weights: Vec<f64>) -> Result<Self> {
        if games.is_empty() {
            return Err(Error::InvalidDistribution(
                "belief needs at least one game".to_string(),
            ));
        }
        if games.len() != weights.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} games but {} weights",
                games.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidDistribution(
                "belief weights must be finite and nonnegative".to_string(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "belief weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { games, weights })
    }

    /// All mass on a single game.
    pub fn delta(game: Bimatrix) -> Self {
        Self {
            games: vec![game],
            weights: vec![1.0],
        }
    }

    /// Mass `r` on `game1` and `1 - r` on `game2`.
    pub fn bernoulli(game1: Bimatrix, game2: Bimatrix, r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::InvalidDistribution(format!(
                "Bernoulli parameter must lie in [0, 1], got {r}"
            )));
        }
        Self::new(vec![game1, game2], vec![r, 1.0 - r])
    }

    pub fn games(&self) -> &[Bimatrix] {
        &self.games
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (&Bimatrix, f64)> {
        self.games.iter().zip(self.weights.iter().copied())
    }
}

/// Per-agent beliefs that the human acts in that agent's favour; `shared`
/// forces a single common parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RationalityBelief {
    p1: f64,
    p2: f64,
    shared: bool,
}

impl RationalityBelief {
    /// A common rationality belief: the same human acts for both agents,
    /// so both see the favourable outcome together or neither does.
    pub fn shared(p: f64) -> Result<Self> {
        check_probability(p, "p")?;
        Ok(Self {
            p1: p,
            p2: p,
            shared: true,
        })
    }

    /// Independent per-agent beliefs.
    pub fn independent(p1: f64, p2: f64) -> Result<Self> {
        check_probability(p1, "p1")?;
        check_probability(p2, "p2")?;
        Ok(Self {
            p1,
            p2,
            shared: false,
        })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn p2(&self) -> f64 {
        self.p2
    }

    pub fn is_shared(&self) -> bool {
        self.shared
    }
}

fn check_probability(p: f64, name: &str) -> Result<()> {
    if !p.is_finite() || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidDistribution(format!(
            "{name} must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// Which side of the max/min pair each agent's supervised entries take:
/// the first letter picks `F` (max) or `G` (min) for agent 1, the second
/// for agent 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SubgameVariant {
    FF,
    FG,
    GF,
    GG,
}

impl SubgameVariant {
    pub const ALL: [SubgameVariant; 4] = [
        SubgameVariant::FF,
        SubgameVariant::FG,
        SubgameVariant::GF,
        SubgameVariant::GG,
    ];

    fn agent1_max(self) -> bool {
        matches!(self, SubgameVariant::FF | SubgameVariant::FG)
    }

    fn agent2_max(self) -> bool {
        matches!(self, SubgameVariant::FF | SubgameVariant::GF)
    }
}

fn fold(max: bool, values: &[f64]) -> f64 {
    values
        .iter()
        .copied()
        .reduce(|acc, v| if max { acc.max(v) } else { acc.min(v) })
        .expect("fold over non-empty payoff list")
}

/// Extends a 2x2 base game with the supervised action for both agents.
///
/// The top-left 2x2 block is the base game. Supervised entries take, per
/// agent, the max (`F`) or min (`G`) of the base payoffs the human can
/// steer between: a row entry of the asked column for the asking row
/// player, a column entry of the asked row for the column player, and the
/// full table for the corner where both ask.
pub fn build_subgame(base: &Bimatrix, variant: SubgameVariant) -> Result<Bimatrix> {
    if base.rows() != 2 || base.cols() != 2 {
        return Err(Error::InvalidGame(format!(
            "subgame construction needs a 2x2 base, got {}x{}",
            base.rows(),
            base.cols()
        )));
    }
    let (a, ta) = base.get(0, 0);
    let (b, tb) = base.get(0, 1);
    let (c, tc) = base.get(1, 0);
    let (d, td) = base.get(1, 1);
    let h1 = |values: &[f64]| fold(variant.agent1_max(), values);
    let h2 = |values: &[f64]| fold(variant.agent2_max(), values);
    Bimatrix::from_rows(vec![
        vec![(a, ta), (b, tb), (h1(&[a, b]), h2(&[ta, tb]))],
        vec![(c, tc), (d, td), (h1(&[c, d]), h2(&[tc, td]))],
        vec![
            (h1(&[a, c]), h2(&[ta, tc])),
            (h1(&[b, d]), h2(&[tb, td])),
            (h1(&[a, b, c, d]), h2(&[ta, tb, tc, td])),
        ],
    ])
}

fn weighted_sum(terms: &[(f64, Bimatrix)]) -> Bimatrix {
    let rows = terms[0].1.rows();
    let cols = terms[0].1.cols();
    let mut payoffs = vec![(0.0, 0.0); rows * cols];
    for (w, g) in terms {
        for i in 0..rows {
            for j in 0..cols {
                let (u1, u2) = g.get(i, j);
                let entry = &mut payoffs[i * cols + j];
                entry.0 += w * u1;
                entry.1 += w * u2;
            }
        }
    }
    Bimatrix::new(rows, cols, payoffs).expect("weighted sum of valid tables is valid")
}

/// The expected 3x3 game over the game belief and rationality belief.
///
/// With independent beliefs the four variants mix with probabilities
/// `p1*p2`, `p1*(1-p2)`, `(1-p1)*p2`, `(1-p1)*(1-p2)`. With a shared
/// belief the favourable/unfavourable outcomes are perfectly correlated,
/// so only FF and GG occur, with probability `p` and `1-p`.
pub fn expected_nfg(belief: &GameBelief, rat: &RationalityBelief) -> Result<Bimatrix> {
    let mix_per_game = |g: &Bimatrix| -> Result<Vec<(f64, Bimatrix)>> {
        if rat.shared {
            Ok(vec![
                (rat.p1, build_subgame(g, SubgameVariant::FF)?),
                (1.0 - rat.p1, build_subgame(g, SubgameVariant::GG)?),
            ])
        } else {
            let (p1, p2) = (rat.p1, rat.p2);
            Ok(vec![
                (p1 * p2, build_subgame(g, SubgameVariant::FF)?),
                (p1 * (1.0 - p2), build_subgame(g, SubgameVariant::FG)?),
                ((1.0 - p1) * p2, build_subgame(g, SubgameVariant::GF)?),
                (
                    (1.0 - p1) * (1.0 - p2),
                    build_subgame(g, SubgameVariant::GG)?,
                ),
            ])
        }
    };
    if rat.shared {
        // Keep the shared path exactly affine in p: sum each variant over
        // the belief first, then mix, so that
        // expected_nfg(p) == p * expected_nfg(1) + (1-p) * expected_nfg(0)
        // holds bit for bit.
        let mut ff_terms = Vec::with_capacity(belief.games().len());
        let mut gg_terms = Vec::with_capacity(belief.games().len());
        for (g, w) in belief.atoms() {
            ff_terms.push((w, build_subgame(g, SubgameVariant::FF)?));
            gg_terms.push((w, build_subgame(g, SubgameVariant::GG)?));
        }
        let ff = weighted_sum(&ff_terms);
        let gg = weighted_sum(&gg_terms);
        return Ok(weighted_sum(&[(rat.p1, ff), (1.0 - rat.p1, gg)]));
    }
    let mut terms = Vec::new();
    for (g, w) in belief.atoms() {
        for (q, sub) in mix_per_game(g)? {
            terms.push((w * q, sub));
        }
    }
    Ok(weighted_sum(&terms))
}

/// Outcome of solving a 3x3 expected game for corrigibility.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrigibilityVerdict {
    /// True exactly when the game has a single equilibrium and it is the
    /// pure profile where both agents ask.
    pub corrigible: bool,
    /// Every equilibrium of the expected game.
    pub equilibria: EquilibriumSet,
    /// Each agent's probability of asking, read from the selected
    /// equilibrium.
    pub per_agent_omega: (f64, f64),
    /// Index into `equilibria` of the equilibrium used for reporting: the
    /// unique one, or the one with maximal joint ask-probability.
    pub selected: usize,
}

impl CorrigibilityVerdict {
    /// The strategies of the selected equilibrium.
    pub fn selected_profile(&self) -> (&MixedStrategy, &MixedStrategy) {
        let eq = &self.equilibria.equilibria[self.selected];
        (&eq.row, &eq.col)
    }
}

/// Solves a 3x3 expected game (action order alpha, beta, omega for both
/// agents) and reports whether supervised play is the unique equilibrium.
pub fn corrigibility_verdict(gamma: &Bimatrix, tol: f64) -> Result<CorrigibilityVerdict> {
    if gamma.rows() != 3 || gamma.cols() != 3 {
        return Err(Error::InvalidGame(format!(
            "corrigibility verdict needs a 3x3 expected game, got {}x{}",
            gamma.rows(),
            gamma.cols()
        )));
    }
    let set = support_enumeration(gamma, tol)?;
    if set.equilibria.is_empty() {
        return Err(Error::InvalidGame(
            "no equilibrium found for the expected game".to_string(),
        ));
    }
    let is_pure_omega = |eq: &crate::nash::Equilibrium| {
        eq.row.probs()[2] >= 1.0 - tol && eq.col.probs()[2] >= 1.0 - tol
    };
    let corrigible = set.equilibria.len() == 1 && is_pure_omega(&set.equilibria[0]);
    let selected = set
        .equilibria
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| {
            let ja = a.row.probs()[2] * a.col.probs()[2];
            let jb = b.row.probs()[2] * b.col.probs()[2];
            ja.partial_cmp(&jb).unwrap_or(std::cmp::Ordering::Equal)
        })
        .map(|(i, _)| i)
        .unwrap_or(0);
    let eq = &set.equilibria[selected];
    let per_agent_omega = (eq.row.probs()[2], eq.col.probs()[2]);
    Ok(CorrigibilityVerdict {
        corrigible,
        equilibria: set,
        per_agent_omega,
        selected,
    })
}

/// RGB encoding of the selected equilibrium: per agent,
/// `(R, G, B) = (P(alpha), P(beta), P(omega))` scaled to 0..=255 with
/// round-half-up.
pub fn equilibrium_colour(verdict: &CorrigibilityVerdict) -> ([u8; 3], [u8; 3]) {
    let (row, col) = verdict.selected_profile();
    (strategy_colour(row.probs()), strategy_colour(col.probs()))
}

/// Maps a 3-action strategy onto RGB channels.
pub fn strategy_colour(probs: &[f64]) -> [u8; 3] {
    let channel = |p: f64| -> u8 { (p * 255.0).round().clamp(0.0, 255.0) as u8 };
    [channel(probs[0]), channel(probs[1]), channel(probs[2])]
}
