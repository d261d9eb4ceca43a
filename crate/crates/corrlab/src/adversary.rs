//! The defender/adversary game.
//!
//! A defender plays a symmetric base game against an adversary but holds
//! only a belief over which game it is. On top of its base actions the
//! defender can ask a human who has seen the adversary's move; the human
//! steers the defender to its best payoff with probability `p` and to its
//! worst otherwise.
//!
//! Acting directly is insensitive to `p`: playing row `k` against the
//! adversary's expected strategy is a plain bilinear form. Asking mixes
//! the per-column max and min of the defender's payoffs, which decomposes
//! over the belief into conditional expectations of payoff differences —
//! the quantities collected in [`ConditionalStats`]. The two margins
//! returned by [`ask_incentive_margins`] are the expected gains of asking over
//! each base action; asking is strictly incentivised when both are
//! positive.

use serde::{Deserialize, Serialize};

use crate::corrigibility::GameBelief;
use crate::error::{Error, Result};
use crate::game::{Bimatrix, SymmetricGame};
use crate::nash::{support_enumeration, MixedStrategy, DEFAULT_TOL};

/// Tie tolerance for incentive vectors.
pub const DEFAULT_TIE_TOL: f64 = 1e-9;

/// How the defender models the adversary's play.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AdversaryMode {
    /// Per believed game, the adversary plays a Nash equilibrium of that
    /// game (averaged uniformly when several exist); the defender then
    /// averages over its belief.
    NashPerGame,
    /// The adversary plays a fixed strategy regardless of the game.
    Fixed(MixedStrategy),
}

/// A defender's view of the world: a belief over symmetric games, a human
/// rationality estimate and an adversary model.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryScenario {
    belief: GameBelief,
    p: f64,
    adv_mode: AdversaryMode,
}

impl AdversaryScenario {
    pub fn new(belief: GameBelief, p: f64, adv_mode: AdversaryMode) -> Result<Self> {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidScenario(format!(
                "human rationality p must lie in [0, 1], got {p}"
            )));
        }
        let n = belief.games()[0].rows();
        for (idx, g) in belief.games().iter().enumerate() {
            if !g.is_square() || g.rows() != n {
                return Err(Error::InvalidScenario(format!(
                    "belief game {idx} is {}x{}, expected {n}x{n}",
                    g.rows(),
                    g.cols()
                )));
            }
            if !g.is_symmetric() {
                return Err(Error::InvalidScenario(format!(
                    "belief game {idx} is not symmetric (column payoffs must transpose the row payoffs)"
                )));
            }
        }
        if let AdversaryMode::Fixed(ref strategy) = adv_mode {
            if strategy.len() != n {
                return Err(Error::InvalidScenario(format!(
                    "fixed adversary strategy has {} entries, games have {n} actions",
                    strategy.len()
                )));
            }
        }
        Ok(Self {
            belief,
            p,
            adv_mode,
        })
    }

    pub fn belief(&self) -> &GameBelief {
        &self.belief
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn adv_mode(&self) -> &AdversaryMode {
        &self.adv_mode
    }

    /// Number of base actions.
    pub fn n_actions(&self) -> usize {
        self.belief.games()[0].rows()
    }
}

/// Ordering statistics of one payoff pair `(x, y)` under a belief:
/// probabilities of each strict ordering and the conditional expectations
/// feeding the ask-human margins. Conditional expectations are absent
/// when the conditioning event has zero probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairStats {
    /// `P(x > y)`.
    pub p_gt: f64,
    /// `P(x < y)`.
    pub p_lt: f64,
    /// `P(x = y)`.
    pub p_eq: f64,
    /// `E[x | x > y]`.
    pub e_x_gt: Option<f64>,
    /// `E[y | x > y]`.
    pub e_y_gt: Option<f64>,
    /// `E[x | x < y]`.
    pub e_x_lt: Option<f64>,
    /// `E[y | x < y]`.
    pub e_y_lt: Option<f64>,
    /// `E[x | x = y]` (equal to `E[y | x = y]`).
    pub e_eq: Option<f64>,
    // Weighted conditional sums; products E[.|.] * P(.) without the
    // divide, used by the margin and utility formulas.
    sum_x_gt: f64,
    sum_y_gt: f64,
    sum_x_lt: f64,
    sum_y_lt: f64,
    sum_eq: f64,
}

impl PairStats {
    fn from_atoms<I: Iterator<Item = (f64, f64, f64)>>(atoms: I) -> Self {
        let (mut p_gt, mut p_lt, mut p_eq) = (0.0, 0.0, 0.0);
        let (mut sum_x_gt, mut sum_y_gt, mut sum_x_lt, mut sum_y_lt, mut sum_eq) =
            (0.0, 0.0, 0.0, 0.0, 0.0);
        for (x, y, w) in atoms {
            if x > y {
                p_gt += w;
                sum_x_gt += w * x;
                sum_y_gt += w * y;
            } else if x < y {
                p_lt += w;
                sum_x_lt += w * x;
                sum_y_lt += w * y;
            } else {
                p_eq += w;
                sum_eq += w * x;
            }
        }
        let cond = |sum: f64, p: f64| (p > 0.0).then(|| sum / p);
        Self {
            p_gt,
            p_lt,
            p_eq,
            e_x_gt: cond(sum_x_gt, p_gt),
            e_y_gt: cond(sum_y_gt, p_gt),
            e_x_lt: cond(sum_x_lt, p_lt),
            e_y_lt: cond(sum_y_lt, p_lt),
            e_eq: cond(sum_eq, p_eq),
            sum_x_gt,
            sum_y_gt,
            sum_x_lt,
            sum_y_lt,
            sum_eq,
        }
    }

    /// Expected payoff of asking, restricted to this pair:
    /// `E[p*max(x,y) + (1-p)*min(x,y)]`.
    fn ask_value(&self, p: f64) -> f64 {
        p * self.sum_x_gt
            + (1.0 - p) * self.sum_y_gt
            + p * self.sum_y_lt
            + (1.0 - p) * self.sum_x_lt
            + self.sum_eq
    }

    /// `E[(1-p)(y-x) | x>y] P(x>y) + E[p(y-x) | x<y] P(x<y)`.
    fn margin_vs_x(&self, p: f64) -> f64 {
        (1.0 - p) * (self.sum_y_gt - self.sum_x_gt) + p * (self.sum_y_lt - self.sum_x_lt)
    }

    /// `E[p(x-y) | x>y] P(x>y) + E[(1-p)(x-y) | x<y] P(x<y)`.
    fn margin_vs_y(&self, p: f64) -> f64 {
        p * (self.sum_x_gt - self.sum_y_gt) + (1.0 - p) * (self.sum_x_lt - self.sum_y_lt)
    }

    /// True when both strict orderings carry positive probability.
    pub fn ordering_uncertain(&self) -> bool {
        self.p_gt > 0.0 && self.p_lt > 0.0
    }
}

/// The `(a,c)` and `(b,d)` pair statistics of a belief over 2x2 symmetric
/// games, where `(a,b,c,d)` reads the defender's payoff table row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalStats {
    pub ac: PairStats,
    pub bd: PairStats,
}

impl ConditionalStats {
    pub fn from_belief(belief: &GameBelief) -> Result<Self> {
        for g in belief.games() {
            if g.rows() != 2 || g.cols() != 2 {
                return Err(Error::InvalidScenario(
                    "conditional statistics are defined for 2x2 games".to_string(),
                ));
            }
        }
        let ac = PairStats::from_atoms(belief.atoms().map(|(g, w)| (g.u1(0, 0), g.u1(1, 0), w)));
        let bd = PairStats::from_atoms(belief.atoms().map(|(g, w)| (g.u1(0, 1), g.u1(1, 1), w)));
        Ok(Self { ac, bd })
    }
}

/// Human conduct assumed when writing out the one-shot defender table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HumanConduct {
    /// The human knows the game, sees the adversary's move, and always
    /// steers the defender to its best payoff.
    RationalAligned,
}

/// The defender-extended payoff table: adversary rows `{alpha, beta}`,
/// defender columns `{alpha, beta, omega}`, each cell an
/// `(adversary, defender, human)` payoff triple.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DefenderTable {
    entries: [[(f64, f64, f64); 3]; 2],
}

impl DefenderTable {
    /// Cell for adversary action `adv` (0 or 1) and defender action
    /// `def` (0, 1, or 2 for omega).
    pub fn get(&self, adv: usize, def: usize) -> (f64, f64, f64) {
        self.entries[adv][def]
    }
}

/// Writes out the one-shot table for a rational aligned human: the omega
/// column replicates, per adversary row, the cell the defender prefers.
/// Ties `a = c` or `b = d` leave the replicated cell undefined and are
/// rejected.
pub fn build_defender_table(base: &SymmetricGame, _conduct: HumanConduct) -> Result<DefenderTable> {
    let [a, b, c, d] = base.ordinal;
    if a == c || b == d {
        return Err(Error::InvalidGame(format!(
            "defender table needs strict payoff orderings, got a={a}, c={c}, b={b}, d={d}"
        )));
    }
    let g = base.expand();
    // entry(adv j, def i): adversary payoff u2(i, j), defender payoff u1(i, j).
    let cell = |i: usize, j: usize| (g.u2(i, j), g.u1(i, j), g.u1(i, j));
    let best_row = |j: usize| if g.u1(0, j) > g.u1(1, j) { 0 } else { 1 };
    let mut entries = [[(0.0, 0.0, 0.0); 3]; 2];
    for (adv, row) in entries.iter_mut().enumerate() {
        *row = [cell(0, adv), cell(1, adv), cell(best_row(adv), adv)];
    }
    Ok(DefenderTable { entries })
}

/// The defender's expectation of the adversary's play, with a degeneracy
/// marker carried over from any multi-equilibrium or singular game.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversaryPrediction {
    pub strategy: Vec<f64>,
    pub degenerate: bool,
}

/// Averaged adversary (column player) equilibrium strategy of one game.
pub fn game_adversary_strategy(g: &Bimatrix, tol: f64) -> Result<(Vec<f64>, bool)> {
    let set = support_enumeration(g, tol)?;
    if set.equilibria.is_empty() {
        return Err(Error::InvalidScenario(
            "no equilibrium found for a believed game".to_string(),
        ));
    }
    let n = g.cols();
    let mut avg = vec![0.0; n];
    for eq in &set.equilibria {
        for (slot, &p) in avg.iter_mut().zip(eq.col.probs()) {
            *slot += p;
        }
    }
    let count = set.equilibria.len() as f64;
    for slot in &mut avg {
        *slot /= count;
    }
    Ok((avg, set.degenerate || set.equilibria.len() > 1))
}

/// The expected adversary strategy under the scenario's model.
pub fn adversary_strategy(scenario: &AdversaryScenario) -> Result<AdversaryPrediction> {
    match scenario.adv_mode() {
        AdversaryMode::Fixed(strategy) => Ok(AdversaryPrediction {
            strategy: strategy.probs().to_vec(),
            degenerate: false,
        }),
        AdversaryMode::NashPerGame => {
            let n = scenario.n_actions();
            let mut expected = vec![0.0; n];
            let mut degenerate = false;
            for (g, w) in scenario.belief().atoms() {
                let (strategy, flagged) = game_adversary_strategy(g, DEFAULT_TOL)?;
                degenerate |= flagged;
                for (slot, s) in expected.iter_mut().zip(&strategy) {
                    *slot += w * s;
                }
            }
            Ok(AdversaryPrediction {
                strategy: expected,
                degenerate,
            })
        }
    }
}

/// Expected defender utilities for each of its three options.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectedUtilities {
    pub alpha: f64,
    pub beta: f64,
    pub omega: f64,
}

impl ExpectedUtilities {
    pub fn as_array(&self) -> [f64; 3] {
        [self.alpha, self.beta, self.omega]
    }
}

/// Expected utilities of acting and asking against a given expected
/// adversary strategy.
pub fn expected_utilities_given(
    belief: &GameBelief,
    p: f64,
    adv: &[f64],
) -> Result<ExpectedUtilities> {
    let stats = ConditionalStats::from_belief(belief)?;
    let mut e = [0.0_f64; 4];
    for (g, w) in belief.atoms() {
        e[0] += w * g.u1(0, 0);
        e[1] += w * g.u1(0, 1);
        e[2] += w * g.u1(1, 0);
        e[3] += w * g.u1(1, 1);
    }
    Ok(ExpectedUtilities {
        alpha: e[0] * adv[0] + e[1] * adv[1],
        beta: e[2] * adv[0] + e[3] * adv[1],
        omega: stats.ac.ask_value(p) * adv[0] + stats.bd.ask_value(p) * adv[1],
    })
}

/// Expected utilities of acting at alpha, acting at beta, and asking,
/// computed through the conditional-statistics decomposition.
pub fn expected_utilities(scenario: &AdversaryScenario) -> Result<ExpectedUtilities> {
    let prediction = adversary_strategy(scenario)?;
    expected_utilities_given(scenario.belief(), scenario.p(), &prediction.strategy)
}

/// Left-hand sides of the two ask-incentive inequalities: the expected
/// gain of asking over alpha and over beta.
pub fn ask_incentive_margins(scenario: &AdversaryScenario) -> Result<(f64, f64)> {
    let prediction = adversary_strategy(scenario)?;
    margins_with(scenario.belief(), scenario.p(), &prediction.strategy)
}

fn margins_with(belief: &GameBelief, p: f64, adv: &[f64]) -> Result<(f64, f64)> {
    let stats = ConditionalStats::from_belief(belief)?;
    let vs_alpha = stats.ac.margin_vs_x(p) * adv[0] + stats.bd.margin_vs_x(p) * adv[1];
    let vs_beta = stats.ac.margin_vs_y(p) * adv[0] + stats.bd.margin_vs_y(p) * adv[1];
    Ok((vs_alpha, vs_beta))
}

/// Whether each ask-incentive inequality holds strictly (margin above
/// `tol`). The defender is incentivised to ask when both do.
pub fn ask_incentive_check(scenario: &AdversaryScenario, tol: f64) -> Result<(bool, bool)> {
    let (vs_alpha, vs_beta) = ask_incentive_margins(scenario)?;
    Ok((vs_alpha > tol, vs_beta > tol))
}

/// Indicator of which defender options attain the maximal expected
/// utility; ties within the tolerance mark several entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IncentiveVector {
    pub m_alpha: u8,
    pub m_beta: u8,
    pub m_omega: u8,
}

impl IncentiveVector {
    pub fn as_array(&self) -> [u8; 3] {
        [self.m_alpha, self.m_beta, self.m_omega]
    }

    /// True when asking is the sole maximal option.
    pub fn strictly_ask(&self) -> bool {
        self.as_array() == [0, 0, 1]
    }
}

fn maximal_flags(values: &[f64], tie_tol: f64) -> Vec<u8> {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .map(|&v| u8::from(v >= max - tie_tol))
        .collect()
}

/// The incentive vector `(m(alpha), m(beta), m(omega))` of a scenario.
pub fn incentive_vector(scenario: &AdversaryScenario, tie_tol: f64) -> Result<IncentiveVector> {
    Ok(incentive_from_utilities(
        &expected_utilities(scenario)?,
        tie_tol,
    ))
}

/// Flags the maximal options of an already-computed utility triple.
pub fn incentive_from_utilities(utilities: &ExpectedUtilities, tie_tol: f64) -> IncentiveVector {
    let flags = maximal_flags(&utilities.as_array(), tie_tol);
    IncentiveVector {
        m_alpha: flags[0],
        m_beta: flags[1],
        m_omega: flags[2],
    }
}

/// Averages incentive vectors over an ensemble and collapses them to the
/// corrigibility scalar `mean(m(omega)) - max(mean(m(alpha)), mean(m(beta)))`,
/// which lies in `[-1, 1]`.
pub fn aggregate_corrigibility(ensemble: &[AdversaryScenario]) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::InvalidScenario(
            "ensemble aggregation needs at least one scenario".to_string(),
        ));
    }
    let mut sums = [0.0_f64; 3];
    for scenario in ensemble {
        let m = incentive_vector(scenario, DEFAULT_TIE_TOL)?;
        for (slot, v) in sums.iter_mut().zip(m.as_array()) {
            *slot += v as f64;
        }
    }
    let n = ensemble.len() as f64;
    let mean: Vec<f64> = sums.iter().map(|s| s / n).collect();
    Ok(mean[2] - mean[0].max(mean[1]))
}

fn check_n_action_inputs(games: &[Bimatrix], weights: &[f64], adv: &[f64]) -> Result<usize> {
    let n = games
        .first()
        .map(Bimatrix::rows)
        .ok_or_else(|| Error::InvalidScenario("belief needs at least one game".to_string()))?;
    if games.len() != weights.len() {
        return Err(Error::InvalidScenario(
            "one weight per game required".to_string(),
        ));
    }
    for g in games {
        if !g.is_square() || g.rows() != n {
            return Err(Error::InvalidScenario(format!(
                "all games must be {n}x{n} for the n-action check"
            )));
        }
    }
    if adv.len() != n {
        return Err(Error::InvalidScenario(format!(
            "adversary strategy has {} entries, games have {n} actions",
            adv.len()
        )));
    }
    Ok(n)
}

/// Expected utilities for an `n`-action defender: one value per base
/// action plus the ask value, where asking yields the per-column max of
/// the realised game with probability `p` and the min otherwise.
pub fn n_action_utilities(
    games: &[Bimatrix],
    weights: &[f64],
    p: f64,
    adv: &[f64],
) -> Result<(Vec<f64>, f64)> {
    let n = check_n_action_inputs(games, weights, adv)?;
    let mut base = vec![0.0; n];
    let mut omega = 0.0;
    for (g, &w) in games.iter().zip(weights) {
        for (j, &pi) in adv.iter().enumerate() {
            let mut col_max = f64::NEG_INFINITY;
            let mut col_min = f64::INFINITY;
            for (k, slot) in base.iter_mut().enumerate() {
                let u = g.u1(k, j);
                *slot += w * pi * u;
                col_max = col_max.max(u);
                col_min = col_min.min(u);
            }
            omega += w * pi * (p * col_max + (1.0 - p) * col_min);
        }
    }
    Ok((base, omega))
}

/// One boolean per base action: does asking beat that action by more
/// than `tol`? Reduces to [`ask_incentive_check`] when `n = 2`.
pub fn n_action_check(
    belief: &GameBelief,
    p: f64,
    adv: &MixedStrategy,
    tol: f64,
) -> Result<Vec<bool>> {
    let (base, omega) = n_action_utilities(belief.games(), belief.weights(), p, adv.probs())?;
    Ok(base.iter().map(|&u| omega - u > tol).collect())
}

/// Incentive flags over `[base actions.., omega]` for an `n`-action
/// defender.
pub fn n_action_incentive(
    games: &[Bimatrix],
    weights: &[f64],
    p: f64,
    adv: &[f64],
    tie_tol: f64,
) -> Result<Vec<u8>> {
    let (mut values, omega) = n_action_utilities(games, weights, p, adv)?;
    values.push(omega);
    Ok(maximal_flags(&values, tie_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::SymmetricGame;

    fn delta_scenario(ordinal: [f64; 4], p: f64, mode: AdversaryMode) -> AdversaryScenario {
        let belief = GameBelief::delta(SymmetricGame::new(ordinal).expand());
        AdversaryScenario::new(belief, p, mode).unwrap()
    }

    fn fixed(probs: Vec<f64>) -> AdversaryMode {
        AdversaryMode::Fixed(MixedStrategy::new(probs).unwrap())
    }

    #[test]
    fn defender_table_branches() {
        // a>c, b>d: the omega column replicates the top row's cells.
        let t = build_defender_table(
            &SymmetricGame::new([4.0, 3.0, 2.0, 1.0]),
            HumanConduct::RationalAligned,
        )
        .unwrap();
        assert_eq!(t.get(0, 0), (4.0, 4.0, 4.0));
        assert_eq!(t.get(0, 1), (3.0, 2.0, 2.0));
        assert_eq!(t.get(0, 2), (4.0, 4.0, 4.0));
        assert_eq!(t.get(1, 0), (2.0, 3.0, 3.0));
        assert_eq!(t.get(1, 1), (1.0, 1.0, 1.0));
        assert_eq!(t.get(1, 2), (2.0, 3.0, 3.0));

        // a<c, b>d: omega mirrors beta against adversary-alpha and alpha
        // against adversary-beta.
        for ordinal in [[2.0, 3.0, 4.0, 1.0], [2.0, 4.0, 3.0, 1.0]] {
            let g = SymmetricGame::new(ordinal);
            let t = build_defender_table(&g, HumanConduct::RationalAligned).unwrap();
            let base = g.expand();
            assert_eq!(t.get(0, 2), (base.u2(1, 0), base.u1(1, 0), base.u1(1, 0)));
            assert_eq!(t.get(1, 2), (base.u2(0, 1), base.u1(0, 1), base.u1(0, 1)));
        }
    }

    #[test]
    fn defender_table_rejects_ties() {
        assert!(build_defender_table(
            &SymmetricGame::new([1.0, 3.0, 1.0, 2.0]),
            HumanConduct::RationalAligned
        )
        .is_err());
        assert!(build_defender_table(
            &SymmetricGame::new([2.0, 3.0, 1.0, 3.0]),
            HumanConduct::RationalAligned
        )
        .is_err());
    }

    #[test]
    fn adversary_strategy_modes() {
        let nash = adversary_strategy(&delta_scenario(
            [4.0, 3.0, 2.0, 1.0],
            1.0,
            AdversaryMode::NashPerGame,
        ))
        .unwrap();
        assert_eq!(nash.strategy, vec![1.0, 0.0]);
        assert!(!nash.degenerate);

        let fixed = adversary_strategy(&delta_scenario(
            [4.0, 3.0, 2.0, 1.0],
            1.0,
            fixed(vec![0.3, 0.7]),
        ))
        .unwrap();
        assert_eq!(fixed.strategy, vec![0.3, 0.7]);
    }

    #[test]
    fn adversary_strategy_weight_averages() {
        // Second game: dominant beta for both players, adversary plays (0, 1).
        let g1 = SymmetricGame::new([4.0, 3.0, 2.0, 1.0]).expand();
        let g2 = SymmetricGame::new([1.0, 2.0, 3.0, 4.0]).expand();
        let belief = GameBelief::bernoulli(g1, g2, 0.5).unwrap();
        let scenario = AdversaryScenario::new(belief, 1.0, AdversaryMode::NashPerGame).unwrap();
        let prediction = adversary_strategy(&scenario).unwrap();
        assert_eq!(prediction.strategy, vec![0.5, 0.5]);
    }

    #[test]
    fn expected_utilities_examples() {
        let u = expected_utilities(&delta_scenario(
            [4.0, 3.0, 2.0, 1.0],
            1.0,
            fixed(vec![1.0, 0.0]),
        ))
        .unwrap();
        assert_eq!(u.as_array(), [4.0, 2.0, 4.0]);

        let u = expected_utilities(&delta_scenario(
            [4.0, 3.0, 2.0, 1.0],
            0.0,
            fixed(vec![1.0, 0.0]),
        ))
        .unwrap();
        assert_eq!(u.omega, 2.0);
    }

    #[test]
    fn half_rationality_averages_act_utilities() {
        let g1 = SymmetricGame::new([4.0, 1.0, 3.0, 2.0]).expand();
        let g2 = SymmetricGame::new([2.0, 4.0, 3.0, 1.0]).expand();
        let belief = GameBelief::bernoulli(g1, g2, 0.3).unwrap();
        let scenario = AdversaryScenario::new(belief, 0.5, fixed(vec![0.6, 0.4])).unwrap();
        let u = expected_utilities(&scenario).unwrap();
        assert!((u.omega - 0.5 * (u.alpha + u.beta)).abs() < 1e-12);
    }

    #[test]
    fn margins_match_utility_differences() {
        let g1 = SymmetricGame::new([4.0, 3.0, 2.0, 1.0]).expand();
        let g2 = SymmetricGame::new([2.0, 3.0, 4.0, 1.0]).expand();
        for &p in &[0.0, 0.3, 0.5, 0.9, 1.0] {
            let belief = GameBelief::bernoulli(g1.clone(), g2.clone(), 0.4).unwrap();
            let scenario = AdversaryScenario::new(belief, p, fixed(vec![0.25, 0.75])).unwrap();
            let (vs_alpha, vs_beta) = ask_incentive_margins(&scenario).unwrap();
            let u = expected_utilities(&scenario).unwrap();
            assert!((vs_alpha - (u.omega - u.alpha)).abs() < 1e-12);
            assert!((vs_beta - (u.omega - u.beta)).abs() < 1e-12);
        }
    }

    #[test]
    fn rationality_regimes() {
        let g1 = SymmetricGame::new([4.0, 3.0, 2.0, 1.0]).expand();
        let g2 = SymmetricGame::new([1.0, 2.0, 3.0, 4.0]).expand();
        let belief = || GameBelief::bernoulli(g1.clone(), g2.clone(), 0.5).unwrap();

        // Rational human, ordering uncertainty in both pairs: ask.
        let scenario = AdversaryScenario::new(belief(), 1.0, fixed(vec![0.5, 0.5])).unwrap();
        assert_eq!(
            ask_incentive_check(&scenario, DEFAULT_TOL).unwrap(),
            (true, true)
        );

        // Coin-flip human: margins are additive inverses.
        let scenario = AdversaryScenario::new(belief(), 0.5, fixed(vec![0.5, 0.5])).unwrap();
        let (a, b) = ask_incentive_margins(&scenario).unwrap();
        assert!((a + b).abs() < 1e-12);
        assert_eq!(
            ask_incentive_check(&scenario, DEFAULT_TOL).unwrap(),
            (false, false)
        );

        // Misaligned human: both margins non-positive.
        let scenario = AdversaryScenario::new(belief(), 0.0, fixed(vec![0.5, 0.5])).unwrap();
        let (a, b) = ask_incentive_margins(&scenario).unwrap();
        assert!(a <= 0.0 && b <= 0.0);
    }

    #[test]
    fn incentive_vector_tie_handling() {
        let scenario = delta_scenario([4.0, 3.0, 2.0, 1.0], 1.0, fixed(vec![1.0, 0.0]));
        // Utilities (4, 2, 4): alpha and omega tie.
        let m = incentive_vector(&scenario, DEFAULT_TIE_TOL).unwrap();
        assert_eq!(m.as_array(), [1, 0, 1]);
        assert!(!m.strictly_ask());

        assert_eq!(
            maximal_flags(&[3.0, 2.0, 5.0], DEFAULT_TIE_TOL),
            vec![0, 0, 1]
        );
        assert_eq!(
            maximal_flags(&[2.0, 2.0, 2.0], DEFAULT_TIE_TOL),
            vec![1, 1, 1]
        );
    }

    #[test]
    fn aggregate_scalar_examples() {
        let ask = delta_scenario([2.0, 4.0, 3.0, 1.0], 1.0, fixed(vec![0.5, 0.5]));
        assert_eq!(
            incentive_vector(&ask, DEFAULT_TIE_TOL).unwrap().as_array(),
            [0, 0, 1]
        );
        let ensemble = vec![ask.clone(), ask.clone()];
        assert_eq!(aggregate_corrigibility(&ensemble).unwrap(), 1.0);

        let act = delta_scenario([4.0, 3.0, 2.0, 1.0], 0.0, fixed(vec![1.0, 0.0]));
        assert_eq!(
            incentive_vector(&act, DEFAULT_TIE_TOL).unwrap().as_array(),
            [1, 0, 0]
        );
        assert_eq!(
            aggregate_corrigibility(std::slice::from_ref(&act)).unwrap(),
            -1.0
        );

        // Half strictly-ask, half tied between alpha and omega.
        let tied = delta_scenario([4.0, 3.0, 2.0, 1.0], 1.0, fixed(vec![1.0, 0.0]));
        let mixed = vec![ask, tied];
        assert!((aggregate_corrigibility(&mixed).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn n_action_reduces_to_two_action_check() {
        let g1 = SymmetricGame::new([4.0, 3.0, 2.0, 1.0]).expand();
        let g2 = SymmetricGame::new([2.0, 3.0, 4.0, 1.0]).expand();
        for &p in &[0.0, 0.4, 1.0] {
            let belief = GameBelief::bernoulli(g1.clone(), g2.clone(), 0.6).unwrap();
            let adv = MixedStrategy::new(vec![0.7, 0.3]).unwrap();
            let scenario =
                AdversaryScenario::new(belief.clone(), p, AdversaryMode::Fixed(adv.clone()))
                    .unwrap();
            let (ineq_alpha, ineq_beta) = ask_incentive_check(&scenario, DEFAULT_TOL).unwrap();
            let checks = n_action_check(&belief, p, &adv, DEFAULT_TOL).unwrap();
            assert_eq!(checks, vec![ineq_alpha, ineq_beta]);
        }
    }

    #[test]
    fn n_action_utilities_match_conditional_route() {
        let g1 = SymmetricGame::new([4.0, 1.0, 3.0, 2.0]).expand();
        let g2 = SymmetricGame::new([3.0, 1.0, 4.0, 2.0]).expand();
        let belief = GameBelief::bernoulli(g1, g2, 0.35).unwrap();
        let adv = vec![0.2, 0.8];
        for &p in &[0.0, 0.25, 0.5, 1.0] {
            let (base, omega) =
                n_action_utilities(belief.games(), belief.weights(), p, &adv).unwrap();
            let u = expected_utilities_given(&belief, p, &adv).unwrap();
            assert!((base[0] - u.alpha).abs() < 1e-12);
            assert!((base[1] - u.beta).abs() < 1e-12);
            assert!((omega - u.omega).abs() < 1e-12);
        }
    }

    #[test]
    fn three_action_checks() {
        use crate::game::sample_symmetric_games;
        let games = sample_symmetric_games(3, 2, 11).unwrap();
        let belief = GameBelief::new(games, vec![0.5, 0.5]).unwrap();
        let adv = MixedStrategy::uniform(3);
        // Rational human with per-column uncertainty: asking wins everywhere.
        let checks = n_action_check(&belief, 1.0, &adv, DEFAULT_TOL).unwrap();
        assert_eq!(checks, vec![true, true, true]);
        // Misaligned human: asking never wins.
        let checks = n_action_check(&belief, 0.0, &adv, DEFAULT_TOL).unwrap();
        assert!(checks.iter().all(|&c| !c));
    }

    #[test]
    fn scenario_validation() {
        let asym =
            Bimatrix::new(2, 2, vec![(1.0, 2.0), (3.0, 4.0), (5.0, 6.0), (7.0, 8.0)]).unwrap();
        assert!(
            AdversaryScenario::new(GameBelief::delta(asym), 0.5, AdversaryMode::NashPerGame)
                .is_err()
        );
        let g = SymmetricGame::new([4.0, 3.0, 2.0, 1.0]).expand();
        assert!(AdversaryScenario::new(
            GameBelief::delta(g.clone()),
            1.5,
            AdversaryMode::NashPerGame
        )
        .is_err());
        assert!(
            AdversaryScenario::new(GameBelief::delta(g), 0.5, fixed(vec![0.2, 0.3, 0.5]),).is_err()
        );
    }
}
