//! Phase diagrams over the (belief, rationality) plane.
//!
//! A [`PhaseGrid`] evaluates one of the corrigibility questions on a
//! uniform lattice: `r` sweeps the Bernoulli belief weight on the first
//! game, `p` the human rationality. Cells are computed independently (in
//! parallel under whatever rayon pool is installed) and assembled in a
//! fixed order, so output bytes never depend on scheduling.
//!
//! Grids serialise to CSV with the columns
//! `r,p,agent,P_alpha,P_beta,P_omega,n_equilibria,corrigible` and to JSON
//! that mirrors the structure losslessly; [`render_heatmap`] draws an SVG
//! with one 10-pixel rectangle per cell and a 40-pixel axis margin.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::adversary::{
    adversary_strategy, expected_utilities_given, game_adversary_strategy,
    incentive_from_utilities, n_action_incentive, AdversaryMode, AdversaryScenario,
    DEFAULT_TIE_TOL,
};
use crate::corrigibility::{
    corrigibility_verdict, expected_nfg, strategy_colour, GameBelief, RationalityBelief,
};
use crate::error::{Error, Result};
use crate::game::{Bimatrix, SymmetricGame};
use crate::nash::DEFAULT_TOL;

/// Side length of a rendered cell in pixels.
pub const CELL_PX: usize = 10;
/// Axis margin in pixels.
pub const MARGIN_PX: usize = 40;
/// Ensembles with more unordered pairs than this are subsampled.
pub const MAX_ENSEMBLE_PAIRS: usize = 500;

/// One evaluated lattice point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cell {
    /// Two-agent corrigibility verdict.
    Corrigibility(CorrCell),
    /// Single defender incentive vector.
    Incentive(IncentiveCell),
    /// Ensemble-averaged incentives.
    Aggregate(AggregateCell),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrCell {
    /// Every equilibrium of the cell's expected game, as
    /// `(row strategy, column strategy)` probability triples.
    pub equilibria: Vec<([f64; 3], [f64; 3])>,
    /// Index of the equilibrium used for reporting and colouring.
    pub selected: usize,
    pub corrigible: bool,
    /// Some support system was singular; a continuum may exist.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncentiveCell {
    /// Maximality flags over `[base actions.., omega]`.
    pub m: Vec<u8>,
    /// Expected utilities over `[base actions.., omega]`.
    pub expected: Vec<f64>,
    /// The adversary model hit a multi-equilibrium or singular game.
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    /// Componentwise mean of incentive flags over `[base.., omega]`.
    pub mean_m: Vec<f64>,
    /// `mean(m(omega)) - max over base actions of mean(m)`.
    pub scalar: f64,
}

/// A 2-D lattice over belief weight `r` (x) and rationality `p` (y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub r_axis: Vec<f64>,
    pub p_axis: Vec<f64>,
    /// `cells[p_index][r_index]`.
    pub cells: Vec<Vec<Cell>>,
}

impl PhaseGrid {
    pub fn cell(&self, r_index: usize, p_index: usize) -> &Cell {
        &self.cells[p_index][r_index]
    }
}

fn axis(resolution: usize) -> Vec<f64> {
    (0..resolution)
        .map(|i| i as f64 / (resolution - 1) as f64)
        .collect()
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 2 {
        return Err(Error::InvalidScenario(format!(
            "sweep resolution must be at least 2, got {resolution}"
        )));
    }
    Ok(())
}

fn assemble<F>(resolution: usize, eval: F) -> Result<PhaseGrid>
where
    F: Fn(f64, f64) -> Result<Cell> + Sync,
{
    let r_axis = axis(resolution);
    let p_axis = axis(resolution);
    let cells: Vec<Vec<Cell>> = p_axis
        .par_iter()
        .map(|&p| -> Result<Vec<Cell>> { r_axis.iter().map(|&r| eval(r, p)).collect() })
        .collect::<Result<_>>()?;
    Ok(PhaseGrid {
        r_axis,
        p_axis,
        cells,
    })
}

/// Sweeps the two-agent corrigibility game for a Bernoulli belief over
/// `(game1, game2)` and a shared rationality belief.
pub fn sweep_corrigibility(
    game1: &Bimatrix,
    game2: &Bimatrix,
    resolution: usize,
) -> Result<PhaseGrid> {
    check_resolution(resolution)?;
    for g in [game1, game2] {
        if g.rows() != 2 || g.cols() != 2 {
            return Err(Error::InvalidGame(
                "corrigibility sweeps need 2x2 base games".to_string(),
            ));
        }
    }
    assemble(resolution, |r, p| {
        let belief = GameBelief::bernoulli(game1.clone(), game2.clone(), r)?;
        let gamma = expected_nfg(&belief, &RationalityBelief::shared(p)?)?;
        let verdict = corrigibility_verdict(&gamma, DEFAULT_TOL)?;
        let equilibria = verdict
            .equilibria
            .equilibria
            .iter()
            .map(|eq| {
                let tri = |probs: &[f64]| [probs[0], probs[1], probs[2]];
                (tri(eq.row.probs()), tri(eq.col.probs()))
            })
            .collect();
        Ok(Cell::Corrigibility(CorrCell {
            equilibria,
            selected: verdict.selected,
            corrigible: verdict.corrigible,
            degenerate: verdict.equilibria.degenerate,
        }))
    })
}

/// Sweeps the defender's incentive vector for a Bernoulli belief over two
/// symmetric games.
pub fn sweep_adversary(
    game1: &SymmetricGame,
    game2: &SymmetricGame,
    resolution: usize,
    adv_mode: &AdversaryMode,
) -> Result<PhaseGrid> {
    check_resolution(resolution)?;
    let (g1, g2) = (game1.expand(), game2.expand());
    assemble(resolution, |r, p| {
        let belief = GameBelief::bernoulli(g1.clone(), g2.clone(), r)?;
        let scenario = AdversaryScenario::new(belief, p, adv_mode.clone())?;
        let prediction = adversary_strategy(&scenario)?;
        let utilities = expected_utilities_given(scenario.belief(), p, &prediction.strategy)?;
        let m = incentive_from_utilities(&utilities, DEFAULT_TIE_TOL);
        Ok(Cell::Incentive(IncentiveCell {
            m: m.as_array().to_vec(),
            expected: utilities.as_array().to_vec(),
            degenerate: prediction.degenerate,
        }))
    })
}

/// Sweeps the ensemble aggregate over all unordered pairs of `games`
/// (or a seeded subsample when there are more than
/// [`MAX_ENSEMBLE_PAIRS`]), storing the corrigibility scalar per cell.
pub fn sweep_ensemble(
    games: &[Bimatrix],
    resolution: usize,
    adv_mode: &AdversaryMode,
    seed: u64,
) -> Result<PhaseGrid> {
    check_resolution(resolution)?;
    if games.len() < 2 {
        return Err(Error::InvalidScenario(
            "ensemble sweeps need at least two games".to_string(),
        ));
    }
    let n = games[0].rows();
    for g in games {
        if !g.is_square() || g.rows() != n {
            return Err(Error::InvalidScenario(format!(
                "all ensemble games must be {n}x{n}"
            )));
        }
        if !g.is_symmetric() {
            return Err(Error::InvalidScenario(
                "ensemble games must be symmetric".to_string(),
            ));
        }
    }

    let mut pairs: Vec<(usize, usize)> = (0..games.len())
        .flat_map(|i| (i + 1..games.len()).map(move |j| (i, j)))
        .collect();
    if pairs.len() > MAX_ENSEMBLE_PAIRS {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        pairs.shuffle(&mut rng);
        pairs.truncate(MAX_ENSEMBLE_PAIRS);
        pairs.sort_unstable();
    }

    // The per-game adversary strategy does not depend on the cell, so
    // solve each game once up front.
    let strategies: Vec<Vec<f64>> = match adv_mode {
        AdversaryMode::Fixed(s) => {
            if s.len() != n {
                return Err(Error::InvalidScenario(format!(
                    "fixed adversary strategy has {} entries, games have {n} actions",
                    s.len()
                )));
            }
            vec![s.probs().to_vec(); games.len()]
        }
        AdversaryMode::NashPerGame => games
            .iter()
            .map(|g| game_adversary_strategy(g, DEFAULT_TOL).map(|(s, _)| s))
            .collect::<Result<_>>()?,
    };

    assemble(resolution, |r, p| {
        let mut sums = vec![0.0_f64; n + 1];
        for &(i, j) in &pairs {
            let weights = [r, 1.0 - r];
            let games_pair = [games[i].clone(), games[j].clone()];
            let mut adv = vec![0.0; n];
            for k in 0..n {
                adv[k] = r * strategies[i][k] + (1.0 - r) * strategies[j][k];
            }
            let m = n_action_incentive(&games_pair, &weights, p, &adv, DEFAULT_TIE_TOL)?;
            for (slot, &flag) in sums.iter_mut().zip(&m) {
                *slot += flag as f64;
            }
        }
        let count = pairs.len() as f64;
        let mean_m: Vec<f64> = sums.iter().map(|s| s / count).collect();
        let base_max = mean_m[..n]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Cell::Aggregate(AggregateCell {
            scalar: mean_m[n] - base_max,
            mean_m,
        }))
    })
}

/// Formats a value with nine significant digits in plain decimal.
fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0.00000000".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    let precision = (8 - exponent).clamp(0, 30) as usize;
    format!("{x:.precision$}")
}

/// Output formats for [`write_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    Csv,
    Json,
}

/// Collapses an incentive or mean vector of length `len + 1`
/// (`[base.., omega]`) onto the three CSV probability columns. Two base
/// actions map directly; larger games report the maximal base mean in
/// the first column.
fn collapse_columns(values: &[f64]) -> [f64; 3] {
    let n = values.len() - 1;
    if n == 2 {
        [values[0], values[1], values[2]]
    } else {
        let base_max = values[..n]
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        [base_max, 0.0, values[n]]
    }
}

/// Serialises a grid. CSV holds one row per agent per cell with the
/// fixed header `r,p,agent,P_alpha,P_beta,P_omega,n_equilibria,corrigible`;
/// JSON mirrors the [`PhaseGrid`] structure and round-trips through
/// [`read_grid_json`].
pub fn write_grid(grid: &PhaseGrid, format: GridFormat) -> Result<Vec<u8>> {
    match format {
        GridFormat::Json => serde_json::to_vec_pretty(grid).map_err(|e| Error::Parse {
            field: "grid".to_string(),
            message: e.to_string(),
        }),
        GridFormat::Csv => {
            let mut out =
                String::from("r,p,agent,P_alpha,P_beta,P_omega,n_equilibria,corrigible\n");
            for (pi, row) in grid.cells.iter().enumerate() {
                for (ri, cell) in row.iter().enumerate() {
                    let (r, p) = (grid.r_axis[ri], grid.p_axis[pi]);
                    match cell {
                        Cell::Corrigibility(c) => {
                            let (row_probs, col_probs) = c.equilibria[c.selected];
                            for (agent, probs) in [("1", row_probs), ("2", col_probs)] {
                                writeln!(
                                    out,
                                    "{},{},{agent},{},{},{},{},{}",
                                    fmt_sig9(r),
                                    fmt_sig9(p),
                                    fmt_sig9(probs[0]),
                                    fmt_sig9(probs[1]),
                                    fmt_sig9(probs[2]),
                                    c.equilibria.len(),
                                    c.corrigible
                                )
                                .expect("string write");
                            }
                        }
                        Cell::Incentive(c) => {
                            let m: Vec<f64> = c.m.iter().map(|&v| v as f64).collect();
                            let cols = collapse_columns(&m);
                            let ties: u32 = c.m.iter().map(|&v| v as u32).sum();
                            let ask_only = c.m[c.m.len() - 1] == 1 && ties == 1;
                            writeln!(
                                out,
                                "{},{},defender,{},{},{},{},{}",
                                fmt_sig9(r),
                                fmt_sig9(p),
                                fmt_sig9(cols[0]),
                                fmt_sig9(cols[1]),
                                fmt_sig9(cols[2]),
                                ties,
                                ask_only
                            )
                            .expect("string write");
                        }
                        Cell::Aggregate(c) => {
                            let cols = collapse_columns(&c.mean_m);
                            writeln!(
                                out,
                                "{},{},ensemble,{},{},{},0,{}",
                                fmt_sig9(r),
                                fmt_sig9(p),
                                fmt_sig9(cols[0]),
                                fmt_sig9(cols[1]),
                                fmt_sig9(cols[2]),
                                c.scalar > 0.0
                            )
                            .expect("string write");
                        }
                    }
                }
            }
            Ok(out.into_bytes())
        }
    }
}

/// Reads a grid back from its JSON serialisation, re-validating the
/// lattice structure.
pub fn read_grid_json(bytes: &[u8]) -> Result<PhaseGrid> {
    let grid: PhaseGrid = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        field: "grid".to_string(),
        message: e.to_string(),
    })?;
    let increasing = |axis: &[f64]| axis.windows(2).all(|w| w[0] < w[1]);
    if !increasing(&grid.r_axis) || !increasing(&grid.p_axis) {
        return Err(Error::Parse {
            field: "r_axis".to_string(),
            message: "axis values must be strictly increasing".to_string(),
        });
    }
    if grid.cells.len() != grid.p_axis.len()
        || grid.cells.iter().any(|row| row.len() != grid.r_axis.len())
    {
        return Err(Error::Parse {
            field: "cells".to_string(),
            message: "cell matrix dimensions must match the axis lengths".to_string(),
        });
    }
    Ok(grid)
}

/// Rendering modes for [`render_heatmap`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    /// Per-agent strategy colours `(R,G,B) = (P(alpha),P(beta),P(omega))`;
    /// corrigibility grids only. Cells with several equilibria carry a
    /// diagonal hatch mark.
    RgbStrategy,
    /// Blue `#0000FF` where asking is (uniquely) preferred, red `#FF0000`
    /// elsewhere.
    CorrigibleBinary,
    /// Red(-1) -> white(0) -> blue(+1) ramp over the aggregate scalar.
    AggregateScalar,
}

fn ramp_colour(scalar: f64) -> String {
    let s = scalar.clamp(-1.0, 1.0);
    let (r, g, b) = if s < 0.0 {
        let t = s + 1.0;
        (255.0, 255.0 * t, 255.0 * t)
    } else {
        let t = 1.0 - s;
        (255.0 * t, 255.0 * t, 255.0)
    };
    let to_byte = |v: f64| -> u8 { v.round().clamp(0.0, 255.0) as u8 };
    format!("#{:02X}{:02X}{:02X}", to_byte(r), to_byte(g), to_byte(b))
}

fn cell_ask_preferred(cell: &Cell) -> bool {
    match cell {
        Cell::Corrigibility(c) => c.corrigible,
        Cell::Incentive(c) => {
            let ties: u32 = c.m.iter().map(|&v| v as u32).sum();
            c.m[c.m.len() - 1] == 1 && ties == 1
        }
        Cell::Aggregate(c) => c.scalar > 0.0,
    }
}

/// Renders a grid as an SVG 1.1 document with 10-pixel cells and a
/// 40-pixel margin for the `r` and `p` axis labels. Output bytes are a
/// pure function of the grid and mode.
pub fn render_heatmap(grid: &PhaseGrid, mode: RenderMode) -> Result<String> {
    let nr = grid.r_axis.len();
    let np = grid.p_axis.len();
    if nr == 0 || np == 0 {
        return Err(Error::InvalidScenario(
            "cannot render an empty grid".to_string(),
        ));
    }
    let panels = match mode {
        RenderMode::RgbStrategy => {
            if !matches!(grid.cells[0][0], Cell::Corrigibility(_)) {
                return Err(Error::InvalidScenario(
                    "strategy colouring applies to corrigibility grids".to_string(),
                ));
            }
            2
        }
        RenderMode::AggregateScalar => {
            if matches!(grid.cells[0][0], Cell::Corrigibility(_)) {
                return Err(Error::InvalidScenario(
                    "the scalar ramp applies to incentive and ensemble grids".to_string(),
                ));
            }
            1
        }
        RenderMode::CorrigibleBinary => 1,
    };
    let panel_gap = 20;
    let panel_width = nr * CELL_PX;
    let width = MARGIN_PX + panels * panel_width + (panels - 1) * panel_gap;
    let height = np * CELL_PX + MARGIN_PX;
    let mut svg = String::new();
    writeln!(
        svg,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">"
    )
    .expect("string write");

    let mut hatches = String::new();
    for panel in 0..panels {
        let x0 = MARGIN_PX + panel * (panel_width + panel_gap);
        for (pi, row) in grid.cells.iter().enumerate() {
            let y = (np - 1 - pi) * CELL_PX;
            for (ri, cell) in row.iter().enumerate() {
                let x = x0 + ri * CELL_PX;
                let fill = match mode {
                    RenderMode::RgbStrategy => {
                        let Cell::Corrigibility(c) = cell else {
                            unreachable!("checked above")
                        };
                        let (row_probs, col_probs) = c.equilibria[c.selected];
                        let probs = if panel == 0 { row_probs } else { col_probs };
                        let [red, green, blue] = strategy_colour(&probs);
                        if c.equilibria.len() > 1 {
                            writeln!(
                                hatches,
                                "<line x1=\"{x}\" y1=\"{}\" x2=\"{}\" y2=\"{y}\" stroke=\"black\" stroke-width=\"1\"/>",
                                y + CELL_PX,
                                x + CELL_PX
                            )
                            .expect("string write");
                        }
                        format!("rgb({red},{green},{blue})")
                    }
                    RenderMode::CorrigibleBinary => {
                        if cell_ask_preferred(cell) {
                            "#0000FF".to_string()
                        } else {
                            "#FF0000".to_string()
                        }
                    }
                    RenderMode::AggregateScalar => {
                        let scalar = match cell {
                            Cell::Aggregate(c) => c.scalar,
                            Cell::Incentive(c) => {
                                let base = &c.m[..c.m.len() - 1];
                                let base_max = base
                                    .iter()
                                    .map(|&v| v as f64)
                                    .fold(f64::NEG_INFINITY, f64::max);
                                c.m[c.m.len() - 1] as f64 - base_max
                            }
                            Cell::Corrigibility(_) => unreachable!("checked above"),
                        };
                        ramp_colour(scalar)
                    }
                };
                writeln!(
                    svg,
                    "<rect x=\"{x}\" y=\"{y}\" width=\"{CELL_PX}\" height=\"{CELL_PX}\" fill=\"{fill}\"/>"
                )
                .expect("string write");
            }
        }
    }
    svg.push_str(&hatches);

    // Axis labels and endpoint ticks.
    let axis_y = np * CELL_PX;
    let label_y = axis_y + 16;
    let mid_x = MARGIN_PX + panel_width / 2;
    writeln!(
        svg,
        "<text x=\"{mid_x}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">r</text>",
        axis_y + 32
    )
    .expect("string write");
    writeln!(
        svg,
        "<text x=\"{MARGIN_PX}\" y=\"{label_y}\" font-size=\"10\" text-anchor=\"middle\">0</text>"
    )
    .expect("string write");
    writeln!(
        svg,
        "<text x=\"{}\" y=\"{label_y}\" font-size=\"10\" text-anchor=\"middle\">1</text>",
        MARGIN_PX + panel_width
    )
    .expect("string write");
    writeln!(
        svg,
        "<text x=\"12\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">p</text>",
        np * CELL_PX / 2
    )
    .expect("string write");
    writeln!(
        svg,
        "<text x=\"28\" y=\"{axis_y}\" font-size=\"10\" text-anchor=\"middle\">0</text>"
    )
    .expect("string write");
    writeln!(
        svg,
        "<text x=\"28\" y=\"10\" font-size=\"10\" text-anchor=\"middle\">1</text>"
    )
    .expect("string write");
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ReducedGame;
    use crate::nash::MixedStrategy;

    fn shared(payoffs: [f64; 4]) -> Bimatrix {
        ReducedGame::shared(payoffs).expand()
    }

    #[test]
    fn corr_sweep_corner_resolution() {
        let grid = sweep_corrigibility(
            &shared([3.0, 4.0, 1.0, 2.0]),
            &shared([3.0, 1.0, 4.0, 2.0]),
            2,
        )
        .unwrap();
        assert_eq!(grid.r_axis, vec![0.0, 1.0]);
        assert_eq!(grid.p_axis, vec![0.0, 1.0]);
        assert_eq!(grid.cells.len(), 2);
        assert_eq!(grid.cells[0].len(), 2);
    }

    #[test]
    fn corr_sweep_center_cell_is_corrigible() {
        let grid = sweep_corrigibility(
            &shared([3.0, 4.0, 1.0, 2.0]),
            &shared([3.0, 1.0, 4.0, 2.0]),
            3,
        )
        .unwrap();
        let Cell::Corrigibility(c) = grid.cell(1, 2) else {
            panic!("expected corrigibility cell")
        };
        assert!(c.corrigible);
    }

    #[test]
    fn adversary_sweep_rational_interior_asks() {
        let grid = sweep_adversary(
            &SymmetricGame::new([4.0, 3.0, 2.0, 1.0]),
            &SymmetricGame::new([2.0, 4.0, 3.0, 1.0]),
            3,
            &AdversaryMode::NashPerGame,
        )
        .unwrap();
        // Interior r, p = 1.
        let Cell::Incentive(c) = grid.cell(1, 2) else {
            panic!("expected incentive cell")
        };
        assert_eq!(c.m[2], 1);
        // Misaligned row: ask is never the sole best option.
        for ri in 0..3 {
            let Cell::Incentive(c) = grid.cell(ri, 0) else {
                panic!("expected incentive cell")
            };
            let ties: u32 = c.m.iter().map(|&v| v as u32).sum();
            assert!(!(c.m[2] == 1 && ties == 1));
        }
        // Delta ends at p=1: certainty of the dominant-action game ties
        // asking with acting; certainty of battle-of-the-sexes still
        // favours asking strictly, since the human reacts to the
        // adversary's observed move.
        let Cell::Incentive(c) = grid.cell(2, 2) else {
            panic!("expected incentive cell")
        };
        assert_eq!(c.m, vec![1, 0, 1]);
        let Cell::Incentive(c) = grid.cell(0, 2) else {
            panic!("expected incentive cell")
        };
        assert_eq!(c.m, vec![0, 0, 1]);
    }

    #[test]
    fn corrigible_cells_upward_closed_in_p_for_monotone_pair() {
        let grid = sweep_corrigibility(
            &shared([3.0, 4.0, 1.0, 2.0]),
            &shared([3.0, 1.0, 4.0, 2.0]),
            11,
        )
        .unwrap();
        for ri in 1..10 {
            let mut seen_corrigible = false;
            for pi in 0..11 {
                let Cell::Corrigibility(c) = grid.cell(ri, pi) else {
                    panic!("expected corrigibility cell")
                };
                if seen_corrigible {
                    assert!(
                        c.corrigible,
                        "corrigibility lost when raising p at r index {ri}, p index {pi}"
                    );
                }
                seen_corrigible |= c.corrigible;
            }
        }
    }

    #[test]
    fn ensemble_sweep_scalar_signs() {
        let games: Vec<Bimatrix> = crate::game::enumerate_symmetric_ordinals()
            .iter()
            .map(SymmetricGame::expand)
            .collect();
        let grid = sweep_ensemble(&games, 3, &AdversaryMode::NashPerGame, 0).unwrap();
        // p = 0.5 row: never positive; p = 1 row: positive at interior r.
        for ri in 0..3 {
            let Cell::Aggregate(c) = grid.cell(ri, 1) else {
                panic!("expected aggregate cell")
            };
            assert!(c.scalar <= 0.0);
        }
        let Cell::Aggregate(c) = grid.cell(1, 2) else {
            panic!("expected aggregate cell")
        };
        assert!(c.scalar > 0.0);
    }

    #[test]
    fn csv_row_count_and_simplex() {
        let grid = sweep_corrigibility(
            &shared([3.0, 4.0, 1.0, 2.0]),
            &shared([3.0, 1.0, 4.0, 2.0]),
            2,
        )
        .unwrap();
        let csv = String::from_utf8(write_grid(&grid, GridFormat::Csv).unwrap()).unwrap();
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(
            lines[0],
            "r,p,agent,P_alpha,P_beta,P_omega,n_equilibria,corrigible"
        );
        assert_eq!(lines.len(), 1 + 8);
        for line in &lines[1..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 8);
            let sum: f64 = fields[3..6].iter().map(|f| f.parse::<f64>().unwrap()).sum();
            assert!((sum - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn json_round_trip_is_identity() {
        let grid = sweep_corrigibility(
            &shared([3.0, 4.0, 1.0, 2.0]),
            &shared([3.0, 1.0, 4.0, 2.0]),
            3,
        )
        .unwrap();
        let bytes = write_grid(&grid, GridFormat::Json).unwrap();
        let back = read_grid_json(&bytes).unwrap();
        assert_eq!(grid, back);
    }

    #[test]
    fn serial_matches_parallel_bytes() {
        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                let grid = sweep_corrigibility(
                    &shared([4.0, 3.0, 2.0, 1.0]),
                    &ReducedGame::new([2.0, 3.0, 4.0, 1.0], [3.0, 2.0, 1.0, 4.0]).expand(),
                    7,
                )
                .unwrap();
                write_grid(&grid, GridFormat::Csv).unwrap()
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn heatmap_colours() {
        let grid = sweep_corrigibility(
            &shared([3.0, 4.0, 1.0, 2.0]),
            &shared([3.0, 1.0, 4.0, 2.0]),
            3,
        )
        .unwrap();
        let svg = render_heatmap(&grid, RenderMode::RgbStrategy).unwrap();
        assert!(svg.contains("rgb(0,0,255)"));
        assert!(svg.contains("<svg xmlns"));
        let binary = render_heatmap(&grid, RenderMode::CorrigibleBinary).unwrap();
        assert!(binary.contains("#0000FF"));
        assert!(binary.contains("#FF0000"));
    }

    #[test]
    fn ramp_endpoints() {
        assert_eq!(ramp_colour(0.0), "#FFFFFF");
        assert_eq!(ramp_colour(1.0), "#0000FF");
        assert_eq!(ramp_colour(-1.0), "#FF0000");
    }

    #[test]
    fn strategy_render_rejects_incentive_grids() {
        let grid = sweep_adversary(
            &SymmetricGame::new([4.0, 3.0, 2.0, 1.0]),
            &SymmetricGame::new([2.0, 4.0, 3.0, 1.0]),
            2,
            &AdversaryMode::Fixed(MixedStrategy::uniform(2)),
        )
        .unwrap();
        assert!(render_heatmap(&grid, RenderMode::RgbStrategy).is_err());
        assert!(render_heatmap(&grid, RenderMode::AggregateScalar).is_ok());
    }

    #[test]
    fn nine_significant_digits() {
        assert_eq!(fmt_sig9(0.5), "0.500000000");
        assert_eq!(fmt_sig9(1.0), "1.00000000");
        assert_eq!(fmt_sig9(0.0), "0.00000000");
        assert_eq!(fmt_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(fmt_sig9(-0.25), "-0.250000000");
    }
}
