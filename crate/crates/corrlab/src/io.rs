//! JSON file formats for games and scenarios.
//!
//! Game files:
//!
//! ```json
//! {"kind": "reduced",   "row": [a, b, c, d], "col": [a~, b~, c~, d~]}
//! {"kind": "symmetric", "row": [a, b, c, d]}
//! {"kind": "bimatrix",  "payoffs": [[[u1, u2], ...], ...]}
//! ```
//!
//! `reduced` omits `col` for a common-payoff game. `symmetric` accepts
//! `n*n` row-major entries for an `n`-action game; the column player's
//! table is the transpose. Unknown kinds and unknown fields are rejected
//! with the offending field named.
//!
//! Scenario files wrap a weighted list of game objects:
//!
//! ```json
//! {"belief": [{"game": {...}, "weight": 0.5}, ...],
//!  "p1": 1.0, "p2": 1.0, "shared_p": true}
//! {"belief": [{"game": {...}, "weight": 0.5}, ...],
//!  "p": 1.0, "adv_mode": "nash"}
//! ```
//!
//! `adv_mode` is `"nash"` or `{"fixed": [probabilities...]}`.

use serde::Deserialize;

use crate::adversary::AdversaryMode;
use crate::corrigibility::GameBelief;
use crate::error::{Error, Result};
use crate::game::{Bimatrix, ReducedGame};
use crate::nash::MixedStrategy;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GameFile {
    kind: String,
    #[serde(default)]
    row: Option<Vec<f64>>,
    #[serde(default)]
    col: Option<Vec<f64>>,
    #[serde(default)]
    payoffs: Option<Vec<Vec<[f64; 2]>>>,
}

fn parse_err(field: &str, message: impl Into<String>) -> Error {
    Error::Parse {
        field: field.to_string(),
        message: message.into(),
    }
}

fn tuple4(field: &str, values: &[f64]) -> Result<[f64; 4]> {
    <[f64; 4]>::try_from(values)
        .map_err(|_| parse_err(field, format!("expected 4 entries, got {}", values.len())))
}

impl GameFile {
    fn into_bimatrix(self) -> Result<Bimatrix> {
        match self.kind.as_str() {
            "reduced" => {
                let row = self
                    .row
                    .ok_or_else(|| parse_err("row", "required for kind \"reduced\""))?;
                if self.payoffs.is_some() {
                    return Err(parse_err("payoffs", "not allowed for kind \"reduced\""));
                }
                let row = tuple4("row", &row)?;
                let game = match self.col {
                    Some(col) => ReducedGame::new(row, tuple4("col", &col)?),
                    None => ReducedGame::shared(row),
                };
                Ok(game.expand())
            }
            "symmetric" => {
                if self.col.is_some() {
                    return Err(parse_err("col", "not allowed for kind \"symmetric\""));
                }
                if self.payoffs.is_some() {
                    return Err(parse_err("payoffs", "not allowed for kind \"symmetric\""));
                }
                let row = self
                    .row
                    .ok_or_else(|| parse_err("row", "required for kind \"symmetric\""))?;
                let n = (row.len() as f64).sqrt() as usize;
                if n < 2 || n * n != row.len() {
                    return Err(parse_err(
                        "row",
                        format!(
                            "expected n*n entries for an n-action symmetric game (n >= 2), got {}",
                            row.len()
                        ),
                    ));
                }
                let payoffs = (0..n)
                    .flat_map(|i| {
                        let row = &row;
                        (0..n).map(move |j| (row[i * n + j], row[j * n + i]))
                    })
                    .collect();
                Bimatrix::new(n, n, payoffs)
            }
            "bimatrix" => {
                if self.row.is_some() || self.col.is_some() {
                    return Err(parse_err("row", "not allowed for kind \"bimatrix\""));
                }
                let payoffs = self
                    .payoffs
                    .ok_or_else(|| parse_err("payoffs", "required for kind \"bimatrix\""))?;
                let rows = payoffs
                    .into_iter()
                    .map(|r| r.into_iter().map(|[u1, u2]| (u1, u2)).collect())
                    .collect();
                Bimatrix::from_rows(rows).map_err(|e| parse_err("payoffs", e.to_string()))
            }
            other => Err(parse_err(
                "kind",
                format!("unknown kind \"{other}\", expected reduced, symmetric or bimatrix"),
            )),
        }
    }
}

fn from_json<'a, T: Deserialize<'a>>(text: &'a str, context: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_err(context, e.to_string()))
}

/// Parses a game file into a bimatrix.
pub fn parse_game(text: &str) -> Result<Bimatrix> {
    from_json::<GameFile>(text, "game")?.into_bimatrix()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BeliefEntryFile {
    game: GameFile,
    weight: f64,
}

fn belief_from_entries(entries: Vec<BeliefEntryFile>) -> Result<GameBelief> {
    let mut games = Vec::with_capacity(entries.len());
    let mut weights = Vec::with_capacity(entries.len());
    for entry in entries {
        games.push(entry.game.into_bimatrix()?);
        weights.push(entry.weight);
    }
    GameBelief::new(games, weights).map_err(|e| parse_err("belief", e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CorrScenarioFile {
    belief: Vec<BeliefEntryFile>,
    #[serde(default)]
    p1: Option<f64>,
    #[serde(default)]
    p2: Option<f64>,
    #[serde(default)]
    shared_p: Option<bool>,
}

/// A parsed two-agent scenario; rationality fields stay optional so the
/// command line can supply them (setting both is a conflict there).
#[derive(Debug, Clone, PartialEq)]
pub struct CorrScenario {
    pub belief: GameBelief,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub shared_p: Option<bool>,
}

/// Parses a two-agent scenario file.
pub fn parse_corr_scenario(text: &str) -> Result<CorrScenario> {
    let file: CorrScenarioFile = from_json(text, "scenario")?;
    Ok(CorrScenario {
        belief: belief_from_entries(file.belief)?,
        p1: file.p1,
        p2: file.p2,
        shared_p: file.shared_p,
    })
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum AdvModeFile {
    Name(String),
    Fixed { fixed: Vec<f64> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AdvScenarioFile {
    belief: Vec<BeliefEntryFile>,
    #[serde(default)]
    p: Option<f64>,
    #[serde(default)]
    adv_mode: Option<AdvModeFile>,
}

/// A parsed defender scenario; `p` and `adv_mode` stay optional for the
/// command line to fill in.
#[derive(Debug, Clone, PartialEq)]
pub struct AdvScenario {
    pub belief: GameBelief,
    pub p: Option<f64>,
    pub adv_mode: Option<AdversaryMode>,
}

/// Parses a defender scenario file.
pub fn parse_adv_scenario(text: &str) -> Result<AdvScenario> {
    let file: AdvScenarioFile = from_json(text, "scenario")?;
    let adv_mode = match file.adv_mode {
        None => None,
        Some(AdvModeFile::Name(name)) if name == "nash" => Some(AdversaryMode::NashPerGame),
        Some(AdvModeFile::Name(name)) => {
            return Err(parse_err(
                "adv_mode",
                format!(
                    "unknown adversary mode \"{name}\", expected \"nash\" or {{\"fixed\": [..]}}"
                ),
            ))
        }
        Some(AdvModeFile::Fixed { fixed }) => Some(AdversaryMode::Fixed(
            MixedStrategy::new(fixed).map_err(|e| parse_err("adv_mode", e.to_string()))?,
        )),
    };
    Ok(AdvScenario {
        belief: belief_from_entries(file.belief)?,
        p: file.p,
        adv_mode,
    })
}
