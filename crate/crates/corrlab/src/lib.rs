//! Game-theoretic machinery for studying corrigibility: when do autonomous
//! agents prefer to act under human supervision?
//!
//! The crate is organised around a small set of building blocks:
//!
//! * [`game`] — bimatrix payoff tables, the reduced/symmetric notations,
//!   response graphs and the monotone/harmonic classifier.
//! * [`nash`] — pure and mixed Nash equilibria of small two-player games by
//!   support enumeration.
//! * [`corrigibility`] — the two-agent supervision game: augment a 2x2 base
//!   game with an "ask the human" action, mix over beliefs and human
//!   rationality, and test whether supervised play is the unique equilibrium.
//! * [`adversary`] — the defender/adversary game: expected utilities of
//!   acting versus asking, incentive vectors and ensemble aggregates.
//! * [`offswitch`] — the single-agent off-switch game with a sigmoid model
//!   of human irrationality, solved by quadrature.
//! * [`sweep`] — phase diagrams over (belief, rationality) lattices, with
//!   CSV/JSON serialisation and SVG rendering.
//! * [`io`] — the JSON file formats used by the command-line tool.
//!
//! ```
//! use corrlab::game::{classify, GameClass, ReducedGame};
//!
//! // A shared-payoff game where each agent has a dominant action.
//! let g = ReducedGame::shared([3.0, 4.0, 1.0, 2.0]).expand();
//! assert_eq!(classify(&g).unwrap(), GameClass::Monotone);
//! ```

pub mod adversary;
pub mod corrigibility;
mod error;
pub mod game;
pub mod io;
pub mod nash;
pub mod offswitch;
pub mod sweep;

pub use error::{Error, Result};
