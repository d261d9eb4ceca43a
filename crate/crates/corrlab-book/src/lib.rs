//! Doc-test shim for the guide in `book/` at the repository root.
//!
//! mdbook cannot run snippets against external crates, so each chapter
//! is included here as a doc comment: `cargo test --doc -p corrlab-book`
//! compiles and executes every fenced Rust block, keeping the book in
//! sync with the library. One module per chapter, so a failure names
//! the chapter it came from.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/games.md")]
pub mod games {}

#[doc = include_str!("../../../book/src/equilibria.md")]
pub mod equilibria {}

#[doc = include_str!("../../../book/src/corrigibility.md")]
pub mod corrigibility {}

#[doc = include_str!("../../../book/src/adversary.md")]
pub mod adversary {}

#[doc = include_str!("../../../book/src/offswitch.md")]
pub mod offswitch {}

#[doc = include_str!("../../../book/src/sweeps.md")]
pub mod sweeps {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
