//! The guide's code listings, compiled and run as doc-tests.
//!
//! Each chapter of `book/` is included as a hidden module's
//! documentation, so `cargo test --doc` executes every `rust` code
//! fence in the book and the guide can never drift from the API.
#![cfg(doctest)]

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/rationals.md")]
pub mod rationals {}

#[doc = include_str!("../../../book/src/machines.md")]
pub mod machines {}

#[doc = include_str!("../../../book/src/running.md")]
pub mod running {}

#[doc = include_str!("../../../book/src/toolkit.md")]
pub mod toolkit {}

#[doc = include_str!("../../../book/src/turing.md")]
pub mod turing {}

#[doc = include_str!("../../../book/src/alternating.md")]
pub mod alternating {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
