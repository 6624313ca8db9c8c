//! The user guide, one module per chapter.
//!
//! Each module's documentation is a chapter of the mdbook under `book/`,
//! included verbatim, so `cargo test --doc` compiles and runs every code
//! block the book shows and the two can never drift apart.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/tensors.md")]
pub mod tensors {}

#[doc = include_str!("../../../book/src/networks.md")]
pub mod networks {}

#[doc = include_str!("../../../book/src/losses.md")]
pub mod losses {}

#[doc = include_str!("../../../book/src/gradient-checking.md")]
pub mod gradient_checking {}

#[doc = include_str!("../../../book/src/data.md")]
pub mod data_formats {}

#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/scaling-up.md")]
pub mod scaling_up {}
