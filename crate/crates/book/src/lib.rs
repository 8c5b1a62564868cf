//! Runs the guide's snippets as doc-tests, one module per chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/bohm.md")]
pub mod bohm {}
#[doc = include_str!("../../../book/src/pseudopotential.md")]
pub mod pseudopotential {}
#[doc = include_str!("../../../book/src/profiles.md")]
pub mod profiles {}
#[doc = include_str!("../../../book/src/fluid.md")]
pub mod fluid {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
