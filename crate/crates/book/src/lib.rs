//! Compiles the code blocks of the guide in `book/src` as doc-tests, so the
//! guide breaks the build when the library drifts away from it.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/scenario.md")]
pub mod scenario {}
#[doc = include_str!("../../../book/src/channel.md")]
pub mod channel {}
#[doc = include_str!("../../../book/src/blockage.md")]
pub mod blockage {}
#[doc = include_str!("../../../book/src/relay-decision.md")]
pub mod relay_decision {}
#[doc = include_str!("../../../book/src/scheduling.md")]
pub mod scheduling {}
#[doc = include_str!("../../../book/src/baselines.md")]
pub mod baselines {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
#[doc = include_str!("../../../book/src/modeling-notes.md")]
pub mod modeling_notes {}
