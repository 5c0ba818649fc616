//! Compiles the guide's listings as doctests, one module per chapter.

#[doc = include_str!("../../../book/src/intro.md")]
pub mod intro {}
#[doc = include_str!("../../../book/src/statevector.md")]
pub mod statevector {}
#[doc = include_str!("../../../book/src/scramblers.md")]
pub mod scramblers {}
#[doc = include_str!("../../../book/src/born-machine.md")]
pub mod born_machine {}
#[doc = include_str!("../../../book/src/targets-metrics.md")]
pub mod targets_metrics {}
#[doc = include_str!("../../../book/src/training.md")]
pub mod training {}
#[doc = include_str!("../../../book/src/rbm.md")]
pub mod rbm {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
