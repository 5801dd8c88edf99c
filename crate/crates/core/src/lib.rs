pub mod error;
pub mod experiment;
pub mod grid;
pub mod monotonicity;
pub mod special;
pub mod spectrum;
pub mod validate;
pub mod zeta;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/log-space.md")]
    mod log_space {}
    #[doc = include_str!("../../../book/src/evaluation.md")]
    mod evaluation {}
    #[doc = include_str!("../../../book/src/partial-sums.md")]
    mod partial_sums {}
    #[doc = include_str!("../../../book/src/spectrum.md")]
    mod spectrum {}
    #[doc = include_str!("../../../book/src/monotonicity.md")]
    mod monotonicity {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
}
