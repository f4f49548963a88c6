//! Maxima and ties of discrete i.i.d. samples, and of balls-in-boxes allocations.
//!
//! For integer-valued samples the maximum does not settle down: it sits on two
//! neighbouring values `m_n` and `m_n + 1` (light tails), follows a
//! doubly-geometric law (geometric tails), or spreads out (heavier tails), and
//! the split oscillates as `n` grows. This crate computes those profiles,
//! exact finite-`n` laws, tie distributions, and checks the allocation models
//! (multinomial and Dirichlet-multinomial) against them by exact enumeration
//! and Monte Carlo.
//!
//! Modules, bottom up:
//!
//! * [`specfun`]: log-gamma, incomplete gamma and beta, Lambert W, log-space sums.
//! * [`tailmodel`]: discrete distributions with a continuous tail extension.
//! * [`extremes`]: extremal profiles, limit laws, order statistics, ties.
//! * [`allocsim`]: allocation enumeration and simulation.
//! * [`datafit`]: count-series ingestion, negative binomial fitting, block maxima.
//!
//! A narrative guide lives in the `book/` directory of the repository; its
//! code snippets are compiled as doctests of this crate.

pub mod allocsim;
pub mod datafit;
pub mod error;
pub mod extremes;
pub mod specfun;
pub mod tailmodel;

pub use error::{Error, Result};
pub use extremes::{ExtremalProfile, ProfileMethod, Regime};
pub use tailmodel::{DiscreteTailModel, Extension};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/special-functions.md")]
    mod special_functions {}
    #[doc = include_str!("../../../book/src/tail-models.md")]
    mod tail_models {}
    #[doc = include_str!("../../../book/src/extremal-profiles.md")]
    mod extremal_profiles {}
    #[doc = include_str!("../../../book/src/ties.md")]
    mod ties {}
    #[doc = include_str!("../../../book/src/allocations.md")]
    mod allocations {}
    #[doc = include_str!("../../../book/src/block-maxima.md")]
    mod block_maxima {}
    #[doc = include_str!("../../../book/src/command-line.md")]
    mod command_line {}
}
