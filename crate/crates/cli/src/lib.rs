//! Table formatting and row types shared by the `maxclust` binary and its tests.

pub mod output;
pub mod rows;
