//! Combinatorial engine for capped gropes, transverse sphere pairs and
//! Whitney towers.

pub mod canon;
pub mod cycles;
pub mod dot;
pub mod error;
pub mod gen;
pub mod graph;
pub mod group;
pub mod handles;
pub mod model;
pub mod oracles;
pub mod pipeline;
pub mod split;
pub mod unravel;

pub use error::{Error, Result};
pub use group::{FiniteGroup, Generator, GroupWord};
