//! Tanner codes over GF(2) built on bipartite expanders, with a deterministic
//! linear-time bit-flipping decoder, a randomized decoder, and brute-force
//! oracles for checking both.

pub mod decode;
pub mod error;
pub mod gf2;
pub mod graph;
pub mod harness;
pub mod inner;
pub mod tanner;

pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use graph::BipartiteGraph;
pub use inner::InnerCode;
pub use tanner::TannerCode;
