//! Approximation spaces of ReLU networks with growth-constrained depth and
//! weight magnitude: membership, embedding verdicts, counterexamples and a
//! sampling-based learner.

pub mod analysis;
pub mod corpus;
pub mod counterexample;
pub mod error;
pub mod extended;
pub mod growth;
pub mod learner;
pub mod regression;
pub mod relu_net;
pub mod spaces;

pub use error::{Error, Result};
pub use extended::Extended;
pub use growth::{GammaValue, GrowthFn, GrowthPair};
pub use relu_net::{Layer, Network, SparseMatrix};
pub use spaces::SpaceParams;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
