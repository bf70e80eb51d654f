//! Clustering spin models on Cayley graphs: samplers, score functions,
//! cubical topology, moment/cumulant machinery and a CLT experiment harness.

pub mod cayley;
pub mod cltlab;
pub mod error;
pub mod moments;
pub mod scores;
pub mod spin;
pub mod topology;

pub use error::{Error, Result};
