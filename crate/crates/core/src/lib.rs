//! Social graph extraction from search-result snippets.

pub mod analysis;
pub mod catalog;
pub mod corpus;
pub mod engine;
pub mod error;
pub mod extract;
pub mod frontier;
pub mod graph;
pub mod search;
pub mod text;

pub use catalog::{Entity, EntityCatalog, EntityMatch, LoadStats};
pub use error::{Error, Result};
