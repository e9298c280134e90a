//! Exact verification of Koszul and superconnection constructions over
//! truncated polynomial rings.

pub mod cli;
pub mod connections;
pub mod error;
pub mod forms;
pub mod koszul;
pub mod parse;
pub mod ring;
pub mod superlinear;
pub mod twisted;
pub mod verdict;

pub use error::{Error, Result};
