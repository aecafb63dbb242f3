//! File formats, command line and a thread-pool executor around
//! [`loadnet_core`].

pub mod cli;
pub mod config;
mod error;
pub mod exec;
pub mod io;
pub mod report;

pub use error::{Error, Result};
