//! File formats, command-line driver and benchmark harness around
//! [`s3gnd_core`].

pub mod bench;
pub mod cli;
pub mod convert;
pub mod error;
pub mod formats;
pub mod manifest;

pub use error::{Error, Result};
pub use s3gnd_core as core;
