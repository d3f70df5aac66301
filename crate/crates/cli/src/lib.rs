//! Library behind the `ostce` binary: configuration, PNG I/O, the frame
//! pipeline, and the throughput benchmark. The binary is a thin argument
//! parser over these pieces, and the test suites drive them directly.

pub mod bench;
pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;

pub use config::{Method, RunConfig};
pub use error::CliError;
