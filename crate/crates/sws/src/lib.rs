//! Configuration, report documents and CSV emitters around the `sws-core`
//! verification engine.

pub mod config;
pub mod emit;
pub mod output;

pub use config::{ConfigError, RunConfig};
pub use emit::CsvKind;
pub use output::Document;
