//! Scene files, reports and plots behind the `monolab` binary.

pub mod plot;
pub mod report;
pub mod run;
pub mod scene;

pub use run::{run_scene, RunOptions, RunOutput};
pub use scene::{parse_scene, ParseError, Scene};

/// Exit status of `monolab run`.
pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_INCOMPLETE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[cfg(test)]
mod tests;
