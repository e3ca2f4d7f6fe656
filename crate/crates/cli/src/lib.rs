//! File formats, reports, SVG plots and the command-line front end for `ridgeless-core`.

pub mod cli;
pub mod io;
pub mod plot;
pub mod report;

pub use cli::run;
