//! Front end for `stark-core`: example bundles, subcommand implementations
//! and the checks behind `selftest` and the acceptance target.

pub mod bundle;
pub mod checks;
pub mod commands;
