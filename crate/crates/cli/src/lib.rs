//! Library half of the `levylab` binary: record serialization and the
//! subcommand implementations, exposed so integration tests can drive them
//! directly.

pub mod commands;
pub mod record;
