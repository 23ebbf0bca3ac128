//! Error classification for exit codes.
//!
//! The binary distinguishes exactly two failure classes: mistakes in how it
//! was invoked (unknown flags, contradictory sources, bad values — exit 2,
//! matching clap's own convention) and failures while doing the work
//! (unreadable files, experiment errors — exit 1).  Handlers mark the former
//! by wrapping the message in [`UsageError`]; `main` downcasts to pick the
//! code.

use thiserror::Error;

/// An invocation mistake the caller can fix by rereading `--help`.
#[derive(Debug, Error)]
#[error("{0}")]
pub struct UsageError(pub String);

/// Shorthand for building a usage-classed [`anyhow::Error`].
pub fn usage(message: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(UsageError(message.into()))
}
