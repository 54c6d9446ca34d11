//! Instance files and run configuration for the `seqeffects` binary.

pub mod instance;

pub use instance::{InstanceError, InstanceFile, INSTANCE_VERSION};
