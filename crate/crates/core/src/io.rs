//! Serialization helpers shared by the pipelines.

/// Version tag carried by every emitted JSON document.
pub const SCHEMA_VERSION: u32 = 1;
