//! IO, file formats and verification suites around `wpspectrum-core`:
//! the JSON-lines dataset loader with the bundled default table, the
//! machine-readable check suites, and CSV plot emission. The `wpspectrum`
//! binary in this crate exposes all of it on the command line.

pub mod data;
pub mod plot;
pub mod suites;

pub use data::{load_intersection_table, resolve_table, DataError, EMBEDDED_DATASET};
