//! Library backing the `jetgeo` binary: argument surface, file formats and
//! the verification suite. Kept as a library so integration tests can reach
//! the CSV/SVG/JSON helpers directly.

pub mod args;
pub mod commands;
pub mod io;
pub mod verify;
