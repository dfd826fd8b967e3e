//! Library side of the command-line tool: file formats and the verification
//! suites that back `sseplab verify`.

pub mod io;
pub mod suites;
