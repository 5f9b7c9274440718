//! File formats, benchmark harness and command-line front end for
//! [`gbg_core`].

pub mod balls;
pub mod bench;
pub mod cli;
pub mod io;
pub mod manifest;
