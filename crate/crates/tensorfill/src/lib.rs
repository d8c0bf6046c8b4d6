//! File formats, the Monte-Carlo experiment harness and the `tensorfill`
//! command-line tool, on top of [`tensorfill_core`].

mod error;
pub mod experiment;
pub mod io;

pub use error::{Error, Result};
pub use tensorfill_core as core;
