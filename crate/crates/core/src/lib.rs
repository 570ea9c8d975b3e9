pub mod cli_io;
pub mod constraints;
pub mod dynamics;
pub mod error;
pub mod lp;
pub mod search;
pub mod target_motion;
pub mod transcription;

pub use error::{Error, Result};
