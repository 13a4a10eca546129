//! IO, significance testing, the star-network study and the command-line
//! front end for [`hoinet_core`].

pub mod config;
pub mod error;
pub mod io;
pub mod pipeline;
pub mod repro;
pub mod signif;

pub use error::{HoiError, Result};
pub use hoinet_core;
