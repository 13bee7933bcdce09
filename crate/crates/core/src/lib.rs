pub mod error;
pub mod cli;
pub mod forms;
pub mod hilbert;
pub mod metric;
pub mod plot;
pub mod quad;
pub mod spectrum;
pub mod specfun;

pub use error::{Error, Result};
pub use num_complex::Complex64;
