//! Optimal local alignment of long sequences in memory linear in their lengths.
//!
//! [`pipeline::Aligner`] runs a pruned block-parallel score pass, locates the
//! start of the best alignment with a reverse pass, and rebuilds the path by
//! divide and conquer. [`oracle`] holds a plain quadratic implementation used
//! as a reference.

pub mod cli;
pub mod error;
pub mod io;
pub mod kernel;
pub mod locate;
pub mod model;
pub mod oracle;
pub mod pipeline;
pub mod reconstruct;
pub mod score;
pub mod split;
pub mod wavefront;

pub use error::{AlignError, Result};
