//! Moving-target ghost imaging.
//!
//! A single target moves through a field of view illuminated by binary speckle. A bucket
//! detector records one total intensity per speckle frame. The pipeline splits the record
//! into quasi-static segments and, for each one:
//!
//! 1. correlates the segment's speckle with its bucket values into a rough image
//!    ([`reconstruct::correlate`]),
//! 2. localizes the target by thresholding the peak-normalized rough image and taking the
//!    strength-weighted centroid ([`localize::localize`]),
//! 3. translates the segment's speckle so the estimated center lands on a fixed reference
//!    point ([`reconstruct::translate_frame`]),
//! 4. folds the compensated rough image into a running mean ([`reconstruct::Accumulator`]).
//!
//! [`harness`] runs whole episodes and sweeps and writes PGM/CSV outputs.

pub mod error;
pub mod forward;
pub mod grid;
pub mod harness;
pub mod io;
pub mod localize;
pub mod metrics;
pub mod reconstruct;
pub mod scene;
pub mod seed;
pub mod speckle;

pub use error::{Error, Result};
pub use grid::{Dims, Fill, Grid};
