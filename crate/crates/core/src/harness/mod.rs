//! End-to-end episodes, sweeps and their file outputs.

pub mod config;
pub mod episode;
pub mod render;
pub mod sweep;

pub use config::{Compensation, ExperimentConfig};
pub use episode::{run_episode, EpisodeResult, SegmentRecord};
pub use render::{render_episode, render_sweep, Manifest};
pub use sweep::{sweep_samples, sweep_threshold, SweepParam, SweepPoint, SweepResult};
