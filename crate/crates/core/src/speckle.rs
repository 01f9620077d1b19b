//! Reference-arm speckle generation.
//!
//! Frames are binary Bernoulli patterns that are constant on axis-aligned
//! `macro_pixel x macro_pixel` blocks. Frame `i` of a stack is drawn from its own
//! substream of a key derived from the stack seed, so any frame can be regenerated on its
//! own and a longer stack always extends a shorter one with the same seed.

use rand::Rng;

use crate::error::{Error, Result};
use crate::grid::{Dims, Grid};
use crate::seed::{derive_seed, stream, substream};

#[derive(Debug, Clone, PartialEq)]
pub struct SpeckleConfig {
    pub fov_width: usize,
    pub fov_height: usize,
    /// Side length of a constant-intensity block.
    pub macro_pixel: usize,
    pub bernoulli_p: f64,
    pub on_value: f64,
    pub off_value: f64,
}

impl Default for SpeckleConfig {
    fn default() -> Self {
        Self {
            fov_width: 64,
            fov_height: 64,
            macro_pixel: 2,
            bernoulli_p: 0.5,
            on_value: 1.0,
            off_value: 0.0,
        }
    }
}

impl SpeckleConfig {
    pub fn dims(&self) -> Dims {
        Dims::new(self.fov_width, self.fov_height)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fov_width == 0 || self.fov_height == 0 {
            return Err(Error::Config("field of view must be non-empty".into()));
        }
        if self.macro_pixel == 0 {
            return Err(Error::Config("macro_pixel must be positive".into()));
        }
        if !self.fov_width.is_multiple_of(self.macro_pixel)
            || !self.fov_height.is_multiple_of(self.macro_pixel)
        {
            return Err(Error::Config(format!(
                "field of view {}x{} is not divisible by macro_pixel {}",
                self.fov_width, self.fov_height, self.macro_pixel
            )));
        }
        if !(0.0..=1.0).contains(&self.bernoulli_p) {
            return Err(Error::Config(format!(
                "bernoulli_p {} outside [0, 1]",
                self.bernoulli_p
            )));
        }
        if !(self.on_value > self.off_value && self.off_value >= 0.0) {
            return Err(Error::Config(format!(
                "need on_value > off_value >= 0, got on={} off={}",
                self.on_value, self.off_value
            )));
        }
        Ok(())
    }
}

/// One illumination pattern `I_i(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeckleFrame(pub Grid);

impl SpeckleFrame {
    pub fn grid(&self) -> &Grid {
        &self.0
    }

    pub fn dims(&self) -> Dims {
        self.0.dims()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeckleStack {
    pub frames: Vec<SpeckleFrame>,
    pub seed: u64,
}

impl SpeckleStack {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Frame `index` of the stack generated from `(cfg, seed)`. The config is assumed valid.
pub fn generate_frame(cfg: &SpeckleConfig, seed: u64, index: u64) -> SpeckleFrame {
    let key = derive_seed(&[seed, stream::SPECKLE]);
    let mut rng = substream(key, index);
    let m = cfg.macro_pixel;
    let (bw, bh) = (cfg.fov_width / m, cfg.fov_height / m);
    let mut grid = Grid::filled(cfg.dims(), cfg.off_value);
    for by in 0..bh {
        for bx in 0..bw {
            if rng.random_bool(cfg.bernoulli_p) {
                for y in by * m..(by + 1) * m {
                    for x in bx * m..(bx + 1) * m {
                        grid.set(x, y, cfg.on_value);
                    }
                }
            }
        }
    }
    SpeckleFrame(grid)
}

/// Frames `start..start + count` of the stack for `(cfg, seed)`.
pub fn generate_range(
    cfg: &SpeckleConfig,
    seed: u64,
    start: u64,
    count: usize,
) -> Result<Vec<SpeckleFrame>> {
    cfg.validate()?;
    Ok((0..count as u64)
        .map(|i| generate_frame(cfg, seed, start + i))
        .collect())
}

pub fn generate_stack(cfg: &SpeckleConfig, seed: u64, count: usize) -> Result<SpeckleStack> {
    if count == 0 {
        return Err(Error::Usage(
            "speckle stack needs at least one frame".into(),
        ));
    }
    Ok(SpeckleStack {
        frames: generate_range(cfg, seed, 0, count)?,
        seed,
    })
}
