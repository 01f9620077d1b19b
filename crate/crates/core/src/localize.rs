//! Target localization from a single rough image: screening threshold on the
//! peak-normalized correlation strength, then a strength-weighted centroid.

use crate::error::{Error, Result};
use crate::reconstruct::ReconImage;

/// Pixels passing the screening threshold, with their normalized strengths `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdedSet {
    pub pixels: Vec<(usize, usize)>,
    pub normalized_values: Vec<f64>,
    pub t_used: f64,
}

impl ThresholdedSet {
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PositionEstimate {
    pub x: f64,
    pub y: f64,
    pub support_size: usize,
}

impl PositionEstimate {
    pub fn as_tuple(&self) -> (f64, f64) {
        (self.x, self.y)
    }
}

/// Keep pixels with `g = O / max O >= t` and `g > 0`.
pub fn threshold_filter(rough: &ReconImage, t: f64) -> Result<ThresholdedSet> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Usage(format!("threshold {t} outside [0, 1]")));
    }
    let grid = &rough.grid;
    let peak = grid.max();
    if peak.is_nan() || peak <= 0.0 {
        return Err(Error::degenerate(format!(
            "rough image peak {peak} is not positive"
        )));
    }
    let mut pixels = Vec::new();
    let mut normalized_values = Vec::new();
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            let g = grid.get(x, y) / peak;
            // negative strengths are background fluctuation and never pass, even at t = 0
            if g >= t && g > 0.0 {
                pixels.push((x, y));
                normalized_values.push(g);
            }
        }
    }
    Ok(ThresholdedSet {
        pixels,
        normalized_values,
        t_used: t,
    })
}

/// Weighted centroid with weights `W = g / sum g`.
pub fn centroid(set: &ThresholdedSet) -> Result<PositionEstimate> {
    if set.is_empty() {
        return Err(Error::degenerate("no pixel passed the screening threshold"));
    }
    let total: f64 = set.normalized_values.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::degenerate("screened strengths sum to zero"));
    }
    let (mut x, mut y) = (0.0, 0.0);
    for (&(px, py), &g) in set.pixels.iter().zip(&set.normalized_values) {
        let w = g / total;
        x += px as f64 * w;
        y += py as f64 * w;
    }
    Ok(PositionEstimate {
        x,
        y,
        support_size: set.len(),
    })
}

pub fn localize(rough: &ReconImage, t: f64) -> Result<PositionEstimate> {
    centroid(&threshold_filter(rough, t)?)
}
