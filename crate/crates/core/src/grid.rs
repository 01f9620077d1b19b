//! Row-major 2D real grid shared by every image type in the crate.
//!
//! Coordinates: `x` indexes columns, `y` indexes rows, origin at the top-left pixel.

use crate::error::{Error, Result};

/// Width and height of a grid in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub const fn new(width: usize, height: usize) -> Self {
        Self { width, height }
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// How pixels vacated by a translation are filled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fill {
    /// Vacated pixels become 0.
    #[default]
    Zero,
    /// Content leaving one edge re-enters at the opposite edge.
    Wrap,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dims: Dims,
    data: Vec<f64>,
}

impl Grid {
    pub fn zeros(dims: Dims) -> Self {
        Self::filled(dims, 0.0)
    }

    pub fn filled(dims: Dims, value: f64) -> Self {
        Self {
            dims,
            data: vec![value; dims.len()],
        }
    }

    pub fn from_vec(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::Usage(format!(
                "grid of {}x{} needs {} values, got {}",
                dims.width,
                dims.height,
                dims.len(),
                data.len()
            )));
        }
        Ok(Self { dims, data })
    }

    /// Build from nested rows; all rows must have the same length.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut data = Vec::with_capacity(width * height);
        for row in rows {
            let row = row.as_ref();
            if row.len() != width {
                return Err(Error::Usage("ragged rows".into()));
            }
            data.extend_from_slice(row);
        }
        Self::from_vec(Dims::new(width, height), data)
    }

    pub fn from_fn(dims: Dims, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for y in 0..dims.height {
            for x in 0..dims.width {
                data.push(f(x, y));
            }
        }
        Self { dims, data }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[y * self.dims.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, value: f64) {
        self.data[y * self.dims.width + x] = value;
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Position of the first maximal pixel in row-major order.
    pub fn argmax(&self) -> (usize, usize) {
        let mut best = 0;
        for (i, &v) in self.data.iter().enumerate() {
            if v > self.data[best] {
                best = i;
            }
        }
        (best % self.dims.width, best / self.dims.width)
    }

    pub fn dot(&self, other: &Grid) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn scaled(&self, factor: f64) -> Grid {
        Grid {
            dims: self.dims,
            data: self.data.iter().map(|v| v * factor).collect(),
        }
    }

    /// Content moved by `(dx, dy)`: `out(x, y) = self(x - dx, y - dy)`.
    pub fn shifted(&self, dx: i64, dy: i64, fill: Fill) -> Grid {
        let Dims { width, height } = self.dims;
        let (w, h) = (width as i64, height as i64);
        let mut out = Grid::zeros(self.dims);
        for y in 0..h {
            let sy = y - dy;
            let sy = match fill {
                Fill::Wrap => sy.rem_euclid(h),
                Fill::Zero if (0..h).contains(&sy) => sy,
                Fill::Zero => continue,
            };
            for x in 0..w {
                let sx = x - dx;
                let sx = match fill {
                    Fill::Wrap => sx.rem_euclid(w),
                    Fill::Zero if (0..w).contains(&sx) => sx,
                    Fill::Zero => continue,
                };
                out.data[(y * w + x) as usize] = self.data[(sy * w + sx) as usize];
            }
        }
        out
    }

    /// Min-max normalize to `[0, 1]`. `None` for a constant grid.
    pub fn normalized(&self) -> Option<Grid> {
        let (lo, hi) = (self.min(), self.max());
        let span = hi - lo;
        if span.is_nan() || span <= 0.0 || !span.is_finite() {
            return None;
        }
        Some(Grid {
            dims: self.dims,
            data: self.data.iter().map(|v| (v - lo) / span).collect(),
        })
    }
}
