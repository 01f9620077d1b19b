//! Second-order correlation reconstruction, speckle translation and accumulation of
//! translated rough images.

use crate::error::{Error, Result};
use crate::forward::BucketSeries;
use crate::grid::{Dims, Fill, Grid};
use crate::speckle::SpeckleFrame;

/// Relative tolerance for the agreement of the two accumulation forms.
pub const SEGMENT_IDENTITY_RTOL: f64 = 1e-9;

/// Correlation image. Values are fluctuation covariances and may be negative.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconImage {
    pub grid: Grid,
    pub sample_count: usize,
}

impl ReconImage {
    pub fn dims(&self) -> Dims {
        self.grid.dims()
    }
}

/// Which way the estimated center is moved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ShiftSign {
    /// Move the estimated center onto the reference point.
    #[default]
    ToReference,
    /// `I_new(x, y) = I(x - x_c, y - y_c)` taken literally: content moves by `+(x_c, y_c)`.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftPolicy {
    pub fill: Fill,
    /// Canonical pixel the target center is moved to.
    pub reference: (i64, i64),
    pub sign: ShiftSign,
}

impl ShiftPolicy {
    /// Zero fill, reference at the field-of-view center.
    pub fn centered(fov: Dims) -> Self {
        Self {
            fill: Fill::Zero,
            reference: ((fov.width / 2) as i64, (fov.height / 2) as i64),
            sign: ShiftSign::ToReference,
        }
    }

    pub fn validate(&self, fov: Dims) -> Result<()> {
        let (x, y) = self.reference;
        if x < 0 || y < 0 || x >= fov.width as i64 || y >= fov.height as i64 {
            return Err(Error::Config(format!(
                "reference point ({x}, {y}) outside the {}x{} field of view",
                fov.width, fov.height
            )));
        }
        Ok(())
    }

    /// Integer translation applied to frames whose target center is estimated at `center`.
    pub fn shift_for(&self, center: (f64, f64)) -> Result<(i64, i64)> {
        if !(center.0.is_finite() && center.1.is_finite()) {
            return Err(Error::Usage(format!("non-finite center {center:?}")));
        }
        let (rx, ry) = (self.reference.0 as f64, self.reference.1 as f64);
        Ok(match self.sign {
            ShiftSign::ToReference => (
                (rx - center.0).round() as i64,
                (ry - center.1).round() as i64,
            ),
            ShiftSign::Literal => (center.0.round() as i64, center.1.round() as i64),
        })
    }
}

/// Whether the means inside the compensated correlation are taken per segment or over all
/// samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeanMode {
    #[default]
    PerSegment,
    Global,
}

fn check_lengths(frames: usize, buckets: usize) -> Result<()> {
    if frames == 0 {
        return Err(Error::Usage("correlation needs at least one sample".into()));
    }
    if frames != buckets {
        return Err(Error::Usage(format!(
            "{frames} speckle frames but {buckets} bucket samples"
        )));
    }
    Ok(())
}

/// `O(x, y) = 1/K sum_i (I_i(x, y) - <I(x, y)>)(y_i - <y>)` over the supplied samples.
pub fn correlate(frames: &[SpeckleFrame], buckets: &BucketSeries) -> Result<ReconImage> {
    check_lengths(frames.len(), buckets.len())?;
    let dims = frames[0].dims();
    if frames.iter().any(|f| f.dims() != dims) {
        return Err(Error::Usage("speckle frames differ in size".into()));
    }
    let k = frames.len() as f64;
    let y_mean = buckets.values().sum::<f64>() / k;

    let mut mean = vec![0.0; dims.len()];
    for f in frames {
        for (m, v) in mean.iter_mut().zip(f.grid().as_slice()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= k);

    let mut out = vec![0.0; dims.len()];
    for (f, y) in frames.iter().zip(buckets.values()) {
        let dy = y - y_mean;
        for ((o, v), m) in out.iter_mut().zip(f.grid().as_slice()).zip(&mean) {
            *o += (v - m) * dy;
        }
    }
    out.iter_mut().for_each(|o| *o /= k);
    Ok(ReconImage {
        grid: Grid::from_vec(dims, out)?,
        sample_count: frames.len(),
    })
}

/// Single-pass correlation from running moments:
/// `1/N sum I_i y_i - <I><y>`, algebraically equal to [`correlate`] over the same samples.
#[derive(Debug, Clone)]
pub struct CorrelationMoments {
    sum_i: Vec<f64>,
    sum_iy: Vec<f64>,
    sum_y: f64,
    count: usize,
    dims: Dims,
}

impl CorrelationMoments {
    pub fn new(dims: Dims) -> Self {
        Self {
            sum_i: vec![0.0; dims.len()],
            sum_iy: vec![0.0; dims.len()],
            sum_y: 0.0,
            count: 0,
            dims,
        }
    }

    pub fn push(&mut self, frame: &SpeckleFrame, y: f64) -> Result<()> {
        if frame.dims() != self.dims {
            return Err(Error::Usage("frame size differs from accumulator".into()));
        }
        for ((si, siy), v) in self
            .sum_i
            .iter_mut()
            .zip(self.sum_iy.iter_mut())
            .zip(frame.grid().as_slice())
        {
            *si += v;
            *siy += v * y;
        }
        self.sum_y += y;
        self.count += 1;
        Ok(())
    }

    pub fn finish(&self) -> Result<ReconImage> {
        if self.count == 0 {
            return Err(Error::Usage("correlation needs at least one sample".into()));
        }
        let n = self.count as f64;
        let y_mean = self.sum_y / n;
        let data = self
            .sum_i
            .iter()
            .zip(&self.sum_iy)
            .map(|(si, siy)| siy / n - (si / n) * y_mean)
            .collect();
        Ok(ReconImage {
            grid: Grid::from_vec(self.dims, data)?,
            sample_count: self.count,
        })
    }
}

/// Move a frame so content at `center` lands on the policy's reference point.
pub fn translate_frame(
    frame: &SpeckleFrame,
    center: (f64, f64),
    policy: &ShiftPolicy,
) -> Result<SpeckleFrame> {
    let (dx, dy) = policy.shift_for(center)?;
    Ok(SpeckleFrame(frame.grid().shifted(dx, dy, policy.fill)))
}

/// Running mean of compensated rough images.
#[derive(Debug, Clone)]
pub struct Accumulator {
    sum: Grid,
    segments: usize,
    samples: usize,
}

impl Accumulator {
    pub fn new(dims: Dims) -> Self {
        Self {
            sum: Grid::zeros(dims),
            segments: 0,
            samples: 0,
        }
    }

    pub fn fold(&mut self, rough: &ReconImage) -> Result<()> {
        if rough.dims() != self.sum.dims() {
            return Err(Error::Usage(
                "rough image size differs from accumulator".into(),
            ));
        }
        for (s, v) in self
            .sum
            .as_mut_slice()
            .iter_mut()
            .zip(rough.grid.as_slice())
        {
            *s += v;
        }
        self.segments += 1;
        self.samples += rough.sample_count;
        Ok(())
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    /// Mean of the rough images folded so far.
    pub fn image(&self) -> Result<ReconImage> {
        if self.segments == 0 {
            return Err(Error::Usage("no rough images accumulated".into()));
        }
        Ok(ReconImage {
            grid: self.sum.scaled(1.0 / self.segments as f64),
            sample_count: self.samples,
        })
    }
}

/// Translate every segment's frames by that segment's center and correlate.
///
/// With [`MeanMode::PerSegment`] the result is the mean of the `r` compensated rough
/// images, and it is cross-checked against a single sum over all `N` translated samples
/// using per-segment means. With [`MeanMode::Global`] it is one correlation over all
/// translated samples with global means.
pub fn reconstruct_compensated(
    frames: &[SpeckleFrame],
    buckets: &BucketSeries,
    centers: &[(f64, f64)],
    k: usize,
    policy: &ShiftPolicy,
    mode: MeanMode,
) -> Result<ReconImage> {
    let r = centers.len();
    check_lengths(frames.len(), buckets.len())?;
    if k == 0 || r * k != frames.len() {
        return Err(Error::Usage(format!(
            "{} samples do not split into {r} segments of {k}",
            frames.len()
        )));
    }
    let dims = frames[0].dims();
    let translated: Vec<SpeckleFrame> = frames
        .iter()
        .enumerate()
        .map(|(i, f)| translate_frame(f, centers[i / k], policy))
        .collect::<Result<_>>()?;

    if mode == MeanMode::Global {
        return correlate(&translated, buckets);
    }

    let mut acc = Accumulator::new(dims);
    for j in 0..r {
        let span = j * k..(j + 1) * k;
        acc.fold(&correlate(&translated[span.clone()], &buckets.slice(span))?)?;
    }
    let averaged = acc.image()?;

    let pooled = pooled_segment_correlation(&translated, buckets, k)?;
    let scale = averaged
        .grid
        .as_slice()
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let worst = averaged
        .grid
        .as_slice()
        .iter()
        .zip(pooled.as_slice())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    if worst > SEGMENT_IDENTITY_RTOL * scale {
        return Err(Error::Numerical(format!(
            "segment-averaged and pooled reconstructions differ by {worst:e} (scale {scale:e})"
        )));
    }
    Ok(averaged)
}

/// `1/N sum_i (I_i - <I>_seg(i))(y_i - <y>_seg(i))`: one sum over all samples, with each
/// sample centered on its own segment's means.
pub fn pooled_segment_correlation(
    frames: &[SpeckleFrame],
    buckets: &BucketSeries,
    k: usize,
) -> Result<Grid> {
    let dims = frames[0].dims();
    let ys: Vec<f64> = buckets.values().collect();
    let mut out = vec![0.0; dims.len()];
    for (seg_frames, seg_y) in frames.chunks(k).zip(ys.chunks(k)) {
        let y_mean = seg_y.iter().sum::<f64>() / k as f64;
        let mut mean = vec![0.0; dims.len()];
        for f in seg_frames {
            for (m, v) in mean.iter_mut().zip(f.grid().as_slice()) {
                *m += v / k as f64;
            }
        }
        for (f, y) in seg_frames.iter().zip(seg_y) {
            for ((o, v), m) in out.iter_mut().zip(f.grid().as_slice()).zip(&mean) {
                *o += (v - m) * (y - y_mean);
            }
        }
    }
    let n = frames.len() as f64;
    out.iter_mut().for_each(|o| *o /= n);
    Grid::from_vec(dims, out)
}
