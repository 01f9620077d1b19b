//! One moving-target episode: per-segment rough imaging, localization, speckle
//! compensation and accumulation.

use crate::error::{Error, Result};
use crate::forward::measure_series;
use crate::harness::config::{Compensation, ExperimentConfig};
use crate::localize::localize;
use crate::metrics::{prmse, psnr, TrajectoryRecord};
use crate::reconstruct::{
    correlate, translate_frame, Accumulator, CorrelationMoments, MeanMode, ReconImage,
};
use crate::scene::{embed_target, GridPosition, SceneFrame};
use crate::speckle::{generate_range, SpeckleFrame};

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentRecord {
    /// 1-based segment index.
    pub index: usize,
    pub position: GridPosition,
    pub truth: (f64, f64),
    pub estimate: (f64, f64),
    /// Pixels that passed the screening threshold (1 for a fallback estimate).
    pub support_size: usize,
    /// PSNR of the rough image against the scene at the true position.
    pub rough_psnr_db: f64,
    /// The rough image was degenerate and the argmax pixel was used.
    pub fallback: bool,
}

#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub config: ExperimentConfig,
    pub segments: Vec<SegmentRecord>,
    pub rough_images: Vec<ReconImage>,
    /// Mean of the compensated rough images (or the global-mean correlation).
    pub accumulated: ReconImage,
    /// Plain correlation over all samples with no speckle translation.
    pub uncompensated: ReconImage,
    /// Target centered on the reference point; the comparison image for `accumulated`.
    pub original: SceneFrame,
    /// Target at the rounded mean trajectory position; the comparison image for
    /// `uncompensated`.
    pub uncompensated_reference: SceneFrame,
    pub accumulated_psnr_db: f64,
    pub uncompensated_psnr_db: f64,
    pub prmse: f64,
}

impl EpisodeResult {
    pub fn mean_rough_psnr_db(&self) -> f64 {
        self.segments.iter().map(|s| s.rough_psnr_db).sum::<f64>() / self.segments.len() as f64
    }

    /// Accumulated PSNR minus mean rough PSNR.
    pub fn psnr_gain_db(&self) -> f64 {
        self.accumulated_psnr_db - self.mean_rough_psnr_db()
    }

    pub fn fallback_count(&self) -> usize {
        self.segments.iter().filter(|s| s.fallback).count()
    }

    pub fn trajectory_record(&self) -> TrajectoryRecord {
        TrajectoryRecord {
            truth: self.segments.iter().map(|s| s.truth).collect(),
            estimates: self.segments.iter().map(|s| s.estimate).collect(),
        }
    }
}

/// Run the full pipeline for one configuration. Deterministic in `cfg`.
pub fn run_episode(cfg: &ExperimentConfig) -> Result<EpisodeResult> {
    cfg.validate()?;
    let target = cfg.target_image()?;
    let tdims = target.dims();
    let bounds = cfg.check_placement(tdims)?;
    let fov = cfg.fov();
    let k = cfg.k;
    let policy = cfg.shift_policy();
    let positions = cfg.trajectory().positions(&bounds)?;

    let mut acc = Accumulator::new(fov);
    let mut uncompensated = CorrelationMoments::new(fov);
    let mut global = CorrelationMoments::new(fov);
    let mut segments = Vec::with_capacity(cfg.r);
    let mut rough_images = Vec::with_capacity(cfg.r);

    for (j, &position) in positions.iter().enumerate() {
        let index = j + 1;
        let first = (j * k) as u64;
        let frames = generate_range(&cfg.speckle, cfg.seed, first, k)?;
        let scene = embed_target(&target, position, fov)?;
        let buckets = measure_series(&frames, &vec![&scene; k], &cfg.noise, first)?;
        let rough = correlate(&frames, &buckets)?;
        let truth = position.center(tdims);

        let (estimate, support_size, fallback) = match localize(&rough, cfg.t) {
            Ok(e) => (e.as_tuple(), e.support_size, false),
            Err(Error::Degenerate { .. }) if cfg.fallback_argmax => {
                let (x, y) = rough.grid.argmax();
                ((x as f64, y as f64), 1, true)
            }
            Err(e) => return Err(e.in_segment(index)),
        };
        let center = match cfg.compensation {
            Compensation::Estimated => estimate,
            Compensation::Truth => truth,
        };

        let translated: Vec<SpeckleFrame> = frames
            .iter()
            .map(|f| translate_frame(f, center, &policy))
            .collect::<Result<_>>()?;
        acc.fold(&correlate(&translated, &buckets)?)?;
        for ((f, t), y) in frames.iter().zip(&translated).zip(buckets.values()) {
            uncompensated.push(f, y)?;
            if cfg.mean_mode == MeanMode::Global {
                global.push(t, y)?;
            }
        }

        // a rough image with no dynamic range scores as the worst possible
        let rough_psnr_db = match psnr(&rough, &scene) {
            Ok(q) => q.psnr_db,
            Err(Error::Degenerate { .. }) => f64::NEG_INFINITY,
            Err(e) => return Err(e),
        };
        segments.push(SegmentRecord {
            index,
            position,
            truth,
            estimate,
            support_size,
            rough_psnr_db,
            fallback,
        });
        rough_images.push(rough);
    }

    let accumulated = match cfg.mean_mode {
        MeanMode::PerSegment => acc.image()?,
        MeanMode::Global => global.finish()?,
    };
    let uncompensated = uncompensated.finish()?;

    let original = embed_target(&target, cfg.reference_placement(tdims), fov)?;
    let n = positions.len() as f64;
    let mean_x = positions.iter().map(|p| p.x as f64).sum::<f64>() / n;
    let mean_y = positions.iter().map(|p| p.y as f64).sum::<f64>() / n;
    let mean_pos = bounds.clamp(GridPosition::new(
        mean_x.round() as i64,
        mean_y.round() as i64,
    ));
    let uncompensated_reference = embed_target(&target, mean_pos, fov)?;

    let accumulated_psnr_db = psnr(&accumulated, &original)?.psnr_db;
    let uncompensated_psnr_db = psnr(&uncompensated, &uncompensated_reference)?.psnr_db;
    let record = TrajectoryRecord {
        truth: segments.iter().map(|s| s.truth).collect(),
        estimates: segments.iter().map(|s| s.estimate).collect(),
    };
    let prmse = prmse(&record)?;

    Ok(EpisodeResult {
        config: cfg.clone(),
        segments,
        rough_images,
        accumulated,
        uncompensated,
        original,
        uncompensated_reference,
        accumulated_psnr_db,
        uncompensated_psnr_db,
        prmse,
    })
}
