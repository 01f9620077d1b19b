//! Bucket-detector measurements.

use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::scene::SceneFrame;
use crate::seed::{derive_seed, stream, substream};
use crate::speckle::SpeckleFrame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    #[default]
    None,
    AdditiveGaussian,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub sigma: f64,
    pub seed: u64,
}

impl NoiseConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!(
                "noise sigma {} must be >= 0",
                self.sigma
            )));
        }
        Ok(())
    }

    /// Noise term for measurement `index`. Each index draws from its own substream, so the
    /// value does not depend on evaluation order.
    fn sample(&self, index: u64) -> f64 {
        match self.kind {
            NoiseKind::None => 0.0,
            NoiseKind::AdditiveGaussian if self.sigma == 0.0 => 0.0,
            NoiseKind::AdditiveGaussian => {
                let mut rng = substream(derive_seed(&[self.seed, stream::NOISE]), index);
                Normal::new(0.0, self.sigma)
                    .expect("validated sigma")
                    .sample(&mut rng)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketSample(pub f64);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BucketSeries {
    pub samples: Vec<BucketSample>,
}

impl BucketSeries {
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        Self {
            samples: values.into_iter().map(BucketSample).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> BucketSeries {
        BucketSeries {
            samples: self.samples[range].to_vec(),
        }
    }
}

/// Total intensity `sum I(x, y) T(x, y)` plus the noise term for measurement `index`.
pub fn bucket_measure(
    frame: &SpeckleFrame,
    scene: &SceneFrame,
    noise: &NoiseConfig,
    index: u64,
) -> Result<BucketSample> {
    if frame.dims() != scene.dims() {
        return Err(Error::Usage(format!(
            "speckle {:?} and scene {:?} differ in size",
            frame.dims(),
            scene.dims()
        )));
    }
    Ok(BucketSample(
        frame.grid().dot(scene.grid()) + noise.sample(index),
    ))
}

/// Measure frame `i` against `scenes[i]`; `first_index` numbers the measurements for the
/// noise streams.
pub fn measure_series(
    frames: &[SpeckleFrame],
    scenes: &[&SceneFrame],
    noise: &NoiseConfig,
    first_index: u64,
) -> Result<BucketSeries> {
    if frames.len() != scenes.len() {
        return Err(Error::Usage(format!(
            "{} speckle frames but {} scenes",
            frames.len(),
            scenes.len()
        )));
    }
    let samples = frames
        .iter()
        .zip(scenes)
        .enumerate()
        .map(|(i, (f, s))| bucket_measure(f, s, noise, first_index + i as u64))
        .collect::<Result<_>>()?;
    Ok(BucketSeries { samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Dims, Grid};
    use crate::scene::{embed_target, make_target, GridPosition, TargetKind};
    use crate::speckle::{generate_stack, SpeckleConfig};
    use proptest::prelude::*;

    fn quiet() -> NoiseConfig {
        NoiseConfig::default()
    }

    fn cfg(n: usize) -> SpeckleConfig {
        SpeckleConfig {
            fov_width: n,
            fov_height: n,
            macro_pixel: 1,
            ..Default::default()
        }
    }

    #[test]
    fn empty_scene_measures_zero() {
        let stack = generate_stack(&cfg(8), 3, 1).unwrap();
        let scene = SceneFrame(Grid::zeros(Dims::new(8, 8)));
        assert_eq!(
            bucket_measure(&stack.frames[0], &scene, &quiet(), 0)
                .unwrap()
                .0,
            0.0
        );
    }

    #[test]
    fn full_scene_counts_on_pixels() {
        let dims = Dims::new(8, 8);
        let frame = SpeckleFrame(Grid::from_fn(dims, |x, y| {
            if (x + 8 * y) < 37 {
                1.0
            } else {
                0.0
            }
        }));
        let scene = SceneFrame(Grid::filled(dims, 1.0));
        assert_eq!(bucket_measure(&frame, &scene, &quiet(), 0).unwrap().0, 37.0);
    }

    #[test]
    fn hand_computed_dot_product() {
        let frame = SpeckleFrame(
            Grid::from_rows(&[
                [1.0, 0.0, 1.0, 1.0],
                [0.0, 1.0, 0.0, 1.0],
                [1.0, 1.0, 0.0, 0.0],
                [0.0, 0.0, 1.0, 1.0],
            ])
            .unwrap(),
        );
        let scene = SceneFrame(
            Grid::from_rows(&[
                [0.5, 1.0, 0.0, 0.25],
                [0.0, 1.0, 1.0, 0.0],
                [0.75, 0.0, 1.0, 0.0],
                [0.0, 0.5, 0.5, 1.0],
            ])
            .unwrap(),
        );
        // row sums of the products: 0.5+0.25, 1.0, 0.75, 0.5+1.0
        let expected = 0.75 + 1.0 + 0.75 + 1.5;
        assert_eq!(
            bucket_measure(&frame, &scene, &quiet(), 0).unwrap().0,
            expected
        );
    }

    #[test]
    fn size_mismatch_is_usage_error() {
        let f = SpeckleFrame(Grid::zeros(Dims::new(4, 4)));
        let s = SceneFrame(Grid::zeros(Dims::new(4, 5)));
        assert!(matches!(
            bucket_measure(&f, &s, &quiet(), 0),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            measure_series(&[f], &[], &quiet(), 0),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn series_composes_and_is_deterministic() {
        let stack = generate_stack(&cfg(16), 5, 3).unwrap();
        let t = make_target(TargetKind::Cross, 5).unwrap();
        let scene = embed_target(&t, GridPosition::new(4, 6), Dims::new(16, 16)).unwrap();
        let scenes = vec![&scene; 3];
        let a = measure_series(&stack.frames, &scenes, &quiet(), 0).unwrap();
        let b = measure_series(&stack.frames, &scenes, &quiet(), 0).unwrap();
        assert_eq!(a, b);
        for (i, f) in stack.frames.iter().enumerate() {
            assert_eq!(
                a.samples[i],
                bucket_measure(f, &scene, &quiet(), i as u64).unwrap()
            );
        }
    }

    #[test]
    fn segment_structure() {
        let dims = Dims::new(16, 16);
        let stack = generate_stack(&cfg(16), 9, 6).unwrap();
        let t = make_target(TargetKind::Square, 4).unwrap();
        let s1 = embed_target(&t, GridPosition::new(1, 1), dims).unwrap();
        let s2 = embed_target(&t, GridPosition::new(9, 7), dims).unwrap();
        let scenes = [&s1, &s1, &s1, &s2, &s2, &s2];
        let series = measure_series(&stack.frames, &scenes, &quiet(), 0).unwrap();
        // independent oracle: sum the 4x4 window of each frame directly
        for (i, f) in stack.frames.iter().enumerate() {
            let (ox, oy) = if i < 3 { (1, 1) } else { (9, 7) };
            let mut s = 0.0;
            for y in oy..oy + 4 {
                for x in ox..ox + 4 {
                    s += f.grid().get(x, y);
                }
            }
            assert_eq!(series.samples[i].0, s);
        }
    }

    #[test]
    fn gaussian_noise_is_order_independent() {
        let stack = generate_stack(&cfg(8), 2, 4).unwrap();
        let scene = SceneFrame(Grid::filled(Dims::new(8, 8), 1.0));
        let noise = NoiseConfig {
            kind: NoiseKind::AdditiveGaussian,
            sigma: 2.0,
            seed: 77,
        };
        let all = measure_series(&stack.frames, &[&scene; 4], &noise, 0).unwrap();
        let tail = measure_series(&stack.frames[2..], &[&scene; 2], &noise, 2).unwrap();
        assert_eq!(&all.samples[2..], &tail.samples[..]);
        let clean = measure_series(&stack.frames, &[&scene; 4], &quiet(), 0).unwrap();
        assert_ne!(all, clean);
        assert!(NoiseConfig {
            sigma: -1.0,
            ..noise
        }
        .validate()
        .is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn disjoint_scenes_add(seed in any::<u64>(), split in 1usize..15) {
            let dims = Dims::new(16, 16);
            let frame = &generate_stack(&cfg(16), seed, 1).unwrap().frames[0];
            let a = SceneFrame(Grid::from_fn(dims, |x, _| if x < split { 0.5 } else { 0.0 }));
            let b = SceneFrame(Grid::from_fn(dims, |x, _| if x >= split { 1.0 } else { 0.0 }));
            let sum = SceneFrame(Grid::from_fn(dims, |x, y| a.grid().get(x, y) + b.grid().get(x, y)));
            let m = |s: &SceneFrame| bucket_measure(frame, s, &quiet(), 0).unwrap().0;
            prop_assert_eq!(m(&sum), m(&a) + m(&b));
        }

        #[test]
        fn larger_support_never_decreases(seed in any::<u64>(), small in 3usize..8) {
            let dims = Dims::new(16, 16);
            let frame = &generate_stack(&cfg(16), seed, 1).unwrap().frames[0];
            let lo = embed_target(&make_target(TargetKind::Square, small).unwrap(), GridPosition::new(2, 2), dims).unwrap();
            let hi = embed_target(&make_target(TargetKind::Square, small + 3).unwrap(), GridPosition::new(2, 2), dims).unwrap();
            let m = |s: &SceneFrame| bucket_measure(frame, s, &quiet(), 0).unwrap().0;
            prop_assert!(m(&hi) >= m(&lo));
        }

        #[test]
        fn shift_covariance(seed in any::<u64>(), dx in -4i64..=4, dy in -4i64..=4) {
            use crate::grid::Fill;
            let dims = Dims::new(20, 20);
            let frame = &generate_stack(&SpeckleConfig { fov_width: 20, fov_height: 20, macro_pixel: 2, ..Default::default() }, seed, 1).unwrap().frames[0];
            let t = make_target(TargetKind::Ring, 8).unwrap();
            let scene = embed_target(&t, GridPosition::new(6, 6), dims).unwrap();
            let moved = SceneFrame(scene.grid().shifted(dx, dy, Fill::Zero));
            let back = SpeckleFrame(frame.grid().shifted(-dx, -dy, Fill::Zero));
            let lhs = bucket_measure(frame, &moved, &quiet(), 0).unwrap().0;
            let rhs = bucket_measure(&back, &scene, &quiet(), 0).unwrap().0;
            prop_assert_eq!(lhs, rhs);
        }
    }
}
