//! Localization and image-quality metrics.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::reconstruct::ReconImage;
use crate::scene::SceneFrame;

/// Paired true and estimated target centers, one per segment.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryRecord {
    pub truth: Vec<(f64, f64)>,
    pub estimates: Vec<(f64, f64)>,
}

/// Mean Euclidean distance between true and estimated centers. Note the average is taken
/// outside the square root, so this is not a true RMS.
pub fn prmse(rec: &TrajectoryRecord) -> Result<f64> {
    if rec.truth.is_empty() {
        return Err(Error::Usage("empty trajectory record".into()));
    }
    if rec.truth.len() != rec.estimates.len() {
        return Err(Error::Usage(format!(
            "{} true positions but {} estimates",
            rec.truth.len(),
            rec.estimates.len()
        )));
    }
    let total: f64 = rec
        .truth
        .iter()
        .zip(&rec.estimates)
        .map(|(t, e)| (t.0 - e.0).hypot(t.1 - e.1))
        .sum();
    Ok(total / rec.truth.len() as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityReport {
    pub mse: f64,
    /// `f64::INFINITY` when `mse == 0`.
    pub psnr_db: f64,
}

/// Mean squared difference of two equally sized grids.
pub fn mse(a: &Grid, b: &Grid) -> Result<f64> {
    if a.dims() != b.dims() {
        return Err(Error::Usage(format!(
            "image sizes differ: {:?} vs {:?}",
            a.dims(),
            b.dims()
        )));
    }
    let n = a.dims().len() as f64;
    Ok(a.as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        / n)
}

/// PSNR of a reconstruction against the original scene.
///
/// The reconstruction is min-max normalized to `[0, 1]` first, so its peak is 1 and the
/// report is independent of the correlation's scale and offset. The original is used as is.
pub fn psnr(recon: &ReconImage, original: &SceneFrame) -> Result<QualityReport> {
    if recon.dims() != original.dims() {
        return Err(Error::Usage(format!(
            "image sizes differ: {:?} vs {:?}",
            recon.dims(),
            original.dims()
        )));
    }
    let normalized = recon
        .grid
        .normalized()
        .ok_or_else(|| Error::degenerate("constant reconstruction has no dynamic range"))?;
    let mse = mse(&normalized, original.grid())?;
    let peak = normalized.max();
    let psnr_db = if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (peak / mse.sqrt()).log10()
    };
    Ok(QualityReport { mse, psnr_db })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Dims;
    use proptest::prelude::*;

    fn rec(truth: &[(f64, f64)], est: &[(f64, f64)]) -> TrajectoryRecord {
        TrajectoryRecord {
            truth: truth.to_vec(),
            estimates: est.to_vec(),
        }
    }

    #[test]
    fn prmse_hand_cases() {
        let t = [(1.0, 2.0), (3.5, -1.0)];
        assert_eq!(prmse(&rec(&t, &t)).unwrap(), 0.0);
        assert_eq!(prmse(&rec(&[(0.0, 0.0)], &[(3.0, 4.0)])).unwrap(), 5.0);
        assert_eq!(
            prmse(&rec(&[(0.0, 0.0), (10.0, 0.0)], &[(1.0, 0.0), (10.0, 2.0)])).unwrap(),
            1.5
        );
        assert!(matches!(prmse(&rec(&[], &[])), Err(Error::Usage(_))));
        assert!(prmse(&rec(&t, &t[..1])).is_err());
    }

    fn binary_scene() -> SceneFrame {
        SceneFrame(Grid::from_fn(Dims::new(8, 8), |x, y| {
            if (2..6).contains(&x) && (3..7).contains(&y) {
                1.0
            } else {
                0.0
            }
        }))
    }

    #[test]
    fn exact_reconstruction_is_infinite() {
        let s = binary_scene();
        let r = ReconImage {
            grid: s.grid().clone(),
            sample_count: 1,
        };
        let q = psnr(&r, &s).unwrap();
        assert_eq!(q.mse, 0.0);
        assert!(q.psnr_db.is_infinite());
    }

    #[test]
    fn uniform_offset_gives_twenty_db() {
        let recon = Grid::from_fn(Dims::new(4, 4), |x, y| (x + 4 * y) as f64 / 15.0);
        let original = SceneFrame(Grid::from_fn(Dims::new(4, 4), |x, y| recon.get(x, y) - 0.1));
        let q = psnr(
            &ReconImage {
                grid: recon,
                sample_count: 1,
            },
            &original,
        )
        .unwrap();
        assert!((q.mse - 0.01).abs() < 1e-12);
        assert!((q.psnr_db - 20.0).abs() < 1e-9);
    }

    #[test]
    fn psnr_errors() {
        let s = binary_scene();
        let flat = ReconImage {
            grid: Grid::filled(Dims::new(8, 8), 2.0),
            sample_count: 1,
        };
        assert!(matches!(psnr(&flat, &s), Err(Error::Degenerate { .. })));
        let small = ReconImage {
            grid: Grid::zeros(Dims::new(4, 4)),
            sample_count: 1,
        };
        assert!(matches!(psnr(&small, &s), Err(Error::Usage(_))));
    }

    #[test]
    fn psnr_falls_as_error_grows() {
        let s = binary_scene();
        let mut last = f64::INFINITY;
        for e in [0.01, 0.05, 0.1, 0.2, 0.4] {
            // background lifted by e while the target stays at 1
            let g = Grid::from_fn(Dims::new(8, 8), |x, y| s.grid().get(x, y).max(e));
            let mut g = g;
            g.set(0, 0, 0.0);
            let q = psnr(
                &ReconImage {
                    grid: g,
                    sample_count: 1,
                },
                &s,
            )
            .unwrap();
            assert!(q.psnr_db < last);
            last = q.psnr_db;
        }
    }

    proptest! {
        #[test]
        fn prmse_symmetric_and_translation_invariant(
            pts in prop::collection::vec(((-50.0f64..50.0, -50.0f64..50.0), (-50.0f64..50.0, -50.0f64..50.0)), 1..20),
            dx in -100.0f64..100.0, dy in -100.0f64..100.0,
        ) {
            let truth: Vec<_> = pts.iter().map(|p| p.0).collect();
            let est: Vec<_> = pts.iter().map(|p| p.1).collect();
            let a = prmse(&rec(&truth, &est)).unwrap();
            let b = prmse(&rec(&est, &truth)).unwrap();
            prop_assert_eq!(a, b);
            let shift = |v: &[(f64, f64)]| v.iter().map(|p| (p.0 + dx, p.1 + dy)).collect::<Vec<_>>();
            let c = prmse(&rec(&shift(&truth), &shift(&est))).unwrap();
            prop_assert!((a - c).abs() < 1e-9);
            prop_assert!(a >= 0.0);
        }

        #[test]
        fn psnr_affine_invariant(v in prop::collection::vec(-5.0f64..5.0, 64), a in 0.1f64..100.0, b in -100.0f64..100.0) {
            prop_assume!(v.iter().any(|&x| x != v[0]));
            let g = Grid::from_vec(Dims::new(8, 8), v).unwrap();
            let s = binary_scene();
            let p = psnr(&ReconImage { grid: g.clone(), sample_count: 1 }, &s).unwrap();
            let h = Grid::from_vec(Dims::new(8, 8), g.as_slice().iter().map(|x| a * x + b).collect()).unwrap();
            let q = psnr(&ReconImage { grid: h, sample_count: 1 }, &s).unwrap();
            prop_assert!((p.psnr_db - q.psnr_db).abs() < 1e-6);
        }
    }
}
