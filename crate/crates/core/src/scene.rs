//! Target definition, trajectories and embedding of the target into the field of view.
//!
//! The target is quasi-static: it holds one integer position for each segment of samples
//! and jumps to the next trajectory position between segments.

use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Dims, Grid};
use crate::io::pgm;

/// Transmission function of the target, values in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetImage(Grid);

impl TargetImage {
    pub fn new(grid: Grid) -> Result<Self> {
        if grid.dims().is_empty() {
            return Err(Error::Config("target image is empty".into()));
        }
        if grid.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::Config("target values must lie in [0, 1]".into()));
        }
        if !grid.as_slice().iter().any(|&v| v > 0.0) {
            return Err(Error::Config("target has no nonzero pixel".into()));
        }
        Ok(Self(grid))
    }

    /// Load a binary PGM; samples are scaled to `[0, 1]` by the file's maxval.
    pub fn from_pgm(path: &Path) -> Result<Self> {
        Self::new(pgm::read_unit(path)?)
    }

    pub fn grid(&self) -> &Grid {
        &self.0
    }

    pub fn dims(&self) -> Dims {
        self.0.dims()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Square,
    Cross,
    /// Annulus about the image center with inner radius `size / 4` and outer radius `size / 2`.
    Ring,
}

impl std::str::FromStr for TargetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(Self::Square),
            "cross" => Ok(Self::Cross),
            "ring" => Ok(Self::Ring),
            other => Err(Error::Config(format!("unknown target kind '{other}'"))),
        }
    }
}

impl std::fmt::Display for TargetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Square => "square",
            Self::Cross => "cross",
            Self::Ring => "ring",
        })
    }
}

pub fn make_target(kind: TargetKind, size: usize) -> Result<TargetImage> {
    if size < 3 {
        return Err(Error::Config(format!("target size {size} is below 3")));
    }
    let dims = Dims::new(size, size);
    let mid = size / 2;
    let c = (size as f64 - 1.0) / 2.0;
    let (inner, outer) = (size as f64 / 4.0, size as f64 / 2.0);
    let grid = Grid::from_fn(dims, |x, y| {
        let on = match kind {
            TargetKind::Square => true,
            TargetKind::Cross => x == mid || y == mid,
            TargetKind::Ring => {
                let d = ((x as f64 - c).powi(2) + (y as f64 - c).powi(2)).sqrt();
                d >= inner && d <= outer
            }
        };
        if on {
            1.0
        } else {
            0.0
        }
    });
    TargetImage::new(grid)
}

/// Top-left corner of the embedded target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridPosition {
    pub x: i64,
    pub y: i64,
}

impl GridPosition {
    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    /// Geometric center of a target of `target` size placed here.
    pub fn center(&self, target: Dims) -> (f64, f64) {
        (
            self.x as f64 + (target.width as f64 - 1.0) / 2.0,
            self.y as f64 + (target.height as f64 - 1.0) / 2.0,
        )
    }
}

/// Range of legal top-left corners for a target inside a field of view.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacementBounds {
    pub max_x: i64,
    pub max_y: i64,
}

impl PlacementBounds {
    pub fn new(fov: Dims, target: Dims) -> Result<Self> {
        if target.width > fov.width || target.height > fov.height {
            return Err(Error::Config(format!(
                "target {}x{} is larger than the field of view {}x{}",
                target.width, target.height, fov.width, fov.height
            )));
        }
        Ok(Self {
            max_x: (fov.width - target.width) as i64,
            max_y: (fov.height - target.height) as i64,
        })
    }

    pub fn clamp(&self, p: GridPosition) -> GridPosition {
        GridPosition::new(p.x.clamp(0, self.max_x), p.y.clamp(0, self.max_y))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Motion {
    /// Constant velocity in pixels per segment.
    Linear { vx: f64, vy: f64 },
    /// Linear drift plus a transverse sinusoid in y.
    Sinusoid {
        vx: f64,
        vy: f64,
        amplitude: f64,
        omega: f64,
    },
    /// Explicit top-left positions, one per segment.
    Waypoints(Vec<(i64, i64)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryConfig {
    pub motion: Motion,
    /// Top-left position at segment 0; segment `j` is displaced by `j` velocity steps.
    pub start: (f64, f64),
    pub segments: usize,
}

impl TrajectoryConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segments == 0 {
            return Err(Error::Config(
                "trajectory needs at least one segment".into(),
            ));
        }
        if !(self.start.0.is_finite() && self.start.1.is_finite()) {
            return Err(Error::Config("trajectory start must be finite".into()));
        }
        if let Motion::Waypoints(points) = &self.motion {
            if points.len() < self.segments {
                return Err(Error::Config(format!(
                    "{} waypoints for {} segments",
                    points.len(),
                    self.segments
                )));
            }
        }
        Ok(())
    }

    /// Positions for segments `1..=segments`.
    pub fn positions(&self, bounds: &PlacementBounds) -> Result<Vec<GridPosition>> {
        (1..=self.segments)
            .map(|j| trajectory_position(self, j, bounds))
            .collect()
    }
}

/// Position of the target during segment `j` (1-based), rounded to the pixel grid and
/// clamped so the target stays in the field of view.
pub fn trajectory_position(
    traj: &TrajectoryConfig,
    j: usize,
    bounds: &PlacementBounds,
) -> Result<GridPosition> {
    if j == 0 || j > traj.segments {
        return Err(Error::Usage(format!(
            "segment {j} outside 1..={}",
            traj.segments
        )));
    }
    let (x0, y0) = traj.start;
    let t = j as f64;
    let (x, y) = match &traj.motion {
        Motion::Linear { vx, vy } => (x0 + vx * t, y0 + vy * t),
        Motion::Sinusoid {
            vx,
            vy,
            amplitude,
            omega,
        } => (x0 + vx * t, y0 + vy * t + amplitude * (omega * t).sin()),
        Motion::Waypoints(points) => {
            let (px, py) = *points
                .get(j - 1)
                .ok_or_else(|| Error::Usage(format!("no waypoint for segment {j}")))?;
            (px as f64, py as f64)
        }
    };
    Ok(bounds.clamp(GridPosition::new(x.round() as i64, y.round() as i64)))
}

/// Field-of-view transmission with the target placed at one position.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFrame(pub Grid);

impl SceneFrame {
    pub fn grid(&self) -> &Grid {
        &self.0
    }

    pub fn dims(&self) -> Dims {
        self.0.dims()
    }
}

pub fn embed_target(target: &TargetImage, pos: GridPosition, fov: Dims) -> Result<SceneFrame> {
    let t = target.dims();
    let fits = pos.x >= 0
        && pos.y >= 0
        && pos.x as usize + t.width <= fov.width
        && pos.y as usize + t.height <= fov.height;
    if !fits {
        return Err(Error::OutOfBounds {
            x: pos.x,
            y: pos.y,
            width: t.width,
            height: t.height,
            fov_width: fov.width,
            fov_height: fov.height,
        });
    }
    let (ox, oy) = (pos.x as usize, pos.y as usize);
    let mut grid = Grid::zeros(fov);
    for y in 0..t.height {
        for x in 0..t.width {
            grid.set(ox + x, oy + y, target.grid().get(x, y));
        }
    }
    Ok(SceneFrame(grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FOV: Dims = Dims::new(64, 64);

    fn bounds15() -> PlacementBounds {
        PlacementBounds::new(FOV, Dims::new(15, 15)).unwrap()
    }

    #[test]
    fn glyphs() {
        let sq = make_target(TargetKind::Square, 15).unwrap();
        assert_eq!(sq.dims(), Dims::new(15, 15));
        assert_eq!(sq.grid().sum(), 225.0);

        let cross = make_target(TargetKind::Cross, 5).unwrap();
        assert_eq!(cross.grid().sum(), 9.0);
        for i in 0..5 {
            assert_eq!(cross.grid().get(2, i), 1.0);
            assert_eq!(cross.grid().get(i, 2), 1.0);
        }

        assert!(matches!(
            make_target(TargetKind::Square, 2),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn ring_support_matches_integer_count() {
        // Membership in integer arithmetic on doubled coordinates: with u = 2x - (n - 1),
        // d = |u| / 2, so inner <= d <= outer becomes n^2 <= 4|u|^2 <= 4 n^2.
        for n in [3usize, 8, 15, 21] {
            let ring = make_target(TargetKind::Ring, n).unwrap();
            let nn = n as i64;
            let mut expected = 0;
            for y in 0..nn {
                for x in 0..nn {
                    let (u, v) = (2 * x - (nn - 1), 2 * y - (nn - 1));
                    let q = 4 * (u * u + v * v);
                    if q >= nn * nn && q <= 4 * nn * nn {
                        expected += 1;
                    }
                }
            }
            assert_eq!(ring.grid().sum() as i64, expected, "size {n}");
        }
        assert_eq!(
            make_target(TargetKind::Ring, 15).unwrap().grid().sum(),
            132.0
        );
    }

    #[test]
    fn linear_motion() {
        let traj = TrajectoryConfig {
            motion: Motion::Linear { vx: 1.0, vy: 0.0 },
            start: (0.0, 0.0),
            segments: 10,
        };
        assert_eq!(
            trajectory_position(&traj, 5, &bounds15()).unwrap(),
            GridPosition::new(5, 0)
        );
        assert!(matches!(
            trajectory_position(&traj, 0, &bounds15()),
            Err(Error::Usage(_))
        ));
        assert!(trajectory_position(&traj, 11, &bounds15()).is_err());
    }

    #[test]
    fn zero_amplitude_sinusoid_is_linear() {
        let lin = TrajectoryConfig {
            motion: Motion::Linear { vx: 1.5, vy: -0.5 },
            start: (3.0, 40.0),
            segments: 30,
        };
        let sin = TrajectoryConfig {
            motion: Motion::Sinusoid {
                vx: 1.5,
                vy: -0.5,
                amplitude: 0.0,
                omega: 0.7,
            },
            ..lin.clone()
        };
        assert_eq!(
            lin.positions(&bounds15()).unwrap(),
            sin.positions(&bounds15()).unwrap()
        );
    }

    #[test]
    fn sinusoid_stays_in_view() {
        let traj = TrajectoryConfig {
            motion: Motion::Sinusoid {
                vx: 1.0,
                vy: 0.0,
                amplitude: 10.0,
                omega: 0.2,
            },
            start: (5.0, 25.0),
            segments: 40,
        };
        for p in traj.positions(&bounds15()).unwrap() {
            assert!(
                p.x >= 0 && p.y >= 0 && p.x + 15 <= 64 && p.y + 15 <= 64,
                "{p:?}"
            );
            embed_target(&make_target(TargetKind::Square, 15).unwrap(), p, FOV).unwrap();
        }
    }

    #[test]
    fn waypoints_are_clamped() {
        let traj = TrajectoryConfig {
            motion: Motion::Waypoints(vec![(10, 10), (-4, 70)]),
            start: (0.0, 0.0),
            segments: 2,
        };
        assert_eq!(
            traj.positions(&bounds15()).unwrap(),
            vec![GridPosition::new(10, 10), GridPosition::new(0, 49)]
        );
        let short = TrajectoryConfig {
            segments: 3,
            ..traj
        };
        assert!(short.validate().is_err());
    }

    #[test]
    fn embedding() {
        let dot = TargetImage::new(Grid::filled(Dims::new(1, 1), 1.0)).unwrap();
        let s = embed_target(&dot, GridPosition::new(3, 4), Dims::new(8, 8)).unwrap();
        assert_eq!(s.grid().get(3, 4), 1.0);
        assert_eq!(s.grid().sum(), 1.0);

        let cross = make_target(TargetKind::Cross, 5).unwrap();
        let s = embed_target(&cross, GridPosition::new(0, 0), Dims::new(9, 7)).unwrap();
        for y in 0..5 {
            for x in 0..5 {
                assert_eq!(s.grid().get(x, y), cross.grid().get(x, y));
            }
        }

        let sq = make_target(TargetKind::Square, 15).unwrap();
        assert!(embed_target(&sq, GridPosition::new(49, 49), FOV).is_ok());
        assert!(matches!(
            embed_target(&sq, GridPosition::new(50, 50), FOV),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(embed_target(&sq, GridPosition::new(-1, 0), FOV).is_err());
    }

    #[test]
    fn center_convention() {
        assert_eq!(
            GridPosition::new(10, 20).center(Dims::new(15, 15)),
            (17.0, 27.0)
        );
    }

    proptest! {
        #[test]
        fn mass_conserved(x in 0i64..=49, y in 0i64..=49, kind in prop::sample::select(vec![TargetKind::Square, TargetKind::Cross, TargetKind::Ring])) {
            let t = make_target(kind, 15).unwrap();
            let s = embed_target(&t, GridPosition::new(x, y), FOV).unwrap();
            prop_assert_eq!(s.grid().sum(), t.grid().sum());
        }

        #[test]
        fn clamp_is_identity_in_bounds(x in 0i64..=49, y in 0i64..=49) {
            let p = GridPosition::new(x, y);
            prop_assert_eq!(bounds15().clamp(p), p);
        }

        #[test]
        fn trajectory_deterministic(amp in 0.0f64..20.0, omega in 0.0f64..1.0, vx in -3.0f64..3.0) {
            let traj = TrajectoryConfig {
                motion: Motion::Sinusoid { vx, vy: 0.0, amplitude: amp, omega },
                start: (20.0, 20.0),
                segments: 25,
            };
            prop_assert_eq!(traj.positions(&bounds15()).unwrap(), traj.positions(&bounds15()).unwrap());
        }
    }
}
