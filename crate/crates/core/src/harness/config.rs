//! Experiment configuration and its flat `key = value` text form.
//!
//! Every key below can appear in a config file (one `key = value` per line, `#` starts a
//! comment) or as a command-line flag of the same name. [`ExperimentConfig::to_text`]
//! writes every key, so a resolved config reproduces a run exactly.
//!
//! | key | meaning | default |
//! |---|---|---|
//! | `fov_width`, `fov_height` | field of view in pixels | 64, 64 |
//! | `macro_pixel` | speckle block side | 2 |
//! | `bernoulli_p`, `on_value`, `off_value` | speckle statistics | 0.5, 1, 0 |
//! | `target` | `square`, `cross`, `ring` or `bitmap` | square |
//! | `target_size` | glyph side in pixels | 15 |
//! | `target_bitmap` | P5 file used when `target = bitmap` | |
//! | `trajectory` | `linear`, `sinusoid` or `waypoints` | sinusoid |
//! | `start_x`, `start_y` | top-left position before segment 1 | 4, 24 |
//! | `velocity_x`, `velocity_y` | drift per segment | 2, 0 |
//! | `amplitude`, `omega` | transverse sinusoid in y | 12, 0.35 |
//! | `waypoints` | `x:y;x:y;...` top-left positions | |
//! | `r` | number of segments | 20 |
//! | `k` | samples per segment | 300 |
//! | `t` | screening threshold | 0.7 |
//! | `noise`, `noise_sigma`, `noise_seed` | `none` or `gaussian` bucket noise | none, 0, 0 |
//! | `fill` | `zero` or `wrap` vacancy fill | zero |
//! | `ref_x`, `ref_y` | reference point (default: FOV center) | |
//! | `shift_sign` | `to-reference` or `literal` | to-reference |
//! | `mean_mode` | `per-segment` or `global` | per-segment |
//! | `compensation` | `estimated` or `truth` centers | estimated |
//! | `fallback_argmax` | use the argmax pixel when a segment is degenerate | false |
//! | `seed` | speckle seed | 1 |
//! | `output_dir` | where outputs are written | out |

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::forward::{NoiseConfig, NoiseKind};
use crate::grid::{Dims, Fill};
use crate::reconstruct::{MeanMode, ShiftPolicy, ShiftSign};
use crate::scene::{
    make_target, GridPosition, Motion, PlacementBounds, TargetImage, TargetKind, TrajectoryConfig,
};
use crate::speckle::SpeckleConfig;

pub const KEYS: &[&str] = &[
    "fov_width",
    "fov_height",
    "macro_pixel",
    "bernoulli_p",
    "on_value",
    "off_value",
    "target",
    "target_size",
    "target_bitmap",
    "trajectory",
    "start_x",
    "start_y",
    "velocity_x",
    "velocity_y",
    "amplitude",
    "omega",
    "waypoints",
    "r",
    "k",
    "t",
    "noise",
    "noise_sigma",
    "noise_seed",
    "fill",
    "ref_x",
    "ref_y",
    "shift_sign",
    "mean_mode",
    "compensation",
    "fallback_argmax",
    "seed",
    "output_dir",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSource {
    Glyph(TargetKind),
    Bitmap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    Linear,
    Sinusoid,
    Waypoints,
}

/// Centers used to translate each segment's speckle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Compensation {
    #[default]
    Estimated,
    /// Ground-truth centers; bounds what perfect localization could achieve.
    Truth,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub speckle: SpeckleConfig,
    pub target: TargetSource,
    pub target_size: usize,
    pub target_bitmap: Option<PathBuf>,
    pub motion: MotionKind,
    pub start: (f64, f64),
    pub velocity: (f64, f64),
    pub amplitude: f64,
    pub omega: f64,
    pub waypoints: Vec<(i64, i64)>,
    pub r: usize,
    pub k: usize,
    pub t: f64,
    pub noise: NoiseConfig,
    pub fill: Fill,
    pub reference: Option<(i64, i64)>,
    pub shift_sign: ShiftSign,
    pub mean_mode: MeanMode,
    pub compensation: Compensation,
    pub fallback_argmax: bool,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            speckle: SpeckleConfig::default(),
            target: TargetSource::Glyph(TargetKind::Square),
            target_size: 15,
            target_bitmap: None,
            motion: MotionKind::Sinusoid,
            start: (4.0, 24.0),
            velocity: (2.0, 0.0),
            amplitude: 12.0,
            omega: 0.35,
            waypoints: Vec::new(),
            r: 20,
            k: 300,
            t: 0.7,
            noise: NoiseConfig::default(),
            fill: Fill::Zero,
            reference: None,
            shift_sign: ShiftSign::ToReference,
            mean_mode: MeanMode::PerSegment,
            compensation: Compensation::Estimated,
            fallback_argmax: false,
            seed: 1,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("invalid value '{value}' for {key}")))
}

fn parse_waypoints(value: &str) -> Result<Vec<(i64, i64)>> {
    value
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let (x, y) = pair
                .split_once(':')
                .ok_or_else(|| Error::Config(format!("waypoint '{pair}' is not x:y")))?;
            Ok((parse("waypoints", x.trim())?, parse("waypoints", y.trim())?))
        })
        .collect()
}

impl ExperimentConfig {
    pub fn fov(&self) -> Dims {
        self.speckle.dims()
    }

    /// Total number of samples `N = r K`.
    pub fn total_samples(&self) -> usize {
        self.r * self.k
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "fov_width" => self.speckle.fov_width = parse(key, value)?,
            "fov_height" => self.speckle.fov_height = parse(key, value)?,
            "macro_pixel" => self.speckle.macro_pixel = parse(key, value)?,
            "bernoulli_p" => self.speckle.bernoulli_p = parse(key, value)?,
            "on_value" => self.speckle.on_value = parse(key, value)?,
            "off_value" => self.speckle.off_value = parse(key, value)?,
            "target" => {
                self.target = match value {
                    "bitmap" => TargetSource::Bitmap,
                    glyph => TargetSource::Glyph(glyph.parse()?),
                }
            }
            "target_size" => self.target_size = parse(key, value)?,
            "target_bitmap" => {
                self.target_bitmap = (!value.is_empty()).then(|| PathBuf::from(value))
            }
            "trajectory" => {
                self.motion = match value {
                    "linear" => MotionKind::Linear,
                    "sinusoid" => MotionKind::Sinusoid,
                    "waypoints" => MotionKind::Waypoints,
                    _ => return Err(Error::Config(format!("unknown trajectory '{value}'"))),
                }
            }
            "start_x" => self.start.0 = parse(key, value)?,
            "start_y" => self.start.1 = parse(key, value)?,
            "velocity_x" => self.velocity.0 = parse(key, value)?,
            "velocity_y" => self.velocity.1 = parse(key, value)?,
            "amplitude" => self.amplitude = parse(key, value)?,
            "omega" => self.omega = parse(key, value)?,
            "waypoints" => self.waypoints = parse_waypoints(value)?,
            "r" => self.r = parse(key, value)?,
            "k" => self.k = parse(key, value)?,
            "t" => self.t = parse(key, value)?,
            "noise" => {
                self.noise.kind = match value {
                    "none" => NoiseKind::None,
                    "gaussian" => NoiseKind::AdditiveGaussian,
                    _ => return Err(Error::Config(format!("unknown noise kind '{value}'"))),
                }
            }
            "noise_sigma" => self.noise.sigma = parse(key, value)?,
            "noise_seed" => self.noise.seed = parse(key, value)?,
            "fill" => {
                self.fill = match value {
                    "zero" => Fill::Zero,
                    "wrap" => Fill::Wrap,
                    _ => return Err(Error::Config(format!("unknown fill '{value}'"))),
                }
            }
            "ref_x" | "ref_y" => {
                let center = self.shift_policy().reference;
                let mut reference = self.reference.unwrap_or(center);
                if key == "ref_x" {
                    reference.0 = parse(key, value)?;
                } else {
                    reference.1 = parse(key, value)?;
                }
                self.reference = Some(reference);
            }
            "shift_sign" => {
                self.shift_sign = match value {
                    "to-reference" => ShiftSign::ToReference,
                    "literal" => ShiftSign::Literal,
                    _ => return Err(Error::Config(format!("unknown shift_sign '{value}'"))),
                }
            }
            "mean_mode" => {
                self.mean_mode = match value {
                    "per-segment" => MeanMode::PerSegment,
                    "global" => MeanMode::Global,
                    _ => return Err(Error::Config(format!("unknown mean_mode '{value}'"))),
                }
            }
            "compensation" => {
                self.compensation = match value {
                    "estimated" => Compensation::Estimated,
                    "truth" => Compensation::Truth,
                    _ => return Err(Error::Config(format!("unknown compensation '{value}'"))),
                }
            }
            "fallback_argmax" => self.fallback_argmax = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    /// Apply every setting in a config text on top of the current values.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key.trim(), value)?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }

    /// Every key with its resolved value, in [`KEYS`] order.
    pub fn to_text(&self) -> String {
        let policy = self.shift_policy();
        let mut out = String::new();
        for key in KEYS {
            let value = match *key {
                "fov_width" => self.speckle.fov_width.to_string(),
                "fov_height" => self.speckle.fov_height.to_string(),
                "macro_pixel" => self.speckle.macro_pixel.to_string(),
                "bernoulli_p" => format!("{:?}", self.speckle.bernoulli_p),
                "on_value" => format!("{:?}", self.speckle.on_value),
                "off_value" => format!("{:?}", self.speckle.off_value),
                "target" => match self.target {
                    TargetSource::Glyph(kind) => kind.to_string(),
                    TargetSource::Bitmap => "bitmap".into(),
                },
                "target_size" => self.target_size.to_string(),
                "target_bitmap" => self
                    .target_bitmap
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default(),
                "trajectory" => match self.motion {
                    MotionKind::Linear => "linear",
                    MotionKind::Sinusoid => "sinusoid",
                    MotionKind::Waypoints => "waypoints",
                }
                .into(),
                "start_x" => format!("{:?}", self.start.0),
                "start_y" => format!("{:?}", self.start.1),
                "velocity_x" => format!("{:?}", self.velocity.0),
                "velocity_y" => format!("{:?}", self.velocity.1),
                "amplitude" => format!("{:?}", self.amplitude),
                "omega" => format!("{:?}", self.omega),
                "waypoints" => self
                    .waypoints
                    .iter()
                    .map(|(x, y)| format!("{x}:{y}"))
                    .collect::<Vec<_>>()
                    .join(";"),
                "r" => self.r.to_string(),
                "k" => self.k.to_string(),
                "t" => format!("{:?}", self.t),
                "noise" => match self.noise.kind {
                    NoiseKind::None => "none",
                    NoiseKind::AdditiveGaussian => "gaussian",
                }
                .into(),
                "noise_sigma" => format!("{:?}", self.noise.sigma),
                "noise_seed" => self.noise.seed.to_string(),
                "fill" => match self.fill {
                    Fill::Zero => "zero",
                    Fill::Wrap => "wrap",
                }
                .into(),
                "ref_x" => policy.reference.0.to_string(),
                "ref_y" => policy.reference.1.to_string(),
                "shift_sign" => match self.shift_sign {
                    ShiftSign::ToReference => "to-reference",
                    ShiftSign::Literal => "literal",
                }
                .into(),
                "mean_mode" => match self.mean_mode {
                    MeanMode::PerSegment => "per-segment",
                    MeanMode::Global => "global",
                }
                .into(),
                "compensation" => match self.compensation {
                    Compensation::Estimated => "estimated",
                    Compensation::Truth => "truth",
                }
                .into(),
                "fallback_argmax" => self.fallback_argmax.to_string(),
                "seed" => self.seed.to_string(),
                "output_dir" => self.output_dir.display().to_string(),
                _ => unreachable!("key list and formatter out of sync"),
            };
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub fn shift_policy(&self) -> ShiftPolicy {
        let mut policy = ShiftPolicy::centered(self.fov());
        policy.fill = self.fill;
        policy.sign = self.shift_sign;
        if let Some(reference) = self.reference {
            policy.reference = reference;
        }
        policy
    }

    pub fn trajectory(&self) -> TrajectoryConfig {
        let (vx, vy) = self.velocity;
        let motion = match self.motion {
            MotionKind::Linear => Motion::Linear { vx, vy },
            MotionKind::Sinusoid => Motion::Sinusoid {
                vx,
                vy,
                amplitude: self.amplitude,
                omega: self.omega,
            },
            MotionKind::Waypoints => Motion::Waypoints(self.waypoints.clone()),
        };
        TrajectoryConfig {
            motion,
            start: self.start,
            segments: self.r,
        }
    }

    pub fn target_image(&self) -> Result<TargetImage> {
        match self.target {
            TargetSource::Glyph(kind) => make_target(kind, self.target_size),
            TargetSource::Bitmap => {
                let path = self
                    .target_bitmap
                    .as_ref()
                    .ok_or_else(|| Error::Config("target = bitmap needs target_bitmap".into()))?;
                TargetImage::from_pgm(path)
            }
        }
    }

    /// Top-left placement that puts the target's center on the reference point.
    pub fn reference_placement(&self, target: Dims) -> GridPosition {
        let (rx, ry) = self.shift_policy().reference;
        GridPosition::new(
            rx - (target.width as i64 - 1) / 2,
            ry - (target.height as i64 - 1) / 2,
        )
    }

    /// Check every invariant that does not need file access.
    pub fn validate(&self) -> Result<()> {
        self.speckle.validate()?;
        if self.k < 2 {
            return Err(Error::Config(format!(
                "k = {} but at least 2 samples per segment are needed",
                self.k
            )));
        }
        if self.r == 0 {
            return Err(Error::Config("r must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::Config(format!(
                "threshold t = {} outside [0, 1]",
                self.t
            )));
        }
        if let TargetSource::Glyph(_) = self.target {
            if self.target_size < 3 {
                return Err(Error::Config(format!(
                    "target_size {} is below 3",
                    self.target_size
                )));
            }
            let dims = Dims::new(self.target_size, self.target_size);
            self.check_placement(dims)?;
        }
        if !(self.velocity.0.is_finite()
            && self.velocity.1.is_finite()
            && self.amplitude.is_finite()
            && self.omega.is_finite())
        {
            return Err(Error::Config("trajectory parameters must be finite".into()));
        }
        self.trajectory().validate()?;
        self.noise.validate()?;
        self.shift_policy().validate(self.fov())
    }

    /// The target must fit in the FOV and fit when centered on the reference point.
    pub(crate) fn check_placement(&self, target: Dims) -> Result<PlacementBounds> {
        let bounds = PlacementBounds::new(self.fov(), target)?;
        let p = self.reference_placement(target);
        if p.x < 0 || p.y < 0 || p.x > bounds.max_x || p.y > bounds.max_y {
            return Err(Error::Config(format!(
                "target centered on reference point {:?} leaves the field of view",
                self.shift_policy().reference
            )));
        }
        Ok(bounds)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_match_setup() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        assert_eq!(c.fov(), Dims::new(64, 64));
        assert_eq!(c.total_samples(), 6000);
        assert_eq!(c.shift_policy().reference, (32, 32));
        assert_eq!(
            c.reference_placement(Dims::new(15, 15)),
            GridPosition::new(25, 25)
        );
    }

    #[test]
    fn text_round_trip() {
        let mut c = ExperimentConfig::default();
        c.set("trajectory", "waypoints").unwrap();
        c.set("waypoints", "1:2; 3:4;5:6").unwrap();
        c.set("r", "3").unwrap();
        c.set("t", "0.1").unwrap();
        c.set("ref_y", "30").unwrap();
        c.set("noise", "gaussian").unwrap();
        c.set("noise_sigma", "0.3").unwrap();
        c.set("fallback_argmax", "true").unwrap();
        let back = ExperimentConfig::from_text(&c.to_text()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.waypoints, vec![(1, 2), (3, 4), (5, 6)]);
        assert_eq!(back.reference, Some((32, 30)));
    }

    #[test]
    fn comments_and_errors() {
        let c = ExperimentConfig::from_text("# header\nk = 50  # short\n\nseed=9\n").unwrap();
        assert_eq!((c.k, c.seed), (50, 9));
        assert!(matches!(
            ExperimentConfig::from_text("bogus = 1"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_text("k 5"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_text("k = many"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn validation() {
        let bad = |key: &str, value: &str| {
            let mut c = ExperimentConfig::default();
            c.set(key, value).unwrap();
            c.validate().is_err()
        };
        assert!(bad("k", "1"));
        assert!(bad("r", "0"));
        assert!(bad("t", "1.2"));
        assert!(bad("fov_width", "63"));
        assert!(bad("target_size", "70"));
        assert!(bad("ref_x", "3"));
        assert!(bad("trajectory", "waypoints"));
        assert!(bad("noise_sigma", "-1"));
        assert!(!bad("k", "2"));
    }
}
