//! Parameter sweeps over the screening threshold and the samples per segment.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::episode::run_episode;
use crate::seed::{derive_seed, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Threshold,
    Samples,
}

impl SweepParam {
    pub fn name(&self) -> &'static str {
        match self {
            SweepParam::Threshold => "t",
            SweepParam::Samples => "k",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    pub prmse: Option<f64>,
    pub accumulated_psnr_db: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_prmse: f64,
    /// Sample standard deviation over successful trials; 0 for fewer than two.
    pub std_prmse: f64,
    pub mean_psnr_db: f64,
    pub n_ok: usize,
    pub n_failed: usize,
    pub trials: Vec<TrialOutcome>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub param: SweepParam,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// Square root of the mean per-point PRMSE variance.
    pub fn pooled_std(&self) -> f64 {
        let vars: Vec<f64> = self
            .points
            .iter()
            .filter(|p| p.n_ok >= 2)
            .map(|p| p.std_prmse.powi(2))
            .collect();
        if vars.is_empty() {
            0.0
        } else {
            (vars.iter().sum::<f64>() / vars.len() as f64).sqrt()
        }
    }

    pub fn point(&self, value: f64) -> Option<&SweepPoint> {
        self.points.iter().find(|p| p.value == value)
    }
}

/// Seed for one trial at one grid value.
pub fn trial_seed(base_seed: u64, value: f64, trial: usize) -> u64 {
    derive_seed(&[base_seed, stream::TRIAL, value.to_bits(), trial as u64])
}

fn configure(
    base: &ExperimentConfig,
    param: SweepParam,
    value: f64,
    seed: u64,
) -> Result<ExperimentConfig> {
    let mut cfg = base.clone();
    cfg.seed = seed;
    cfg.noise.seed = derive_seed(&[seed, stream::NOISE]);
    match param {
        SweepParam::Threshold => {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::Config(format!("threshold {value} outside [0, 1]")));
            }
            cfg.t = value;
        }
        SweepParam::Samples => {
            if value.fract() != 0.0 || value < 2.0 {
                return Err(Error::Config(format!(
                    "sample count {value} must be an integer >= 2"
                )));
            }
            cfg.k = value as usize;
        }
    }
    Ok(cfg)
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = if xs.len() < 2 {
        0.0
    } else {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    (mean, std)
}

/// Run `n_trials` episodes per grid value. Trials execute in parallel; results are merged
/// in grid-then-trial order. Episode failures are recorded and excluded from the means.
pub fn sweep(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
    n_trials: usize,
) -> Result<SweepResult> {
    if values.is_empty() || n_trials == 0 {
        return Err(Error::Config(
            "sweep needs at least one value and one trial".into(),
        ));
    }
    let jobs: Vec<(usize, ExperimentConfig)> = values
        .iter()
        .enumerate()
        .flat_map(|(vi, &v)| (0..n_trials).map(move |trial| (vi, v, trial)))
        .map(|(vi, v, trial)| {
            Ok((
                vi,
                configure(base, param, v, trial_seed(base.seed, v, trial))?,
            ))
        })
        .collect::<Result<_>>()?;
    // fail fast on settings that would break every trial
    for (_, cfg) in &jobs {
        cfg.validate()?;
    }

    let outcomes: Vec<(usize, TrialOutcome)> = jobs
        .par_iter()
        .map(|(vi, cfg)| {
            let outcome = match run_episode(cfg) {
                Ok(ep) => TrialOutcome {
                    seed: cfg.seed,
                    prmse: Some(ep.prmse),
                    accumulated_psnr_db: Some(ep.accumulated_psnr_db),
                    error: None,
                },
                Err(e) => TrialOutcome {
                    seed: cfg.seed,
                    prmse: None,
                    accumulated_psnr_db: None,
                    error: Some(e.to_string()),
                },
            };
            (*vi, outcome)
        })
        .collect();

    let points = values
        .iter()
        .enumerate()
        .map(|(vi, &value)| {
            let trials: Vec<TrialOutcome> = outcomes
                .iter()
                .filter(|(i, _)| *i == vi)
                .map(|(_, o)| o.clone())
                .collect();
            let ok: Vec<f64> = trials.iter().filter_map(|t| t.prmse).collect();
            let psnrs: Vec<f64> = trials
                .iter()
                .filter_map(|t| t.accumulated_psnr_db)
                .collect();
            let (mean_prmse, std_prmse) = mean_std(&ok);
            SweepPoint {
                value,
                mean_prmse,
                std_prmse,
                mean_psnr_db: mean_std(&psnrs).0,
                n_ok: ok.len(),
                n_failed: trials.len() - ok.len(),
                trials,
            }
        })
        .collect();
    Ok(SweepResult { param, points })
}

pub fn sweep_threshold(
    base: &ExperimentConfig,
    t_values: &[f64],
    n_trials: usize,
) -> Result<SweepResult> {
    sweep(base, SweepParam::Threshold, t_values, n_trials)
}

pub fn sweep_samples(
    base: &ExperimentConfig,
    k_values: &[usize],
    n_trials: usize,
) -> Result<SweepResult> {
    let values: Vec<f64> = k_values.iter().map(|&k| k as f64).collect();
    sweep(base, SweepParam::Samples, &values, n_trials)
}
