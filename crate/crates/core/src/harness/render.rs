//! Output files for episodes and sweeps, plus a content-hash manifest.

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::harness::config::ExperimentConfig;
use crate::harness::episode::EpisodeResult;
use crate::harness::sweep::SweepResult;
use crate::io::{pgm, table};

pub const MANIFEST: &str = "manifest.txt";

/// Files written to one directory with their SHA-256 digests, in write order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub dir: PathBuf,
    pub entries: Vec<(String, String)>,
}

impl Manifest {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            entries: Vec::new(),
        })
    }

    fn record(&mut self, name: &str) -> Result<()> {
        let path = self.dir.join(name);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        let digest = Sha256::digest(&bytes);
        let hex = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.entries.push((name.to_string(), hex));
        Ok(())
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn hash(&self, name: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, h)| h.as_str())
    }

    /// Write `manifest.txt` in `sha256sum` layout.
    fn finish(self) -> Result<Self> {
        let text: String = self
            .entries
            .iter()
            .map(|(name, hash)| format!("{hash}  {name}\n"))
            .collect();
        let path = self.path(MANIFEST);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
        Ok(self)
    }
}

fn write_config(m: &mut Manifest, cfg: &ExperimentConfig) -> Result<()> {
    let path = m.path("config.txt");
    fs::write(&path, cfg.to_text()).map_err(|e| Error::io(&path, e))?;
    m.record("config.txt")
}

/// Write every image and table for an episode into `dir`:
/// `original.pgm`, `uncompensated.pgm`, `rough_<j>.pgm` per segment, `accumulated.pgm`,
/// `accumulated.csv` (raw values), `trajectory.csv`, `metrics.csv`, `config.txt` and
/// `manifest.txt`.
pub fn render_episode(result: &EpisodeResult, dir: &Path) -> Result<Manifest> {
    let mut m = Manifest::new(dir)?;

    pgm::write(&m.path("original.pgm"), result.original.grid())?;
    m.record("original.pgm")?;
    pgm::write(&m.path("uncompensated.pgm"), &result.uncompensated.grid)?;
    m.record("uncompensated.pgm")?;
    for (j, rough) in result.rough_images.iter().enumerate() {
        let name = format!("rough_{}.pgm", j + 1);
        pgm::write(&m.path(&name), &rough.grid)?;
        m.record(&name)?;
    }
    pgm::write(&m.path("accumulated.pgm"), &result.accumulated.grid)?;
    m.record("accumulated.pgm")?;
    table::write_grid(&m.path("accumulated.csv"), &result.accumulated.grid)?;
    m.record("accumulated.csv")?;

    let rows: Vec<Vec<String>> = result
        .segments
        .iter()
        .map(|s| {
            vec![
                s.index.to_string(),
                table::sig6(s.truth.0),
                table::sig6(s.truth.1),
                table::sig6(s.estimate.0),
                table::sig6(s.estimate.1),
            ]
        })
        .collect();
    table::write_rows(
        &m.path("trajectory.csv"),
        &["segment", "true_x", "true_y", "est_x", "est_y"],
        &rows,
    )?;
    m.record("trajectory.csv")?;

    let metrics = [
        ("prmse", table::sig6(result.prmse)),
        (
            "accumulated_psnr_db",
            table::sig6(result.accumulated_psnr_db),
        ),
        (
            "mean_rough_psnr_db",
            table::sig6(result.mean_rough_psnr_db()),
        ),
        (
            "uncompensated_psnr_db",
            table::sig6(result.uncompensated_psnr_db),
        ),
        ("psnr_gain_db", table::sig6(result.psnr_gain_db())),
        ("segments", result.segments.len().to_string()),
        ("samples", result.accumulated.sample_count.to_string()),
        ("fallback_segments", result.fallback_count().to_string()),
    ];
    let rows: Vec<Vec<String>> = metrics
        .iter()
        .map(|(k, v)| vec![k.to_string(), v.clone()])
        .collect();
    table::write_rows(&m.path("metrics.csv"), &["metric", "value"], &rows)?;
    m.record("metrics.csv")?;

    write_config(&mut m, &result.config)?;
    m.finish()
}

/// Write `sweep.csv`, the base `config.txt` and `manifest.txt`.
pub fn render_sweep(result: &SweepResult, base: &ExperimentConfig, dir: &Path) -> Result<Manifest> {
    let mut m = Manifest::new(dir)?;
    let rows: Vec<Vec<String>> = result
        .points
        .iter()
        .map(|p| {
            vec![
                table::sig6(p.value),
                table::sig6(p.mean_prmse),
                table::sig6(p.std_prmse),
                p.n_ok.to_string(),
                p.n_failed.to_string(),
            ]
        })
        .collect();
    table::write_rows(
        &m.path("sweep.csv"),
        &["param", "mean_prmse", "std_prmse", "n_ok", "n_failed"],
        &rows,
    )?;
    m.record("sweep.csv")?;
    write_config(&mut m, base)?;
    m.finish()
}
