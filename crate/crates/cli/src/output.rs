use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Writes `rows` as pretty JSON (a single object when there is one row) or CSV.
pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut s = if rows.len() == 1 {
                serde_json::to_string_pretty(&rows[0])?
            } else {
                serde_json::to_string_pretty(rows)?
            };
            s.push('\n');
            Ok(s.into_bytes())
        }
        Format::Csv => csv_bytes(rows),
    }
}

pub fn csv_bytes<T: Serialize>(rows: &[T]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .context("this output has nested fields; use --format json")?;
    }
    w.into_inner().map_err(|e| anyhow::anyhow!("csv flush: {e}"))
}

/// Writes to `path`, or stdout when `None`.
pub fn write_bytes(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
            }
            std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Manifest<'a, C: Serialize> {
    command: &'a str,
    config: &'a C,
    seed: Option<u64>,
    versions: Versions,
    files: &'a [String],
    wall_time_s: f64,
    unix_time: u64,
}

#[derive(Serialize)]
struct Versions {
    rrm: &'static str,
    rrm_cli: &'static str,
}

pub struct Run {
    pub command: &'static str,
    start: Instant,
}

impl Run {
    pub fn start(command: &'static str) -> Self {
        Self {
            command,
            start: Instant::now(),
        }
    }

    /// Manifest next to the data: `<dir>/manifest.json` or `<file>.manifest.json`; stderr without a path.
    pub fn finish<C: Serialize>(
        &self,
        config: &C,
        seed: Option<u64>,
        target: Option<&Path>,
        files: &[String],
    ) -> Result<()> {
        let m = Manifest {
            command: self.command,
            config,
            seed,
            versions: Versions {
                rrm: rrm_version(),
                rrm_cli: env!("CARGO_PKG_VERSION"),
            },
            files,
            wall_time_s: self.start.elapsed().as_secs_f64(),
            unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        };
        let text = serde_json::to_string_pretty(&m)? + "\n";
        match target {
            Some(p) if p.is_dir() => write_bytes(Some(&p.join("manifest.json")), text.as_bytes()),
            Some(p) => {
                let mut name = p.as_os_str().to_owned();
                name.push(".manifest.json");
                write_bytes(Some(&PathBuf::from(name)), text.as_bytes())
            }
            None => {
                eprint!("{text}");
                Ok(())
            }
        }
    }
}

fn rrm_version() -> &'static str {
    // the library and the CLI are versioned together by the workspace
    env!("CARGO_PKG_VERSION")
}

/// Output directory for composite recipes.
pub fn recipe_dir(out: Option<&Path>, name: &str) -> Result<PathBuf> {
    let dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("results").join(name));
    if dir.exists() && !dir.is_dir() {
        bail!("--out {} exists and is not a directory", dir.display());
    }
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(dir)
}

pub fn write_in(dir: &Path, name: &str, bytes: &[u8], files: &mut Vec<String>) -> Result<()> {
    write_bytes(Some(&dir.join(name)), bytes)?;
    files.push(name.to_string());
    Ok(())
}
