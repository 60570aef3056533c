//! Output files are rendered in memory and written together, so a command
//! either leaves a complete set behind or (on I/O failure) nothing.

use std::fs;
use std::path::{Path, PathBuf};

use chronon_core::scenario::Trajectory;
use serde::Serialize;

use crate::{CliResult, Failure};

pub const SCHEMA_VERSION: u32 = 1;

pub struct OutputSet {
    dir: PathBuf,
    files: Vec<(String, Vec<u8>)>,
}

impl OutputSet {
    pub fn new(dir: &Path) -> Self {
        OutputSet { dir: dir.to_path_buf(), files: Vec::new() }
    }

    pub fn add(&mut self, name: &str, contents: Vec<u8>) {
        self.files.push((name.to_string(), contents));
    }

    pub fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_vec_pretty(value).map_err(|e| Failure::Usage(format!("serializing {name}: {e}")))?;
        text.push(b'\n');
        self.add(name, text);
        Ok(())
    }

    /// Names of the files added so far, plus `extra` (a file about to be
    /// added that lists the manifest itself).
    pub fn manifest_with(&self, extra: &str) -> Vec<String> {
        self.files.iter().map(|(n, _)| n.clone()).chain([extra.to_string()]).collect()
    }

    pub fn commit(self) -> CliResult<Vec<PathBuf>> {
        fs::create_dir_all(&self.dir).map_err(|e| Failure::Usage(format!("cannot create {}: {e}", self.dir.display())))?;
        let mut written = Vec::new();
        for (name, contents) in &self.files {
            let path = self.dir.join(name);
            if let Err(e) = fs::write(&path, contents) {
                for p in &written {
                    let _ = fs::remove_file(p);
                }
                return Err(Failure::Usage(format!("cannot write {}: {e}", path.display())));
            }
            log::info!("wrote {}", path.display());
            written.push(path);
        }
        Ok(written)
    }
}

pub fn to_csv<R: Serialize>(rows: impl IntoIterator<Item = R>) -> CliResult<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(|e| Failure::Usage(format!("csv: {e}")))?;
    }
    w.into_inner().map_err(|e| Failure::Usage(format!("csv: {e}")))
}

#[derive(Serialize)]
struct TrajectoryRow {
    n: i64,
    tau: f64,
    x0: f64,
    x1: f64,
    x2: f64,
    x3: f64,
    u0: f64,
    u1: f64,
    u2: f64,
    u3: f64,
    residual: f64,
    iterations: u32,
}

pub fn trajectory_csv(traj: &Trajectory) -> CliResult<Vec<u8>> {
    to_csv(traj.states.iter().zip(&traj.diagnostics).map(|(s, d)| TrajectoryRow {
        n: s.n,
        tau: s.tau,
        x0: s.x[0],
        x1: s.x[1],
        x2: s.x[2],
        x3: s.x[3],
        u0: s.u[0],
        u1: s.u[1],
        u2: s.u[2],
        u3: s.u[3],
        residual: d.residual,
        iterations: d.iterations,
    }))
}

#[derive(Serialize)]
pub struct TrajectoryJson<'a> {
    pub schema_version: u32,
    #[serde(flatten)]
    pub trajectory: &'a Trajectory,
}
