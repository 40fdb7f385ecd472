use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

pub enum Status {
    Ok,
    CheckFailed,
    UsageError(String),
    Error(String),
}

impl Status {
    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::CheckFailed | Status::Error(_) => 1,
            Status::UsageError(_) => 2,
        }
    }
}

#[derive(Serialize)]
struct Record<'a> {
    cmd: &'a str,
    params: &'a Value,
    version: &'static str,
    duration_s: f64,
    outputs: &'a [PathBuf],
    status: &'static str,
    message: Option<&'a str>,
}

pub struct Manifest {
    cmd: &'static str,
    params: Value,
    started: Instant,
    outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn start(cmd: &'static str, params: &impl Serialize) -> Self {
        Manifest {
            cmd,
            params: serde_json::to_value(params).unwrap_or(Value::Null),
            started: Instant::now(),
            outputs: Vec::new(),
        }
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    /// Writes the manifest to `path`, or to stderr when there is none.
    pub fn finish(self, status: Status, path: Option<&Path>) -> Result<()> {
        let (label, message) = match &status {
            Status::Ok => ("ok", None),
            Status::CheckFailed => ("check_failed", None),
            Status::UsageError(m) => ("usage_error", Some(m.as_str())),
            Status::Error(m) => ("error", Some(m.as_str())),
        };
        let record = Record {
            cmd: self.cmd,
            params: &self.params,
            version: env!("CARGO_PKG_VERSION"),
            duration_s: self.started.elapsed().as_secs_f64(),
            outputs: &self.outputs,
            status: label,
            message,
        };
        let json = serde_json::to_string_pretty(&record)?;
        match path {
            Some(p) => {
                if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                    fs::create_dir_all(dir)?;
                }
                fs::write(p, json + "\n").with_context(|| format!("writing {}", p.display()))
            }
            None => {
                eprintln!("{json}");
                Ok(())
            }
        }
    }
}
