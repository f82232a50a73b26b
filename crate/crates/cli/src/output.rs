use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use msts_core::Error;
use serde::Serialize;

/// Internal consistency failure in the CLI itself. Other non-core errors
/// (I/O, bad arguments) map to exit code 2.
#[derive(Debug)]
pub struct Internal(pub String);

impl std::fmt::Display for Internal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Internal {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if let Some(core) = e.downcast_ref::<Error>() {
        return match core {
            Error::TooLarge
            | Error::BudgetExceeded { .. }
            | Error::TooManyTerminals
            | Error::NoSteinerTree
            | Error::TooManyVariables
            | Error::Placement(_)
            | Error::Undecodable => 3,
            Error::RepairFactorExceeded { .. } | Error::RepairStructure(_) => 4,
            _ => 2,
        };
    }
    if e.downcast_ref::<Internal>().is_some() {
        return 4;
    }
    2
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunReport {
    pub algorithm: String,
    pub instance: String,
    pub n: usize,
    pub cost: f64,
    pub guarantee: f64,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub optimum: Option<f64>,
    /// `cost / optimum - 1`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

impl RunReport {
    pub fn set_optimum(&mut self, opt: f64) {
        self.optimum = Some(opt);
        self.gap = Some(if opt > 0.0 {
            self.cost / opt - 1.0
        } else {
            0.0
        });
    }

    pub fn text(&self) -> String {
        let mut s = format!(
            "algorithm={} instance={} n={} cost={:.9} guarantee={:.6} time={:.3}s",
            self.algorithm, self.instance, self.n, self.cost, self.guarantee, self.wall_time_s
        );
        if let (Some(o), Some(g)) = (self.optimum, self.gap) {
            s.push_str(&format!(" optimum={o:.9} gap={g:.6}"));
        }
        s
    }

    pub fn json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

pub fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Writes through a temporary file in the target directory, so a failed run
/// never leaves a partial file behind.
pub fn write_atomic(path: &Path, data: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temporary file in {}", dir.display()))?;
    tmp.write_all(data.as_bytes())?;
    tmp.flush()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    log::debug!("wrote {}", path.display());
    Ok(())
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(path: Option<&Path>, data: &str) -> Result<()> {
    match path {
        Some(p) => write_atomic(p, data),
        None => {
            print!("{data}");
            Ok(())
        }
    }
}
