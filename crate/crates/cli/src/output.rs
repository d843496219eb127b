use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::scenarios::{Audit, Table};

pub const OUT_ENV: &str = "TDHF_OUT";
pub const DEFAULT_OUT: &str = "tdhf-out";

/// Flag, then config, then `TDHF_OUT`, then `./tdhf-out`.
pub fn resolve_out(flag: Option<&Path>, cfg: Option<&RunConfig>) -> PathBuf {
    if let Some(p) = flag {
        return p.to_path_buf();
    }
    if let Some(p) = cfg.and_then(|c| c.out.clone()) {
        return p;
    }
    std::env::var_os(OUT_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

#[derive(Debug, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub verb: String,
    pub target: String,
    pub seed: u64,
    pub created_unix: u64,
    pub passed: bool,
    pub files: Vec<FileEntry>,
    pub audits: Vec<AuditEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<RunConfig>,
}

#[derive(Debug, Serialize)]
pub struct FileEntry {
    pub name: String,
    pub module: String,
    pub operation: String,
    pub rows: usize,
}

#[derive(Debug, Serialize)]
pub struct AuditEntry {
    pub group: String,
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub detail: String,
}

impl Manifest {
    pub fn new(verb: &str, target: &str, seed: u64, config: Option<RunConfig>) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            verb: verb.to_string(),
            target: target.to_string(),
            seed,
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            passed: true,
            files: Vec::new(),
            audits: Vec::new(),
            config,
        }
    }

    pub fn add_audits(&mut self, group: &str, audits: &[Audit]) {
        for a in audits {
            self.passed &= a.passed;
            self.audits.push(AuditEntry {
                group: group.to_string(),
                name: a.name.clone(),
                passed: a.passed,
                value: a.value,
                detail: a.detail.clone(),
            });
        }
    }

    /// Records a failure that produced no audit values.
    pub fn add_error(&mut self, group: &str, err: &CliError) {
        self.passed = false;
        self.audits.push(AuditEntry {
            group: group.to_string(),
            name: "error".to_string(),
            passed: false,
            value: f64::NAN,
            detail: err.to_string(),
        });
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let text = toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))?;
        std::fs::write(dir.join("manifest.toml"), text)?;
        Ok(())
    }
}

/// Writes `tables` under `dir` (prefixing names with `prefix/`) and records them.
pub fn write_tables(dir: &Path, prefix: &str, tables: &[Table], manifest: &mut Manifest) -> Result<(), CliError> {
    let target = if prefix.is_empty() { dir.to_path_buf() } else { dir.join(prefix) };
    std::fs::create_dir_all(&target)?;
    for t in tables {
        std::fs::write(target.join(&t.file), &t.body)?;
        let name = if prefix.is_empty() {
            t.file.clone()
        } else {
            format!("{prefix}/{}", t.file)
        };
        manifest.files.push(FileEntry {
            name,
            module: t.module.to_string(),
            operation: t.operation.to_string(),
            rows: t.rows(),
        });
    }
    Ok(())
}
