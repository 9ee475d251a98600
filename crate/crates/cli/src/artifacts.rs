//! Artifact persistence: JSON-lines records and CSV tables, written
//! atomically (temp file + rename) with the run's config hash embedded in
//! every file. Artifacts contain no wall-clock data, so reruns of the same
//! config reproduce them byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliError;

pub struct ArtifactWriter {
    dir: PathBuf,
    stem: String,
    run_id: String,
    written: Vec<PathBuf>,
}

impl ArtifactWriter {
    pub fn new(dir: &Path, command: &'static str, run_id: &str) -> Result<Self, CliError> {
        fs::create_dir_all(dir)
            .map_err(|e| CliError::Config(format!("cannot create {}: {}", dir.display(), e)))?;
        Ok(ArtifactWriter {
            dir: dir.to_path_buf(),
            stem: command.replace(' ', "-"),
            run_id: run_id.to_string(),
            written: Vec::new(),
        })
    }

    pub fn run_id(&self) -> &str {
        &self.run_id
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    /// Writes the record stream: one config echo line, then one line per
    /// payload record, each carrying the run id.
    pub fn write_jsonl<P: Serialize>(
        &mut self,
        config: &RunConfig,
        payloads: &[P],
    ) -> Result<PathBuf, CliError> {
        let mut lines = String::new();
        let header = serde_json::json!({
            "record": "config",
            "run_id": self.run_id,
            "config": config,
        });
        lines.push_str(&serde_json::to_string(&header).expect("config serializes"));
        lines.push('\n');
        for payload in payloads {
            let value = serde_json::to_value(payload)
                .map_err(|e| CliError::Config(format!("cannot encode payload: {}", e)))?;
            let record = serde_json::json!({
                "record": "payload",
                "run_id": self.run_id,
                "payload": value,
            });
            lines.push_str(&serde_json::to_string(&record).expect("record serializes"));
            lines.push('\n');
        }
        let path = self.dir.join(format!("{}.jsonl", self.stem));
        self.atomic(&path, lines.as_bytes())?;
        Ok(path)
    }

    /// Writes a CSV table prefixed by a `# run_id=...` comment line.
    pub fn write_csv(&mut self, header: &str, rows: &[String]) -> Result<PathBuf, CliError> {
        let mut text = format!("# run_id={}\n{}\n", self.run_id, header);
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        let path = self.dir.join(format!("{}.csv", self.stem));
        self.atomic(&path, text.as_bytes())?;
        Ok(path)
    }

    fn atomic(&mut self, path: &Path, bytes: &[u8]) -> Result<(), CliError> {
        let mut tmp = path.as_os_str().to_os_string();
        tmp.push(".tmp");
        let tmp = PathBuf::from(tmp);
        fs::write(&tmp, bytes)
            .map_err(|e| CliError::Config(format!("cannot write {}: {}", tmp.display(), e)))?;
        fs::rename(&tmp, path)
            .map_err(|e| CliError::Config(format!("cannot rename into {}: {}", path.display(), e)))?;
        self.written.push(path.to_path_buf());
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SystemSpec;

    #[test]
    fn jsonl_embeds_run_id_on_every_line() {
        let dir = std::env::temp_dir().join(format!("moran-art-{}", std::process::id()));
        let config =
            RunConfig::new("dims", SystemSpec::default(), &serde_json::json!({})).unwrap();
        let id = config.run_id();
        let mut writer = ArtifactWriter::new(&dir, "dims", &id).unwrap();
        let path = writer.write_jsonl(&config, &[serde_json::json!({"x": 1})]).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["run_id"].as_str().unwrap(), id);
        }
        let csv = writer.write_csv("k,v", &["1,2".into()]).unwrap();
        let text = fs::read_to_string(&csv).unwrap();
        assert!(text.starts_with(&format!("# run_id={}\n", id)));
        fs::remove_dir_all(&dir).unwrap();
    }
}
