//! Run manifests and artifact emission.
//!
//! Every JSON artifact carries a `manifest` object naming the command, the
//! full flag set, the alphabet, the arithmetic mode, the seed and the tool
//! version. Wall-clock time is only recorded on request so that exact-mode
//! artifacts stay byte-identical across runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;
use serde_json::Value;

use crate::alphabet::Theta;
use crate::error::{Error, Result};
use crate::scalar::Mode;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub flags: BTreeMap<String, Value>,
    pub theta: Option<Value>,
    pub mode: Option<Mode>,
    pub seed: Option<u64>,
    pub version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_seconds: Option<f64>,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        RunManifest {
            command: command.to_string(),
            flags: BTreeMap::new(),
            theta: None,
            mode: None,
            seed: None,
            version: env!("CARGO_PKG_VERSION").to_string(),
            wall_clock_seconds: None,
        }
    }

    /// Records one flag; single values are stored as a string.
    pub fn flag(mut self, name: &str, mut values: Vec<String>) -> Self {
        let value = match values.len() {
            1 => Value::String(values.remove(0)),
            _ => values.into(),
        };
        self.flags.insert(name.to_string(), value);
        self
    }

    pub fn theta(mut self, theta: &Theta) -> Self {
        self.theta = Some(theta.echo());
        self
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = Some(mode);
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn timed(mut self, elapsed: Duration) -> Self {
        self.wall_clock_seconds = Some(elapsed.as_secs_f64());
        self
    }
}

/// A JSON document plus optional plot-ready CSV and Markdown renderings.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub stem: String,
    pub json: Value,
    pub csv: Option<String>,
    pub markdown: Option<String>,
}

impl Artifact {
    /// Wraps `body` with the manifest under the `manifest` key. Object
    /// bodies are extended in place; anything else goes under `result`.
    pub fn new(stem: &str, manifest: &RunManifest, body: Value) -> Self {
        let manifest = serde_json::to_value(manifest).expect("plain data serialises");
        let json = match body {
            Value::Object(mut map) => {
                map.insert("manifest".into(), manifest);
                Value::Object(map)
            }
            other => serde_json::json!({ "manifest": manifest, "result": other }),
        };
        Artifact {
            stem: stem.to_string(),
            json,
            csv: None,
            markdown: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_markdown(mut self, markdown: String) -> Self {
        self.markdown = Some(markdown);
        self
    }

    pub fn json_text(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.json).expect("plain data serialises");
        text.push('\n');
        text
    }
}

/// Which renderings to emit and where.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Emit {
    pub json: bool,
    pub csv: bool,
    pub markdown: bool,
    /// Directory for `<stem>.json` etc. Standard output when absent.
    pub out: Option<PathBuf>,
}

impl Emit {
    /// Writes the selected renderings and returns the paths written.
    /// Renderings the artifact does not have are skipped.
    pub fn write(&self, artifact: &Artifact) -> Result<Vec<PathBuf>> {
        let mut pieces: Vec<(&str, String)> = Vec::new();
        if self.json {
            pieces.push(("json", artifact.json_text()));
        }
        if let (true, Some(csv)) = (self.csv, &artifact.csv) {
            pieces.push(("csv", csv.clone()));
        }
        if let (true, Some(md)) = (self.markdown, &artifact.markdown) {
            pieces.push(("md", md.clone()));
        }
        let Some(dir) = &self.out else {
            for (_, text) in pieces {
                print!("{text}");
            }
            return Ok(Vec::new());
        };
        fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
        let mut written = Vec::new();
        for (ext, text) in pieces {
            let path = dir.join(format!("{}.{ext}", artifact.stem));
            fs::write(&path, text).map_err(|e| io_error(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io(format!("{}: {e}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_is_embedded_without_timing() {
        let theta = Theta::uniform(2).unwrap();
        let m = RunManifest::new("dist")
            .flag("n", vec!["4".into()])
            .theta(&theta)
            .mode(Mode::ExactRational);
        let a = Artifact::new("dist", &m, serde_json::json!({"n": 4}));
        assert_eq!(a.json["n"], 4);
        assert_eq!(a.json["manifest"]["command"], "dist");
        assert_eq!(a.json["manifest"]["flags"]["n"], "4");
        assert_eq!(a.json["manifest"]["mode"], "exact-rational");
        assert!(a.json["manifest"].get("wall_clock_seconds").is_none());
        let timed = m.timed(Duration::from_millis(1500));
        let b = Artifact::new("dist", &timed, serde_json::json!([1, 2]));
        assert_eq!(b.json["manifest"]["wall_clock_seconds"], 1.5);
        assert_eq!(b.json["result"][1], 2);
    }

    #[test]
    fn writes_selected_files() {
        let dir = std::env::temp_dir().join(format!("overlap-output-{}", std::process::id()));
        let a = Artifact::new("x", &RunManifest::new("count"), serde_json::json!({})).with_csv("n,count\n1,2\n".into());
        let emit = Emit {
            json: true,
            csv: true,
            markdown: true,
            out: Some(dir.clone()),
        };
        let paths = emit.write(&a).unwrap();
        assert_eq!(paths.len(), 2);
        assert_eq!(fs::read_to_string(dir.join("x.csv")).unwrap(), "n,count\n1,2\n");
        fs::remove_dir_all(dir).unwrap();
    }
}
