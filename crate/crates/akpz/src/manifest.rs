//! Run manifests. A manifest is the effective configuration of a run (after
//! command-line overrides) plus a `[manifest]` section naming the
//! subcommand, the code version and the files written, so feeding it back
//! to `akpz rerun` reproduces the CSV payloads byte for byte.

use std::path::Path;

use toml::{Table, Value};

use crate::config::Doc;
use crate::error::CliError;
use crate::io::write_file;

pub const MANIFEST_FILE: &str = "manifest.toml";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct RunManifest {
    pub subcommand: String,
    pub version: String,
    pub seed: Option<u64>,
    pub outputs: Vec<String>,
    /// Every parameter the run read, as a configuration document.
    pub config: Doc,
}

impl RunManifest {
    pub fn to_text(&self) -> String {
        let mut doc = self.config.clone();
        let mut m = Table::new();
        m.insert("subcommand".into(), Value::String(self.subcommand.clone()));
        m.insert("version".into(), Value::String(self.version.clone()));
        if let Some(s) = self.seed {
            m.insert("seed".into(), Value::Integer(s as i64));
        }
        m.insert(
            "outputs".into(),
            Value::Array(self.outputs.iter().cloned().map(Value::String).collect()),
        );
        doc.table.insert("manifest".into(), Value::Table(m));
        doc.to_text()
    }

    pub fn from_doc(mut doc: Doc) -> Result<Self, CliError> {
        let subcommand = doc.str("manifest.subcommand")?.to_string();
        let version = doc.str("manifest.version")?.to_string();
        let seed = if doc.has("manifest.seed") { Some(doc.u64("manifest.seed")?) } else { None };
        let outputs = doc
            .get("manifest.outputs")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(|v| v.as_str().map(String::from)).collect())
            .unwrap_or_default();
        doc.table.remove("manifest");
        Ok(RunManifest {
            subcommand,
            version,
            seed,
            outputs,
            config: doc,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        write_file(&dir.join(MANIFEST_FILE), self.to_text())
    }
}
