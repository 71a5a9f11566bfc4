//! Output files. CSV files start with one `#` line holding the metadata as
//! JSON; JSON files wrap their payload as `{"metadata": …, "report": …}`.

use crate::config::RunConfig;
use crate::failure::Failure;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub program: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config_hash: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
}

pub struct Out {
    dir: PathBuf,
    meta: Metadata,
}

impl Out {
    pub fn new(dir: &Path, command: &str, cfg: &RunConfig) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
        let meta = Metadata {
            program: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config_hash: cfg.hash(),
            seed: cfg.seed,
            tolerances: BTreeMap::new(),
        };
        Ok(Self { dir: dir.to_path_buf(), meta })
    }

    pub fn tolerance(&mut self, name: &str, value: f64) {
        self.meta.tolerances.insert(name.into(), value);
    }

    pub fn csv<I>(&mut self, name: &str, header: &[&str], rows: I) -> Result<(), Failure>
    where
        I: IntoIterator<Item = Vec<f64>>,
    {
        let path = self.dir.join(name);
        let mut file = fs::File::create(&path)?;
        writeln!(file, "# {}", serde_json::to_string(&self.meta)?)?;
        let mut w = csv::Writer::from_writer(file);
        w.write_record(header)?;
        for row in rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, report: &T) -> Result<(), Failure> {
        #[derive(Serialize)]
        struct Wrapped<'a, T> {
            metadata: &'a Metadata,
            report: &'a T,
        }
        let path = self.dir.join(name);
        let text = serde_json::to_string_pretty(&Wrapped { metadata: &self.meta, report })?;
        fs::write(&path, text + "\n")?;
        Ok(())
    }
}
