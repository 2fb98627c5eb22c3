use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use serde::Serialize;

use crate::config::RunConfig;
use crate::CliResult;

#[derive(Serialize)]
struct Sidecar<'a> {
    tool: &'static str,
    version: &'static str,
    output: &'a str,
    config: &'a RunConfig,
}

/// Output directory; every file written through it gets a `<name>.meta.json`
/// sidecar.
pub struct OutDir<'a> {
    dir: PathBuf,
    config: &'a RunConfig,
}

impl<'a> OutDir<'a> {
    pub fn create(config: &'a RunConfig) -> CliResult<Self> {
        fs::create_dir_all(&config.out)?;
        Ok(OutDir { dir: config.out.clone(), config })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn sidecar(&self, name: &str) -> CliResult<()> {
        let body = serde_json::to_string_pretty(&Sidecar {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            output: name,
            config: self.config,
        })?;
        fs::write(self.dir.join(format!("{name}.meta.json")), body + "\n")?;
        Ok(())
    }

    pub fn write_text(&self, name: &str, body: &str) -> CliResult<PathBuf> {
        let path = self.path(name);
        fs::write(&path, body)?;
        self.sidecar(name)?;
        Ok(path)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<PathBuf> {
        self.write_text(name, &(serde_json::to_string_pretty(value)? + "\n"))
    }

    /// Writes a CSV with `header` and the rows produced by `fill`.
    pub fn write_csv<F>(&self, name: &str, header: &[String], fill: F) -> CliResult<PathBuf>
    where
        F: FnOnce(&mut csv::Writer<BufWriter<File>>) -> CliResult<()>,
    {
        let path = self.path(name);
        let mut w = csv::Writer::from_writer(BufWriter::new(File::create(&path)?));
        w.write_record(header)?;
        fill(&mut w)?;
        w.into_inner().map_err(|e| e.into_error())?.flush()?;
        self.sidecar(name)?;
        Ok(path)
    }
}

pub fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

/// Fixed-precision float cell; empty for `None`.
pub fn num(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.10}")).unwrap_or_default()
}
