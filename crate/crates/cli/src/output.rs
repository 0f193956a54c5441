//! Run directory handling and the `key=value` manifest.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use wade_core::io;
use wade_core::plot::{self, PlotSpec};
use wade_core::WadeError;

use crate::error::{CliError, CliResult};

pub const DEFAULT_OUT_ROOT: &str = "wade-runs";

pub struct RunDir {
    path: PathBuf,
    manifest: BTreeMap<String, String>,
    outputs: Vec<String>,
}

impl RunDir {
    /// `explicit` wins; otherwise `<out_root>/<command>` where `out_root`
    /// comes from `WADE_OUT_DIR` or defaults to `wade-runs`.
    pub fn create(
        command: &str,
        explicit: Option<&Path>,
        out_root: Option<&Path>,
    ) -> CliResult<Self> {
        let path = match (explicit, out_root) {
            (Some(p), _) => p.to_path_buf(),
            (None, Some(root)) => root.join(command),
            (None, None) => Path::new(DEFAULT_OUT_ROOT).join(command),
        };
        fs::create_dir_all(&path)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        let mut manifest = BTreeMap::new();
        manifest.insert("command".to_string(), command.to_string());
        Ok(Self {
            path,
            manifest,
            outputs: Vec::new(),
        })
    }

    pub fn record(&mut self, key: &str, value: impl ToString) {
        self.manifest.insert(key.to_string(), value.to_string());
    }

    fn open(&mut self, name: &str) -> CliResult<BufWriter<File>> {
        let path = self.path.join(name);
        let file = File::create(&path)
            .map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        self.outputs.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    pub fn write_with(
        &mut self,
        name: &str,
        f: impl FnOnce(&mut BufWriter<File>) -> Result<(), WadeError>,
    ) -> CliResult<()> {
        let mut sink = self.open(name)?;
        f(&mut sink).map_err(|e| CliError::Output(format!("{name}: {e}")))?;
        sink.flush()
            .map_err(|e| CliError::Output(format!("{name}: {e}")))
    }

    pub fn write_plot(&mut self, name: &str, spec: &PlotSpec) -> CliResult<()> {
        self.write_with(name, |sink| plot::write_svg_plot(spec, sink))
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> CliResult<()> {
        self.write_with(name, |sink| {
            sink.write_all(text.as_bytes()).map_err(WadeError::from)
        })
    }

    pub fn write_columns(&mut self, name: &str, columns: &[(&str, &[f64])]) -> CliResult<()> {
        self.write_with(name, |sink| io::write_columns_csv(columns, sink))
    }

    /// Writes `manifest.txt`: sorted `key=value` lines, then the output files.
    pub fn finish(mut self) -> CliResult<PathBuf> {
        let outputs = self.outputs.join(",");
        self.manifest.insert("outputs".to_string(), outputs);
        let mut text = String::new();
        for (k, v) in &self.manifest {
            text.push_str(k);
            text.push('=');
            text.push_str(&v.replace('\n', " "));
            text.push('\n');
        }
        let path = self.path.join("manifest.txt");
        fs::write(&path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))?;
        Ok(self.path)
    }
}
