//! CSV formatting and run manifests.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};

/// Fixed 12-significant-digit scientific notation.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// Accumulates CSV text in memory and writes it in one go.
pub struct Csv {
    preamble: String,
    text: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Csv {
            preamble: String::new(),
            text,
        }
    }

    /// Adds a `# ...` line; comments precede the header.
    pub fn comment(&mut self, line: &str) {
        let _ = writeln!(self.preamble, "# {line}");
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) {
        let line: Vec<&str> = fields.iter().map(AsRef::as_ref).collect();
        self.text.push_str(&line.join(","));
        self.text.push('\n');
    }

    pub fn render(&self) -> String {
        format!("{}{}", self.preamble, self.text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_bytes(path, self.render().as_bytes())
    }
}

pub fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// `path` with `suffix` appended to its file name.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn unix_seconds(t: SystemTime) -> String {
    let d = t.duration_since(UNIX_EPOCH).unwrap_or_default();
    format!("{}.{:03}", d.as_secs(), d.subsec_millis())
}

/// Key-value record of a run, written next to its primary output as
/// `<out>.manifest`.
pub struct Manifest {
    command: &'static str,
    started: SystemTime,
    entries: Vec<(String, String)>,
    outputs: Vec<PathBuf>,
}

impl Manifest {
    pub fn start(command: &'static str) -> Self {
        Manifest {
            command,
            started: SystemTime::now(),
            entries: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn output(&mut self, path: &Path) {
        self.outputs.push(path.to_path_buf());
    }

    pub fn render(&self, finished: SystemTime) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tool=hmimo");
        let _ = writeln!(s, "version={}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(s, "command={}", self.command);
        for (k, v) in &self.entries {
            let _ = writeln!(s, "{k}={v}");
        }
        let _ = writeln!(s, "threads={}", rayon::current_num_threads());
        let outputs: Vec<String> = self.outputs.iter().map(|p| p.display().to_string()).collect();
        let _ = writeln!(s, "outputs={}", outputs.join(","));
        let _ = writeln!(s, "started_unix={}", unix_seconds(self.started));
        let _ = writeln!(s, "finished_unix={}", unix_seconds(finished));
        s
    }

    /// Writes `<primary>.manifest` and returns its path.
    pub fn finish(&self, primary: &Path) -> Result<PathBuf> {
        let path = sibling(primary, ".manifest");
        write_bytes(&path, self.render(SystemTime::now()).as_bytes())?;
        Ok(path)
    }
}
