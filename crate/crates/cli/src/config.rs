//! `--config FILE` support.
//!
//! The file holds `key = value` lines (`#` starts a comment). Each entry
//! becomes `--key value` inserted right after the subcommand name, ahead of
//! the real command-line flags, so that flags given on the command line win.
//! `key = true` becomes a bare `--key`; `key = false` is dropped.

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};

const SUBCOMMANDS: [&str; 5] = ["acf", "nmse", "spectrum", "gen", "calibrate"];

/// Parses config text into flag tokens.
pub fn flags_from_text(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = match line.split_once('=') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => bail!("config line {}: expected `key = value`, got `{raw}`", no + 1),
        };
        let key = key.trim_start_matches("--");
        if key.is_empty() || key.contains(char::is_whitespace) {
            bail!("config line {}: invalid key `{key}`", no + 1);
        }
        if key == "config" {
            bail!("config line {}: nested config files are not supported", no + 1);
        }
        match value {
            "true" => out.push(format!("--{key}")),
            "false" => {}
            _ => out.push(format!("--{key}={value}")),
        }
    }
    Ok(out)
}

fn load(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config file {}", path.display()))?;
    flags_from_text(&text).with_context(|| format!("in config file {}", path.display()))
}

/// Returns `argv` with the flags of any `--config` file spliced in after
/// the subcommand.
pub fn expand(argv: &[OsString]) -> Result<Vec<OsString>> {
    let mut config = None;
    for (i, arg) in argv.iter().enumerate() {
        let Some(s) = arg.to_str() else { continue };
        if s == "--config" {
            config = argv.get(i + 1).map(|p| Path::new(p).to_path_buf());
        } else if let Some(p) = s.strip_prefix("--config=") {
            config = Some(Path::new(p).to_path_buf());
        }
    }
    let Some(path) = config else {
        return Ok(argv.to_vec());
    };
    let flags = load(&path)?;
    let at = argv
        .iter()
        .position(|a| a.to_str().is_some_and(|s| SUBCOMMANDS.contains(&s)))
        .map(|i| i + 1)
        .unwrap_or(argv.len());
    let mut out = argv[..at].to_vec();
    out.extend(flags.into_iter().map(OsString::from));
    out.extend_from_slice(&argv[at..]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_booleans_and_comments() {
        let flags = flags_from_text("# sweep\ntrials = 50\nplot = true\nno-renormalize = false\nsnr = -10:5:30  # grid\n").unwrap();
        assert_eq!(flags, ["--trials=50", "--plot", "--snr=-10:5:30"]);
        assert!(flags_from_text("trials 50").is_err());
        assert!(flags_from_text("config = other").is_err());
    }

    #[test]
    fn splices_after_subcommand() {
        let dir = std::env::temp_dir().join(format!("hmimo-config-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("c.conf");
        std::fs::write(&path, "seed = 7\n").unwrap();
        let argv: Vec<OsString> = ["hmimo", "--config", path.to_str().unwrap(), "acf", "--seed", "9"]
            .iter()
            .map(OsString::from)
            .collect();
        let out = expand(&argv).unwrap();
        let out: Vec<&str> = out.iter().map(|s| s.to_str().unwrap()).collect();
        assert_eq!(&out[3..], ["acf", "--seed=7", "--seed", "9"]);
    }
}
