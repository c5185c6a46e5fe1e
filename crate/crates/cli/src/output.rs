//! Result tables, atomic file writes and the run manifest.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use sparsesense::evaluation::{Cell, ExperimentResult, Regime};

use crate::error::{CliError, CliResult};

pub const SWEEP_HEADER: &str = "r,p,basis,mean_error,std_error,trials";
pub const MF_HEADER: &str = "p_cheap,p_exp,mean_error,std_error,trials";
pub const REPORT_HEADER: &str = "b,noise_regime,sensor_regime,classification";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes through a sibling temporary file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let name = path
        .file_name()
        .ok_or_else(|| CliError::usage(format!("output path {} has no file name", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let ctx = || format!("writing {}", path.display());
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(CliError::io(ctx(), e));
    }
    Ok(())
}

pub fn sweep_csv(result: &ExperimentResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for c in &result.cells {
        let Cell::Modes { r, p } = c.cell else { continue };
        let _ = writeln!(
            out,
            "{r},{p},{},{},{},{}",
            result.basis.as_str(),
            num(c.stats.mean),
            num(c.stats.standard_error()),
            c.stats.trials
        );
    }
    out
}

/// Tags copied into the mf footer for later aggregation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegimeTags {
    pub b: Option<String>,
    pub noise_regime: Option<String>,
    pub sensor_regime: Option<String>,
}

pub fn mf_csv(result: &ExperimentResult, band: f64, tags: &RegimeTags) -> String {
    let mut out = String::from(MF_HEADER);
    out.push('\n');
    for c in &result.cells {
        let Cell::Composition(k) = c.cell else { continue };
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            k.p_cheap,
            k.p_exp,
            num(c.stats.mean),
            num(c.stats.standard_error()),
            c.stats.trials
        );
    }
    let regime = result.regime.map(Regime::as_str).unwrap_or("inconclusive");
    let _ = writeln!(out, "# regime={regime}");
    let _ = writeln!(out, "# band={}", num(band));
    for (key, val) in [
        ("b", &tags.b),
        ("noise_regime", &tags.noise_regime),
        ("sensor_regime", &tags.sensor_regime),
    ] {
        if let Some(v) = val {
            let _ = writeln!(out, "# {key}={v}");
        }
    }
    out
}

/// One parsed mf result file.
#[derive(Debug, Clone, PartialEq)]
pub struct MfTable {
    pub rows: Vec<MfRow>,
    pub footer: Vec<(String, String)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MfRow {
    pub p_cheap: usize,
    pub p_exp: usize,
    pub mean_error: f64,
    pub std_error: f64,
    pub trials: usize,
}

impl MfTable {
    pub fn footer_value(&self, key: &str) -> Option<&str> {
        self.footer.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }
}

pub fn parse_mf_csv(text: &str, origin: &str) -> CliResult<MfTable> {
    let bad = |line: usize, msg: String| CliError::data(format!("{origin}:{line}: {msg}"));
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == MF_HEADER => {}
        Some((_, h)) => return Err(bad(1, format!("expected header `{MF_HEADER}`, found `{h}`"))),
        None => return Err(bad(1, "empty file".into())),
    }
    let mut rows = Vec::new();
    let mut footer = Vec::new();
    for (i, raw) in lines {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(meta) = line.strip_prefix('#') {
            let (k, v) = meta
                .trim()
                .split_once('=')
                .ok_or_else(|| bad(line_no, format!("malformed metadata `{line}`")))?;
            footer.push((k.trim().to_string(), v.trim().to_string()));
            continue;
        }
        if !footer.is_empty() {
            return Err(bad(line_no, "data row after metadata".into()));
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(bad(line_no, format!("expected 5 fields, found {}", fields.len())));
        }
        let int = |s: &str| s.trim().parse::<usize>().map_err(|e| bad(line_no, format!("`{s}`: {e}")));
        let float = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(line_no, format!("`{s}`: {e}")));
        rows.push(MfRow {
            p_cheap: int(fields[0])?,
            p_exp: int(fields[1])?,
            mean_error: float(fields[2])?,
            std_error: float(fields[3])?,
            trials: int(fields[4])?,
        });
    }
    Ok(MfTable { rows, footer })
}

/// Provenance record listing every file a command wrote.
#[derive(Debug, Clone)]
pub struct RunManifest {
    pub command: String,
    pub version: &'static str,
    pub seed: u64,
    pub started: String,
    pub config: Vec<(String, String)>,
    pub outputs: Vec<(PathBuf, String)>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION"),
            seed,
            started: timestamp(),
            config: Vec::new(),
            outputs: Vec::new(),
        }
    }

    pub fn echo(&mut self, key: impl Into<String>, value: impl ToString) {
        self.config.push((key.into(), value.to_string()));
    }

    /// Atomically writes `bytes` and records the digest.
    pub fn emit(&mut self, path: &Path, bytes: &[u8]) -> CliResult<()> {
        write_atomic(path, bytes)?;
        self.outputs.push((path.to_path_buf(), hex::encode(Sha256::digest(bytes))));
        Ok(())
    }

    pub fn render(&self, finished: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "tool = sparsesense {}", self.version);
        let _ = writeln!(out, "command = {}", self.command);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "started = {}", self.started);
        let _ = writeln!(out, "finished = {finished}");
        out.push_str("\n[config]\n");
        for (k, v) in &self.config {
            let _ = writeln!(out, "{k} = {v}");
        }
        out.push_str("\n[outputs]\n");
        for (p, digest) in &self.outputs {
            let _ = writeln!(out, "sha256 {digest}  {}", p.display());
        }
        out
    }

    pub fn finish(self, path: &Path) -> CliResult<()> {
        let text = self.render(&timestamp());
        write_atomic(path, text.as_bytes())
    }
}

fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.5e-300, 123456.789, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn mf_table_parse() {
        let text = format!("{MF_HEADER}\n4,0,1e-1,1e-3,10\n0,2,2e-1,1e-3,10\n# regime=cheap\n# b=-0.6\n");
        let t = parse_mf_csv(&text, "x.csv").unwrap();
        assert_eq!(t.rows.len(), 2);
        assert_eq!(t.footer_value("b"), Some("-0.6"));

        let err = parse_mf_csv(&format!("{MF_HEADER}\n4,0,oops,1,1\n"), "x.csv").unwrap_err();
        assert!(err.message.contains("x.csv:2"), "{}", err.message);
        assert!(parse_mf_csv("a,b\n", "x.csv").is_err());
        assert!(parse_mf_csv(&format!("{MF_HEADER}\n# regime=cheap\n1,1,1,1,1\n"), "x").is_err());
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("f.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
        let missing = dir.path().join("no/such/dir/f.txt");
        assert_eq!(write_atomic(&missing, b"x").unwrap_err().exit_code(), 2);
    }
}
