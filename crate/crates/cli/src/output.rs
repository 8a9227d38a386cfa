use crate::{RunConfig, TOOL, VERSION};
use anyhow::{Context, Result};
use hdisc_core::Q;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs;
use std::path::{Path, PathBuf};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Rational as `p/q`, or `p` when integral.
pub fn q(x: Q) -> String {
    x.to_string()
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct Header {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// Digest of the input file, or of the run parameters when there is none.
    pub input_sha256: String,
}

impl Header {
    pub fn new(cfg: &RunConfig, input: Option<&[u8]>) -> Header {
        let digest = match input {
            Some(bytes) => sha256_hex(bytes),
            None => sha256_hex(cfg.canonical().as_bytes()),
        };
        Header {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: cfg.command.name().into(),
            seed: cfg.seed,
            input_sha256: digest,
        }
    }

    fn line(&self) -> String {
        format!("{} {} command={} seed={} input_sha256={}", self.tool, self.version, self.command, self.seed, self.input_sha256)
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    header: &'a Header,
    body: &'a T,
}

/// Writes headed artifacts into one directory and a manifest of their digests.
pub struct Emitter {
    dir: PathBuf,
    header: Header,
    files: Vec<(String, String)>,
}

impl Emitter {
    pub fn new(dir: &Path, header: Header) -> Result<Emitter> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Emitter { dir: dir.to_path_buf(), header, files: Vec::new() })
    }

    pub fn header(&self) -> &Header {
        &self.header
    }

    fn write(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, &bytes).with_context(|| format!("writing {}", path.display()))?;
        self.files.push((name.to_string(), sha256_hex(&bytes)));
        Ok(())
    }

    pub fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<()> {
        let mut s = serde_json::to_string_pretty(&Document { header: &self.header, body })?;
        s.push('\n');
        self.write(name, s.into_bytes())
    }

    pub fn csv(&mut self, name: &str, columns: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut out = format!("# {}\n", self.header.line()).into_bytes();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(columns)?;
        for r in rows {
            w.write_record(r)?;
        }
        out.extend(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?);
        self.write(name, out)
    }

    /// Text with the header as comment lines.
    pub fn text(&mut self, name: &str, comment: &str, body: &str) -> Result<()> {
        let s = format!("{comment} {}\n{body}", self.header.line());
        self.write(name, s.into_bytes())
    }

    pub fn finish(mut self) -> Result<Vec<PathBuf>> {
        let listed: Vec<serde_json::Value> =
            self.files.iter().map(|(n, d)| serde_json::json!({ "file": n, "sha256": d })).collect();
        self.json("manifest.json", &listed)?;
        Ok(self.files.iter().map(|(n, _)| self.dir.join(n)).collect())
    }
}

/// Reads the `--input` file, failing with exit code 2 when absent.
pub fn read_input(cfg: &RunConfig) -> Result<(PathBuf, Vec<u8>)> {
    let path = cfg.input.clone().context("this command needs --input")?;
    let bytes = fs::read(&path).with_context(|| format!("reading {}", path.display()))?;
    Ok((path, bytes))
}

pub fn parse_json<T: serde::de::DeserializeOwned>(path: &Path, bytes: &[u8]) -> Result<T> {
    serde_json::from_slice(bytes).with_context(|| format!("{}: malformed instance", path.display()))
}
