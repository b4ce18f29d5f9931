//! On-disk cache of exact representations.
//!
//! Each entry is `VIRASORO-CACHE v<schema> sha256=<digest>`, a `key` line,
//! then the serialized representation. The digest covers everything after
//! the first line. Entries with another schema are refused rather than
//! migrated; digest mismatches are treated as corruption.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sha2::{Digest, Sha256};
use virasoro_core::format::{read_rep, write_rep, SCHEMA_VERSION};
use virasoro_core::scalar::format_rational;
use virasoro_core::{Rational, RepOptions, TruncatedRep};

const MAGIC: &str = "VIRASORO-CACHE";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CacheStatus {
    Disabled,
    Hit,
    Miss,
}

impl CacheStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Disabled => "disabled",
            Self::Hit => "hit",
            Self::Miss => "miss",
        }
    }
}

pub fn cache_key(c: &Rational, h: &Rational, n: usize, opts: &RepOptions) -> String {
    format!(
        "schema={SCHEMA_VERSION} c={} h={} N={n} cocycle={} indefinite={}",
        format_rational(c),
        format_rational(h),
        opts.cocycle_denominator,
        opts.allow_indefinite
    )
}

pub fn entry_path(dir: &Path, key: &str) -> PathBuf {
    let digest = hex::encode(Sha256::digest(key.as_bytes()));
    dir.join(format!("rep-{}.txt", &digest[..20]))
}

fn digest(body: &str) -> String {
    hex::encode(Sha256::digest(body.as_bytes()))
}

pub fn store(dir: &Path, key: &str, rep: &TruncatedRep<Rational>) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating cache directory {}", dir.display()))?;
    let body = format!("key {key}\n{}", write_rep(rep));
    let text = format!("{MAGIC} v{SCHEMA_VERSION} sha256={}\n{body}", digest(&body));
    let path = entry_path(dir, key);
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, &path).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// `Ok(None)` when no entry exists; an error for stale or corrupt entries.
pub fn load(dir: &Path, key: &str) -> Result<Option<TruncatedRep<Rational>>> {
    let path = entry_path(dir, key);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).with_context(|| format!("reading cache entry {}", path.display()))?;
    let (header, body) = text.split_once('\n').unwrap_or((&text, ""));
    let mut parts = header.split_whitespace();
    if parts.next() != Some(MAGIC) {
        bail!("corrupt cache entry {}: bad magic", path.display());
    }
    let version = parts.next().and_then(|v| v.strip_prefix('v')).and_then(|v| v.parse::<u32>().ok());
    match version {
        Some(v) if v == SCHEMA_VERSION => {}
        Some(v) => bail!(
            "stale cache entry {} (schema v{v}, expected v{SCHEMA_VERSION}); delete it to rebuild",
            path.display()
        ),
        None => bail!("corrupt cache entry {}: bad schema field", path.display()),
    }
    let Some(expected) = parts.next().and_then(|d| d.strip_prefix("sha256=")) else {
        bail!("corrupt cache entry {}: missing digest", path.display());
    };
    if digest(body) != expected {
        bail!("corrupt cache entry {}: digest mismatch", path.display());
    }
    let (key_line, payload) = body.split_once('\n').unwrap_or((body, ""));
    if key_line.strip_prefix("key ") != Some(key) {
        bail!("cache entry {} belongs to another key", path.display());
    }
    // Flattened so a payload parse error is reported as corruption, not as bad user input.
    match read_rep(payload) {
        Ok(rep) => Ok(Some(rep)),
        Err(e) => bail!("corrupt cache entry {}: {e}", path.display()),
    }
}
