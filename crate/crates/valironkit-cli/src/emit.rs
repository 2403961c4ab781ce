//! Artifact emission: every output embeds the tool version, a hash of the
//! resolved configuration and the rng seed, and identical configurations
//! produce byte-identical files.

use serde_json::{json, Value};
use std::fs;
use std::path::{Path, PathBuf};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// FNV-1a over the canonical config string.
pub fn config_hash(canonical: &str) -> String {
    let mut h: u64 = 0xcbf29ce484222325;
    for b in canonical.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    format!("{h:016x}")
}

#[derive(Debug, Clone)]
pub struct Meta {
    pub hash: String,
    pub rng_seed: u64,
}

impl Meta {
    pub fn new(canonical: &str, rng_seed: u64) -> Meta {
        Meta {
            hash: config_hash(canonical),
            rng_seed,
        }
    }

    pub fn json(&self) -> Value {
        json!({
            "version": VERSION,
            "config_hash": self.hash,
            "rng_seed": self.rng_seed,
        })
    }

    pub fn csv_header(&self) -> String {
        format!(
            "# valironkit {VERSION} config_hash={} rng_seed={}\n",
            self.hash, self.rng_seed
        )
    }
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    Ok(path)
}

pub fn write_json(dir: &Path, name: &str, value: &Value) -> Result<PathBuf, String> {
    let mut text = serde_json::to_string_pretty(value).expect("json serialization");
    text.push('\n');
    write_file(dir, name, &text)
}

/// Complex as a JSON object.
pub fn cjson(z: num_complex::Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

/// Runs `f` over the items with at most `threads` worker threads, returning
/// results in input order regardless of scheduling.
pub fn map_indexed<T: Send + Sync, R: Send>(
    items: Vec<T>,
    threads: usize,
    f: impl Fn(&T) -> R + Sync,
) -> Vec<R> {
    if threads <= 1 || items.len() <= 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    let mut out: Vec<Option<R>> = Vec::with_capacity(items.len());
    out.resize_with(items.len(), || None);
    let slots: Vec<(usize, &T)> = items.iter().enumerate().collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for part in slots.chunks(chunk) {
            let fr = &f;
            handles.push(scope.spawn(move || {
                part.iter()
                    .map(|(i, t)| (*i, fr(t)))
                    .collect::<Vec<(usize, R)>>()
            }));
        }
        for h in handles {
            for (i, r) in h.join().expect("worker thread") {
                out[i] = Some(r);
            }
        }
    });
    out.into_iter()
        .map(|r| r.expect("all slots filled"))
        .collect()
}

/// Worker-thread cap: VALIRONKIT_THREADS, default 1.
pub fn thread_cap() -> usize {
    std::env::var("VALIRONKIT_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|n| *n >= 1)
        .unwrap_or(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("abc"), config_hash("abc"));
        assert_ne!(config_hash("abc"), config_hash("abd"));
    }

    #[test]
    fn parallel_map_preserves_order() {
        let items: Vec<i64> = (0..100).collect();
        let seq = map_indexed(items.clone(), 1, |x| x * x);
        let par = map_indexed(items, 4, |x| x * x);
        assert_eq!(seq, par);
    }
}
