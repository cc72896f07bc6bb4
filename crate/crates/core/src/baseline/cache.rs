use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::Result;

/// Results stored as JSON files named by the SHA-256 of the query.
#[derive(Debug, Clone)]
pub struct ResultCache {
    dir: PathBuf,
}

impl ResultCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hex digest of `kind` plus the canonical JSON of `key`.
    pub fn key<K: Serialize>(kind: &str, key: &K) -> String {
        let mut h = Sha256::new();
        h.update(kind.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(key).expect("serializable key"));
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get<V: DeserializeOwned>(&self, key: &str) -> Option<V> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put<V: Serialize>(&self, key: &str, value: &V) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let text = serde_json::to_string_pretty(value).expect("serializable value");
        fs::write(self.path(key), text)?;
        Ok(())
    }

    /// Cached value, or `compute` stored for next time.
    pub fn get_or_compute<V, F>(&self, key: &str, compute: F) -> Result<V>
    where
        V: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<V>,
    {
        if let Some(v) = self.get(key) {
            return Ok(v);
        }
        let v = compute()?;
        self.put(key, &v)?;
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResultCache::new(dir.path().join("c"));
        let key = ResultCache::key("steiner", &(3, [1, 2]));
        assert_eq!(key.len(), 64);
        assert_ne!(key, ResultCache::key("ompc", &(3, [1, 2])));
        let mut calls = 0;
        let a: f64 = cache.get_or_compute(&key, || { calls += 1; Ok(5.0) }).unwrap();
        let b: f64 = cache.get_or_compute(&key, || { calls += 1; Ok(6.0) }).unwrap();
        assert_eq!((a, b, calls), (5.0, 5.0, 1));
    }
}
