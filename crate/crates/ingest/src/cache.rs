//! On-disk cache: one long-layout CSV per key plus a JSON sidecar, laid out as
//! `<root>/<source>/<country>/<indicator>/<start>-<end>.csv` and `.meta.json`.
//! Both files are written to a temporary file and renamed into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use vecmkit_core::series::Series;

use crate::csv_io::{read_csv, write_csv_to, CsvLayout};
use crate::IngestError;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CacheKey {
    pub source: String,
    pub country: String,
    pub indicator: String,
    pub start: i32,
    pub end: i32,
}

impl CacheKey {
    pub fn new(source: &str, country: &str, indicator: &str, start: i32, end: i32) -> Self {
        CacheKey {
            source: source.to_string(),
            country: country.to_string(),
            indicator: indicator.to_string(),
            start,
            end,
        }
    }

    fn directory(&self, root: &Path) -> PathBuf {
        root.join(sanitize(&self.source))
            .join(sanitize(&self.country))
            .join(sanitize(&self.indicator))
    }

    fn stem(&self) -> String {
        format!("{}-{}", self.start, self.end)
    }
}

impl std::fmt::Display for CacheKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}/{} {}-{}", self.source, self.country, self.indicator, self.start, self.end)
    }
}

// Path components must not escape the cache root.
fn sanitize(part: &str) -> String {
    let cleaned: String = part
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect();
    if cleaned.chars().all(|c| c == '.') {
        "_".repeat(cleaned.len().max(1))
    } else {
        cleaned
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub key: CacheKey,
    pub payload: Series,
    /// Seconds since the Unix epoch.
    pub fetched_at: u64,
}

impl CacheEntry {
    pub fn now(key: CacheKey, payload: Series) -> Self {
        let fetched_at = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        CacheEntry {
            key,
            payload,
            fetched_at,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Meta {
    #[serde(flatten)]
    key: CacheKey,
    series_name: String,
    observations: usize,
    fetched_at: u64,
}

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Cache { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn data_path(&self, key: &CacheKey) -> PathBuf {
        key.directory(&self.root).join(format!("{}.csv", key.stem()))
    }

    pub fn meta_path(&self, key: &CacheKey) -> PathBuf {
        key.directory(&self.root).join(format!("{}.meta.json", key.stem()))
    }

    /// Returns `None` when either file is missing; a present but unreadable
    /// entry is an error rather than a silent refetch.
    pub fn load(&self, key: &CacheKey) -> Result<Option<CacheEntry>, IngestError> {
        let data = self.data_path(key);
        let meta_path = self.meta_path(key);
        if !data.exists() || !meta_path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&meta_path).map_err(|e| IngestError::io(&meta_path, e))?;
        let meta: Meta = serde_json::from_str(&text)
            .map_err(|e| IngestError::SchemaError(format!("{}: {e}", meta_path.display())))?;
        if meta.key != *key {
            return Err(IngestError::SchemaError(format!(
                "{}: sidecar describes {} not {key}",
                meta_path.display(),
                meta.key
            )));
        }
        let dataset = read_csv(&data, &CsvLayout::long())?;
        let payload = dataset.into_series().remove(0);
        Ok(Some(CacheEntry {
            key: key.clone(),
            payload,
            fetched_at: meta.fetched_at,
        }))
    }

    /// Data first, sidecar second: a reader only trusts an entry once the
    /// sidecar exists, so a crash between the renames leaves a miss.
    pub fn store(&self, entry: &CacheEntry) -> Result<(), IngestError> {
        let dir = entry.key.directory(&self.root);
        fs::create_dir_all(&dir).map_err(|e| IngestError::io(&dir, e))?;
        let dataset = vecmkit_core::series::Dataset::new(vec![entry.payload.clone()])?;
        let mut csv_bytes = Vec::new();
        write_csv_to(&dataset, &mut csv_bytes, &CsvLayout::long())?;
        let meta = Meta {
            key: entry.key.clone(),
            series_name: entry.payload.name().to_string(),
            observations: entry.payload.len(),
            fetched_at: entry.fetched_at,
        };
        let mut meta_bytes = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
        meta_bytes.push(b'\n');
        atomic_write(&dir, &self.data_path(&entry.key), &csv_bytes)?;
        atomic_write(&dir, &self.meta_path(&entry.key), &meta_bytes)
    }
}

fn atomic_write(dir: &Path, target: &Path, bytes: &[u8]) -> Result<(), IngestError> {
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| IngestError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| IngestError::io(tmp.path(), e))?;
    tmp.as_file().sync_all().map_err(|e| IngestError::io(tmp.path(), e))?;
    tmp.persist(target).map_err(|e| IngestError::io(target, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key() -> CacheKey {
        CacheKey::new("wdi", "BGD", "NY.GDP.MKTP.CD", 2004, 2006)
    }

    #[test]
    fn layout_matches_documented_paths() {
        let cache = Cache::new("/tmp/c");
        assert_eq!(cache.data_path(&key()), Path::new("/tmp/c/wdi/BGD/NY.GDP.MKTP.CD/2004-2006.csv"));
        assert_eq!(cache.meta_path(&key()), Path::new("/tmp/c/wdi/BGD/NY.GDP.MKTP.CD/2004-2006.meta.json"));
    }

    #[test]
    fn components_cannot_escape_root() {
        for (country, indicator) in [("../..", "a/b"), ("..", ""), (".", "x")] {
            let k = CacheKey::new("wdi", country, indicator, 1, 2);
            let p = Cache::new("/tmp/c").data_path(&k);
            assert!(p.starts_with("/tmp/c/wdi"));
            assert_eq!(p.components().count(), 7, "{}", p.display());
            assert!(p.components().all(|c| !matches!(c, std::path::Component::ParentDir | std::path::Component::CurDir)));
        }
    }

    #[test]
    fn store_then_load_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        assert!(cache.load(&key()).unwrap().is_none());
        let series = Series::new("NY.GDP.MKTP.CD", 2004, vec![65_108_544_250.0, 0.1 + 0.2, 1.0e-17]).unwrap();
        let entry = CacheEntry {
            key: key(),
            payload: series,
            fetched_at: 1_700_000_000,
        };
        cache.store(&entry).unwrap();
        assert_eq!(cache.load(&key()).unwrap(), Some(entry));
    }

    #[test]
    fn missing_sidecar_is_a_miss() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let entry = CacheEntry::now(key(), Series::new("x", 2004, vec![1.0, 2.0, 3.0]).unwrap());
        cache.store(&entry).unwrap();
        fs::remove_file(cache.meta_path(&key())).unwrap();
        assert!(cache.load(&key()).unwrap().is_none());
    }
}
