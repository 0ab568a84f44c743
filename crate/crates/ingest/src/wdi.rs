//! World Bank API v2 client for annual WDI indicators.

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use vecmkit_core::series::Series;

use crate::cache::{Cache, CacheEntry, CacheKey};
use crate::IngestError;

pub const WDI_BASE_URL: &str = "https://api.worldbank.org/v2";
pub const CACHE_SOURCE: &str = "wdi";
pub const CACHE_DIR_ENV: &str = "VECMKIT_CACHE_DIR";
const PER_PAGE: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WdiQuery {
    pub country_iso3: String,
    pub indicator_code: String,
    pub start: i32,
    pub end: i32,
}

impl WdiQuery {
    pub fn new(country_iso3: &str, indicator_code: &str, start: i32, end: i32) -> Self {
        WdiQuery {
            country_iso3: country_iso3.to_string(),
            indicator_code: indicator_code.to_string(),
            start,
            end,
        }
    }

    pub fn validate(&self) -> Result<(), IngestError> {
        if self.indicator_code.trim().is_empty() {
            return Err(IngestError::InvalidQuery("empty indicator code".into()));
        }
        if self.country_iso3.trim().is_empty() {
            return Err(IngestError::InvalidQuery("empty country code".into()));
        }
        if self.start > self.end {
            return Err(IngestError::InvalidQuery(format!(
                "start year {} after end year {}",
                self.start, self.end
            )));
        }
        Ok(())
    }

    pub fn cache_key(&self) -> CacheKey {
        CacheKey::new(CACHE_SOURCE, &self.country_iso3, &self.indicator_code, self.start, self.end)
    }

    pub fn url(&self, base_url: &str, page: usize) -> String {
        let mut url = format!(
            "{}/country/{}/indicator/{}?format=json&per_page={PER_PAGE}&date={}:{}",
            base_url.trim_end_matches('/'),
            self.country_iso3,
            self.indicator_code,
            self.start,
            self.end
        );
        if page > 1 {
            url.push_str(&format!("&page={page}"));
        }
        url
    }
}

impl std::fmt::Display for WdiQuery {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} {} {}-{}", self.country_iso3, self.indicator_code, self.start, self.end)
    }
}

/// One page of a WDI response: `[metadata, observations]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WdiPage {
    pub page: usize,
    pub pages: usize,
    pub observations: Vec<(i32, Option<f64>)>,
}

fn count_field(meta: &Value, field: &str) -> Result<usize, IngestError> {
    match meta.get(field) {
        Some(Value::Number(n)) => n.as_u64().map(|v| v as usize),
        Some(Value::String(s)) => s.parse().ok(),
        _ => None,
    }
    .ok_or_else(|| IngestError::SchemaError(format!("metadata field `{field}` missing or not a count")))
}

pub fn parse_wdi_page(body: &str) -> Result<WdiPage, IngestError> {
    let root: Value = serde_json::from_str(body).map_err(|e| IngestError::SchemaError(format!("invalid JSON: {e}")))?;
    let parts = root
        .as_array()
        .ok_or_else(|| IngestError::SchemaError("top level is not an array".into()))?;
    let meta = parts
        .first()
        .ok_or_else(|| IngestError::SchemaError("empty top-level array".into()))?;
    if let Some(messages) = meta.get("message") {
        let text = messages
            .as_array()
            .map(|ms| {
                ms.iter()
                    .filter_map(|m| m.get("value").and_then(Value::as_str))
                    .collect::<Vec<_>>()
                    .join("; ")
            })
            .unwrap_or_default();
        return Err(IngestError::SchemaError(format!("API error: {text}")));
    }
    if parts.len() != 2 {
        return Err(IngestError::SchemaError(format!(
            "expected [metadata, observations], got {} elements",
            parts.len()
        )));
    }
    let page = count_field(meta, "page")?;
    let pages = count_field(meta, "pages")?;
    let rows = match &parts[1] {
        Value::Null => &[][..],
        Value::Array(rows) => rows.as_slice(),
        _ => return Err(IngestError::SchemaError("observations are not an array".into())),
    };
    let observations = rows
        .iter()
        .map(|row| {
            let date = row
                .get("date")
                .and_then(Value::as_str)
                .ok_or_else(|| IngestError::SchemaError("observation without `date`".into()))?;
            let year: i32 = date
                .parse()
                .map_err(|_| IngestError::SchemaError(format!("`{date}` is not an annual date")))?;
            let value = match row.get("value") {
                None | Some(Value::Null) => None,
                Some(Value::Number(n)) => n.as_f64(),
                Some(other) => {
                    return Err(IngestError::SchemaError(format!("value {other} for {year} is not numeric")))
                }
            };
            Ok((year, value))
        })
        .collect::<Result<Vec<_>, IngestError>>()?;
    Ok(WdiPage {
        page,
        pages,
        observations,
    })
}

/// Orders observations by year and insists on a complete, non-null range.
pub fn assemble_series(q: &WdiQuery, observations: &[(i32, Option<f64>)]) -> Result<Series, IngestError> {
    if observations.is_empty() {
        return Err(IngestError::NoData(q.to_string()));
    }
    let by_year: BTreeMap<i32, Option<f64>> = observations
        .iter()
        .filter(|(y, _)| (q.start..=q.end).contains(y))
        .copied()
        .collect();
    let missing: Vec<i32> = (q.start..=q.end)
        .filter(|y| !matches!(by_year.get(y), Some(Some(_))))
        .collect();
    if !missing.is_empty() {
        return Err(IngestError::NullObservations(missing));
    }
    let values = by_year.values().map(|v| v.expect("checked above")).collect();
    Ok(Series::new(q.indicator_code.clone(), q.start, values)?)
}

pub struct WdiClient {
    base_url: String,
    cache: Option<Cache>,
    offline: bool,
    timeout: Duration,
    requests: AtomicUsize,
    key_locks: Mutex<HashMap<CacheKey, Arc<Mutex<()>>>>,
}

impl Default for WdiClient {
    fn default() -> Self {
        WdiClient::new(WDI_BASE_URL)
    }
}

impl WdiClient {
    pub fn new(base_url: &str) -> Self {
        WdiClient {
            base_url: base_url.to_string(),
            cache: None,
            offline: false,
            timeout: Duration::from_secs(30),
            requests: AtomicUsize::new(0),
            key_locks: Mutex::new(HashMap::new()),
        }
    }

    /// Default endpoint with the cache from `VECMKIT_CACHE_DIR`, falling back
    /// to `vecmkit-cache` under the system temporary directory.
    pub fn from_env() -> Self {
        let dir = std::env::var_os(CACHE_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| std::env::temp_dir().join("vecmkit-cache"));
        WdiClient::default().with_cache(Cache::new(dir))
    }

    pub fn with_cache(mut self, cache: Cache) -> Self {
        self.cache = Some(cache);
        self
    }

    /// Offline clients answer from the cache only.
    pub fn offline(mut self, offline: bool) -> Self {
        self.offline = offline;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    /// HTTP requests issued so far.
    pub fn requests_made(&self) -> usize {
        self.requests.load(Ordering::SeqCst)
    }

    pub fn fetch(&self, q: &WdiQuery) -> Result<Series, IngestError> {
        q.validate()?;
        let key = q.cache_key();
        let lock = {
            let mut locks = self.key_locks.lock().unwrap_or_else(|e| e.into_inner());
            locks.entry(key.clone()).or_default().clone()
        };
        let _guard = lock.lock().unwrap_or_else(|e| e.into_inner());
        if let Some(cache) = &self.cache {
            if let Some(entry) = cache.load(&key)? {
                return Ok(entry.payload);
            }
        }
        if self.offline {
            return Err(IngestError::CacheMiss(q.to_string()));
        }
        let series = self.download(q)?;
        if let Some(cache) = &self.cache {
            cache.store(&CacheEntry::now(key, series.clone()))?;
        }
        Ok(series)
    }

    fn download(&self, q: &WdiQuery) -> Result<Series, IngestError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(self.timeout)
            .build()
            .map_err(|e| IngestError::Network(e.to_string()))?;
        let mut observations = Vec::new();
        let mut page = 1;
        loop {
            let url = q.url(&self.base_url, page);
            self.requests.fetch_add(1, Ordering::SeqCst);
            let response = http.get(&url).send().map_err(|e| IngestError::Network(e.to_string()))?;
            let status = response.status();
            if !status.is_success() {
                return Err(IngestError::HttpError {
                    status: status.as_u16(),
                    url,
                });
            }
            let body = response.text().map_err(|e| IngestError::Network(e.to_string()))?;
            let parsed = parse_wdi_page(&body)?;
            observations.extend(parsed.observations);
            if parsed.page >= parsed.pages {
                break;
            }
            page += 1;
        }
        assemble_series(q, &observations)
    }
}

pub fn fetch_wdi(q: &WdiQuery) -> Result<Series, IngestError> {
    WdiClient::from_env().fetch(q)
}
