//! Cached, rate-limited fetching of interest-over-time exports.
//!
//! The wrapper owns caching, the minimum delay between transport calls and
//! exponential backoff; a [`Transport`] only knows how to produce bytes for
//! a request. No live transport ships here: [`ReplayTransport`] serves
//! exports from a directory, which keeps runs reproducible offline.
//!
//! Cache layout: `<cache_dir>/<key[..2]>/<key>.csv` holds the response
//! bytes verbatim and `<key>.json` a sidecar with the request, fetch time
//! and SHA-256 of the bytes.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::export::{parse_interest_over_time_csv, TrendsTimeCsv};
use crate::error::{Error, Result};
use crate::timeseries::Step;

/// Environment variable overriding the default cache directory.
pub const CACHE_DIR_ENV: &str = "TRENDNET_CACHE_DIR";

pub fn default_cache_dir() -> PathBuf {
    std::env::var_os(CACHE_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(".trendnet-cache"))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FetchRequest {
    pub keyword: String,
    pub geo: String,
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub step: Step,
}

impl FetchRequest {
    /// Hex SHA-256 over the request fields.
    pub fn cache_key(&self) -> String {
        let mut h = Sha256::new();
        for part in [
            self.keyword.as_str(),
            self.geo.as_str(),
            &self.start.to_string(),
            &self.end.to_string(),
            &self.step.to_string(),
        ] {
            h.update(part.as_bytes());
            h.update([0x1f]);
        }
        hex::encode(h.finalize())
    }
}

pub type TransportError = Box<dyn std::error::Error + Send + Sync>;

pub trait Transport: Send {
    fn fetch(&mut self, request: &FetchRequest) -> std::result::Result<Vec<u8>, TransportError>;
}

pub trait Sleeper: Send + Sync {
    fn sleep(&self, duration: Duration);
}

#[derive(Debug, Default, Clone, Copy)]
pub struct ThreadSleeper;

impl Sleeper for ThreadSleeper {
    fn sleep(&self, duration: Duration) {
        std::thread::sleep(duration);
    }
}

/// Records requested sleeps without blocking.
#[derive(Debug, Default)]
pub struct RecordingSleeper {
    slept: Mutex<Vec<Duration>>,
}

impl RecordingSleeper {
    pub fn slept(&self) -> Vec<Duration> {
        self.slept.lock().unwrap().clone()
    }
}

impl Sleeper for RecordingSleeper {
    fn sleep(&self, duration: Duration) {
        self.slept.lock().unwrap().push(duration);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FetchPolicy {
    /// Minimum gap between the starts of two transport calls.
    pub min_interval: Duration,
    /// Retries after the first failed attempt.
    pub max_retries: u32,
    pub initial_backoff: Duration,
    pub max_backoff: Duration,
}

impl Default for FetchPolicy {
    fn default() -> Self {
        FetchPolicy {
            min_interval: Duration::from_secs(1),
            max_retries: 4,
            initial_backoff: Duration::from_secs(2),
            max_backoff: Duration::from_secs(60),
        }
    }
}

impl FetchPolicy {
    pub fn backoff(&self, retry: u32) -> Duration {
        let factor = 1u32.checked_shl(retry).unwrap_or(u32::MAX);
        self.initial_backoff
            .checked_mul(factor)
            .unwrap_or(self.max_backoff)
            .min(self.max_backoff)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FetchStats {
    pub hits: u64,
    pub misses: u64,
    pub transport_calls: u64,
    pub quarantined: u64,
    pub backoff_delays: Vec<Duration>,
    pub rate_limit_delays: Vec<Duration>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    request: FetchRequest,
    fetched_at: String,
    sha256: String,
    bytes: usize,
}

struct TransportSlot<T> {
    transport: T,
    last_call: Option<Instant>,
}

pub struct CachedFetcher<T: Transport> {
    slot: Mutex<TransportSlot<T>>,
    cache_dir: PathBuf,
    policy: FetchPolicy,
    sleeper: Arc<dyn Sleeper>,
    stats: Mutex<FetchStats>,
    memo: Mutex<HashMap<String, Arc<Vec<u8>>>>,
}

enum Lookup {
    Hit(Vec<u8>),
    Miss,
    Corrupt(String),
}

impl<T: Transport> CachedFetcher<T> {
    pub fn new(transport: T, cache_dir: impl Into<PathBuf>) -> Self {
        Self::with_policy(
            transport,
            cache_dir,
            FetchPolicy::default(),
            Arc::new(ThreadSleeper),
        )
    }

    pub fn with_policy(
        transport: T,
        cache_dir: impl Into<PathBuf>,
        policy: FetchPolicy,
        sleeper: Arc<dyn Sleeper>,
    ) -> Self {
        CachedFetcher {
            slot: Mutex::new(TransportSlot {
                transport,
                last_call: None,
            }),
            cache_dir: cache_dir.into(),
            policy,
            sleeper,
            stats: Mutex::new(FetchStats::default()),
            memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn stats(&self) -> FetchStats {
        self.stats.lock().unwrap().clone()
    }

    pub fn cache_dir(&self) -> &Path {
        &self.cache_dir
    }

    fn entry_paths(&self, key: &str) -> (PathBuf, PathBuf) {
        let dir = self.cache_dir.join(&key[..2]);
        (
            dir.join(format!("{key}.csv")),
            dir.join(format!("{key}.json")),
        )
    }

    fn lookup(&self, request: &FetchRequest, key: &str) -> Lookup {
        let (data, meta) = self.entry_paths(key);
        if !data.exists() && !meta.exists() {
            return Lookup::Miss;
        }
        let check = || -> std::result::Result<Vec<u8>, String> {
            let bytes = fs::read(&data).map_err(|e| format!("reading {}: {e}", data.display()))?;
            let sidecar: Sidecar = fs::read(&meta)
                .map_err(|e| e.to_string())
                .and_then(|m| serde_json::from_slice(&m).map_err(|e| e.to_string()))
                .map_err(|e| format!("sidecar {}: {e}", meta.display()))?;
            if sidecar.request != *request {
                return Err("sidecar describes a different request".into());
            }
            if sidecar.sha256 != hex::encode(Sha256::digest(&bytes)) {
                return Err("content hash mismatch".into());
            }
            let text = std::str::from_utf8(&bytes).map_err(|e| e.to_string())?;
            parse_interest_over_time_csv(text).map_err(|e| e.to_string())?;
            Ok(bytes)
        };
        match check() {
            Ok(bytes) => Lookup::Hit(bytes),
            Err(reason) => Lookup::Corrupt(reason),
        }
    }

    fn quarantine(&self, key: &str) -> Result<()> {
        let (data, meta) = self.entry_paths(key);
        for p in [data, meta] {
            if p.exists() {
                let mut q = p.clone().into_os_string();
                q.push(".quarantined");
                fs::rename(&p, &q)
                    .map_err(|e| Error::Cache(format!("quarantining {}: {e}", p.display())))?;
            }
        }
        self.stats.lock().unwrap().quarantined += 1;
        Ok(())
    }

    fn persist(&self, request: &FetchRequest, key: &str, bytes: &[u8]) -> Result<()> {
        let (data, meta) = self.entry_paths(key);
        let io = |e: std::io::Error| Error::Cache(format!("writing cache entry {key}: {e}"));
        fs::create_dir_all(data.parent().unwrap()).map_err(io)?;
        fs::write(&data, bytes).map_err(io)?;
        let sidecar = Sidecar {
            request: request.clone(),
            fetched_at: chrono::Utc::now().to_rfc3339(),
            sha256: hex::encode(Sha256::digest(bytes)),
            bytes: bytes.len(),
        };
        fs::write(&meta, serde_json::to_vec_pretty(&sidecar)?).map_err(io)?;
        Ok(())
    }

    fn parse(bytes: &[u8]) -> Result<TrendsTimeCsv> {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| Error::parse(1, format!("response is not UTF-8: {e}")))?;
        parse_interest_over_time_csv(text)
    }

    /// Serve `request` from the cache, or fetch, persist and parse it.
    pub fn cached_fetch(&self, request: &FetchRequest) -> Result<TrendsTimeCsv> {
        let key = request.cache_key();
        if let Some(bytes) = self.memo.lock().unwrap().get(&key).cloned() {
            self.stats.lock().unwrap().hits += 1;
            return Self::parse(&bytes);
        }
        if let Lookup::Hit(bytes) = self.lookup(request, &key) {
            self.stats.lock().unwrap().hits += 1;
            let parsed = Self::parse(&bytes);
            self.memo.lock().unwrap().insert(key, Arc::new(bytes));
            return parsed;
        }

        // transport calls are serialized; re-check once we hold the slot in
        // case another caller filled this entry meanwhile
        let mut slot = self.slot.lock().unwrap();
        let mut corrupted = None;
        match self.lookup(request, &key) {
            Lookup::Hit(bytes) => {
                self.stats.lock().unwrap().hits += 1;
                let parsed = Self::parse(&bytes);
                self.memo.lock().unwrap().insert(key, Arc::new(bytes));
                return parsed;
            }
            Lookup::Corrupt(reason) => {
                self.quarantine(&key)?;
                corrupted = Some(reason);
            }
            Lookup::Miss => {}
        }
        self.stats.lock().unwrap().misses += 1;

        let mut attempt = 0;
        let bytes = loop {
            if let Some(last) = slot.last_call {
                let elapsed = last.elapsed();
                if elapsed < self.policy.min_interval {
                    let wait = self.policy.min_interval - elapsed;
                    self.stats.lock().unwrap().rate_limit_delays.push(wait);
                    self.sleeper.sleep(wait);
                }
            }
            slot.last_call = Some(Instant::now());
            self.stats.lock().unwrap().transport_calls += 1;
            match slot.transport.fetch(request) {
                Ok(bytes) => break bytes,
                Err(_) if attempt < self.policy.max_retries => {
                    let delay = self.policy.backoff(attempt);
                    self.stats.lock().unwrap().backoff_delays.push(delay);
                    self.sleeper.sleep(delay);
                    attempt += 1;
                }
                Err(e) => {
                    let message = e.to_string();
                    return Err(match corrupted {
                        Some(reason) => Error::Cache(format!(
                            "entry {key} was corrupt ({reason}) and refetching failed: {message}"
                        )),
                        None => Error::FetchFailed {
                            attempts: attempt + 1,
                            message,
                        },
                    });
                }
            }
        };
        // persist before releasing the slot so waiting callers find the entry
        let parsed = Self::parse(&bytes)?;
        self.persist(request, &key, &bytes)?;
        self.memo.lock().unwrap().insert(key, Arc::new(bytes));
        drop(slot);
        Ok(parsed)
    }
}

/// Serves requests from `<root>/<geo>.csv` export files, cropped to the
/// requested range.
#[derive(Debug, Clone)]
pub struct ReplayTransport {
    root: PathBuf,
    calls: usize,
}

impl ReplayTransport {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        ReplayTransport {
            root: root.into(),
            calls: 0,
        }
    }

    pub fn calls(&self) -> usize {
        self.calls
    }
}

impl Transport for ReplayTransport {
    fn fetch(&mut self, request: &FetchRequest) -> std::result::Result<Vec<u8>, TransportError> {
        self.calls += 1;
        let path = self.root.join(format!("{}.csv", request.geo));
        let doc = parse_interest_over_time_csv(&fs::read_to_string(&path)?)?;
        if doc.keyword != request.keyword {
            return Err(format!(
                "{} holds `{}`, not `{}`",
                path.display(),
                doc.keyword,
                request.keyword
            )
            .into());
        }
        if doc.grid.step() != request.step {
            return Err(format!(
                "{} is {}, not {}",
                path.display(),
                doc.grid.step(),
                request.step
            )
            .into());
        }
        Ok(doc.crop(request.start, request.end)?.to_csv().into_bytes())
    }
}
