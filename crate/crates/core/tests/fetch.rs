use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::time::Duration;

use chrono::NaiveDate;
use trendnet::ingestion::{
    CachedFetcher, FetchPolicy, FetchRequest, RecordingSleeper, ReplayTransport, Transport,
    TransportError,
};
use trendnet::{align_panel, trim_to_onset, Error, Step};

fn d(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn replay_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/coronavirus/time")
}

fn request(geo: &str) -> FetchRequest {
    FetchRequest {
        keyword: "coronavirus".into(),
        geo: geo.into(),
        start: d("2020-01-01"),
        end: d("2020-03-31"),
        step: Step::Daily,
    }
}

fn quick() -> FetchPolicy {
    FetchPolicy {
        min_interval: Duration::ZERO,
        ..FetchPolicy::default()
    }
}

/// Fails the first `failures` calls, then replays the fixture.
struct Flaky {
    failures: usize,
    calls: Arc<AtomicUsize>,
    inner: ReplayTransport,
}

impl Flaky {
    fn new(failures: usize) -> (Self, Arc<AtomicUsize>) {
        let calls = Arc::new(AtomicUsize::new(0));
        let t = Flaky {
            failures,
            calls: calls.clone(),
            inner: ReplayTransport::new(replay_root()),
        };
        (t, calls)
    }
}

impl Transport for Flaky {
    fn fetch(&mut self, request: &FetchRequest) -> Result<Vec<u8>, TransportError> {
        let n = self.calls.fetch_add(1, Ordering::SeqCst);
        if n < self.failures {
            return Err("429 too many requests".into());
        }
        self.inner.fetch(request)
    }
}

fn fetcher(transport: Flaky, dir: &Path) -> (CachedFetcher<Flaky>, Arc<RecordingSleeper>) {
    let sleeper = Arc::new(RecordingSleeper::default());
    let f = CachedFetcher::with_policy(transport, dir, quick(), sleeper.clone());
    (f, sleeper)
}

#[test]
fn second_fetcher_is_served_from_disk() {
    let dir = tempfile::tempdir().unwrap();
    let (t, _) = Flaky::new(0);
    let (first, _) = fetcher(t, dir.path());
    let a = first.cached_fetch(&request("IT")).unwrap();
    assert_eq!(first.stats().transport_calls, 1);

    let (t, calls) = Flaky::new(0);
    let (second, _) = fetcher(t, dir.path());
    let b = second.cached_fetch(&request("IT")).unwrap();
    assert_eq!(a, b);
    assert_eq!(calls.load(Ordering::SeqCst), 0);
    assert_eq!(second.stats().hits, 1);

    // memoized after the first disk read
    second.cached_fetch(&request("IT")).unwrap();
    assert_eq!(second.stats().hits, 2);
}

#[test]
fn cache_layout_has_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let (t, _) = Flaky::new(0);
    let (f, _) = fetcher(t, dir.path());
    f.cached_fetch(&request("KR")).unwrap();
    let key = request("KR").cache_key();
    let entry = dir.path().join(&key[..2]);
    assert!(entry.join(format!("{key}.csv")).is_file());
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(entry.join(format!("{key}.json"))).unwrap())
            .unwrap();
    assert_eq!(meta["request"]["geo"], "KR");
    assert_eq!(meta["sha256"].as_str().unwrap().len(), 64);
    assert!(meta["fetched_at"].is_string());
}

#[test]
fn cache_keys_differ_per_field() {
    let base = request("IT");
    let mut keys = vec![base.cache_key()];
    let mut r = base.clone();
    r.geo = "ES".into();
    keys.push(r.cache_key());
    let mut r = base.clone();
    r.end = d("2020-03-30");
    keys.push(r.cache_key());
    let mut r = base.clone();
    r.step = Step::Weekly;
    keys.push(r.cache_key());
    let mut r = base.clone();
    r.keyword = "covid".into();
    keys.push(r.cache_key());
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), 5);
    assert_eq!(base.cache_key(), request("IT").cache_key());
}

#[test]
fn retries_with_exponential_backoff() {
    let dir = tempfile::tempdir().unwrap();
    let (t, calls) = Flaky::new(2);
    let (f, sleeper) = fetcher(t, dir.path());
    f.cached_fetch(&request("US")).unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 3);
    let stats = f.stats();
    assert_eq!(
        stats.backoff_delays,
        [Duration::from_secs(2), Duration::from_secs(4)]
    );
    assert_eq!(sleeper.slept(), stats.backoff_delays);
}

#[test]
fn gives_up_after_max_retries() {
    let dir = tempfile::tempdir().unwrap();
    let (t, calls) = Flaky::new(usize::MAX);
    let (f, _) = fetcher(t, dir.path());
    match f.cached_fetch(&request("US")) {
        Err(Error::FetchFailed { attempts, message }) => {
            assert_eq!(attempts, 5);
            assert!(message.contains("429"));
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(calls.load(Ordering::SeqCst), 5);
    assert_eq!(f.stats().backoff_delays.len(), 4);
    assert!(
        fs::read_dir(dir.path()).unwrap().next().is_none(),
        "nothing cached"
    );
}

#[test]
fn backoff_is_capped() {
    let p = FetchPolicy::default();
    assert_eq!(p.backoff(0), Duration::from_secs(2));
    assert_eq!(p.backoff(4), Duration::from_secs(32));
    assert_eq!(p.backoff(5), Duration::from_secs(60));
    assert_eq!(p.backoff(40), Duration::from_secs(60));
}

fn corrupt(dir: &Path, req: &FetchRequest) -> PathBuf {
    let key = req.cache_key();
    let path = dir.join(&key[..2]).join(format!("{key}.csv"));
    let mut text = fs::read_to_string(&path).unwrap();
    text = text.replacen(",", ",9", 3);
    fs::write(&path, text).unwrap();
    path
}

#[test]
fn corrupt_entry_is_quarantined_and_refetched() {
    let dir = tempfile::tempdir().unwrap();
    let (t, _) = Flaky::new(0);
    let (f, _) = fetcher(t, dir.path());
    let good = f.cached_fetch(&request("FR")).unwrap();
    let path = corrupt(dir.path(), &request("FR"));

    let (t, calls) = Flaky::new(0);
    let (g, _) = fetcher(t, dir.path());
    assert_eq!(g.cached_fetch(&request("FR")).unwrap(), good);
    assert_eq!(calls.load(Ordering::SeqCst), 1);
    assert_eq!(g.stats().quarantined, 1);
    let mut q = path.clone().into_os_string();
    q.push(".quarantined");
    assert!(Path::new(&q).is_file());
    // the fresh entry is valid again
    let (t, calls) = Flaky::new(0);
    fetcher(t, dir.path())
        .0
        .cached_fetch(&request("FR"))
        .unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 0);
}

#[test]
fn corrupt_entry_with_failing_transport_is_a_cache_error() {
    let dir = tempfile::tempdir().unwrap();
    let (t, _) = Flaky::new(0);
    fetcher(t, dir.path())
        .0
        .cached_fetch(&request("DE"))
        .unwrap();
    corrupt(dir.path(), &request("DE"));

    let (t, _) = Flaky::new(usize::MAX);
    let (f, _) = fetcher(t, dir.path());
    let err = f.cached_fetch(&request("DE")).unwrap_err();
    assert!(matches!(err, Error::Cache(_)), "{err:?}");
}

#[test]
fn rate_limit_spaces_calls() {
    let dir = tempfile::tempdir().unwrap();
    let sleeper = Arc::new(RecordingSleeper::default());
    let policy = FetchPolicy {
        min_interval: Duration::from_secs(1),
        ..FetchPolicy::default()
    };
    let f = CachedFetcher::with_policy(
        ReplayTransport::new(replay_root()),
        dir.path(),
        policy,
        sleeper.clone(),
    );
    for geo in ["IT", "ES", "IT", "PT"] {
        f.cached_fetch(&request(geo)).unwrap();
    }
    let stats = f.stats();
    assert_eq!(stats.transport_calls, 3);
    assert_eq!(stats.rate_limit_delays.len(), 2);
    assert!(stats
        .rate_limit_delays
        .iter()
        .all(|d| *d > Duration::ZERO && *d <= Duration::from_secs(1)));
}

#[test]
fn concurrent_callers_share_one_transport_call() {
    for geo in ["JP", "KR", "TW", "HK", "SG", "CN"] {
        let dir = tempfile::tempdir().unwrap();
        let (t, calls) = Flaky::new(0);
        let (f, _) = fetcher(t, dir.path());
        std::thread::scope(|s| {
            for _ in 0..16 {
                s.spawn(|| f.cached_fetch(&request(geo)).unwrap());
            }
        });
        assert_eq!(calls.load(Ordering::SeqCst), 1, "{geo}");
        assert_eq!(f.stats().hits, 15);
    }
}

#[test]
fn replayed_world_trims_to_onset() {
    let dir = tempfile::tempdir().unwrap();
    let (t, _) = Flaky::new(0);
    let (f, _) = fetcher(t, dir.path());
    let series = |geo: &str| {
        f.cached_fetch(&request(geo))
            .unwrap()
            .to_normalized_series()
            .unwrap()
    };
    let world = series("WORLD");
    let panel = align_panel(["IT", "KR", "US"].map(series)).unwrap();
    let trimmed = trim_to_onset(&panel, &world, 1.0).unwrap();
    assert_eq!(trimmed.onset(), Some(d("2020-01-20")));
    assert_eq!(trimmed.grid().start(), d("2020-01-20"));
}

#[test]
fn replay_rejects_wrong_keyword() {
    let dir = tempfile::tempdir().unwrap();
    let (t, _) = Flaky::new(0);
    let (f, _) = fetcher(t, dir.path());
    let mut r = request("IT");
    r.keyword = "flu".into();
    // every attempt fails the same way
    assert!(matches!(f.cached_fetch(&r), Err(Error::FetchFailed { .. })));
}
