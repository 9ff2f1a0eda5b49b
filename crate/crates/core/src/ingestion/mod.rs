//! Reading search-interest exports: single CSV documents, manifest-described
//! datasets and a cached fetcher for pluggable transports.

pub mod export;
pub mod fetch;
pub mod manifest;
pub mod regions;

pub use export::{
    parse_interest_by_region_csv, parse_interest_over_time_csv, region_csv, RawValue,
    RegionSnapshot, TrendsTimeCsv, BELOW_ONE,
};
pub use fetch::{
    default_cache_dir, CachedFetcher, FetchPolicy, FetchRequest, FetchStats, RecordingSleeper,
    ReplayTransport, Sleeper, ThreadSleeper, Transport, TransportError, CACHE_DIR_ENV,
};
pub use manifest::{load_dataset, Dataset, DatasetManifest, RegionFile, TimeFile};
