//! Bundled country name ↔ ISO 3166-1 alpha-2 table.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::Deserialize;

use crate::timeseries::WORLD;

const TABLE_JSON: &str = include_str!("../../data/regions.json");

#[derive(Debug, Deserialize)]
struct Entry {
    name: String,
    aliases: Vec<String>,
}

fn table() -> &'static BTreeMap<String, Entry> {
    static TABLE: OnceLock<BTreeMap<String, Entry>> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(TABLE_JSON).expect("bundled region table is valid"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    Code(&'static str),
    Unknown,
    Ambiguous(Vec<&'static str>),
}

/// Resolve a region name (or an alpha-2 code) to its code.
///
/// Exact matches win; otherwise a case-insensitive match is tried, and more
/// than one candidate is reported as ambiguous.
pub fn resolve(name: &str) -> Resolution {
    let name = name.trim();
    if name == "Worldwide" || name == WORLD {
        return Resolution::Code(WORLD);
    }
    let t = table();
    if let Some((code, _)) = t.get_key_value(name) {
        return Resolution::Code(code.as_str());
    }
    let names = |e: &'static Entry| std::iter::once(&e.name).chain(&e.aliases);
    for (code, entry) in t {
        if names(entry).any(|n| n == name) {
            return Resolution::Code(code.as_str());
        }
    }
    let folded = name.to_lowercase();
    let mut hits: Vec<&'static str> = t
        .iter()
        .filter(|(code, entry)| {
            code.to_lowercase() == folded || names(entry).any(|n| n.to_lowercase() == folded)
        })
        .map(|(code, _)| code.as_str())
        .collect();
    hits.dedup();
    match hits.len() {
        0 => Resolution::Unknown,
        1 => Resolution::Code(hits[0]),
        _ => Resolution::Ambiguous(hits),
    }
}

pub fn resolve_code(name: &str) -> Option<&'static str> {
    match resolve(name) {
        Resolution::Code(c) => Some(c),
        _ => None,
    }
}

/// Display name for a code, as it appears in export headers.
pub fn display_name(code: &str) -> Option<&'static str> {
    if code == WORLD {
        return Some("Worldwide");
    }
    table().get(code).map(|e| e.name.as_str())
}

pub fn known_codes() -> impl Iterator<Item = &'static str> {
    table().keys().map(String::as_str)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_names_aliases_and_codes() {
        assert_eq!(resolve("United States"), Resolution::Code("US"));
        assert_eq!(resolve("USA"), Resolution::Code("US"));
        assert_eq!(resolve("singapore"), Resolution::Code("SG"));
        assert_eq!(resolve("IT"), Resolution::Code("IT"));
        assert_eq!(resolve("Worldwide"), Resolution::Code(WORLD));
        assert_eq!(resolve("Atlantis"), Resolution::Unknown);
    }

    #[test]
    fn names_round_trip() {
        for code in known_codes() {
            let name = display_name(code).unwrap();
            assert_eq!(resolve_code(name), Some(code), "{name}");
        }
    }
}
