use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::{DateTime, Datelike, FixedOffset, Timelike, Weekday};
use serde::{Deserialize, Serialize};

use super::{DirectedCountLayer, InteractionEvent};
use crate::{Error, Layer, Result};

/// Parameters turning proximity scans into co-presence time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProximityConfig {
    /// Minimum signal strength counted as "within about three meters".
    /// Hardware dependent.
    pub rssi_threshold: f64,
    /// Detections further apart than this are not bridged.
    pub gap_cap_seconds: i64,
    /// Width of the time bins scans are collected into.
    pub bin_seconds: i64,
}

impl Default for ProximityConfig {
    fn default() -> Self {
        Self {
            rssi_threshold: -75.0,
            gap_cap_seconds: 600,
            bin_seconds: 300,
        }
    }
}

/// Parses a fixed UTC offset such as `+01:00`, `-0530` or `Z`.
pub fn parse_utc_offset(s: &str) -> Result<FixedOffset> {
    let s = s.trim();
    if s == "Z" || s == "z" {
        return Ok(FixedOffset::east_opt(0).expect("zero offset"));
    }
    let bad = || Error::Config(format!("invalid UTC offset `{s}` (expected e.g. +01:00)"));
    let (sign, rest) = match s.as_bytes().first() {
        Some(b'+') => (1, &s[1..]),
        Some(b'-') => (-1, &s[1..]),
        _ => return Err(bad()),
    };
    let digits: String = rest.chars().filter(|c| *c != ':').collect();
    if digits.len() != 4 || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let hours: i32 = digits[..2].parse().map_err(|_| bad())?;
    let minutes: i32 = digits[2..].parse().map_err(|_| bad())?;
    if minutes >= 60 {
        return Err(bad());
    }
    FixedOffset::east_opt(sign * (hours * 3600 + minutes * 60)).ok_or_else(bad)
}

fn in_social_window(timestamp: i64, offset: FixedOffset) -> bool {
    let Some(utc) = DateTime::from_timestamp(timestamp, 0) else {
        return false;
    };
    let local = utc.with_timezone(&offset);
    matches!(local.weekday(), Weekday::Sat | Weekday::Sun) || local.hour() >= 18
}

/// Keeps proximity events that fall on a weekend or on a weekday evening
/// (18:00 to midnight local time). Events of other layers pass untouched.
pub fn filter_proximity_window(
    events: &[InteractionEvent],
    offset: FixedOffset,
) -> Vec<InteractionEvent> {
    events
        .iter()
        .filter(|e| e.layer != Layer::Proximity || in_social_window(e.timestamp, offset))
        .cloned()
        .collect()
}

/// Co-presence seconds per unordered pair `(lo, hi)`.
///
/// A pair is marked in a bin when either device detected the other at or
/// above the threshold there. Consecutive marked bins at most `gap_cap`
/// apart contribute their separation.
pub(crate) fn contact_seconds<'a>(
    events: &'a [InteractionEvent],
    include: impl Fn(&str) -> bool,
    cfg: &ProximityConfig,
) -> Result<BTreeMap<(&'a str, &'a str), f64>> {
    if cfg.bin_seconds <= 0 || cfg.gap_cap_seconds < 0 {
        return Err(Error::Config(
            "bin width must be > 0 and gap cap >= 0".to_string(),
        ));
    }
    let mut last_scan: HashMap<&str, i64> = HashMap::new();
    let mut bins: BTreeMap<(&str, &str), BTreeSet<i64>> = BTreeMap::new();
    for e in events.iter().filter(|e| e.layer == Layer::Proximity) {
        if let Some(&prev) = last_scan.get(e.source.as_str()) {
            if e.timestamp < prev {
                return Err(Error::UnsortedScans {
                    device: e.source.clone(),
                    prev,
                    next: e.timestamp,
                });
            }
        }
        last_scan.insert(&e.source, e.timestamp);
        if e.magnitude < cfg.rssi_threshold || !include(&e.source) || !include(&e.target) {
            continue;
        }
        let key = if e.source < e.target {
            (e.source.as_str(), e.target.as_str())
        } else {
            (e.target.as_str(), e.source.as_str())
        };
        bins.entry(key)
            .or_default()
            .insert(e.timestamp.div_euclid(cfg.bin_seconds));
    }
    let mut out = BTreeMap::new();
    for (key, marked) in bins {
        let mut total = 0i64;
        for (a, b) in marked.iter().zip(marked.iter().skip(1)) {
            let dt = (b - a) * cfg.bin_seconds;
            if dt <= cfg.gap_cap_seconds {
                total += dt;
            }
        }
        if total > 0 {
            out.insert(key, total as f64);
        }
    }
    Ok(out)
}

/// Builds the proximity layer: `T_ij = T_ji` seconds of binned co-presence
/// between members of `node_set`.
///
/// Scans by one device must appear in time order.
pub fn aggregate_proximity(
    events: &[InteractionEvent],
    node_set: &BTreeSet<String>,
    cfg: &ProximityConfig,
) -> Result<DirectedCountLayer> {
    let seconds = contact_seconds(events, |n| node_set.contains(n), cfg)?;
    let mut layer = DirectedCountLayer::new(Layer::Proximity, node_set.clone());
    for ((a, b), t) in seconds {
        layer.add(a, b, t)?;
        layer.add(b, a, t)?;
    }
    Ok(layer)
}
