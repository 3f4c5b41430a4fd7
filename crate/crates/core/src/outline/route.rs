//! The day-by-day route grammar:
//!
//! ```text
//! The First Day: from Buffalo to Atlanta. Exploring Atlanta.
//! The Second Day: Exploring Atlanta.
//! The Third Day: from Atlanta to Buffalo.
//! ```

use std::fmt;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{ordinal_word, parse_ordinal_word, DestinationScope, TravelQuery};
use crate::sandbox::{same_name, TravelDatabase};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DayKind {
    Transfer { from: String, to: String },
    Stay { city: String },
}

impl DayKind {
    /// City the traveller sleeps in (or arrives at).
    pub fn end(&self) -> &str {
        match self {
            DayKind::Transfer { to, .. } => to,
            DayKind::Stay { city } => city,
        }
    }

    pub fn start(&self) -> &str {
        match self {
            DayKind::Transfer { from, .. } => from,
            DayKind::Stay { city } => city,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DayEntry {
    pub day: u32,
    pub kind: DayKind,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteSkeleton {
    pub entries: Vec<DayEntry>,
}

impl RouteSkeleton {
    /// (day, from, to) for every transfer.
    pub fn legs(&self) -> Vec<(u32, &str, &str)> {
        self.entries
            .iter()
            .filter_map(|e| match &e.kind {
                DayKind::Transfer { from, to } => Some((e.day, from.as_str(), to.as_str())),
                DayKind::Stay { .. } => None,
            })
            .collect()
    }

    /// Distinct cities visited other than `origin`, in order of first visit.
    pub fn visited(&self, origin: &str) -> Vec<&str> {
        let mut out: Vec<&str> = Vec::new();
        for e in &self.entries {
            for c in [e.kind.start(), e.kind.end()] {
                if !same_name(c, origin) && !out.iter().any(|x| same_name(x, c)) {
                    out.push(c);
                }
            }
        }
        out
    }
}

impl fmt::Display for RouteSkeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "The {} Day: ", ordinal_word(e.day))?;
            match &e.kind {
                DayKind::Transfer { from, to } => write!(f, "from {from} to {to}.")?,
                DayKind::Stay { city } => write!(f, "Exploring {city}.")?,
            }
            if !e.note.is_empty() {
                write!(f, " {}", e.note)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("no route lines found; write one line per day such as \"The First Day: from A to B.\"")]
    Empty,
    #[error("cannot read the line {0:?}; use \"from A to B.\" or \"Exploring B.\"")]
    Unparseable(String),
    #[error("unknown city {0}")]
    UnknownCity(String),
    #[error("the route has {found} days but the trip lasts {expected} days")]
    DayCount { expected: u32, found: u32 },
    #[error("days must be numbered 1 to N in order; found day {found} where day {expected} belongs")]
    NonContiguous { expected: u32, found: u32 },
    #[error("the first day must travel from {0}")]
    StartNotAtOrigin(String),
    #[error("the last day must travel back to {0}")]
    MissingReturn(String),
    #[error("day {day} starts in {start} but the previous day ends in {previous}")]
    Discontinuous { day: u32, start: String, previous: String },
    #[error("the route visits {found} cities but the trip asks for {expected}")]
    CityCount { expected: usize, found: usize },
    #[error("{city} is not part of the destination {scope}")]
    OutsideDestination { city: String, scope: String },
    #[error("day {0} returns to the origin before the trip ends")]
    OriginMidTrip(u32),
}

fn line_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\W*(?:the\s+([a-z]+)\s+day|day\s+(\d+))\s*:\s*(.*)$").unwrap())
}

fn transfer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^from\s+(.+?)\s+to\s+(.+)$").unwrap())
}

fn stay_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^(?:exploring|stay(?:ing)?\s+in)\s+(.+)$").unwrap())
}

fn canonical(db: &TravelDatabase, name: &str) -> Result<String, RouteError> {
    let name = name.trim();
    db.canonical_city(name).map(str::to_string).ok_or_else(|| RouteError::UnknownCity(name.to_string()))
}

/// Splits "Atlanta. Exploring Atlanta." into the city and the note. Tries each
/// sentence break in turn so names such as "St. Petersburg" survive.
fn city_and_note(db: &TravelDatabase, text: &str) -> Result<(String, String), RouteError> {
    let text = text.trim();
    let bytes = text.as_bytes();
    let mut splits: Vec<usize> = (0..bytes.len())
        .filter(|&i| bytes[i] == b'.' && bytes.get(i + 1).is_none_or(|b| b.is_ascii_whitespace()))
        .collect();
    splits.push(text.len());
    for &i in &splits {
        if let Some(city) = db.canonical_city(text[..i].trim()) {
            let note = text.get(i + 1..).unwrap_or("").trim().to_string();
            return Ok((city.to_string(), note));
        }
    }
    Err(RouteError::UnknownCity(text[..splits[0]].trim().to_string()))
}

/// Parses route lines, matching city names against the database case-insensitively.
/// Lines that are not day lines are ignored.
pub fn parse_route(text: &str, db: &TravelDatabase) -> Result<RouteSkeleton, RouteError> {
    let mut entries = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        let Some(c) = line_re().captures(line) else { continue };
        let day = match (c.get(1), c.get(2)) {
            (Some(w), _) => parse_ordinal_word(w.as_str()),
            (None, Some(n)) => n.as_str().parse().ok(),
            _ => None,
        }
        .ok_or_else(|| RouteError::Unparseable(line.to_string()))?;
        let body = c[3].trim();
        let (kind, note) = if let Some(t) = transfer_re().captures(body) {
            let (to, note) = city_and_note(db, &t[2])?;
            (DayKind::Transfer { from: canonical(db, &t[1])?, to }, note)
        } else if let Some(s) = stay_re().captures(body) {
            let (city, note) = city_and_note(db, &s[1])?;
            (DayKind::Stay { city }, note)
        } else {
            return Err(RouteError::Unparseable(line.to_string()));
        };
        entries.push(DayEntry { day, kind, note });
    }
    if entries.is_empty() {
        return Err(RouteError::Empty);
    }
    Ok(RouteSkeleton { entries })
}

/// Checks the skeleton against the query contract.
pub fn validate_route(route: &RouteSkeleton, query: &TravelQuery, db: &TravelDatabase) -> Result<(), RouteError> {
    let origin = query.origin_city.as_str();
    let n = query.duration_days;
    let found = route.entries.len() as u32;
    if found != n {
        return Err(RouteError::DayCount { expected: n, found });
    }
    for (i, e) in route.entries.iter().enumerate() {
        let expected = i as u32 + 1;
        if e.day != expected {
            return Err(RouteError::NonContiguous { expected, found: e.day });
        }
    }
    let first = &route.entries[0].kind;
    if !matches!(first, DayKind::Transfer { from, .. } if same_name(from, origin)) {
        return Err(RouteError::StartNotAtOrigin(origin.to_string()));
    }
    let last = &route.entries[route.entries.len() - 1].kind;
    if !matches!(last, DayKind::Transfer { to, .. } if same_name(to, origin)) {
        return Err(RouteError::MissingReturn(origin.to_string()));
    }
    for w in route.entries.windows(2) {
        if !same_name(w[0].kind.end(), w[1].kind.start()) {
            return Err(RouteError::Discontinuous {
                day: w[1].day,
                start: w[1].kind.start().to_string(),
                previous: w[0].kind.end().to_string(),
            });
        }
    }
    for e in &route.entries[..route.entries.len() - 1] {
        if same_name(e.kind.end(), origin) {
            return Err(RouteError::OriginMidTrip(e.day));
        }
    }
    let visited = route.visited(origin);
    for city in &visited {
        let inside = match &query.destination {
            DestinationScope::City(c) => same_name(c, city),
            DestinationScope::State { state, .. } => db.state_of(city).is_some_and(|s| same_name(s, state)),
        };
        if !inside {
            return Err(RouteError::OutsideDestination { city: city.to_string(), scope: query.destination.to_string() });
        }
    }
    let expected = query.destination.city_count();
    if visited.len() != expected {
        return Err(RouteError::CityCount { expected, found: visited.len() });
    }
    Ok(())
}
