//! Structured reading of the free-text plan fields.

use std::sync::OnceLock;

use regex::Regex;

use crate::domain::{DailyPlan, PlanField, TravelMode, EMPTY};
use crate::sandbox::same_name;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CityEntry {
    Stay(String),
    Transfer { from: String, to: String },
}

impl CityEntry {
    pub fn start(&self) -> &str {
        match self {
            CityEntry::Stay(c) => c,
            CityEntry::Transfer { from, .. } => from,
        }
    }

    pub fn end(&self) -> &str {
        match self {
            CityEntry::Stay(c) => c,
            CityEntry::Transfer { to, .. } => to,
        }
    }

    pub fn is_transfer(&self) -> bool {
        matches!(self, CityEntry::Transfer { .. })
    }

    pub fn contains(&self, city: &str) -> bool {
        same_name(self.start(), city) || same_name(self.end(), city)
    }

    pub fn cities(&self) -> Vec<&str> {
        match self {
            CityEntry::Stay(c) => vec![c],
            CityEntry::Transfer { from, to } => vec![from, to],
        }
    }
}

fn transfer_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\s*from\s+(.+?)\s+to\s+(.+?)\s*$").unwrap())
}

fn leg_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\bfrom\s+(.+?)\s+to\s+(.+?)\s*(?:,|$)").unwrap())
}

fn flight_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)flight\s+number\s*:\s*([A-Za-z0-9]+)").unwrap())
}

pub fn parse_current_city(text: &str) -> Option<CityEntry> {
    let text = text.trim();
    if text == EMPTY || text.is_empty() {
        return None;
    }
    if let Some(c) = transfer_re().captures(text) {
        return Some(CityEntry::Transfer { from: c[1].to_string(), to: c[2].to_string() });
    }
    Some(CityEntry::Stay(text.to_string()))
}

/// A named venue with its city qualifier ("Name, City").
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Venue {
    pub name: String,
    pub city: Option<String>,
}

impl Venue {
    pub fn key(&self) -> (String, String) {
        (
            self.name.trim().to_lowercase(),
            self.city.as_deref().unwrap_or("").trim().to_lowercase(),
        )
    }
}

/// Splits at the last comma; a trailing parenthetical annotation is dropped first.
pub fn parse_venue(text: &str) -> Option<Venue> {
    let mut text = text.trim();
    if text == EMPTY || text.is_empty() {
        return None;
    }
    if text.ends_with(')') {
        if let Some(open) = text.rfind(" (") {
            let head = text[..open].trim_end();
            // keep names like "Honolulu Museum of Art (HoMA)" that carry no city
            if head.contains(',') {
                text = head;
            }
        }
    }
    match text.rsplit_once(',') {
        Some((name, city)) if !name.trim().is_empty() && !city.trim().is_empty() => Some(Venue {
            name: name.trim().to_string(),
            city: Some(city.trim().to_string()),
        }),
        _ => Some(Venue { name: text.to_string(), city: None }),
    }
}

pub fn parse_attractions(text: &str) -> Vec<Venue> {
    if text.trim() == EMPTY {
        return Vec::new();
    }
    text.split(';').filter_map(parse_venue).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transport {
    Flight {
        number: String,
        leg: Option<(String, String)>,
    },
    Ground {
        mode: TravelMode,
        leg: Option<(String, String)>,
    },
    Unrecognised(String),
}

impl Transport {
    pub fn leg(&self) -> Option<(&str, &str)> {
        match self {
            Transport::Flight { leg, .. } | Transport::Ground { leg, .. } => {
                leg.as_ref().map(|(a, b)| (a.as_str(), b.as_str()))
            }
            Transport::Unrecognised(_) => None,
        }
    }

    pub fn is_flight(&self) -> bool {
        matches!(self, Transport::Flight { .. })
    }

    pub fn is_self_driving(&self) -> bool {
        matches!(self, Transport::Ground { mode: TravelMode::SelfDriving, .. })
    }
}

pub fn parse_transportation(text: &str) -> Option<Transport> {
    let text = text.trim();
    if text == EMPTY || text.is_empty() {
        return None;
    }
    let leg = leg_re()
        .captures(text)
        .map(|c| (c[1].trim().to_string(), c[2].trim().to_string()));
    if let Some(c) = flight_re().captures(text) {
        return Some(Transport::Flight { number: c[1].to_string(), leg });
    }
    let lower = text.to_lowercase();
    let mode = if lower.starts_with("self-driving") || lower.starts_with("self driving") {
        Some(TravelMode::SelfDriving)
    } else if lower.starts_with("taxi") {
        Some(TravelMode::Taxi)
    } else {
        None
    };
    match mode {
        Some(mode) => Some(Transport::Ground { mode, leg }),
        None => Some(Transport::Unrecognised(text.to_string())),
    }
}

/// One day with every field parsed once.
#[derive(Debug, Clone)]
pub struct DayView<'a> {
    pub plan: &'a DailyPlan,
    pub city: Option<CityEntry>,
    pub transport: Option<Transport>,
    pub meals: Vec<(PlanField, Venue)>,
    pub attractions: Vec<Venue>,
    pub accommodation: Option<Venue>,
}

impl<'a> DayView<'a> {
    pub fn new(plan: &'a DailyPlan) -> Self {
        DayView {
            plan,
            city: parse_current_city(&plan.current_city),
            transport: parse_transportation(&plan.transportation),
            meals: PlanField::MEALS
                .into_iter()
                .filter_map(|f| parse_venue(plan.get(f)).map(|v| (f, v)))
                .collect(),
            attractions: parse_attractions(&plan.attraction),
            accommodation: parse_venue(&plan.accommodation),
        }
    }

    pub fn is_transfer(&self) -> bool {
        self.city.as_ref().is_some_and(CityEntry::is_transfer)
    }
}
