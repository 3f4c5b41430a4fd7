use std::collections::BTreeSet;
use std::fmt;

use chrono::{Days, NaiveDate};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::Money;

/// Where the trip goes: one named city, or a number of cities inside a state.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DestinationScope {
    City(String),
    State { state: String, cities: usize },
}

impl DestinationScope {
    /// Number of distinct cities (excluding the origin) the route must visit.
    pub fn city_count(&self) -> usize {
        match self {
            DestinationScope::City(_) => 1,
            DestinationScope::State { cities, .. } => *cities,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RoomRule {
    #[serde(rename = "allows smoking")]
    Smoking,
    #[serde(rename = "allows visitors")]
    Visitors,
    #[serde(rename = "allows pets")]
    Pets,
    #[serde(rename = "allows children")]
    Children,
    #[serde(rename = "allows parties")]
    Parties,
}

impl RoomRule {
    pub const ALL: [RoomRule; 5] = [
        RoomRule::Smoking,
        RoomRule::Visitors,
        RoomRule::Pets,
        RoomRule::Children,
        RoomRule::Parties,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RoomRule::Smoking => "allows smoking",
            RoomRule::Visitors => "allows visitors",
            RoomRule::Pets => "allows pets",
            RoomRule::Children => "allows children",
            RoomRule::Parties => "allows parties",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RoomTypeRequirement {
    #[serde(rename = "private room")]
    PrivateRoom,
    #[serde(rename = "shared room")]
    SharedRoom,
    #[serde(rename = "entire home")]
    EntireHome,
    #[serde(rename = "not shared")]
    NotShared,
}

impl RoomTypeRequirement {
    pub fn as_str(self) -> &'static str {
        match self {
            RoomTypeRequirement::PrivateRoom => "private room",
            RoomTypeRequirement::SharedRoom => "shared room",
            RoomTypeRequirement::EntireHome => "entire home",
            RoomTypeRequirement::NotShared => "not shared",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransportBan {
    #[serde(rename = "no flight")]
    NoFlight,
    #[serde(rename = "no self-driving")]
    NoSelfDriving,
}

impl TransportBan {
    pub fn as_str(self) -> &'static str {
        match self {
            TransportBan::NoFlight => "no flight",
            TransportBan::NoSelfDriving => "no self-driving",
        }
    }
}

/// Requirements stated explicitly in the query. Empty means budget only.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct HardConstraintSet {
    pub room_rules: BTreeSet<RoomRule>,
    pub room_type: Option<RoomTypeRequirement>,
    pub cuisines: BTreeSet<String>,
    pub transportation_ban: Option<TransportBan>,
}

impl HardConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.room_rules.is_empty()
            && self.room_type.is_none()
            && self.cuisines.is_empty()
            && self.transportation_ban.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TravelQuery {
    pub id: String,
    pub text: String,
    pub origin_city: String,
    pub destination: DestinationScope,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    pub duration_days: u32,
    pub party_size: u32,
    pub budget: Money,
    #[serde(default)]
    pub hard_constraints: HardConstraintSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("query {id}: duration {duration} does not match dates {start}..{end}")]
    DurationMismatch {
        id: String,
        duration: u32,
        start: NaiveDate,
        end: NaiveDate,
    },
    #[error("query {id}: duration must be 3, 5 or 7 days, got {duration}")]
    UnsupportedDuration { id: String, duration: u32 },
    #[error("query {id}: party size must be at least 1")]
    EmptyParty { id: String },
    #[error("query {id}: budget must be positive")]
    NonPositiveBudget { id: String },
    #[error("query {id}: destination must include at least one city")]
    EmptyDestination { id: String },
}

impl TravelQuery {
    pub fn validate(&self) -> Result<(), QueryError> {
        let span = (self.end_date - self.start_date).num_days() + 1;
        if span != i64::from(self.duration_days) {
            return Err(QueryError::DurationMismatch {
                id: self.id.clone(),
                duration: self.duration_days,
                start: self.start_date,
                end: self.end_date,
            });
        }
        if ![3, 5, 7].contains(&self.duration_days) {
            return Err(QueryError::UnsupportedDuration {
                id: self.id.clone(),
                duration: self.duration_days,
            });
        }
        if self.party_size == 0 {
            return Err(QueryError::EmptyParty { id: self.id.clone() });
        }
        if self.budget <= Money::ZERO {
            return Err(QueryError::NonPositiveBudget { id: self.id.clone() });
        }
        if self.destination.city_count() == 0 {
            return Err(QueryError::EmptyDestination { id: self.id.clone() });
        }
        Ok(())
    }

    /// Calendar date of a 1-based trip day.
    pub fn date_of_day(&self, day: u32) -> NaiveDate {
        self.start_date + Days::new(u64::from(day.saturating_sub(1)))
    }

    /// floor(budget / duration) in whole currency units.
    pub fn daily_budget(&self) -> i64 {
        self.budget.cents().div_euclid(i64::from(self.duration_days) * 100)
    }

    /// Number of hard constraints the query makes applicable (budget always counts).
    pub fn applicable_hard_constraints(&self) -> usize {
        let hc = &self.hard_constraints;
        1 + usize::from(!hc.room_rules.is_empty())
            + usize::from(hc.room_type.is_some())
            + usize::from(!hc.cuisines.is_empty())
            + usize::from(hc.transportation_ban.is_some())
    }
}

/// "First", "Second", ... for day numbers up to ten; digits beyond.
pub fn ordinal_word(day: u32) -> String {
    const WORDS: [&str; 10] = [
        "First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth",
        "Tenth",
    ];
    match day {
        1..=10 => WORDS[(day - 1) as usize].to_string(),
        _ => format!("{day}th"),
    }
}

/// Inverse of [`ordinal_word`], case-insensitive.
pub fn parse_ordinal_word(word: &str) -> Option<u32> {
    (1..=10).find(|d| ordinal_word(*d).eq_ignore_ascii_case(word.trim()))
}

/// Prose form used in prompts and descriptions, e.g. "March 4th, 2022".
pub fn prose_date(date: NaiveDate) -> String {
    use chrono::Datelike;
    let day = date.day();
    let suffix = match (day % 10, day % 100) {
        (1, n) if n != 11 => "st",
        (2, n) if n != 12 => "nd",
        (3, n) if n != 13 => "rd",
        _ => "th",
    };
    format!("{} {day}{suffix}, {}", date.format("%B"), date.year())
}

impl fmt::Display for DestinationScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DestinationScope::City(c) => write!(f, "{c}"),
            DestinationScope::State { state, cities } => write!(f, "{cities} cities in {state}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn query() -> TravelQuery {
        TravelQuery {
            id: "q".into(),
            text: "t".into(),
            origin_city: "Buffalo".into(),
            destination: DestinationScope::City("Atlanta".into()),
            start_date: NaiveDate::from_ymd_opt(2022, 3, 2).unwrap(),
            end_date: NaiveDate::from_ymd_opt(2022, 3, 4).unwrap(),
            duration_days: 3,
            party_size: 1,
            budget: Money::from_dollars(1100),
            hard_constraints: HardConstraintSet::default(),
        }
    }

    #[test]
    fn validates_invariants() {
        assert!(query().validate().is_ok());
        let mut q = query();
        q.duration_days = 5;
        assert!(matches!(q.validate(), Err(QueryError::DurationMismatch { .. })));
        let mut q = query();
        q.end_date = NaiveDate::from_ymd_opt(2022, 3, 5).unwrap();
        q.duration_days = 4;
        assert!(matches!(q.validate(), Err(QueryError::UnsupportedDuration { .. })));
        let mut q = query();
        q.party_size = 0;
        assert!(q.validate().is_err());
        let mut q = query();
        q.budget = Money::ZERO;
        assert!(q.validate().is_err());
    }

    #[test]
    fn daily_budget_floors() {
        let mut q = query();
        q.budget = Money::from_dollars(3200);
        assert_eq!(q.daily_budget(), 1066);
        assert_eq!(query().daily_budget(), 366);
    }

    #[test]
    fn dates_and_ordinals() {
        let q = query();
        assert_eq!(q.date_of_day(3).to_string(), "2022-03-04");
        assert_eq!(ordinal_word(2), "Second");
        assert_eq!(parse_ordinal_word("seventh"), Some(7));
        assert_eq!(prose_date(q.start_date), "March 2nd, 2022");
        assert_eq!(prose_date(NaiveDate::from_ymd_opt(2022, 3, 11).unwrap()), "March 11th, 2022");
    }

    #[test]
    fn corpus_line_deserializes() {
        let line = r#"{"id":"q2","text":"...","origin_city":"Greensboro","destination":{"state":{"state":"Georgia","cities":3}},"start_date":"2022-03-10","end_date":"2022-03-16","duration_days":7,"party_size":3,"budget":4000,"hard_constraints":{"room_rules":["allows smoking"],"transportation_ban":"no flight"}}"#;
        let q: TravelQuery = serde_json::from_str(line).unwrap();
        q.validate().unwrap();
        assert_eq!(q.destination.city_count(), 3);
        assert_eq!(q.applicable_hard_constraints(), 3);
    }
}
