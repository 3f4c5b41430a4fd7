use std::fmt;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::route::RouteSkeleton;
use crate::domain::{TransportBan, TravelMode, TravelQuery};
use crate::sandbox::TravelDatabase;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegStatus {
    Ok,
    FlightOnly,
    DriveOnly,
    Infeasible,
}

impl fmt::Display for LegStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LegStatus::Ok => "ok",
            LegStatus::FlightOnly => "flight only",
            LegStatus::DriveOnly => "driving only",
            LegStatus::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TransportOption {
    Flight,
    SelfDriving,
    Taxi,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LegVerdict {
    pub day: u32,
    pub from: String,
    pub to: String,
    pub date: NaiveDate,
    /// Options left after applying the query's ban.
    pub options: Vec<TransportOption>,
    pub status: LegStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub legs: Vec<LegVerdict>,
    /// Explanation of infeasible legs; empty when every leg can be travelled.
    pub feedback: String,
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        self.legs.iter().all(|l| l.status != LegStatus::Infeasible)
    }

    /// One line per leg restricted to a single mode, e.g. "Day 1 (Ontario to Honolulu): flight only".
    pub fn transport_notes(&self) -> Vec<String> {
        self.legs
            .iter()
            .filter(|l| matches!(l.status, LegStatus::FlightOnly | LegStatus::DriveOnly))
            .map(|l| {
                let only = match l.options.as_slice() {
                    [TransportOption::Taxi] => "taxi only".to_string(),
                    _ => l.status.to_string(),
                };
                format!("Day {} ({} to {}): {only}", l.day, l.from, l.to)
            })
            .collect()
    }
}

/// Available options on a leg on a date, with the ban applied.
pub fn leg_options(from: &str, to: &str, date: NaiveDate, query: &TravelQuery, db: &TravelDatabase) -> Vec<TransportOption> {
    let ban = query.hard_constraints.transportation_ban;
    let mut options = Vec::new();
    if ban != Some(TransportBan::NoFlight) && !db.flight_search(from, to, date).is_empty() {
        options.push(TransportOption::Flight);
    }
    if ban != Some(TransportBan::NoSelfDriving) && db.distance_matrix(from, to, TravelMode::SelfDriving).is_some() {
        options.push(TransportOption::SelfDriving);
    }
    if db.distance_matrix(from, to, TravelMode::Taxi).is_some() {
        options.push(TransportOption::Taxi);
    }
    options
}

pub fn evaluate_transportation(route: &RouteSkeleton, query: &TravelQuery, db: &TravelDatabase) -> FeasibilityVerdict {
    let mut legs = Vec::new();
    let mut feedback = Vec::new();
    for (day, from, to) in route.legs() {
        let date = query.date_of_day(day);
        let options = leg_options(from, to, date, query, db);
        let status = match options.as_slice() {
            [] => LegStatus::Infeasible,
            [TransportOption::Flight] => LegStatus::FlightOnly,
            [_] => LegStatus::DriveOnly,
            _ => LegStatus::Ok,
        };
        if status == LegStatus::Infeasible {
            let why = match query.hard_constraints.transportation_ban {
                Some(ban) => format!(" under \"{}\"", ban.as_str()),
                None => String::new(),
            };
            feedback.push(format!(
                "Day {day}: there is no way to travel from {from} to {to} on {date}{why}. Choose a different city or order."
            ));
        }
        legs.push(LegVerdict { day, from: from.to_string(), to: to.to_string(), date, options, status });
    }
    FeasibilityVerdict { legs, feedback: feedback.join("\n") }
}
