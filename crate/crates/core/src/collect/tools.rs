use chrono::NaiveDate;

use super::tool_call::{ToolCall, ToolName};
use crate::domain::{format_record, SandboxRecord, TravelMode};
use crate::sandbox::TravelDatabase;

fn parse_mode(text: &str) -> Option<TravelMode> {
    match text.trim().to_lowercase().replace(' ', "-").as_str() {
        "self-driving" | "driving" | "drive" => Some(TravelMode::SelfDriving),
        "taxi" => Some(TravelMode::Taxi),
        _ => None,
    }
}

/// Runs a search tool and returns its record lines. DailyPlanner is not a search.
pub fn execute(call: &ToolCall, db: &TravelDatabase) -> Result<Vec<String>, String> {
    let a = &call.args;
    let lines = match call.name {
        ToolName::FlightSearch => {
            let date = NaiveDate::parse_from_str(a[2].trim(), "%Y-%m-%d")
                .map_err(|_| format!("Invalid date {:?}; use YYYY-MM-DD.", a[2]))?;
            db.flight_search(&a[0], &a[1], date)
                .into_iter()
                .map(|f| format_record(&SandboxRecord::Flight(f.clone())))
                .collect()
        }
        ToolName::DistanceMatrix => {
            let mode = parse_mode(&a[2]).ok_or_else(|| format!("Invalid mode {:?}; use self-driving or taxi.", a[2]))?;
            db.distance_matrix(&a[0], &a[1], mode)
                .map(|d| format_record(&SandboxRecord::Distance(d.clone())))
                .into_iter()
                .collect()
        }
        ToolName::AccommodationSearch => db
            .accommodation_search(&a[0])
            .into_iter()
            .map(|r| format_record(&SandboxRecord::Accommodation(r.clone())))
            .collect(),
        ToolName::RestaurantSearch => db
            .restaurant_search(&a[0])
            .into_iter()
            .map(|r| format_record(&SandboxRecord::Restaurant(r.clone())))
            .collect(),
        ToolName::AttractionSearch => db
            .attraction_search(&a[0])
            .into_iter()
            .map(|r| format_record(&SandboxRecord::Attraction(r.clone())))
            .collect(),
        ToolName::CitySearch => db.city_search(&a[0]).into_iter().map(|c| format!("City: {c}")).collect(),
        ToolName::DailyPlanner => return Err("DailyPlanner is not a search tool.".into()),
    };
    Ok(lines)
}
