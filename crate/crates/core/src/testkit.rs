//! Shared fixtures for unit tests.

use std::path::PathBuf;

use chrono::NaiveDate;

use crate::domain::{
    DestinationScope, HardConstraintSet, Money, RoomRule, RoomTypeRequirement, TransportBan,
    TravelPlan, TravelQuery,
};
use crate::sandbox::{load_database, DataPaths, TravelDatabase};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/data")
}

pub fn fixture_db() -> TravelDatabase {
    load_database(&DataPaths::in_dir(fixture_dir())).expect("fixture database loads")
}

pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
    NaiveDate::from_ymd_opt(y, m, d).unwrap()
}

/// 3-day Buffalo -> Atlanta query matching the appendix plan, with one
/// constraint from every hard family.
pub fn atlanta_query() -> TravelQuery {
    TravelQuery {
        id: "atlanta".into(),
        text: "Please help me plan a 3-day trip for one person from Buffalo to Atlanta from March 2nd to March 4th, 2022, with a budget of $1,100. Accommodations should allow visitors and be private rooms. I'd like to try Indian food, and I will not be self-driving.".into(),
        origin_city: "Buffalo".into(),
        destination: DestinationScope::City("Atlanta".into()),
        start_date: date(2022, 3, 2),
        end_date: date(2022, 3, 4),
        duration_days: 3,
        party_size: 1,
        budget: Money::from_dollars(1100),
        hard_constraints: HardConstraintSet {
            room_rules: [RoomRule::Visitors].into(),
            room_type: Some(RoomTypeRequirement::PrivateRoom),
            cuisines: ["Indian".to_string()].into(),
            transportation_ban: Some(TransportBan::NoSelfDriving),
        },
    }
}

pub fn atlanta_plan() -> TravelPlan {
    crate::domain::plan::tests::appendix_plan()
}

/// 3-day Ontario -> Honolulu query with four hard constraints.
pub fn honolulu_query() -> TravelQuery {
    TravelQuery {
        id: "honolulu".into(),
        text: "Can you help me plan a 3-day trip for one person from Ontario to Honolulu from March 4th to March 6th, 2022, with a budget of $3,200? I'd like an entire home that allows visitors, some seafood, and no self-driving.".into(),
        origin_city: "Ontario".into(),
        destination: DestinationScope::City("Honolulu".into()),
        start_date: date(2022, 3, 4),
        end_date: date(2022, 3, 6),
        duration_days: 3,
        party_size: 1,
        budget: Money::from_dollars(3200),
        hard_constraints: HardConstraintSet {
            room_rules: [RoomRule::Visitors].into(),
            room_type: Some(RoomTypeRequirement::EntireHome),
            cuisines: ["Seafood".to_string()].into(),
            transportation_ban: Some(TransportBan::NoSelfDriving),
        },
    }
}

/// 5-day Albuquerque -> two Texas cities query without hard constraints.
pub fn texas_query() -> TravelQuery {
    TravelQuery {
        id: "texas".into(),
        text: "Could you please create a 5-day travel itinerary for one person, starting in Albuquerque and visiting 2 cities in Texas from March 25th to March 29th, 2022? The travel plan should work within a budget of $2,100.".into(),
        origin_city: "Albuquerque".into(),
        destination: DestinationScope::State { state: "Texas".into(), cities: 2 },
        start_date: date(2022, 3, 25),
        end_date: date(2022, 3, 29),
        duration_days: 5,
        party_size: 1,
        budget: Money::from_dollars(2100),
        hard_constraints: HardConstraintSet::default(),
    }
}

pub fn script(name: &str) -> crate::llm::AgentScript {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("tests/fixtures/scripts/{name}.json"));
    serde_json::from_str(&std::fs::read_to_string(path).expect("script file")).expect("script parses")
}

pub const GUIDES: &str = "1. Accommodations should be booked for the correct dates, ensuring no gaps or overlaps in lodging.\n2. Dining options should be reasonably spaced throughout the day.";

/// Outline for the Honolulu query built straight from its script.
pub fn honolulu_outline() -> crate::outline::Outline {
    let db = fixture_db();
    let s = script("honolulu");
    crate::outline::Outline {
        route: crate::outline::parse_route(&s.routes[0], &db).expect("route parses"),
        keypoints: crate::outline::parse_list(&s.keypoints[0]),
        guides: std::sync::Arc::new(crate::outline::parse_list(GUIDES)),
        transport_notes: Vec::new(),
    }
}
