use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Money, RoomRule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unrecognised {kind} {value:?}")]
pub struct VocabularyError {
    pub kind: &'static str,
    pub value: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RoomType {
    PrivateRoom,
    SharedRoom,
    EntireHome,
}

impl RoomType {
    pub fn as_str(self) -> &'static str {
        match self {
            RoomType::PrivateRoom => "Private room",
            RoomType::SharedRoom => "Shared room",
            RoomType::EntireHome => "Entire home/apt",
        }
    }
}

impl FromStr for RoomType {
    type Err = VocabularyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "private room" => Ok(RoomType::PrivateRoom),
            "shared room" => Ok(RoomType::SharedRoom),
            "entire home/apt" | "entire home" => Ok(RoomType::EntireHome),
            _ => Err(VocabularyError { kind: "room type", value: s.to_string() }),
        }
    }
}

/// A prohibition listed in an accommodation's house rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HouseRule {
    NoSmoking,
    NoParties,
    NoChildrenUnder10,
    NoVisitors,
    NoPets,
}

impl HouseRule {
    pub fn as_str(self) -> &'static str {
        match self {
            HouseRule::NoSmoking => "No smoking",
            HouseRule::NoParties => "No parties",
            HouseRule::NoChildrenUnder10 => "No children under 10",
            HouseRule::NoVisitors => "No visitors",
            HouseRule::NoPets => "No pets",
        }
    }

    /// Whether this house rule rules out a requirement stated in a query.
    pub fn prohibits(self, rule: RoomRule) -> bool {
        matches!(
            (self, rule),
            (HouseRule::NoSmoking, RoomRule::Smoking)
                | (HouseRule::NoParties, RoomRule::Parties)
                | (HouseRule::NoChildrenUnder10, RoomRule::Children)
                | (HouseRule::NoVisitors, RoomRule::Visitors)
                | (HouseRule::NoPets, RoomRule::Pets)
        )
    }

    /// Parses the `&`-joined form used in data files, e.g. `No visitors & No pets`.
    pub fn parse_set(text: &str) -> Result<BTreeSet<HouseRule>, VocabularyError> {
        text.split('&')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect()
    }

    pub fn render_set(rules: &BTreeSet<HouseRule>) -> String {
        rules.iter().map(|r| r.as_str()).collect::<Vec<_>>().join(" & ")
    }
}

impl FromStr for HouseRule {
    type Err = VocabularyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "no smoking" => Ok(HouseRule::NoSmoking),
            "no parties" => Ok(HouseRule::NoParties),
            "no children under 10" | "no children" => Ok(HouseRule::NoChildrenUnder10),
            "no visitors" => Ok(HouseRule::NoVisitors),
            "no pets" => Ok(HouseRule::NoPets),
            _ => Err(VocabularyError { kind: "house rule", value: s.to_string() }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TravelMode {
    #[serde(rename = "self-driving")]
    SelfDriving,
    #[serde(rename = "taxi")]
    Taxi,
}

impl TravelMode {
    pub fn as_str(self) -> &'static str {
        match self {
            TravelMode::SelfDriving => "self-driving",
            TravelMode::Taxi => "taxi",
        }
    }

    /// Capitalised label used inside plan entries ("Self-driving", "Taxi").
    pub fn label(self) -> &'static str {
        match self {
            TravelMode::SelfDriving => "Self-driving",
            TravelMode::Taxi => "Taxi",
        }
    }
}

impl FromStr for TravelMode {
    type Err = VocabularyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "self-driving" | "self driving" | "driving" => Ok(TravelMode::SelfDriving),
            "taxi" => Ok(TravelMode::Taxi),
            _ => Err(VocabularyError { kind: "travel mode", value: s.to_string() }),
        }
    }
}

impl fmt::Display for TravelMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Flight {
    pub number: String,
    pub price: Money,
    pub dep_time: NaiveTime,
    pub arr_time: NaiveTime,
    pub origin_city: String,
    pub dest_city: String,
    pub date: NaiveDate,
}

impl Flight {
    /// Transportation entry as written into a daily plan.
    pub fn plan_entry(&self) -> String {
        format!(
            "Flight Number: {}, from {} to {}, Departure Time: {}, Arrival Time: {}",
            self.number,
            self.origin_city,
            self.dest_city,
            self.dep_time.format("%H:%M"),
            self.arr_time.format("%H:%M")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Accommodation {
    pub name: String,
    pub room_type: RoomType,
    /// Per night per room.
    pub price: Money,
    pub min_nights: u32,
    pub review_rate: f64,
    pub house_rules: BTreeSet<HouseRule>,
    pub max_occupancy: u32,
    pub city: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Restaurant {
    pub name: String,
    pub city: String,
    pub cuisines: Vec<String>,
    /// Per person.
    pub avg_cost: Money,
    pub rating: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attraction {
    pub name: String,
    pub city: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    pub origin_city: String,
    pub dest_city: String,
    pub mode: TravelMode,
    pub distance_km: f64,
    pub duration_hours: f64,
    /// Per trip for self-driving, per person for taxi.
    pub cost: Money,
}

impl Distance {
    pub fn plan_entry(&self) -> String {
        format!(
            "{}, from {} to {}, Duration: {} hours, Distance: {} km, Cost: {}",
            self.mode.label(),
            self.origin_city,
            self.dest_city,
            self.duration_hours,
            self.distance_km,
            self.cost
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SandboxRecord {
    Flight(Flight),
    Accommodation(Accommodation),
    Restaurant(Restaurant),
    Attraction(Attraction),
    Distance(Distance),
}

/// One reader-friendly line per record: every value is preceded by its field name.
pub fn format_record(record: &SandboxRecord) -> String {
    match record {
        SandboxRecord::Flight(f) => format!(
            "Flight Number: {}; Price: {}; DepTime: {}; ArrTime: {}; OriginCityName: {}; DestCityName: {}",
            f.number,
            f.price,
            f.dep_time.format("%H:%M"),
            f.arr_time.format("%H:%M"),
            f.origin_city,
            f.dest_city
        ),
        SandboxRecord::Accommodation(a) => format!(
            "Accommodation: {}; Room type: {}; Price: {}; Minimum number of nights stay: {}; review rate number: {}; House rules: {}; One room can accommodate how many people: {}; City: {}",
            a.name,
            a.room_type.as_str(),
            a.price,
            a.min_nights,
            a.review_rate,
            HouseRule::render_set(&a.house_rules),
            a.max_occupancy,
            a.city
        ),
        SandboxRecord::Restaurant(r) => format!(
            "Restaurant: {}; City: {}; Cuisines: {}; Average Cost: {}; Rating: {}",
            r.name,
            r.city,
            r.cuisines.join(", "),
            r.avg_cost,
            r.rating
        ),
        SandboxRecord::Attraction(a) => format!("Attraction Name: {}; City: {}", a.name, a.city),
        SandboxRecord::Distance(d) => format!(
            "Mode: {}; From: {}; To: {}; Duration: {} hours; Distance: {} km; Cost: {}",
            d.mode.label(),
            d.origin_city,
            d.dest_city,
            d.duration_hours,
            d.distance_km,
            d.cost
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn time(h: u32, m: u32) -> NaiveTime {
        NaiveTime::from_hms_opt(h, m, 0).unwrap()
    }

    #[test]
    fn flight_line_matches_dump_layout() {
        let f = Flight {
            number: "F3502691".into(),
            price: Money::from_dollars(240),
            dep_time: time(18, 48),
            arr_time: time(20, 51),
            origin_city: "Buffalo".into(),
            dest_city: "Atlanta".into(),
            date: NaiveDate::from_ymd_opt(2022, 3, 2).unwrap(),
        };
        assert_eq!(
            format_record(&SandboxRecord::Flight(f.clone())),
            "Flight Number: F3502691; Price: 240; DepTime: 18:48; ArrTime: 20:51; OriginCityName: Buffalo; DestCityName: Atlanta"
        );
        assert_eq!(
            f.plan_entry(),
            "Flight Number: F3502691, from Buffalo to Atlanta, Departure Time: 18:48, Arrival Time: 20:51"
        );
    }

    #[test]
    fn attraction_and_empty_restaurant() {
        let a = Attraction { name: "Georgia Aquarium".into(), city: "Atlanta".into() };
        assert_eq!(
            format_record(&SandboxRecord::Attraction(a)),
            "Attraction Name: Georgia Aquarium; City: Atlanta"
        );
        let r = Restaurant {
            name: "X".into(),
            city: "Y".into(),
            cuisines: vec![],
            avg_cost: Money::ZERO,
            rating: 0.0,
        };
        assert_eq!(
            format_record(&SandboxRecord::Restaurant(r)),
            "Restaurant: X; City: Y; Cuisines: ; Average Cost: 0; Rating: 0"
        );
    }

    #[test]
    fn accommodation_line() {
        let a = Accommodation {
            name: "1bd in a sunny 2 bd Ft. Greene Apt".into(),
            room_type: RoomType::PrivateRoom,
            price: Money::from_dollars(1056),
            min_nights: 1,
            review_rate: 4.0,
            house_rules: HouseRule::parse_set("No visitors & No pets").unwrap(),
            max_occupancy: 1,
            city: "Atlanta".into(),
        };
        assert_eq!(
            format_record(&SandboxRecord::Accommodation(a)),
            "Accommodation: 1bd in a sunny 2 bd Ft. Greene Apt; Room type: Private room; Price: 1056; Minimum number of nights stay: 1; review rate number: 4; House rules: No visitors & No pets; One room can accommodate how many people: 1; City: Atlanta"
        );
    }

    #[test]
    fn house_rules_vocabulary() {
        assert!(HouseRule::parse_set("").unwrap().is_empty());
        assert!(HouseRule::parse_set("No dancing").is_err());
        assert!(HouseRule::NoSmoking.prohibits(RoomRule::Smoking));
        assert!(!HouseRule::NoSmoking.prohibits(RoomRule::Pets));
    }

    proptest! {
        #[test]
        fn attraction_lines_are_injective(
            a in "[A-Za-z ]{1,12}", b in "[A-Za-z ]{1,12}",
            c in "[A-Za-z]{1,8}", d in "[A-Za-z]{1,8}",
        ) {
            let l = format_record(&SandboxRecord::Attraction(Attraction { name: a.clone(), city: c.clone() }));
            let r = format_record(&SandboxRecord::Attraction(Attraction { name: b.clone(), city: d.clone() }));
            prop_assert_eq!(l == r, a == b && c == d);
        }

        #[test]
        fn flight_lines_are_injective(
            n1 in "F[0-9]{3}", n2 in "F[0-9]{3}", p1 in 0i64..500, p2 in 0i64..500,
            h1 in 0u32..24, h2 in 0u32..24,
        ) {
            let mk = |n: &str, p: i64, h: u32| SandboxRecord::Flight(Flight {
                number: n.into(),
                price: Money::from_dollars(p),
                dep_time: time(h, 0),
                arr_time: time(h, 30),
                origin_city: "A".into(),
                dest_city: "B".into(),
                date: NaiveDate::from_ymd_opt(2022, 3, 1).unwrap(),
            });
            let same = n1 == n2 && p1 == p2 && h1 == h2;
            prop_assert_eq!(format_record(&mk(&n1, p1, h1)) == format_record(&mk(&n2, p2, h2)), same);
        }
    }
}
