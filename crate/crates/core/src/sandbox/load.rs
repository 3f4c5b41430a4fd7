use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime};

use super::{SandboxError, TravelDatabase};
use crate::domain::{
    Accommodation, Attraction, Distance, Flight, HouseRule, Money, Restaurant, RoomType, TravelMode,
};

pub const FLIGHT_COLUMNS: [&str; 7] = [
    "Flight Number",
    "Price",
    "DepTime",
    "ArrTime",
    "OriginCityName",
    "DestCityName",
    "FlightDate",
];
pub const ACCOMMODATION_COLUMNS: [&str; 8] = [
    "Accommodation",
    "Room type",
    "Price",
    "Minimum number of nights stay",
    "review rate number",
    "House rules",
    "One room can accommodate how many people",
    "City",
];
pub const RESTAURANT_COLUMNS: [&str; 5] = ["Restaurant", "City", "Cuisines", "Average Cost", "Rating"];
pub const ATTRACTION_COLUMNS: [&str; 2] = ["Attraction Name", "City"];
pub const DISTANCE_COLUMNS: [&str; 6] =
    ["OriginCityName", "DestCityName", "Mode", "Distance", "Duration", "Cost"];
pub const CITY_COLUMNS: [&str; 2] = ["state", "city"];

/// Locations of the six data files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataPaths {
    pub flights: PathBuf,
    pub accommodations: PathBuf,
    pub restaurants: PathBuf,
    pub attractions: PathBuf,
    pub distances: PathBuf,
    pub cities: PathBuf,
}

impl DataPaths {
    pub fn in_dir(dir: impl AsRef<Path>) -> Self {
        let dir = dir.as_ref();
        DataPaths {
            flights: dir.join("flights.csv"),
            accommodations: dir.join("accommodations.csv"),
            restaurants: dir.join("restaurants.csv"),
            attractions: dir.join("attractions.csv"),
            distances: dir.join("distances.csv"),
            cities: dir.join("cities.csv"),
        }
    }
}

struct Table {
    file: String,
    columns: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    fn read(path: &Path, expected: &[&str]) -> Result<Table, SandboxError> {
        let file_name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        let handle = File::open(path).map_err(|source| SandboxError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(handle);
        let csv_err = |e: csv::Error| SandboxError::Csv { file: file_name.clone(), message: e.to_string() };
        let headers = reader.headers().map_err(csv_err)?.clone();
        let mut columns = HashMap::new();
        for (i, h) in headers.iter().enumerate() {
            if !expected.contains(&h) {
                return Err(SandboxError::UnknownColumn { file: file_name, column: h.to_string() });
            }
            if columns.insert(h.to_string(), i).is_some() {
                return Err(SandboxError::DuplicateColumn { file: file_name, column: h.to_string() });
            }
        }
        if let Some(missing) = expected.iter().find(|c| !columns.contains_key(**c)) {
            return Err(SandboxError::MissingColumn { file: file_name, column: missing.to_string() });
        }
        let rows = reader
            .records()
            .collect::<Result<Vec<_>, _>>()
            .map_err(csv_err)?;
        Ok(Table { file: file_name, columns, rows })
    }

    fn cell<'r>(&self, row: &'r csv::StringRecord, column: &str) -> &'r str {
        row.get(self.columns[column]).unwrap_or("")
    }

    fn parse<T>(
        &self,
        index: usize,
        row: &csv::StringRecord,
        column: &str,
        parse: impl FnOnce(&str) -> Option<T>,
    ) -> Result<T, SandboxError> {
        let raw = self.cell(row, column);
        parse(raw).ok_or_else(|| SandboxError::BadValue {
            file: self.file.clone(),
            row: index + 2,
            column: column.to_string(),
            value: raw.to_string(),
        })
    }

    fn text(&self, index: usize, row: &csv::StringRecord, column: &str) -> Result<String, SandboxError> {
        self.parse(index, row, column, |s| (!s.is_empty()).then(|| s.to_string()))
    }
}

fn money(s: &str) -> Option<Money> {
    Money::from_str(s).ok().filter(|m| !m.is_negative())
}

fn non_negative(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|v| v.is_finite() && *v >= 0.0)
}

/// Integer that may be written in fractional form ("2.0").
fn count(s: &str) -> Option<u32> {
    let v: f64 = s.parse().ok()?;
    (v.fract() == 0.0 && v >= 1.0 && v <= f64::from(u32::MAX)).then_some(v as u32)
}

fn clock(s: &str) -> Option<NaiveTime> {
    NaiveTime::parse_from_str(s, "%H:%M").ok()
}

fn date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok()
}

pub fn load_database(paths: &DataPaths) -> Result<TravelDatabase, SandboxError> {
    let t = Table::read(&paths.flights, &FLIGHT_COLUMNS)?;
    let flights = t
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(Flight {
                number: t.text(i, r, "Flight Number")?,
                price: t.parse(i, r, "Price", money)?,
                dep_time: t.parse(i, r, "DepTime", clock)?,
                arr_time: t.parse(i, r, "ArrTime", clock)?,
                origin_city: t.text(i, r, "OriginCityName")?,
                dest_city: t.text(i, r, "DestCityName")?,
                date: t.parse(i, r, "FlightDate", date)?,
            })
        })
        .collect::<Result<Vec<_>, SandboxError>>()?;

    let t = Table::read(&paths.accommodations, &ACCOMMODATION_COLUMNS)?;
    let accommodations = t
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(Accommodation {
                name: t.text(i, r, "Accommodation")?,
                room_type: t.parse(i, r, "Room type", |s| RoomType::from_str(s).ok())?,
                price: t.parse(i, r, "Price", money)?,
                min_nights: t.parse(i, r, "Minimum number of nights stay", count)?,
                review_rate: t.parse(i, r, "review rate number", non_negative)?,
                house_rules: t.parse(i, r, "House rules", |s| HouseRule::parse_set(s).ok())?,
                max_occupancy: t.parse(i, r, "One room can accommodate how many people", count)?,
                city: t.text(i, r, "City")?,
            })
        })
        .collect::<Result<Vec<_>, SandboxError>>()?;

    let t = Table::read(&paths.restaurants, &RESTAURANT_COLUMNS)?;
    let restaurants = t
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(Restaurant {
                name: t.text(i, r, "Restaurant")?,
                city: t.text(i, r, "City")?,
                cuisines: t
                    .cell(r, "Cuisines")
                    .split(',')
                    .map(str::trim)
                    .filter(|c| !c.is_empty())
                    .map(String::from)
                    .collect(),
                avg_cost: t.parse(i, r, "Average Cost", money)?,
                rating: t.parse(i, r, "Rating", non_negative)?,
            })
        })
        .collect::<Result<Vec<_>, SandboxError>>()?;

    let t = Table::read(&paths.attractions, &ATTRACTION_COLUMNS)?;
    let attractions = t
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(Attraction { name: t.text(i, r, "Attraction Name")?, city: t.text(i, r, "City")? })
        })
        .collect::<Result<Vec<_>, SandboxError>>()?;

    let t = Table::read(&paths.distances, &DISTANCE_COLUMNS)?;
    let distances = t
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            Ok(Distance {
                origin_city: t.text(i, r, "OriginCityName")?,
                dest_city: t.text(i, r, "DestCityName")?,
                mode: t.parse(i, r, "Mode", |s| TravelMode::from_str(s).ok())?,
                distance_km: t.parse(i, r, "Distance", non_negative)?,
                duration_hours: t.parse(i, r, "Duration", non_negative)?,
                cost: t.parse(i, r, "Cost", money)?,
            })
        })
        .collect::<Result<Vec<_>, SandboxError>>()?;

    let t = Table::read(&paths.cities, &CITY_COLUMNS)?;
    let cities = t
        .rows
        .iter()
        .enumerate()
        .map(|(i, r)| Ok((t.text(i, r, "state")?, t.text(i, r, "city")?)))
        .collect::<Result<Vec<_>, SandboxError>>()?;

    TravelDatabase::from_records(flights, accommodations, restaurants, attractions, distances, cities)
}
