//! Local travel database and the search tools exposed to the agent.
//!
//! The database is immutable after construction. City and venue names are
//! matched case-insensitively; results come back in file order except for
//! flights, which are ordered by departure time.

mod load;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::PathBuf;

use chrono::NaiveDate;
use serde::Serialize;
use thiserror::Error;

pub use load::{
    load_database, DataPaths, ACCOMMODATION_COLUMNS, ATTRACTION_COLUMNS, CITY_COLUMNS,
    DISTANCE_COLUMNS, FLIGHT_COLUMNS, RESTAURANT_COLUMNS,
};

use crate::domain::{Accommodation, Attraction, Distance, Flight, Restaurant, TravelMode};

#[derive(Debug, Error)]
pub enum SandboxError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}: {message}")]
    Csv { file: String, message: String },
    #[error("{file}: unknown column {column:?}")]
    UnknownColumn { file: String, column: String },
    #[error("{file}: missing column {column:?}")]
    MissingColumn { file: String, column: String },
    #[error("{file}: column {column:?} appears twice")]
    DuplicateColumn { file: String, column: String },
    #[error("{file} line {row}: bad value {value:?} in column {column:?}")]
    BadValue {
        file: String,
        row: usize,
        column: String,
        value: String,
    },
    #[error("duplicate flight number {0}")]
    DuplicateFlight(String),
    #[error("duplicate {mode} distance record for {origin} -> {dest}")]
    DuplicateDistance {
        origin: String,
        dest: String,
        mode: TravelMode,
    },
    #[error("{file}: city {city:?} is not listed in cities.csv")]
    UnknownCity { file: String, city: String },
}

fn key(s: &str) -> String {
    s.trim().to_lowercase()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RowCounts {
    pub flights: usize,
    pub accommodations: usize,
    pub restaurants: usize,
    pub attractions: usize,
    pub distances: usize,
    pub cities: usize,
}

#[derive(Debug, Default)]
pub struct TravelDatabase {
    flights: Vec<Flight>,
    accommodations: Vec<Accommodation>,
    restaurants: Vec<Restaurant>,
    attractions: Vec<Attraction>,
    distances: Vec<Distance>,
    /// (state, city) rows in file order.
    cities: Vec<(String, String)>,

    flights_by_leg: HashMap<(String, String, NaiveDate), Vec<usize>>,
    flight_by_number: HashMap<String, usize>,
    accommodations_by_city: HashMap<String, Vec<usize>>,
    restaurants_by_city: HashMap<String, Vec<usize>>,
    attractions_by_city: HashMap<String, Vec<usize>>,
    distance_by_leg: HashMap<(String, String, TravelMode), usize>,
    cities_by_state: BTreeMap<String, Vec<usize>>,
    state_by_city: HashMap<String, usize>,
}

impl TravelDatabase {
    /// Builds and validates the indices over already-parsed rows.
    pub fn from_records(
        flights: Vec<Flight>,
        accommodations: Vec<Accommodation>,
        restaurants: Vec<Restaurant>,
        attractions: Vec<Attraction>,
        distances: Vec<Distance>,
        cities: Vec<(String, String)>,
    ) -> Result<Self, SandboxError> {
        let mut db = TravelDatabase {
            flights,
            accommodations,
            restaurants,
            attractions,
            distances,
            cities,
            ..Default::default()
        };

        for (i, (state, city)) in db.cities.iter().enumerate() {
            db.cities_by_state.entry(key(state)).or_default().push(i);
            db.state_by_city.entry(key(city)).or_insert(i);
        }
        let known = |db: &TravelDatabase, file: &str, city: &str| {
            if db.state_by_city.contains_key(&key(city)) {
                Ok(())
            } else {
                Err(SandboxError::UnknownCity { file: file.into(), city: city.into() })
            }
        };

        for (i, f) in db.flights.iter().enumerate() {
            known(&db, "flights.csv", &f.origin_city)?;
            known(&db, "flights.csv", &f.dest_city)?;
            if db.flight_by_number.insert(key(&f.number), i).is_some() {
                return Err(SandboxError::DuplicateFlight(f.number.clone()));
            }
        }
        let mut by_leg: HashMap<(String, String, NaiveDate), Vec<usize>> = HashMap::new();
        for (i, f) in db.flights.iter().enumerate() {
            by_leg.entry((key(&f.origin_city), key(&f.dest_city), f.date)).or_default().push(i);
        }
        for rows in by_leg.values_mut() {
            // stable: equal departure times keep file order
            rows.sort_by_key(|&i| db.flights[i].dep_time);
        }
        db.flights_by_leg = by_leg;

        for (i, d) in db.distances.iter().enumerate() {
            known(&db, "distances.csv", &d.origin_city)?;
            known(&db, "distances.csv", &d.dest_city)?;
            let leg = (key(&d.origin_city), key(&d.dest_city), d.mode);
            if db.distance_by_leg.insert(leg, i).is_some() {
                return Err(SandboxError::DuplicateDistance {
                    origin: d.origin_city.clone(),
                    dest: d.dest_city.clone(),
                    mode: d.mode,
                });
            }
        }
        for (i, a) in db.accommodations.iter().enumerate() {
            db.accommodations_by_city.entry(key(&a.city)).or_default().push(i);
        }
        for (i, r) in db.restaurants.iter().enumerate() {
            db.restaurants_by_city.entry(key(&r.city)).or_default().push(i);
        }
        for (i, a) in db.attractions.iter().enumerate() {
            db.attractions_by_city.entry(key(&a.city)).or_default().push(i);
        }
        Ok(db)
    }

    pub fn counts(&self) -> RowCounts {
        RowCounts {
            flights: self.flights.len(),
            accommodations: self.accommodations.len(),
            restaurants: self.restaurants.len(),
            attractions: self.attractions.len(),
            distances: self.distances.len(),
            cities: self.cities.len(),
        }
    }

    pub fn flights(&self) -> &[Flight] {
        &self.flights
    }
    pub fn accommodations(&self) -> &[Accommodation] {
        &self.accommodations
    }
    pub fn restaurants(&self) -> &[Restaurant] {
        &self.restaurants
    }
    pub fn attractions(&self) -> &[Attraction] {
        &self.attractions
    }
    pub fn distances(&self) -> &[Distance] {
        &self.distances
    }
    /// (state, city) rows in file order.
    pub fn cities(&self) -> &[(String, String)] {
        &self.cities
    }

    /// All flights for the leg on the date, earliest departure first.
    pub fn flight_search(&self, origin: &str, dest: &str, date: NaiveDate) -> Vec<&Flight> {
        self.flights_by_leg
            .get(&(key(origin), key(dest), date))
            .map(|rows| rows.iter().map(|&i| &self.flights[i]).collect())
            .unwrap_or_default()
    }

    /// The unique record for the leg and mode. Same-city legs have none.
    pub fn distance_matrix(&self, origin: &str, dest: &str, mode: TravelMode) -> Option<&Distance> {
        if key(origin) == key(dest) {
            return None;
        }
        self.distance_by_leg
            .get(&(key(origin), key(dest), mode))
            .map(|&i| &self.distances[i])
    }

    pub fn accommodation_search(&self, city: &str) -> Vec<&Accommodation> {
        Self::select(&self.accommodations_by_city, &self.accommodations, city)
    }

    pub fn restaurant_search(&self, city: &str) -> Vec<&Restaurant> {
        Self::select(&self.restaurants_by_city, &self.restaurants, city)
    }

    pub fn attraction_search(&self, city: &str) -> Vec<&Attraction> {
        Self::select(&self.attractions_by_city, &self.attractions, city)
    }

    /// City names listed for a state, in file order.
    pub fn city_search(&self, state: &str) -> Vec<&str> {
        self.cities_by_state
            .get(&key(state))
            .map(|rows| rows.iter().map(|&i| self.cities[i].1.as_str()).collect())
            .unwrap_or_default()
    }

    /// Canonical spelling of a known city.
    pub fn canonical_city(&self, city: &str) -> Option<&str> {
        self.state_by_city.get(&key(city)).map(|&i| self.cities[i].1.as_str())
    }

    pub fn state_of(&self, city: &str) -> Option<&str> {
        self.state_by_city.get(&key(city)).map(|&i| self.cities[i].0.as_str())
    }

    pub fn all_cities(&self) -> HashSet<&str> {
        self.cities.iter().map(|(_, c)| c.as_str()).collect()
    }

    pub fn flight_by_number(&self, number: &str) -> Option<&Flight> {
        self.flight_by_number.get(&key(number)).map(|&i| &self.flights[i])
    }

    pub fn find_accommodation(&self, name: &str, city: &str) -> Option<&Accommodation> {
        self.accommodation_search(city).into_iter().find(|a| key(&a.name) == key(name))
    }

    pub fn find_restaurant(&self, name: &str, city: &str) -> Option<&Restaurant> {
        self.restaurant_search(city).into_iter().find(|r| key(&r.name) == key(name))
    }

    pub fn find_attraction(&self, name: &str, city: &str) -> Option<&Attraction> {
        self.attraction_search(city).into_iter().find(|a| key(&a.name) == key(name))
    }

    fn select<'a, T>(index: &HashMap<String, Vec<usize>>, rows: &'a [T], city: &str) -> Vec<&'a T> {
        index
            .get(&key(city))
            .map(|ids| ids.iter().map(|&i| &rows[i]).collect())
            .unwrap_or_default()
    }
}

/// Case-insensitive name equality used across the crate.
pub fn same_name(a: &str, b: &str) -> bool {
    key(a) == key(b)
}
