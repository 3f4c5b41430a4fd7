//! Deterministic commonsense and hard-constraint checking.
//!
//! Plan scope evaluates a delivered plan for metrics. Day scope evaluates one
//! candidate day against the days already committed, for plan-search ranking.

pub mod parse;

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::domain::{
    Accommodation, DailyPlan, ErrorCode, Money, PlanField, RoomType, RoomTypeRequirement,
    TransportBan, TravelMode, TravelQuery,
};
use crate::sandbox::{same_name, TravelDatabase};
use parse::{CityEntry, DayView, Transport, Venue};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Day,
    Plan,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Location {
    pub day: u32,
    pub field: PlanField,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub code: ErrorCode,
    pub detail: String,
    pub location: Location,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    pub scope: Scope,
    pub findings: Vec<Finding>,
    pub passed_commonsense: BTreeMap<ErrorCode, bool>,
    pub passed_hard: BTreeMap<ErrorCode, bool>,
    /// Whole-plan cost at plan scope; committed prefix cost at day scope.
    pub cost: Money,
}

impl ConstraintReport {
    pub fn has(&self, code: ErrorCode) -> bool {
        self.findings.iter().any(|f| f.code == code)
    }

    pub fn significant_count(&self) -> usize {
        self.findings.iter().filter(|f| f.code.is_significant()).count()
    }

    pub fn has_significant(&self) -> bool {
        self.significant_count() > 0
    }

    pub fn all_commonsense_passed(&self) -> bool {
        self.passed_commonsense.values().all(|p| *p)
    }

    pub fn all_hard_passed(&self) -> bool {
        self.passed_hard.values().all(|p| *p)
    }

    pub fn commonsense_passed_count(&self) -> usize {
        self.passed_commonsense.values().filter(|p| **p).count()
    }

    pub fn hard_passed_count(&self) -> usize {
        self.passed_hard.values().filter(|p| **p).count()
    }
}

/// Findings keyed by (code, location); repeated hits at one location merge their details.
#[derive(Default)]
struct Findings(BTreeMap<(ErrorCode, Location), Vec<String>>);

impl Findings {
    fn add(&mut self, code: ErrorCode, day: u32, field: PlanField, detail: impl Into<String>) {
        let detail = detail.into();
        let entry = self.0.entry((code, Location { day, field })).or_default();
        if !entry.contains(&detail) {
            entry.push(detail);
        }
    }

    fn into_vec(self, keep: impl Fn(&Location) -> bool) -> Vec<Finding> {
        self.0
            .into_iter()
            .filter(|((_, loc), _)| keep(loc))
            .map(|((code, location), details)| Finding { code, detail: details.join("; "), location })
            .collect()
    }
}

pub fn rooms_required(party_size: u32, max_occupancy: u32) -> u32 {
    party_size.div_ceil(max_occupancy.max(1))
}

struct Checker<'a> {
    query: &'a TravelQuery,
    db: &'a TravelDatabase,
}

impl<'a> Checker<'a> {
    fn party(&self) -> i64 {
        i64::from(self.query.party_size)
    }

    fn restaurant(&self, v: &Venue) -> Option<&'a crate::domain::Restaurant> {
        self.db.find_restaurant(&v.name, v.city.as_deref()?)
    }

    fn accommodation(&self, v: &Venue) -> Option<&'a Accommodation> {
        self.db.find_accommodation(&v.name, v.city.as_deref()?)
    }

    fn transport_cost(&self, t: &Transport) -> Money {
        match t {
            Transport::Flight { number, .. } => self
                .db
                .flight_by_number(number)
                .map(|f| f.price * self.party())
                .unwrap_or_default(),
            Transport::Ground { mode, leg: Some((a, b)) } => match self.db.distance_matrix(a, b, *mode) {
                Some(d) if *mode == TravelMode::SelfDriving => d.cost,
                Some(d) => d.cost * self.party(),
                None => Money::ZERO,
            },
            _ => Money::ZERO,
        }
    }

    /// Cost of each priced field of a day, in plan field order.
    fn field_costs(&self, v: &DayView) -> Vec<(PlanField, Money)> {
        let mut out = Vec::new();
        if let Some(t) = &v.transport {
            out.push((PlanField::Transportation, self.transport_cost(t)));
        }
        for (field, venue) in &v.meals {
            let c = self.restaurant(venue).map(|r| r.avg_cost * self.party()).unwrap_or_default();
            out.push((*field, c));
        }
        if let Some(a) = v.accommodation.as_ref().and_then(|a| self.accommodation(a)) {
            let rooms = rooms_required(self.query.party_size, a.max_occupancy);
            out.push((PlanField::Accommodation, a.price * i64::from(rooms)));
        }
        out.sort_by_key(|(f, _)| *f);
        out
    }

    fn day_cost(&self, v: &DayView) -> Money {
        self.field_costs(v).into_iter().map(|(_, c)| c).sum()
    }

    // sandbox existence
    fn sandbox(&self, v: &DayView, out: &mut Findings) {
        let day = v.plan.day;
        let date = self.query.date_of_day(day);
        match &v.transport {
            None => {}
            Some(Transport::Flight { number, leg }) => match self.db.flight_by_number(number) {
                None => out.add(ErrorCode::HallucinatedInformation, day, PlanField::Transportation, format!("flight {number} does not exist")),
                Some(f) => {
                    if f.date != date {
                        out.add(ErrorCode::HallucinatedInformation, day, PlanField::Transportation, format!("flight {number} does not fly on {date}"));
                    }
                    if let Some((a, b)) = leg {
                        if !same_name(a, &f.origin_city) || !same_name(b, &f.dest_city) {
                            out.add(ErrorCode::HallucinatedInformation, day, PlanField::Transportation, format!("flight {number} does not fly from {a} to {b}"));
                        }
                    }
                }
            },
            Some(Transport::Ground { mode, leg }) => {
                let known = leg.as_ref().is_some_and(|(a, b)| self.db.distance_matrix(a, b, *mode).is_some());
                if !known {
                    out.add(ErrorCode::HallucinatedInformation, day, PlanField::Transportation, format!("no {mode} route for {:?}", v.plan.transportation));
                }
            }
            Some(Transport::Unrecognised(t)) => {
                out.add(ErrorCode::HallucinatedInformation, day, PlanField::Transportation, format!("unrecognised transportation {t:?}"));
            }
        }
        for (field, venue) in &v.meals {
            if self.restaurant(venue).is_none() {
                out.add(ErrorCode::HallucinatedInformation, day, *field, format!("restaurant {:?} not found", v.plan.get(*field)));
            }
        }
        for venue in &v.attractions {
            let found = venue.city.as_deref().is_some_and(|c| self.db.find_attraction(&venue.name, c).is_some());
            if !found {
                out.add(ErrorCode::HallucinatedInformation, day, PlanField::Attraction, format!("attraction {:?} not found", venue.name));
            }
        }
        if let Some(a) = &v.accommodation {
            if self.accommodation(a).is_none() {
                out.add(ErrorCode::HallucinatedInformation, day, PlanField::Accommodation, format!("accommodation {:?} not found", v.plan.accommodation));
            }
        }
    }

    // completeness
    fn complete(&self, v: &DayView, out: &mut Findings) {
        let day = v.plan.day;
        let code = ErrorCode::NecessaryInformationAbsent;
        match &v.city {
            None => out.add(code, day, PlanField::CurrentCity, "current city missing"),
            Some(CityEntry::Transfer { .. }) => {
                if v.transport.is_none() {
                    out.add(code, day, PlanField::Transportation, "transfer day without transportation");
                }
            }
            Some(CityEntry::Stay(_)) => {
                for field in PlanField::MEALS {
                    if v.plan.is_empty_field(field) {
                        out.add(code, day, field, format!("{field} missing on a full day in the city"));
                    }
                }
            }
        }
        if day < self.query.duration_days && v.accommodation.is_none() {
            out.add(code, day, PlanField::Accommodation, "no accommodation for the night");
        }
    }

    // within the current city
    fn within_city(&self, v: &DayView, out: &mut Findings) {
        let Some(city) = &v.city else { return };
        let day = v.plan.day;
        let code = ErrorCode::OutsideCurrentCity;
        if let Some((a, b)) = v.transport.as_ref().and_then(Transport::leg) {
            let ok = match city {
                CityEntry::Transfer { from, to } => same_name(a, from) && same_name(b, to),
                CityEntry::Stay(c) => same_name(a, c) && same_name(b, c),
            };
            if !ok {
                out.add(code, day, PlanField::Transportation, format!("leg {a} -> {b} does not match {:?}", v.plan.current_city));
            }
        }
        for (field, venue) in &v.meals {
            if let Some(c) = &venue.city {
                if !city.contains(c) {
                    out.add(code, day, *field, format!("{} is in {c}", venue.name));
                }
            }
        }
        for venue in &v.attractions {
            if let Some(c) = &venue.city {
                if !city.contains(c) {
                    out.add(code, day, PlanField::Attraction, format!("{} is in {c}", venue.name));
                }
            }
        }
        if let Some(Venue { city: Some(c), name }) = &v.accommodation {
            if !same_name(c, city.end()) {
                out.add(code, day, PlanField::Accommodation, format!("{name} is in {c}, not {}", city.end()));
            }
        }
    }

    /// Route validity. `complete` marks a full plan (count and return checks apply).
    fn route(&self, views: &[DayView], complete: bool, out: &mut Findings) {
        let q = self.query;
        let n = q.duration_days;
        let origin = q.origin_city.as_str();
        let code = ErrorCode::InvalidCityRoute;
        let f = PlanField::CurrentCity;
        let len = views.len() as u32;
        if complete && len != n {
            let at = if len < n { len.max(1) } else { n + 1 };
            out.add(code, at, f, format!("plan has {len} days, query asks for {n}"));
        }
        let mut prev_end: Option<&str> = None;
        let mut visited: Vec<(String, u32)> = Vec::new();
        for v in views {
            let day = v.plan.day;
            let Some(city) = &v.city else {
                prev_end = None;
                continue;
            };
            for c in city.cities() {
                if self.db.canonical_city(c).is_none() {
                    out.add(code, day, f, format!("unknown city {c}"));
                }
                if !same_name(c, origin) && !visited.iter().any(|(x, _)| same_name(x, c)) {
                    visited.push((c.to_string(), day));
                }
            }
            if day == 1 && !(city.is_transfer() && same_name(city.start(), origin)) {
                out.add(code, day, f, format!("trip must start by leaving {origin}"));
            }
            if let Some(prev) = prev_end {
                if !same_name(prev, city.start()) {
                    out.add(code, day, f, format!("day starts in {} but previous day ended in {prev}", city.start()));
                }
            }
            if day == n {
                if !(city.is_transfer() && same_name(city.end(), origin)) {
                    out.add(code, day, f, format!("last day must return to {origin}"));
                }
            } else if same_name(city.end(), origin) {
                out.add(code, day, f, format!("returns to {origin} before the last day"));
            }
            prev_end = Some(city.end());
        }
        let wanted = q.destination.city_count();
        match &q.destination {
            crate::domain::DestinationScope::City(dest) => {
                for (c, day) in &visited {
                    if !same_name(c, dest) {
                        out.add(code, *day, f, format!("{c} is not the destination {dest}"));
                    }
                }
            }
            crate::domain::DestinationScope::State { state, .. } => {
                for (c, day) in &visited {
                    if !self.db.state_of(c).is_some_and(|s| same_name(s, state)) {
                        out.add(code, *day, f, format!("{c} is not in {state}"));
                    }
                }
                if let Some((c, day)) = visited.get(wanted) {
                    out.add(code, *day, f, format!("{c} exceeds the {wanted} cities requested"));
                }
            }
        }
        if complete && visited.len() < wanted {
            out.add(code, 1, f, format!("visits {} of {wanted} destination cities", visited.len()));
        }
    }

    // repeated restaurants and attractions
    fn repetition(&self, views: &[DayView], out: &mut Findings) {
        let mut meals = HashSet::new();
        let mut sights = HashSet::new();
        for v in views {
            for (field, venue) in &v.meals {
                if !meals.insert(venue.key()) {
                    out.add(ErrorCode::RepeatedRestaurant, v.plan.day, *field, format!("{} visited again", venue.name));
                }
            }
            for venue in &v.attractions {
                if !sights.insert(venue.key()) {
                    out.add(ErrorCode::RepeatedAttraction, v.plan.day, PlanField::Attraction, format!("{} visited again", venue.name));
                }
            }
        }
    }

    // conflicting transportation
    fn transport_modes(&self, views: &[DayView], out: &mut Findings) {
        let flights: Vec<u32> = views
            .iter()
            .filter(|v| v.transport.as_ref().is_some_and(Transport::is_flight))
            .map(|v| v.plan.day)
            .collect();
        let drives: Vec<u32> = views
            .iter()
            .filter(|v| v.transport.as_ref().is_some_and(Transport::is_self_driving))
            .map(|v| v.plan.day)
            .collect();
        if flights.is_empty() || drives.is_empty() {
            return;
        }
        for day in flights.iter().chain(&drives) {
            out.add(ErrorCode::ConflictingTransportation, *day, PlanField::Transportation, "trip mixes self-driving and flights");
        }
    }

    /// Maximal runs of consecutive nights in the same accommodation: (first day, nights, venue).
    fn stays<'v>(views: &'v [DayView]) -> Vec<(u32, u32, &'v Venue)> {
        let mut runs: Vec<(u32, u32, &Venue)> = Vec::new();
        let mut prev: Option<(u32, &Venue)> = None;
        for v in views {
            if let Some(a) = &v.accommodation {
                match runs.last_mut() {
                    Some(run) if prev.is_some_and(|(d, p)| d + 1 == v.plan.day && p.key() == a.key()) => run.1 += 1,
                    _ => runs.push((v.plan.day, 1, a)),
                }
            }
            prev = v.accommodation.as_ref().map(|a| (v.plan.day, a));
        }
        runs
    }

    // minimum nights
    fn min_nights(&self, views: &[DayView], out: &mut Findings) {
        for (first, nights, venue) in Self::stays(views) {
            if let Some(a) = self.accommodation(venue) {
                if a.min_nights > nights {
                    out.add(ErrorCode::InvalidAccommodationMinNights, first, PlanField::Accommodation, format!("{} requires {} nights, booked {nights}", a.name, a.min_nights));
                }
            }
        }
    }

    fn hard_day(&self, v: &DayView, out: &mut Findings) {
        let hc = &self.query.hard_constraints;
        let day = v.plan.day;
        if let Some(a) = v.accommodation.as_ref().and_then(|a| self.accommodation(a)) {
            for rule in &hc.room_rules {
                if let Some(r) = a.house_rules.iter().find(|r| r.prohibits(*rule)) {
                    out.add(ErrorCode::HardRoomRule, day, PlanField::Accommodation, format!("{} has rule {:?}, query requires {}", a.name, r.as_str(), rule.as_str()));
                }
            }
            if let Some(req) = hc.room_type {
                let ok = match req {
                    RoomTypeRequirement::PrivateRoom => a.room_type == RoomType::PrivateRoom,
                    RoomTypeRequirement::SharedRoom => a.room_type == RoomType::SharedRoom,
                    RoomTypeRequirement::EntireHome => a.room_type == RoomType::EntireHome,
                    RoomTypeRequirement::NotShared => a.room_type != RoomType::SharedRoom,
                };
                if !ok {
                    out.add(ErrorCode::HardRoomType, day, PlanField::Accommodation, format!("{} is a {}, query requires {}", a.name, a.room_type.as_str(), req.as_str()));
                }
            }
        }
        if let (Some(ban), Some(t)) = (hc.transportation_ban, &v.transport) {
            let banned = match ban {
                TransportBan::NoFlight => t.is_flight(),
                TransportBan::NoSelfDriving => t.is_self_driving(),
            };
            if banned {
                out.add(ErrorCode::HardTransportation, day, PlanField::Transportation, format!("query says {}", ban.as_str()));
            }
        }
    }

    fn cuisines(&self, views: &[DayView], out: &mut Findings) {
        let wanted = &self.query.hard_constraints.cuisines;
        if wanted.is_empty() {
            return;
        }
        let served: HashSet<String> = views
            .iter()
            .flat_map(|v| v.meals.iter())
            .filter_map(|(_, venue)| self.restaurant(venue))
            .flat_map(|r| r.cuisines.iter().map(|c| c.to_lowercase()))
            .collect();
        let last = views.last().map(|v| v.plan.day).unwrap_or(1);
        for c in wanted {
            if !served.contains(&c.to_lowercase()) {
                out.add(ErrorCode::HardCuisine, last, PlanField::Dinner, format!("no {c} restaurant in the plan"));
            }
        }
    }

    /// First (day, field) at which the cumulative cost passes `limit(day)`.
    fn overrun(&self, views: &[DayView], exceeds: impl Fn(u32, Money) -> bool) -> Option<(Location, Money)> {
        let mut total = Money::ZERO;
        for v in views {
            let costs = self.field_costs(v);
            if exceeds(v.plan.day, total) {
                let field = costs.first().map(|(f, _)| *f).unwrap_or(PlanField::CurrentCity);
                return Some((Location { day: v.plan.day, field }, total));
            }
            for (field, c) in costs {
                total += c;
                if exceeds(v.plan.day, total) {
                    return Some((Location { day: v.plan.day, field }, total));
                }
            }
        }
        None
    }
}

fn views(days: &[DailyPlan]) -> Vec<DayView<'_>> {
    days.iter().map(DayView::new).collect()
}

fn passed_map(codes: &[ErrorCode], findings: &[Finding]) -> BTreeMap<ErrorCode, bool> {
    codes.iter().map(|c| (*c, !findings.iter().any(|f| f.code == *c))).collect()
}

fn applicable_hard(query: &TravelQuery) -> Vec<ErrorCode> {
    let hc = &query.hard_constraints;
    let mut out = vec![ErrorCode::HardBudget];
    if !hc.room_rules.is_empty() {
        out.push(ErrorCode::HardRoomRule);
    }
    if hc.room_type.is_some() {
        out.push(ErrorCode::HardRoomType);
    }
    if !hc.cuisines.is_empty() {
        out.push(ErrorCode::HardCuisine);
    }
    if hc.transportation_ban.is_some() {
        out.push(ErrorCode::HardTransportation);
    }
    out
}

/// Total trip cost under the cost model (unknown records cost nothing).
pub fn plan_cost(days: &[DailyPlan], query: &TravelQuery, db: &TravelDatabase) -> Money {
    let checker = Checker { query, db };
    views(days).iter().map(|v| checker.day_cost(v)).sum()
}

/// The eight commonsense dimensions over a delivered plan.
pub fn check_commonsense(days: &[DailyPlan], query: &TravelQuery, db: &TravelDatabase) -> ConstraintReport {
    let checker = Checker { query, db };
    let views = views(days);
    let mut out = Findings::default();
    for v in &views {
        checker.sandbox(v, &mut out);
        checker.complete(v, &mut out);
        checker.within_city(v, &mut out);
    }
    checker.route(&views, true, &mut out);
    checker.repetition(&views, &mut out);
    checker.transport_modes(&views, &mut out);
    checker.min_nights(&views, &mut out);
    let findings = out.into_vec(|_| true);
    ConstraintReport {
        scope: Scope::Plan,
        passed_commonsense: passed_map(&ErrorCode::COMMONSENSE, &findings),
        passed_hard: BTreeMap::new(),
        cost: views.iter().map(|v| checker.day_cost(v)).sum(),
        findings,
    }
}

/// The query's applicable hard constraints over a delivered plan.
pub fn check_hard(days: &[DailyPlan], query: &TravelQuery, db: &TravelDatabase) -> ConstraintReport {
    let checker = Checker { query, db };
    let views = views(days);
    let mut out = Findings::default();
    let budget = query.budget;
    if let Some((loc, total)) = checker.overrun(&views, |_, total| total > budget) {
        out.add(ErrorCode::HardBudget, loc.day, loc.field, format!("cost reaches {total}, budget {budget}"));
    }
    for v in &views {
        checker.hard_day(v, &mut out);
    }
    checker.cuisines(&views, &mut out);
    let findings = out.into_vec(|_| true);
    ConstraintReport {
        scope: Scope::Plan,
        passed_commonsense: BTreeMap::new(),
        passed_hard: passed_map(&applicable_hard(query), &findings),
        cost: views.iter().map(|v| checker.day_cost(v)).sum(),
        findings,
    }
}

/// Commonsense and hard checks combined into one plan-scope report.
pub fn verify_plan(days: &[DailyPlan], query: &TravelQuery, db: &TravelDatabase) -> ConstraintReport {
    let mut report = check_commonsense(days, query, db);
    let hard = check_hard(days, query, db);
    report.findings.extend(hard.findings);
    report.findings.sort_by_key(|f| (f.location, f.code));
    report.passed_hard = hard.passed_hard;
    report
}

/// Checks one candidate day against the committed prefix.
///
/// Runs sandbox existence, completeness and city consistency on the
/// candidate, repetition and transport consistency against prior days, the
/// route rules on the prefix, a minimum-nights lookahead, the day-local hard
/// constraints, and a prorated running budget:
/// cost(prefix) <= day / N * budget * 1.1.
pub fn check_day(
    candidate: &DailyPlan,
    prior: &[DailyPlan],
    query: &TravelQuery,
    db: &TravelDatabase,
) -> ConstraintReport {
    let checker = Checker { query, db };
    let day = candidate.day;
    let n = query.duration_days;
    let mut days: Vec<DailyPlan> = prior.to_vec();
    days.push(candidate.clone());
    let views = views(&days);
    let current = views.last().expect("candidate present");
    let mut out = Findings::default();

    checker.sandbox(current, &mut out);
    checker.complete(current, &mut out);
    checker.within_city(current, &mut out);
    checker.route(&views, false, &mut out);
    checker.repetition(&views, &mut out);
    checker.transport_modes(&views, &mut out);
    checker.hard_day(current, &mut out);

    // minimum nights: the run ending today can still grow until night N-1
    let runs = Checker::stays(&views);
    let remaining = (n.saturating_sub(1)).saturating_sub(day);
    for (first, nights, venue) in &runs {
        let last_night = first + nights - 1;
        let Some(a) = checker.accommodation(venue) else { continue };
        if last_night == day && a.min_nights > nights + remaining {
            out.add(ErrorCode::InvalidAccommodationMinNights, day, PlanField::Accommodation, format!("{} requires {} nights, at most {} possible", a.name, a.min_nights, nights + remaining));
        }
        if last_night + 1 == day && a.min_nights > *nights {
            out.add(ErrorCode::InvalidAccommodationMinNights, day, PlanField::Accommodation, format!("left {} after {nights} nights, requires {}", a.name, a.min_nights));
        }
    }

    let budget_cents = i128::from(query.budget.cents());
    let exceeds = |d: u32, total: Money| {
        i128::from(total.cents()) * i128::from(n) * 10 > i128::from(d) * budget_cents * 11
    };
    if let Some((loc, total)) = checker.overrun(&views, exceeds) {
        if loc.day == day {
            out.add(ErrorCode::BudgetExceeded, loc.day, loc.field, format!("spent {total} by day {day}, prorated allowance exceeded"));
        }
    }

    let findings = out.into_vec(|loc| loc.day == day);
    ConstraintReport {
        scope: Scope::Day,
        passed_commonsense: passed_map(&ErrorCode::COMMONSENSE, &findings),
        passed_hard: BTreeMap::new(),
        cost: views.iter().map(|v| checker.day_cost(v)).sum(),
        findings,
    }
}

#[cfg(test)]
mod tests;
