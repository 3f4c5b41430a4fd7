use proptest::prelude::*;

use super::*;
use crate::domain::{RoomRule, TransportBan};
use crate::testkit::{atlanta_plan, atlanta_query, fixture_db};

fn codes(report: &ConstraintReport) -> Vec<(ErrorCode, u32, PlanField)> {
    report.findings.iter().map(|f| (f.code, f.location.day, f.location.field)).collect()
}

#[test]
fn appendix_plan_passes_everything() {
    let db = fixture_db();
    let report = verify_plan(&atlanta_plan().days, &atlanta_query(), &db);
    assert!(report.findings.is_empty(), "{:#?}", report.findings);
    assert_eq!(report.passed_commonsense.len(), 8);
    assert_eq!(report.passed_hard.len(), 5);
    assert!(report.all_commonsense_passed() && report.all_hard_passed());
    assert_eq!(report.cost, Money::from_dollars(1099));
}

#[test]
fn unknown_flight_is_hallucinated_on_day_one() {
    let db = fixture_db();
    let mut days = atlanta_plan().days;
    let t = days[0].transportation.replace("F3502691", "F0000000");
    days[0].set(PlanField::Transportation, t);
    let report = check_commonsense(&days, &atlanta_query(), &db);
    assert_eq!(codes(&report), vec![(ErrorCode::HallucinatedInformation, 1, PlanField::Transportation)]);
    assert!(!report.passed_commonsense[&ErrorCode::HallucinatedInformation]);
}

#[test]
fn self_driving_and_flight_conflict() {
    let db = fixture_db();
    let q = TravelQuery {
        origin_city: "Austin".into(),
        destination: crate::domain::DestinationScope::City("Dallas".into()),
        ..atlanta_query()
    };
    let days = vec![
        DailyPlan::empty(1)
            .with(PlanField::CurrentCity, "from Austin to Dallas")
            .with(PlanField::Transportation, "Self-driving, from Austin to Dallas, Duration: 3 hours, Distance: 314 km, Cost: 15"),
        DailyPlan::empty(2).with(PlanField::CurrentCity, "Dallas"),
        DailyPlan::empty(3)
            .with(PlanField::CurrentCity, "from Dallas to Austin")
            .with(PlanField::Transportation, "Flight Number: F4001188, from Dallas to Austin"),
    ];
    let report = check_commonsense(&days, &q, &db);
    let conflicts: Vec<_> = codes(&report)
        .into_iter()
        .filter(|c| c.0 == ErrorCode::ConflictingTransportation)
        .collect();
    assert_eq!(
        conflicts,
        vec![
            (ErrorCode::ConflictingTransportation, 1, PlanField::Transportation),
            (ErrorCode::ConflictingTransportation, 3, PlanField::Transportation),
        ]
    );
}

#[test]
fn budget_boundary_is_inclusive() {
    let db = fixture_db();
    let days = atlanta_plan().days;
    let at = TravelQuery { budget: Money::from_dollars(1099), ..atlanta_query() };
    assert!(check_hard(&days, &at, &db).passed_hard[&ErrorCode::HardBudget]);
    let under = TravelQuery { budget: Money::from_dollars(1098), ..atlanta_query() };
    let report = check_hard(&days, &under, &db);
    // running total first passes 1098 with the last lunch
    assert_eq!(codes(&report), vec![(ErrorCode::HardBudget, 3, PlanField::Lunch)]);
}

#[test]
fn flight_under_flight_ban() {
    let db = fixture_db();
    let mut q = atlanta_query();
    q.hard_constraints.transportation_ban = Some(TransportBan::NoFlight);
    let report = check_hard(&atlanta_plan().days, &q, &db);
    assert_eq!(
        codes(&report),
        vec![
            (ErrorCode::HardTransportation, 1, PlanField::Transportation),
            (ErrorCode::HardTransportation, 3, PlanField::Transportation),
        ]
    );
}

#[test]
fn smoking_wanted_but_not_allowed() {
    let db = fixture_db();
    let mut q = atlanta_query();
    q.hard_constraints.room_rules = [RoomRule::Parties].into();
    let report = check_hard(&atlanta_plan().days, &q, &db);
    assert_eq!(
        codes(&report),
        vec![
            (ErrorCode::HardRoomRule, 1, PlanField::Accommodation),
            (ErrorCode::HardRoomRule, 2, PlanField::Accommodation),
        ]
    );
}

#[test]
fn rooms_required_is_a_ceiling() {
    assert_eq!(rooms_required(3, 2), 2);
    assert_eq!(rooms_required(1, 2), 1);
    assert_eq!(rooms_required(7, 3), 3);
    for party in 1..=12u32 {
        for occ in 1..=6u32 {
            let r = rooms_required(party, occ);
            assert!(r * occ >= party && (r - 1) * occ < party);
        }
    }
}

#[test]
fn report_round_trips_as_json() {
    let db = fixture_db();
    let mut days = atlanta_plan().days;
    days[1].set(PlanField::Lunch, "-");
    let report = verify_plan(&days, &atlanta_query(), &db);
    let text = serde_json::to_string(&report).unwrap();
    assert!(text.contains("\"NecessaryInformationAbsent\""));
    let back: ConstraintReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}

#[test]
fn appendix_days_at_day_scope() {
    let db = fixture_db();
    let days = atlanta_plan().days;
    let q = atlanta_query();
    // day 1 front-loads the flight and a night: 461 > 1100 / 3 * 1.1
    let first = check_day(&days[0], &[], &q, &db);
    assert_eq!(codes(&first), vec![(ErrorCode::BudgetExceeded, 1, PlanField::Accommodation)]);
    assert_eq!(first.significant_count(), 0);
    assert!(first.all_commonsense_passed());
    for i in 1..days.len() {
        let report = check_day(&days[i], &days[..i], &q, &db);
        assert!(report.findings.is_empty(), "day {}: {:#?}", i + 1, report.findings);
    }
}

#[test]
fn day_scope_flags_repeat_against_prior_days() {
    let db = fixture_db();
    let days = atlanta_plan().days;
    let candidate = days[1].clone().with(PlanField::Dinner, "Chaina Ram Sindhi Confectioners, Atlanta");
    let report = check_day(&candidate, &days[..1], &atlanta_query(), &db);
    assert_eq!(codes(&report), vec![(ErrorCode::RepeatedRestaurant, 2, PlanField::Dinner)]);
}

#[test]
fn day_scope_min_nights_lookahead() {
    let db = fixture_db();
    let days = atlanta_plan().days;
    // a 2-night minimum started on the second night cannot be met in a 3-day trip
    let candidate = days[1]
        .clone()
        .with(PlanField::Accommodation, "Spacious private room close St. Barnabas Hospital, Atlanta");
    let report = check_day(&candidate, &[days[0].clone().with(PlanField::Accommodation, "-")], &atlanta_query(), &db);
    assert!(report.has(ErrorCode::InvalidAccommodationMinNights));
    assert!(!report.passed_commonsense[&ErrorCode::InvalidAccommodationMinNights]);
}

#[test]
fn day_scope_running_budget() {
    let db = fixture_db();
    let days = atlanta_plan().days;
    // day 1 spends 240 + 21 + 200 = 461 against 1/3 * 300 * 1.1 = 110
    let q = TravelQuery { budget: Money::from_dollars(300), ..atlanta_query() };
    let report = check_day(&days[0], &[], &q, &db);
    assert_eq!(codes(&report), vec![(ErrorCode::BudgetExceeded, 1, PlanField::Transportation)]);
}

#[test]
fn checks_are_deterministic() {
    let db = fixture_db();
    let mut days = atlanta_plan().days;
    days[2].set(PlanField::Breakfast, "Nowhere Diner, Atlanta");
    let a = verify_plan(&days, &atlanta_query(), &db);
    let b = verify_plan(&days, &atlanta_query(), &db);
    assert_eq!(a, b);
}

fn without(db: &TravelDatabase, mask: &[bool]) -> TravelDatabase {
    let mut bits = mask.iter().copied().cycle();
    let mut pick = |rows: &[_]| -> Vec<usize> { (0..rows.len()).filter(|_| bits.next().unwrap_or(true)).collect() };
    fn take<T: Clone>(rows: &[T], ids: Vec<usize>) -> Vec<T> {
        ids.into_iter().map(|i| rows[i].clone()).collect()
    }
    let f = pick(&vec![(); db.flights().len()]);
    let a = pick(&vec![(); db.accommodations().len()]);
    let r = pick(&vec![(); db.restaurants().len()]);
    let t = pick(&vec![(); db.attractions().len()]);
    let d = pick(&vec![(); db.distances().len()]);
    TravelDatabase::from_records(
        take(db.flights(), f),
        take(db.accommodations(), a),
        take(db.restaurants(), r),
        take(db.attractions(), t),
        take(db.distances(), d),
        db.cities().to_vec(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Cost and minimum-nights findings can vanish when a priced record disappears,
    // so monotonicity is asserted over the other commonsense checks.
    #[test]
    fn removing_records_only_adds_findings(mask in prop::collection::vec(any::<bool>(), 1..80)) {
        let db = fixture_db();
        let smaller = without(&db, &mask);
        let days = atlanta_plan().days;
        let q = atlanta_query();
        let keep = |r: ConstraintReport| -> Vec<_> {
            codes(&r).into_iter().filter(|c| c.0 != ErrorCode::InvalidAccommodationMinNights).collect()
        };
        let before = keep(check_commonsense(&days, &q, &db));
        let after = keep(check_commonsense(&days, &q, &smaller));
        for f in before {
            prop_assert!(after.contains(&f));
        }
    }
}
