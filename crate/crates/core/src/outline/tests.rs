use std::sync::atomic::{AtomicU32, Ordering};

use super::*;
use crate::domain::TransportBan;
use crate::llm::{ChatRequest, GatewayConfig, ScriptedBackend};
use crate::testkit::{atlanta_query, fixture_db, honolulu_query, texas_query};

const ATLANTA_ROUTE: &str = "The First Day: from Buffalo to Atlanta. Exploring Atlanta.\nThe Second Day: Exploring Atlanta.\nThe Third Day: from Atlanta to Buffalo.";

const KEYPOINTS: &str = "1.Departure and Return Dates: The travel must commence on March 2nd, 2022, and conclude with a return to Buffalo on March 4th, 2022.\n2.Solo Travel: The plan should be tailored for a single traveler.\n3.Budget Limit: The total cost of the trip must not exceed $1,100.";

const GUIDES: &str = "1. Accommodations should be booked for the correct dates, ensuring no gaps or overlaps in lodging.\n2. Dining options should be reasonably spaced throughout the day.";

/// Gateway answering by role; PathFinder answers come from `routes` in order.
fn gateway(routes: Vec<&'static str>, keypoints: Vec<&'static str>, calls: std::sync::Arc<AtomicU32>) -> Gateway {
    let route_i = AtomicU32::new(0);
    let key_i = AtomicU32::new(0);
    let backend = ScriptedBackend(move |r: &ChatRequest| {
        Ok(match r.role {
            AgentRole::PathFinder => {
                calls.fetch_add(1, Ordering::SeqCst);
                let i = route_i.fetch_add(1, Ordering::SeqCst) as usize;
                routes[i.min(routes.len() - 1)].to_string()
            }
            AgentRole::Keypoints => {
                let i = key_i.fetch_add(1, Ordering::SeqCst) as usize;
                keypoints[i.min(keypoints.len() - 1)].to_string()
            }
            AgentRole::Commonsense => GUIDES.to_string(),
            other => panic!("unexpected role {other}"),
        })
    });
    Gateway::new(std::sync::Arc::new(backend), GatewayConfig::default())
}

#[test]
fn parses_the_appendix_route() {
    let db = fixture_db();
    let route = parse_route(ATLANTA_ROUTE, &db).unwrap();
    assert_eq!(
        route.entries.iter().map(|e| e.kind.clone()).collect::<Vec<_>>(),
        vec![
            DayKind::Transfer { from: "Buffalo".into(), to: "Atlanta".into() },
            DayKind::Stay { city: "Atlanta".into() },
            DayKind::Transfer { from: "Atlanta".into(), to: "Buffalo".into() },
        ]
    );
    assert_eq!(route.entries[0].note, "Exploring Atlanta.");
    validate_route(&route, &atlanta_query(), &db).unwrap();
    assert_eq!(route.to_string(), ATLANTA_ROUTE);
}

#[test]
fn accepts_numbered_days_and_any_case() {
    let db = fixture_db();
    let text = "Route:\nDay 1: from buffalo to ATLANTA.\nDay 2: exploring atlanta\nDay 3: from Atlanta to Buffalo";
    let route = parse_route(text, &db).unwrap();
    validate_route(&route, &atlanta_query(), &db).unwrap();
    assert_eq!(route.entries[1].kind, DayKind::Stay { city: "Atlanta".into() });
    let again = parse_route(&route.to_string(), &db).unwrap();
    assert_eq!(again, route);
}

#[test]
fn grammar_violations() {
    let db = fixture_db();
    let q = atlanta_query();
    let no_return = "The First Day: from Buffalo to Atlanta.\nThe Second Day: Exploring Atlanta.\nThe Third Day: Exploring Atlanta.";
    let r = parse_route(no_return, &db).unwrap();
    assert_eq!(validate_route(&r, &q, &db), Err(RouteError::MissingReturn("Buffalo".into())));
    let short = "The First Day: from Buffalo to Atlanta.\nThe Second Day: from Atlanta to Buffalo.";
    let r = parse_route(short, &db).unwrap();
    assert_eq!(validate_route(&r, &q, &db), Err(RouteError::DayCount { expected: 3, found: 2 }));
    assert_eq!(parse_route("The First Day: from Buffalo to Gotham.", &db), Err(RouteError::UnknownCity("Gotham".into())));
    assert_eq!(parse_route("no route here", &db), Err(RouteError::Empty));

    let texas = texas_query();
    let three = "Day 1: from Albuquerque to Austin.\nDay 2: from Austin to Dallas.\nDay 3: from Dallas to Houston.\nDay 4: Exploring Houston.\nDay 5: from Houston to Albuquerque.";
    let r = parse_route(three, &db).unwrap();
    assert_eq!(validate_route(&r, &texas, &db), Err(RouteError::CityCount { expected: 2, found: 3 }));
    let gap = "Day 1: from Albuquerque to Austin.\nDay 2: Exploring Dallas.\nDay 3: Exploring Dallas.\nDay 4: Exploring Dallas.\nDay 5: from Dallas to Albuquerque.";
    let r = parse_route(gap, &db).unwrap();
    assert!(matches!(validate_route(&r, &texas, &db), Err(RouteError::Discontinuous { day: 2, .. })));
}

#[test]
fn leg_classification() {
    let db = fixture_db();
    let q = atlanta_query();
    let route = parse_route(ATLANTA_ROUTE, &db).unwrap();
    let v = evaluate_transportation(&route, &q, &db);
    assert_eq!(v.legs[0].status, LegStatus::FlightOnly);
    assert_eq!(v.legs[1].status, LegStatus::FlightOnly);
    assert!(v.is_feasible() && v.feedback.is_empty());
    assert_eq!(v.transport_notes()[0], "Day 1 (Buffalo to Atlanta): flight only");

    // no flight back on the second day
    let early = parse_route("Day 1: from Buffalo to Atlanta.\nDay 2: from Atlanta to Buffalo.\nDay 3: Exploring Buffalo.", &db).unwrap();
    let v = evaluate_transportation(&early, &q, &db);
    assert_eq!(v.legs[1].status, LegStatus::Infeasible);
    assert!(v.feedback.contains("from Atlanta to Buffalo"));

    let mut banned = q.clone();
    banned.hard_constraints.transportation_ban = Some(TransportBan::NoFlight);
    let v = evaluate_transportation(&route, &banned, &db);
    assert_eq!(v.legs[0].status, LegStatus::Infeasible);
    assert!(v.feedback.contains("no flight"));

    let texas = texas_query();
    let ok = parse_route("Day 1: from Albuquerque to Austin.\nDay 2: from Austin to Dallas.\nDay 3: Exploring Dallas.\nDay 4: Exploring Dallas.\nDay 5: from Dallas to Albuquerque.", &db).unwrap();
    let v = evaluate_transportation(&ok, &texas, &db);
    let statuses: Vec<LegStatus> = v.legs.iter().map(|l| l.status).collect();
    assert_eq!(statuses, vec![LegStatus::Ok, LegStatus::Ok, LegStatus::Infeasible]);
}

#[test]
fn build_outline_retries_until_feasible() {
    let db = fixture_db();
    let q = atlanta_query();
    let bad = "The First Day: from Buffalo to Atlanta.\nThe Second Day: from Atlanta to Buffalo.\nThe Third Day: Exploring Buffalo.";
    let calls = std::sync::Arc::new(AtomicU32::new(0));
    let gw = gateway(vec![bad, ATLANTA_ROUTE], vec![KEYPOINTS], calls.clone());
    let built = build_outline(&gw.scoped("atlanta"), &q, &db, &GuidesCache::new(), 3).unwrap();
    assert_eq!(built.route_calls, 2);
    assert_eq!(calls.load(Ordering::SeqCst), 2);
    assert_eq!(built.rejections.len(), 1);
    assert_eq!(built.outline.route.to_string(), ATLANTA_ROUTE);
    assert_eq!(built.outline.keypoints.len(), 3);
    let text = built.outline.render_text();
    assert!(text.starts_with(ATLANTA_ROUTE));
    assert!(text.contains("3.Budget Limit: The total cost of the trip must not exceed $1,100."));
    assert!(text.contains("1. Accommodations should be booked"));
}

#[test]
fn build_outline_first_attempt_and_exhaustion() {
    let db = fixture_db();
    let q = atlanta_query();
    let calls = std::sync::Arc::new(AtomicU32::new(0));
    let gw = gateway(vec![ATLANTA_ROUTE], vec![KEYPOINTS], calls.clone());
    build_outline(&gw.scoped("atlanta"), &q, &db, &GuidesCache::new(), 3).unwrap();
    assert_eq!(calls.load(Ordering::SeqCst), 1);

    let calls = std::sync::Arc::new(AtomicU32::new(0));
    let gw = gateway(vec!["Day 1: from Buffalo to Atlanta."], vec![KEYPOINTS], calls.clone());
    let err = build_outline(&gw.scoped("atlanta"), &q, &db, &GuidesCache::new(), 3).unwrap_err();
    assert!(matches!(err, OutlineError::RetriesExhausted { attempts: 3, .. }));
    assert_eq!(calls.load(Ordering::SeqCst), 3);
}

#[test]
fn keypoints_retry_then_fallback() {
    let q = atlanta_query();
    let calls = std::sync::Arc::new(AtomicU32::new(0));
    let gw = gateway(vec![ATLANTA_ROUTE], vec!["1.Solo Travel: one person.", KEYPOINTS], calls.clone());
    let points = generate_keypoints(&gw.scoped("atlanta"), &q).unwrap();
    assert_eq!(points.len(), 3);
    assert_eq!(gw.request_log().iter().filter(|r| r.role == AgentRole::Keypoints).count(), 2);

    let gw = gateway(vec![ATLANTA_ROUTE], vec!["1.Solo Travel: one person."], calls);
    let points = generate_keypoints(&gw.scoped("atlanta"), &q).unwrap();
    assert_eq!(points[0], "Solo Travel: one person.");
    assert!(points.iter().any(|p| p.contains("must not exceed $1,100")));
    assert!(points.iter().any(|p| p.contains("March 2nd, 2022")));
    assert!(keypoint_gaps(&points, &q).is_empty());
}

#[test]
fn guides_are_cached_and_query_independent() {
    let calls = std::sync::Arc::new(AtomicU32::new(0));
    let gw = gateway(vec![ATLANTA_ROUTE], vec![KEYPOINTS], calls);
    let cache = GuidesCache::new();
    let a = cache.get_or_generate(&gw).unwrap();
    let b = cache.get_or_generate(&gw).unwrap();
    assert!(Arc::ptr_eq(&a, &b));
    assert!(a.iter().any(|g| g.contains("no gaps or overlaps in lodging")));
    assert_eq!(gw.request_log_for(CORPUS_SCOPE).len(), 1);
    assert!(guide_city_warnings(&a, ["Atlanta", "Honolulu"]).is_empty());
    let tainted = vec!["Stay near Atlanta downtown".to_string()];
    assert_eq!(guide_city_warnings(&tainted, ["Atlanta"]), vec!["guide 1 mentions Atlanta"]);
}

#[test]
fn route_facts_list_candidate_cities() {
    let db = fixture_db();
    let facts = route_facts(&texas_query(), &db);
    assert!(facts.contains("Destination: 2 cities in Texas"));
    assert!(facts.contains("Candidate cities: Austin, Dallas, Houston"));
    assert!(route_facts(&honolulu_query(), &db).contains("March 4th, 2022 to March 6th, 2022 (3 days)"));
}
