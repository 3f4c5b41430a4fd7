use std::collections::HashSet;
use std::net::TcpListener;
use std::sync::atomic::{AtomicUsize, Ordering};

use proptest::prelude::*;

use super::*;

fn sys(text: &str) -> Vec<Message> {
    vec![Message::system("s"), Message::user(text)]
}

fn entry(scope: &str, role: AgentRole, seq: usize, messages: &[Message], t: f64, response: &str) -> TranscriptEntry {
    let req = ChatRequest { scope: scope.into(), role, messages: messages.to_vec(), temperature: t };
    TranscriptEntry { scope: scope.into(), role, seq, digest: req.digest(), response: response.into() }
}

#[test]
fn replay_serves_in_role_order() {
    let m = sys("day 1");
    let backend = ReplayBackend::new(
        vec![
            entry("q", AgentRole::Thought, 0, &m, 0.0, "Thought 1: look up flights"),
            entry("q", AgentRole::Thought, 1, &m, 0.0, "Thought 2: restaurants"),
        ],
        true,
    );
    let gw = Gateway::new(Arc::new(backend), GatewayConfig::default());
    let s = gw.scoped("q");
    assert_eq!(s.complete(AgentRole::Thought, m.clone()).unwrap(), "Thought 1: look up flights");
    assert_eq!(s.complete(AgentRole::Thought, m.clone()).unwrap(), "Thought 2: restaurants");
    assert!(matches!(
        s.complete(AgentRole::Thought, m).unwrap_err(),
        LlmError::ReplayExhausted { role: AgentRole::Thought, served: 2, .. }
    ));
}

#[test]
fn replay_exhausted_for_plan() {
    let gw = Gateway::new(Arc::new(ReplayBackend::new(vec![], false)), GatewayConfig::default());
    let err = gw.complete("q", AgentRole::Plan, sys("x")).unwrap_err();
    assert!(matches!(err, LlmError::ReplayExhausted { role: AgentRole::Plan, .. }));
}

#[test]
fn digest_mismatch_warns_or_fails() {
    let recorded = sys("old prompt");
    let entries = vec![entry("q", AgentRole::Tool, 0, &recorded, 0.0, "Action 1: CitySearch[Texas]")];
    let lenient = ReplayBackend::new(entries.clone(), false);
    let req = ChatRequest { scope: "q".into(), role: AgentRole::Tool, messages: sys("new prompt"), temperature: 0.0 };
    assert_eq!(lenient.complete(&req).unwrap(), "Action 1: CitySearch[Texas]");
    assert_eq!(lenient.mismatches(), vec![("q".to_string(), AgentRole::Tool, 0)]);
    let strict = ReplayBackend::new(entries, true);
    assert!(matches!(strict.complete(&req), Err(LlmError::DigestMismatch { .. })));
}

#[test]
fn temperature_policy() {
    let seen = Arc::new(Mutex::new(Vec::new()));
    let sink = seen.clone();
    let backend = ScriptedBackend(move |r: &ChatRequest| {
        sink.lock().unwrap().push((r.role, r.temperature));
        Ok("ok".to_string())
    });
    let gw = Gateway::new(Arc::new(backend), GatewayConfig { plan_temperature: 0.7, max_retries: 0 });
    for role in AgentRole::ALL {
        gw.complete("q", role, sys("x")).unwrap();
    }
    for (role, t) in seen.lock().unwrap().iter() {
        assert_eq!(*t > 0.0, *role == AgentRole::Plan);
        if *role == AgentRole::Plan {
            assert_eq!(*t, 0.7);
        }
    }
    assert!(gw.request_log().iter().all(|r| (r.temperature > 0.0) == (r.role == AgentRole::Plan)));
}

#[test]
fn retries_transport_failures_then_gives_up() {
    let calls = Arc::new(AtomicUsize::new(0));
    let counter = calls.clone();
    let backend = ScriptedBackend(move |_: &ChatRequest| {
        let n = counter.fetch_add(1, Ordering::SeqCst);
        if n < 2 {
            Err(LlmError::Transport { message: "reset".into(), retryable: true })
        } else {
            Ok("fine".into())
        }
    });
    let gw = Gateway::new(Arc::new(backend), GatewayConfig { plan_temperature: 0.7, max_retries: 2 });
    assert_eq!(gw.complete("q", AgentRole::Thought, sys("x")).unwrap(), "fine");
    assert_eq!(gw.request_log()[0].attempts, 3);

    let gw = Gateway::new(
        Arc::new(ScriptedBackend(|_: &ChatRequest| Err(LlmError::Transport { message: "down".into(), retryable: true }))),
        GatewayConfig { plan_temperature: 0.7, max_retries: 1 },
    );
    assert!(gw.complete("q", AgentRole::Thought, sys("x")).is_err());
    assert_eq!(gw.request_log()[0].attempts, 2);
}

#[test]
fn empty_responses_and_bad_requests_are_rejected() {
    let gw = Gateway::new(Arc::new(ScriptedBackend(|_: &ChatRequest| Ok("  ".into()))), GatewayConfig::default());
    assert_eq!(gw.complete("q", AgentRole::Tool, sys("x")), Err(LlmError::EmptyResponse(AgentRole::Tool)));
    assert!(matches!(gw.complete("q", AgentRole::Tool, vec![]), Err(LlmError::InvalidRequest(_))));
    assert!(matches!(
        gw.complete("q", AgentRole::Tool, vec![Message::user("no system")]),
        Err(LlmError::InvalidRequest(_))
    ));
}

#[test]
fn recording_then_replay_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.jsonl");
    let rec = Arc::new(RecordingBackend::with_sink(
        ScriptedBackend(|r: &ChatRequest| Ok(format!("{} says hi", r.role))),
        &path,
    ));
    let gw = Gateway::new(rec.clone(), GatewayConfig::default());
    gw.complete("a", AgentRole::Thought, sys("1")).unwrap();
    gw.complete("a", AgentRole::Plan, sys("2")).unwrap();
    gw.complete("b", AgentRole::Thought, sys("3")).unwrap();
    let entries = read_transcript(&path).unwrap();
    assert_eq!(entries, rec.entries());
    assert_eq!(entries.iter().map(|e| e.seq).collect::<Vec<_>>(), vec![0, 0, 0]);

    let replay = Gateway::new(Arc::new(ReplayBackend::from_file(&path, true).unwrap()), GatewayConfig::default());
    assert_eq!(replay.complete("b", AgentRole::Thought, sys("3")).unwrap(), "Thought says hi");
    assert_eq!(replay.complete("a", AgentRole::Plan, sys("2")).unwrap(), "Plan says hi");
}

#[test]
fn replay_never_touches_the_network() {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    listener.set_nonblocking(true).unwrap();
    let m = sys("x");
    let replay = ReplayBackend::new(vec![entry("q", AgentRole::Plan, 0, &m, 0.7, "Day 1: ...")], true);
    let gw = Gateway::new(Arc::new(replay), GatewayConfig::default());
    gw.complete("q", AgentRole::Plan, m).unwrap();
    assert!(listener.accept().is_err(), "no connection expected");
}

#[test]
fn http_body_shape() {
    let backend = HttpBackend::new(
        HttpConfig { base_url: "http://localhost:9/v1/".into(), model: "m".into(), seed: Some(7), ..Default::default() },
        None,
    )
    .unwrap();
    assert_eq!(backend.endpoint(), "http://localhost:9/v1/chat/completions");
    let req = ChatRequest { scope: "q".into(), role: AgentRole::Plan, messages: sys("hello"), temperature: 0.7 };
    let body = backend.body(&req);
    assert_eq!(body["model"], "m");
    assert_eq!(body["messages"][1]["role"], "user");
    assert_eq!(body["messages"][1]["content"], "hello");
    assert_eq!(body["temperature"], 0.7);
    assert_eq!(body["seed"], 7);
    assert!(body.get("top_p").is_none());
}

#[test]
fn thought_prompt_names_the_day() {
    let ctx = PromptContext { strategy: Some("outline"), day: Some(2), step: Some(6), ..Default::default() };
    let text: String = render_prompt(AgentRole::Thought, &ctx).unwrap().into_iter().map(|m| m.text).collect();
    assert!(text.contains("gather the necessary information to plan your trip for the Second day"));
}

#[test]
fn commonsense_prompt_never_sees_the_query() {
    let query = "Please plan a trip from Ontario to Honolulu with a budget of $3,200.";
    let ctx = PromptContext { query_text: Some(query), ..Default::default() };
    let messages = render_prompt(AgentRole::Commonsense, &ctx).unwrap();
    assert!(messages.iter().all(|m| !m.text.contains("Honolulu") && !m.text.contains("3,200")));
}

#[test]
fn missing_context_is_reported() {
    let err = render_prompt(AgentRole::Plan, &PromptContext::default()).unwrap_err();
    assert_eq!(err, LlmError::MissingContext { role: AgentRole::Plan, field: "query_text" });
    let ctx = PromptContext { strategy: Some("s"), step: Some(1), ..Default::default() };
    assert_eq!(
        render_prompt(AgentRole::Thought, &ctx).unwrap_err(),
        LlmError::MissingContext { role: AgentRole::Thought, field: "day" }
    );
}

proptest! {
    #[test]
    fn rendering_is_deterministic(
        query in ".{0,60}",
        strategy in ".{0,60}",
        day in 1u32..8,
        step in 1u32..46,
    ) {
        let ctx = PromptContext {
            query_text: Some(&query),
            route_facts: Some("facts"),
            strategy: Some(&strategy),
            strategy_tail: Some("tail"),
            thought: Some("t"),
            tool_call: Some("c"),
            tool_result: Some("r"),
            outline: Some("o"),
            knowledge: Some("k"),
            plan_text: Some("p"),
            day: Some(day),
            duration: Some(7),
            step: Some(step),
            ..Default::default()
        };
        let mut digests = HashSet::new();
        for role in AgentRole::ALL {
            let a = render_prompt(role, &ctx).unwrap();
            let b = render_prompt(role, &ctx).unwrap();
            let da = ChatRequest { scope: "q".into(), role, messages: a, temperature: 0.0 }.digest();
            let db = ChatRequest { scope: "q".into(), role, messages: b, temperature: 0.0 }.digest();
            prop_assert_eq!(&da, &db);
            digests.insert(da);
        }
        prop_assert_eq!(digests.len(), AgentRole::ALL.len());
    }
}
