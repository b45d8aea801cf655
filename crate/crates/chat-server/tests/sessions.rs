use std::collections::BTreeMap;
use std::sync::{Arc, LazyLock};
use std::time::Duration;

use affect_core::control::{ProfileKind, Role};
use affect_chat::protocol::ServerFrame;
use affect_chat::session_log::TSV_HEADER;
use affect_chat::{ChatError, ChatServer, ManualClock, Resources, RoomState, ScenarioKind, SessionConfig, SessionLog};
use serde_json::{json, Value};
use tokio::sync::mpsc::{unbounded_channel, UnboundedReceiver};

static RESOURCES: LazyLock<Arc<Resources>> = LazyLock::new(|| Arc::new(Resources::bundled().unwrap()));

fn server() -> (ChatServer, Arc<ManualClock>) {
    let clock = Arc::new(ManualClock::at_epoch());
    (ChatServer::new(RESOURCES.clone(), clock.clone()), clock)
}

fn triadic(seed: u64) -> SessionConfig {
    SessionConfig::new(ScenarioKind::BarTriadicExclusion).with_seed(seed)
}

fn drain(rx: &mut UnboundedReceiver<ServerFrame>) -> Vec<ServerFrame> {
    let mut out = Vec::new();
    while let Ok(f) = rx.try_recv() {
        out.push(f);
    }
    out
}

fn answers(v: Value, items: &[String]) -> BTreeMap<String, Value> {
    items.iter().map(|i| (i.clone(), v.clone())).collect()
}

#[test]
fn second_join_starts_the_room_with_the_instruction_line() {
    let (s, _) = server();
    let room = s.create_session(&triadic(7)).unwrap();
    assert_eq!(room, "room-1");
    s.join(&room, "Maria", None).unwrap();
    assert_eq!(s.state(&room).unwrap(), RoomState::Waiting);
    s.join(&room, "Juliana", None).unwrap();
    assert_eq!(s.state(&room).unwrap(), RoomState::Running);

    let r = s.room(&room).unwrap();
    let r = r.lock().unwrap();
    let first = &r.messages()[0];
    assert_eq!(first.sender, "bartender");
    assert!(first.text.contains("please do include 'bartender'"), "{}", first.text);
    let roles: Vec<Role> = r.roles().roles.values().copied().collect();
    assert_eq!(roles.iter().filter(|x| **x == Role::Excluded).count(), 1);
    assert_eq!(roles.iter().filter(|x| **x == Role::Included).count(), 1);
}

#[test]
fn role_draw_follows_the_seed() {
    let excluded = |seed: u64| {
        let (s, _) = server();
        let room = s.create_session(&triadic(seed)).unwrap();
        s.join(&room, "Maria", None).unwrap();
        s.join(&room, "Juliana", None).unwrap();
        let r = s.room(&room).unwrap();
        let name = r.lock().unwrap().roles().excluded().unwrap().to_string();
        name
    };
    let draws: Vec<String> = (0..20).map(excluded).collect();
    assert_eq!(draws, (0..20).map(excluded).collect::<Vec<_>>());
    assert!(draws.iter().any(|n| n == "Maria") && draws.iter().any(|n| n == "Juliana"));
}

#[test]
fn join_errors() {
    let (s, clock) = server();
    let room = s.create_session(&triadic(1)).unwrap();
    s.join(&room, "Maria", None).unwrap();
    assert!(matches!(s.join(&room, "maria", None), Err(ChatError::NameTaken(_))));
    assert!(matches!(s.join(&room, "Bartender", None), Err(ChatError::NameTaken(_))));
    assert!(matches!(s.join(&room, "", None), Err(ChatError::Validation(_))));
    s.join(&room, "Juliana", None).unwrap();
    assert!(matches!(s.join(&room, "Ana", None), Err(ChatError::RoomFull)));
    clock.advance(Duration::from_secs(900));
    s.tick(&room).unwrap();
    assert!(matches!(s.join(&room, "Ana", None), Err(ChatError::RoomClosed)));
    assert!(matches!(s.join("room-9", "Ana", None), Err(ChatError::UnknownRoom(_))));
}

#[test]
fn invalid_configs_are_rejected() {
    let (s, _) = server();
    let zero = SessionConfig::new(ScenarioKind::StrangerChat).with_duration(0);
    assert!(matches!(s.create_session(&zero), Err(ChatError::InvalidConfig(_))));
    let mut one = triadic(1);
    one.participants_expected = Some(1);
    assert!(matches!(s.create_session(&one), Err(ChatError::InvalidConfig(_))));
    // failed creations do not use up ids
    assert_eq!(s.create_session(&triadic(1)).unwrap(), "room-1");
}

#[test]
fn stranger_bot_opens_the_conversation() {
    let (s, _) = server();
    let cfg = SessionConfig::new(ScenarioKind::StrangerChat).with_profile(ProfileKind::Negative);
    let room = s.create_session(&cfg).unwrap();
    let (tx, mut rx) = unbounded_channel();
    s.join(&room, "Alex", Some(tx)).unwrap();
    let frames = drain(&mut rx);
    assert!(matches!(&frames[0], ServerFrame::Joined { name, duration: 120, .. } if name == "Alex"));
    match &frames[1] {
        ServerFrame::Msg { sender, .. } => assert_eq!(sender, "stranger"),
        f => panic!("expected the opening, got {f:?}"),
    }
}

#[test]
fn posting_needs_a_running_room() {
    let (s, clock) = server();
    let room = s.create_session(&triadic(3)).unwrap();
    s.join(&room, "Maria", None).unwrap();
    assert!(matches!(s.post_message(&room, "Maria", "hello"), Err(ChatError::RoomNotRunning)));
    s.join(&room, "Juliana", None).unwrap();
    assert!(matches!(s.post_message(&room, "Ana", "hello"), Err(ChatError::NotAMember(_))));
    s.post_message(&room, "Maria", "hello").unwrap();
    clock.advance(Duration::from_secs(900));
    // the overdue farewell goes out before the post is refused
    assert!(matches!(s.post_message(&room, "Maria", "still there?"), Err(ChatError::RoomNotRunning)));
    assert_eq!(s.state(&room).unwrap(), RoomState::Closed);
}

#[test]
fn farewell_exactly_once_at_the_deadline() {
    let (s, clock) = server();
    let room = s.create_session(&triadic(5)).unwrap();
    s.join(&room, "Maria", None).unwrap();
    s.join(&room, "Juliana", None).unwrap();
    clock.advance(Duration::from_secs(899));
    assert!(!s.tick(&room).unwrap());
    assert_eq!(s.state(&room).unwrap(), RoomState::Running);
    clock.advance(Duration::from_secs(1));
    assert!(s.tick(&room).unwrap());
    clock.advance(Duration::from_secs(5));
    assert!(!s.tick(&room).unwrap());
    assert!(s.tick_all().is_empty());
    let log = s.export_log(&room).unwrap();
    let farewells = log.messages.iter().filter(|m| m.text.contains("bar is closing")).count();
    assert_eq!(farewells, 1);
    assert_eq!(log.messages.last().unwrap().sender, "bartender");
}

#[test]
fn export_is_sealed_stable_and_round_trips() {
    let (s, clock) = server();
    let room = s.create_session(&triadic(7)).unwrap();
    s.join(&room, "Maria", None).unwrap();
    s.join(&room, "Juliana", None).unwrap();
    assert!(matches!(s.export_log(&room), Err(ChatError::RoomNotClosed)));
    for (who, text) in [
        ("Juliana", "hello"),
        ("Maria", "Hello bartender, I would like some water please."),
        ("Maria", "line one\nline\ttwo \\ done"),
    ] {
        clock.advance(Duration::from_secs(7));
        s.post_message(&room, who, text).unwrap();
    }
    clock.advance(Duration::from_secs(900));
    s.tick(&room).unwrap();

    let a = s.export_log(&room).unwrap();
    let b = s.export_log(&room).unwrap();
    assert_eq!(a.to_tsv(), b.to_tsv());
    assert_eq!(a.to_json(), b.to_json());
    let tsv = a.to_tsv();
    let first_row = tsv.lines().nth(1).unwrap();
    assert!(tsv.starts_with(TSV_HEADER));
    assert!(first_row.ends_with(&a.messages[0].text) && first_row.contains("\tbartender\t"));
    assert_eq!(SessionLog::parse(&tsv, &a.to_json()).unwrap(), a);
    assert_eq!(a.meta.seed, 7);
    assert_eq!(a.meta.config.duration, Some(900));
    assert!(a.messages.windows(2).all(|w| w[0].timestamp <= w[1].timestamp));

    let dir = tempfile::tempdir().unwrap();
    let (tsv_path, _) = a.write_to(dir.path()).unwrap();
    assert_eq!(tsv_path.file_name().unwrap(), "room-1.tsv");
    assert_eq!(SessionLog::read(&tsv_path).unwrap(), a);
}

#[test]
fn every_member_sees_the_same_floor() {
    let (s, clock) = server();
    let room = s.create_session(&triadic(11)).unwrap();
    let (tx1, mut rx1) = unbounded_channel();
    let (tx2, mut rx2) = unbounded_channel();
    let (tx3, mut rx3) = unbounded_channel();
    s.join(&room, "Maria", Some(tx1)).unwrap();
    s.join(&room, "Juliana", Some(tx2)).unwrap();
    s.watch(&room, tx3).unwrap();
    for (i, text) in ["hi bartender", "a beer please bartender", "Wait Juliana, why beer?", "because we are in Germany"]
        .iter()
        .enumerate()
    {
        clock.advance(Duration::from_secs(3));
        s.post_message(&room, if i % 2 == 0 { "Maria" } else { "Juliana" }, text).unwrap();
    }
    clock.advance(Duration::from_secs(900));
    s.tick(&room).unwrap();

    let msgs = |frames: Vec<ServerFrame>| -> Vec<ServerFrame> {
        frames.into_iter().filter(|f| matches!(f, ServerFrame::Msg { .. } | ServerFrame::Closed { .. })).collect()
    };
    let m1 = msgs(drain(&mut rx1));
    let m2 = msgs(drain(&mut rx2));
    let m3 = msgs(drain(&mut rx3));
    assert_eq!(m1, m2);
    assert_eq!(m1, m3);
    let log = s.export_log(&room).unwrap();
    let expected: Vec<ServerFrame> = log
        .messages
        .iter()
        .map(|m| ServerFrame::msg(&room, m))
        .chain([ServerFrame::Closed { room: room.clone() }])
        .collect();
    assert_eq!(m1, expected);
}

#[test]
fn keyword_lines_get_answers_and_chatter_may_not() {
    let (s, _) = server();
    let room = s.create_session(&triadic(7)).unwrap();
    s.join(&room, "Maria", None).unwrap();
    s.join(&room, "Juliana", None).unwrap();
    let (included, excluded) = {
        let r = s.room(&room).unwrap();
        let r = r.lock().unwrap();
        let roles = r.roles();
        (roles.included().unwrap().to_string(), roles.excluded().unwrap().to_string())
    };
    let replies = s.post_message(&room, &excluded, "Hello bartender, I would like some water please.").unwrap();
    assert!(!replies.is_empty());
    assert!(replies[0].message.text.starts_with(&format!("{excluded}, ")));
    assert!(s.post_message(&room, &excluded, "Wait, why beer?").unwrap().is_empty());
    assert!(!s.post_message(&room, &included, "nice evening").unwrap().is_empty());
}

#[test]
fn questionnaire_answers_land_in_the_sidecar() {
    let (s, clock) = server();
    let room = s.create_session(&triadic(2)).unwrap();
    s.join(&room, "Maria", None).unwrap();
    s.join(&room, "Juliana", None).unwrap();
    let items = RESOURCES.items(ScenarioKind::BarTriadicExclusion).items().to_vec();
    assert!(matches!(
        s.submit_questionnaire(&room, "Maria", &answers(json!(4), &items)),
        Err(ChatError::RoomNotClosed)
    ));
    clock.advance(Duration::from_secs(900));
    s.tick(&room).unwrap();
    let before = s.export_log(&room).unwrap();
    assert!(matches!(
        s.submit_questionnaire(&room, "Maria", &answers(json!(8), &items)),
        Err(ChatError::Validation(_))
    ));
    assert!(matches!(
        s.submit_questionnaire(&room, "Ana", &answers(json!(4), &items)),
        Err(ChatError::NotAMember(_))
    ));
    s.submit_questionnaire(&room, "Maria", &answers(json!(4), &items)).unwrap();
    assert!(s.submit_questionnaire(&room, "Maria", &answers(json!(5), &items)).is_err());

    let after = s.export_log(&room).unwrap();
    assert_eq!(before.to_tsv(), after.to_tsv());
    let meta: Value = serde_json::from_str(&after.to_json()).unwrap();
    assert_eq!(meta["questionnaire"]["Maria"]["enjoyment_system"], json!(4));
    assert_eq!(meta["questionnaire"]["Maria"].as_object().unwrap().len(), 16);
}

#[test]
fn typing_delay_shifts_reply_timestamps() {
    let (s, _) = server();
    let mut cfg = SessionConfig::new(ScenarioKind::BarDyadic).with_seed(1);
    cfg.typing_delay_ms_per_char = 1000;
    let room = s.create_session(&cfg).unwrap();
    s.join(&room, "Alex", None).unwrap();
    let replies = s.post_message(&room, "Alex", "hello bartender").unwrap();
    let log = s.room(&room).unwrap().lock().unwrap().snapshot();
    let asked = log.messages.iter().rev().find(|m| m.sender == "Alex").unwrap().timestamp;
    let reply = &replies[0].message;
    assert_eq!((reply.timestamp - asked).num_seconds(), reply.text.chars().count() as i64);
}
