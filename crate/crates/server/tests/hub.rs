use std::time::{Duration, Instant};

use sortlab_core::battle::{Arrangement, BattleConfig, Side};
use sortlab_core::session::{
    ActionBody, ClientMessage, RejectReason, Replica, RoomEventKind, ServerMessage,
};
use sortlab_core::wire::{self, LogLine};
use sortlab_server::{ConnId, Hub, HubConfig, Outbound, ScoreStore};

fn config() -> HubConfig {
    HubConfig {
        max_rooms: 4,
        room_capacity: 3,
        heartbeat_timeout: Duration::from_secs(15),
        logging: true,
    }
}

fn hello(name: &str, room: &str) -> ClientMessage {
    ClientMessage::Hello {
        name: name.into(),
        room_id: room.into(),
    }
}

fn act(body: ActionBody) -> ClientMessage {
    ClientMessage::ActionRequest { body }
}

fn reason(out: &Outbound, conn: ConnId) -> Option<RejectReason> {
    out.messages_for(conn).find_map(|m| match m {
        ServerMessage::Rejected { reason, .. } => Some(*reason),
        _ => None,
    })
}

#[test]
fn first_hello_creates_room_with_controller() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    let out = hub.receive(a, hello("alice", "r1"), t0);
    match out.messages_for(a).next() {
        Some(ServerMessage::Welcome { user_id, snapshot }) => {
            assert_eq!(user_id, "alice");
            assert_eq!(snapshot.state.controller.as_deref(), Some("alice"));
        }
        other => panic!("expected welcome, got {other:?}"),
    }
    assert_eq!(hub.room_ids().collect::<Vec<_>>(), ["r1"]);
}

#[test]
fn second_hello_joins_and_notifies() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    let b = hub.connect(t0);
    hub.receive(a, hello("alice", "r1"), t0);
    let out = hub.receive(b, hello("bob", "r1"), t0);
    let Some(ServerMessage::Welcome { snapshot, .. }) = out.messages_for(b).next() else {
        panic!("no welcome");
    };
    assert_eq!(snapshot.state.member_ids(), ["alice", "bob"]);
    assert_eq!(snapshot.state.controller.as_deref(), Some("alice"));
    assert!(out.messages_for(a).any(|m| matches!(
        m,
        ServerMessage::RoomEvent { event: RoomEventKind::Joined, user_id } if user_id == "bob"
    )));
}

#[test]
fn full_room_rejects_but_keeps_connection() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    for name in ["a", "b", "c"] {
        let c = hub.connect(t0);
        hub.receive(c, hello(name, "r1"), t0);
    }
    let d = hub.connect(t0);
    let out = hub.receive(d, hello("d", "r1"), t0);
    assert_eq!(reason(&out, d), Some(RejectReason::RoomFull));
    assert!(out.close.is_empty());
    let out = hub.receive(d, hello("d", "r2"), t0);
    assert!(matches!(
        out.messages_for(d).next(),
        Some(ServerMessage::Welcome { .. })
    ));
}

#[test]
fn routing_errors() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    let out = hub.receive(a, act(ActionBody::StepForward), t0);
    assert_eq!(reason(&out, a), Some(RejectReason::NotJoined));
    let out = hub.receive(a, ClientMessage::Ping, t0);
    assert_eq!(out.deliveries, vec![(a, ServerMessage::Pong)]);
    let out = hub.receive(a, hello("alice", "bad room!"), t0);
    assert_eq!(reason(&out, a), Some(RejectReason::InvalidRoom));
    hub.receive(a, hello("alice", "r1"), t0);
    let out = hub.receive(a, hello("alice", "r2"), t0);
    assert_eq!(reason(&out, a), Some(RejectReason::AlreadyJoined));
}

#[test]
fn server_full() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    for r in 0..4 {
        let c = hub.connect(t0);
        hub.receive(c, hello("x", &format!("room{r}")), t0);
    }
    let c = hub.connect(t0);
    let out = hub.receive(c, hello("x", "room9"), t0);
    assert_eq!(reason(&out, c), Some(RejectReason::ServerFull));
}

#[test]
fn repeated_malformed_messages_close_the_connection() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    let b = hub.connect(t0);
    hub.receive(a, hello("alice", "r1"), t0);
    hub.receive(b, hello("bob", "r1"), t0);
    for k in 1..=3 {
        let out = hub.receive_text(a, "{nonsense", t0);
        assert_eq!(reason(&out, a), Some(RejectReason::MalformedMessage));
        assert_eq!(out.close.contains(&a), k == 3);
        if k == 3 {
            assert_eq!(hub.room("r1").unwrap().controller.as_deref(), Some("bob"));
        }
    }
}

#[test]
fn broadcast_is_isolated_per_room() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    let b = hub.connect(t0);
    let c = hub.connect(t0);
    hub.receive(a, hello("alice", "r1"), t0);
    hub.receive(b, hello("bob", "r1"), t0);
    hub.receive(c, hello("carol", "r2"), t0);
    let out = hub.receive(
        a,
        act(ActionBody::EnterDetail {
            algorithm_id: "bubble".into(),
            arrangement: Arrangement::Reversed,
            size: 4,
        }),
        t0,
    );
    assert_eq!(out.messages_for(a).count(), 1);
    assert_eq!(out.messages_for(b).count(), 1);
    assert_eq!(out.messages_for(c).count(), 0);
}

#[test]
fn reap_removes_silent_connection_and_passes_control() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    let b = hub.connect(t0);
    hub.receive(a, hello("alice", "r1"), t0);
    hub.receive(b, hello("bob", "r1"), t0);
    // bob keeps pinging, alice goes quiet.
    for s in [5, 10, 15] {
        hub.receive(b, ClientMessage::Ping, t0 + Duration::from_secs(s));
    }
    let out = hub.reap(t0 + Duration::from_secs(15));
    assert!(
        out.close.is_empty(),
        "exactly at the timeout is still alive"
    );
    let out = hub.reap(t0 + Duration::from_secs(16));
    assert_eq!(out.close, vec![a]);
    assert_eq!(hub.room("r1").unwrap().controller.as_deref(), Some("bob"));
    assert!(out.messages_for(b).any(|m| matches!(
        m,
        ServerMessage::ActionApplied { action } if action.body == ActionBody::GrantControl { to: "bob".into() }
    )));
    assert!(hub.connection(a).is_none());
    assert!(hub.connection(b).is_some());
}

#[test]
fn leave_then_join_another_room() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    hub.receive(a, hello("alice", "r1"), t0);
    let out = hub.receive(a, act(ActionBody::Leave), t0);
    assert!(out.messages_for(a).any(|m| matches!(
        m,
        ServerMessage::ActionApplied { action } if action.body == ActionBody::Leave
    )));
    assert!(hub.room("r1").is_none());
    let out = hub.receive(a, hello("alice", "r2"), t0);
    assert!(matches!(
        out.messages_for(a).next(),
        Some(ServerMessage::Welcome { .. })
    ));
}

fn play_round(hub: &mut Hub, a: ConnId, b: ConnId, t: Instant) -> Outbound {
    hub.receive(
        a,
        act(ActionBody::EnterBattle {
            config: BattleConfig::new("merge", "insertion", Arrangement::Random { seed: 1 }, 100),
        }),
        t,
    );
    hub.receive(a, act(ActionBody::SubmitGuess { side: Side::Left }), t);
    hub.receive(b, act(ActionBody::SubmitGuess { side: Side::Right }), t);
    hub.receive(a, act(ActionBody::StartRace), t);
    let out = hub.receive(a, act(ActionBody::AdvanceRace { ticks: u64::MAX }), t);
    hub.receive(a, act(ActionBody::ExitToLobby), t);
    out
}

#[test]
fn scoreboard_persists_across_room_lifetimes() {
    let dir = tempfile::tempdir().unwrap();
    let store = ScoreStore::new(Some(dir.path().to_path_buf()));
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), store.clone());
    let a = hub.connect(t0);
    let b = hub.connect(t0);
    hub.receive(a, hello("alice", "r1"), t0);
    hub.receive(b, hello("bob", "r1"), t0);
    let out = play_round(&mut hub, a, b, t0);
    assert!(out
        .messages_for(b)
        .any(|m| matches!(m, ServerMessage::ScoreUpdate { .. })));
    assert_eq!(out.flush.len(), 1);

    // Everybody goes silent; the room is reaped and flushed.
    let out = hub.reap(t0 + Duration::from_secs(60));
    assert_eq!(out.close.len(), 2);
    assert!(hub.room("r1").is_none());
    let (room, board) = out.flush.last().unwrap();
    assert_eq!(room, "r1");
    for (r, b) in &out.flush {
        store.persist_scoreboard(r, b).unwrap();
    }
    assert_eq!(store.load_scoreboard("r1"), *board);
    assert_eq!(board.points("alice"), 1);
    assert_eq!(board.points("bob"), 0);

    // A new room with the same id starts from the stored board.
    let t1 = t0 + Duration::from_secs(61);
    let c = hub.connect(t1);
    let out = hub.receive(c, hello("alice", "r1"), t1);
    let Some(ServerMessage::Welcome { snapshot, .. }) = out.messages_for(c).next() else {
        panic!("no welcome");
    };
    assert_eq!(snapshot.state.scoreboard.points("alice"), 1);
}

#[test]
fn log_lines_replay_to_the_room_digest() {
    let t0 = Instant::now();
    let mut hub = Hub::new(config(), ScoreStore::disabled());
    let a = hub.connect(t0);
    let b = hub.connect(t0);
    let mut lines = Vec::new();
    let mut observers = vec![Replica::new(), Replica::new()];
    let mut run = |hub: &mut Hub, conn, msg| {
        let out = hub.receive(conn, msg, t0);
        lines.extend(out.log.iter().map(|e| e.line.clone()));
        for (c, m) in &out.deliveries {
            observers[(*c - a) as usize].receive(m).unwrap();
        }
    };
    run(&mut hub, a, hello("alice", "r1"));
    run(&mut hub, b, hello("bob", "r1"));
    run(&mut hub, b, act(ActionBody::RequestControl));
    run(
        &mut hub,
        a,
        act(ActionBody::GrantControl { to: "bob".into() }),
    );
    run(
        &mut hub,
        b,
        act(ActionBody::EnterDetail {
            algorithm_id: "heap".into(),
            arrangement: Arrangement::Random { seed: 3 },
            size: 12,
        }),
    );
    run(&mut hub, b, act(ActionBody::Seek { position: 7 }));

    let digest = hub.room("r1").unwrap().state_digest();
    let mut lines = lines.into_iter();
    let LogLine::Snapshot(base) = wire::decode_log_line(&lines.next().unwrap()).unwrap() else {
        panic!("log starts with a baseline");
    };
    let mut state = base.snapshot.restore().unwrap();
    let mut last = None;
    for line in lines {
        let LogLine::ActionApplied(rec) = wire::decode_log_line(&line).unwrap() else {
            panic!("unexpected baseline");
        };
        state.apply_action(&rec.action).unwrap();
        if let Some(d) = rec.digest {
            assert_eq!(d, state.state_digest());
        }
        last = Some(state.state_digest());
    }
    assert_eq!(last.as_deref(), Some(digest.as_str()));
    for r in &observers {
        assert_eq!(r.digest().as_deref(), Some(digest.as_str()));
    }
}
