//! Connection routing, independent of any transport.
//!
//! The hub owns every room and every connection record. Each call takes one
//! inbound event and returns the resulting [`Outbound`] batch: messages to
//! deliver per connection, connections to close, action-log lines and
//! scoreboard flushes. The network layer executes the batch in order.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use sortlab_core::battle::Scoreboard;
use sortlab_core::session::{
    ActionBody, ClientMessage, Delivery, RejectReason, RoomState, ServerMessage, UserId,
};
use sortlab_core::wire::{self, BaselineRecord, LogLine, LogRecord};
use tracing::{debug, info};

use crate::config::ServerConfig;
use crate::store::ScoreStore;

pub type ConnId = u64;

/// Malformed messages tolerated before the connection is closed.
pub const MAX_VIOLATIONS: u32 = 3;
pub const MAX_ROOM_ID_LEN: usize = 64;

#[derive(Debug, Clone)]
pub struct HubConfig {
    pub max_rooms: usize,
    pub room_capacity: usize,
    pub heartbeat_timeout: Duration,
    /// Emit action-log lines (with digests) in each batch.
    pub logging: bool,
}

impl From<&ServerConfig> for HubConfig {
    fn from(c: &ServerConfig) -> Self {
        Self {
            max_rooms: c.max_rooms,
            room_capacity: c.room_capacity,
            heartbeat_timeout: c.heartbeat_timeout,
            logging: c.log_dir.is_some(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConnectionRecord {
    pub id: ConnId,
    pub user_id: Option<UserId>,
    pub room_id: Option<String>,
    pub last_heartbeat: Instant,
    violations: u32,
}

/// One line for a room's action log. `instance` distinguishes successive
/// rooms that reuse an id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogEntry {
    pub room_id: String,
    pub instance: u64,
    pub line: String,
}

#[derive(Debug, Clone, Default)]
pub struct Outbound {
    pub deliveries: Vec<(ConnId, ServerMessage)>,
    pub close: Vec<ConnId>,
    pub log: Vec<LogEntry>,
    pub flush: Vec<(String, Scoreboard)>,
}

impl Outbound {
    fn send(&mut self, conn: ConnId, message: ServerMessage) {
        self.deliveries.push((conn, message));
    }

    pub fn messages_for(&self, conn: ConnId) -> impl Iterator<Item = &ServerMessage> {
        self.deliveries
            .iter()
            .filter(move |(c, _)| *c == conn)
            .map(|(_, m)| m)
    }

    fn extend(&mut self, other: Outbound) {
        self.deliveries.extend(other.deliveries);
        self.close.extend(other.close);
        self.log.extend(other.log);
        self.flush.extend(other.flush);
    }
}

struct Room {
    state: RoomState,
    conns: BTreeMap<UserId, ConnId>,
    instance: u64,
}

pub struct Hub {
    config: HubConfig,
    store: ScoreStore,
    rooms: BTreeMap<String, Room>,
    conns: HashMap<ConnId, ConnectionRecord>,
    next_conn: ConnId,
    next_instance: u64,
}

pub fn valid_room_id(id: &str) -> bool {
    !id.is_empty()
        && id.len() <= MAX_ROOM_ID_LEN
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
}

fn rejected(reason: RejectReason, detail: impl Into<String>) -> ServerMessage {
    ServerMessage::Rejected {
        reason,
        detail: detail.into(),
        body: None,
    }
}

impl Hub {
    pub fn new(config: HubConfig, store: ScoreStore) -> Self {
        Self {
            config,
            store,
            rooms: BTreeMap::new(),
            conns: HashMap::new(),
            next_conn: 1,
            next_instance: 1,
        }
    }

    pub fn connect(&mut self, now: Instant) -> ConnId {
        let id = self.next_conn;
        self.next_conn += 1;
        self.conns.insert(
            id,
            ConnectionRecord {
                id,
                user_id: None,
                room_id: None,
                last_heartbeat: now,
                violations: 0,
            },
        );
        id
    }

    pub fn connection(&self, conn: ConnId) -> Option<&ConnectionRecord> {
        self.conns.get(&conn)
    }

    pub fn connection_count(&self) -> usize {
        self.conns.len()
    }

    pub fn room(&self, room_id: &str) -> Option<&RoomState> {
        self.rooms.get(room_id).map(|r| &r.state)
    }

    pub fn room_ids(&self) -> impl Iterator<Item = &str> {
        self.rooms.keys().map(String::as_str)
    }

    /// Refreshes liveness without routing anything (transport-level pings).
    pub fn touch(&mut self, conn: ConnId, now: Instant) {
        if let Some(c) = self.conns.get_mut(&conn) {
            c.last_heartbeat = c.last_heartbeat.max(now);
        }
    }

    pub fn receive_text(&mut self, conn: ConnId, text: &str, now: Instant) -> Outbound {
        match wire::decode_client(text) {
            Ok(message) => self.receive(conn, message, now),
            Err(e) => self.violation(conn, e.to_string()),
        }
    }

    pub fn receive(&mut self, conn: ConnId, message: ClientMessage, now: Instant) -> Outbound {
        if !self.conns.contains_key(&conn) {
            return Outbound::default();
        }
        self.touch(conn, now);
        let mut out = Outbound::default();
        match message {
            ClientMessage::Ping => out.send(conn, ServerMessage::Pong),
            ClientMessage::Hello { name, room_id } => self.hello(conn, &name, &room_id, &mut out),
            ClientMessage::ActionRequest { body } => self.action(conn, body, &mut out),
        }
        out
    }

    fn violation(&mut self, conn: ConnId, detail: String) -> Outbound {
        let mut out = Outbound::default();
        let Some(c) = self.conns.get_mut(&conn) else {
            return out;
        };
        c.violations += 1;
        let violations = c.violations;
        out.send(conn, rejected(RejectReason::MalformedMessage, detail));
        if violations >= MAX_VIOLATIONS {
            debug!(conn, "closing after repeated protocol violations");
            out.extend(self.disconnect(conn));
            out.close.push(conn);
        }
        out
    }

    fn hello(&mut self, conn: ConnId, name: &str, room_id: &str, out: &mut Outbound) {
        if self.conns[&conn].room_id.is_some() {
            out.send(
                conn,
                rejected(
                    RejectReason::AlreadyJoined,
                    "connection already joined a room",
                ),
            );
            return;
        }
        if !valid_room_id(room_id) {
            out.send(
                conn,
                rejected(
                    RejectReason::InvalidRoom,
                    "room id must be 1-64 characters of letters, digits, '-' or '_'",
                ),
            );
            return;
        }
        let created = !self.rooms.contains_key(room_id);
        if created {
            if self.rooms.len() >= self.config.max_rooms {
                out.send(
                    conn,
                    rejected(RejectReason::ServerFull, "no room slots left"),
                );
                return;
            }
            self.open_room(room_id, out);
        }

        let user = name.trim().to_string();
        let room = self.rooms.get_mut(room_id).expect("room exists");
        let seq_before = room.state.log_seq;
        let deliveries = room.state.handle(
            &user,
            ActionBody::Join {
                name: name.to_string(),
            },
        );
        if room.state.log_seq > seq_before {
            room.conns.insert(user.clone(), conn);
            let c = self.conns.get_mut(&conn).expect("connection exists");
            c.user_id = Some(user);
            c.room_id = Some(room_id.to_string());
            info!(room = room_id, user = c.user_id.as_deref(), "joined");
            self.route(room_id, deliveries, out);
        } else {
            // Rejected: the room answers the would-be member directly.
            for d in deliveries {
                out.send(conn, d.message);
            }
            if created {
                self.rooms.remove(room_id);
                out.log.retain(|e| e.room_id != room_id);
            }
        }
    }

    fn open_room(&mut self, room_id: &str, out: &mut Outbound) {
        let mut state = RoomState::with_capacity(room_id, self.config.room_capacity);
        state
            .scoreboard
            .merge_max(&self.store.load_scoreboard(room_id));
        let instance = self.next_instance;
        self.next_instance += 1;
        if self.config.logging {
            let line = wire::encode_log_line(&LogLine::Snapshot(BaselineRecord {
                room: room_id.to_string(),
                snapshot: state.snapshot(),
            }));
            out.log.push(LogEntry {
                room_id: room_id.to_string(),
                instance,
                line,
            });
        }
        self.rooms.insert(
            room_id.to_string(),
            Room {
                state,
                conns: BTreeMap::new(),
                instance,
            },
        );
    }

    fn action(&mut self, conn: ConnId, body: ActionBody, out: &mut Outbound) {
        let record = &self.conns[&conn];
        let (Some(room_id), Some(user)) = (record.room_id.clone(), record.user_id.clone()) else {
            out.send(
                conn,
                ServerMessage::Rejected {
                    reason: RejectReason::NotJoined,
                    detail: "send hello first".into(),
                    body: Some(body),
                },
            );
            return;
        };
        if matches!(body, ActionBody::Join { .. }) {
            out.send(
                conn,
                ServerMessage::Rejected {
                    reason: RejectReason::AlreadyJoined,
                    detail: "connection already joined a room".into(),
                    body: Some(body),
                },
            );
            return;
        }
        let leaving = matches!(body, ActionBody::Leave);
        let room = self.rooms.get_mut(&room_id).expect("joined room exists");
        let deliveries = room.state.handle(&user, body);
        let left = leaving && !room.state.is_member(&user);
        // The leaver is outside every recipient set by now but should still
        // see its own departure.
        let own_leave = deliveries
            .iter()
            .rev()
            .find(|d| matches!(d.message, ServerMessage::ActionApplied { .. }))
            .filter(|_| left)
            .map(|d| d.message.clone());
        self.route(&room_id, deliveries, out);
        if let Some(message) = own_leave {
            out.send(conn, message);
            self.detach(conn, &room_id, &user, out);
        }
    }

    /// Drops `conn` and, if it was a member, applies its departure.
    pub fn disconnect(&mut self, conn: ConnId) -> Outbound {
        let mut out = Outbound::default();
        let Some(record) = self.conns.remove(&conn) else {
            return out;
        };
        if let (Some(room_id), Some(user)) = (record.room_id, record.user_id) {
            if let Some(room) = self.rooms.get_mut(&room_id) {
                if let Ok(deliveries) = room.state.member_leave(&user) {
                    self.route(&room_id, deliveries, &mut out);
                }
                let room = self.rooms.get_mut(&room_id).expect("room exists");
                room.conns.remove(&user);
                self.close_if_empty(&room_id, &mut out);
            }
        }
        out
    }

    fn detach(&mut self, conn: ConnId, room_id: &str, user: &str, out: &mut Outbound) {
        if let Some(c) = self.conns.get_mut(&conn) {
            c.room_id = None;
            c.user_id = None;
        }
        if let Some(room) = self.rooms.get_mut(room_id) {
            room.conns.remove(user);
        }
        self.close_if_empty(room_id, out);
    }

    fn close_if_empty(&mut self, room_id: &str, out: &mut Outbound) {
        let empty = self
            .rooms
            .get(room_id)
            .is_some_and(|r| r.state.members.is_empty());
        if empty {
            let room = self.rooms.remove(room_id).expect("room exists");
            info!(room = room_id, "room closed");
            if self.store.is_enabled() {
                out.flush.push((room_id.to_string(), room.state.scoreboard));
            }
        }
    }

    /// Closes every connection silent for longer than the heartbeat timeout.
    pub fn reap(&mut self, now: Instant) -> Outbound {
        let timeout = self.config.heartbeat_timeout;
        let mut stale: Vec<ConnId> = self
            .conns
            .values()
            .filter(|c| now.saturating_duration_since(c.last_heartbeat) > timeout)
            .map(|c| c.id)
            .collect();
        stale.sort_unstable();
        let mut out = Outbound::default();
        for conn in stale {
            debug!(conn, "heartbeat timeout");
            out.extend(self.disconnect(conn));
            out.close.push(conn);
        }
        out
    }

    /// Flushes every open room's scoreboard, for shutdown.
    pub fn flush_all(&self) -> Outbound {
        let mut out = Outbound::default();
        if self.store.is_enabled() {
            for (id, room) in &self.rooms {
                out.flush.push((id.clone(), room.state.scoreboard.clone()));
            }
        }
        out
    }

    /// Maps room deliveries onto connections and records log lines and
    /// flushes they imply.
    fn route(&mut self, room_id: &str, deliveries: Vec<Delivery>, out: &mut Outbound) {
        let room = self.rooms.get(room_id).expect("room exists");
        let applied = deliveries
            .iter()
            .filter(|d| matches!(d.message, ServerMessage::ActionApplied { .. }))
            .count();
        let mut seen = 0;
        for d in deliveries {
            match &d.message {
                ServerMessage::ActionApplied { action } if self.config.logging => {
                    seen += 1;
                    // Intermediate states of a multi-action batch are gone by
                    // now, so only the last action carries a digest.
                    let digest = (seen == applied).then(|| room.state.state_digest());
                    out.log.push(LogEntry {
                        room_id: room_id.to_string(),
                        instance: room.instance,
                        line: wire::encode_log_record(&LogRecord {
                            action: action.clone(),
                            room: Some(room_id.to_string()),
                            digest,
                        }),
                    });
                }
                ServerMessage::ScoreUpdate { scoreboard } if self.store.is_enabled() => {
                    out.flush.push((room_id.to_string(), scoreboard.clone()));
                }
                _ => {}
            }
            for user in &d.to {
                if let Some(&conn) = room.conns.get(user) {
                    out.send(conn, d.message.clone());
                }
            }
        }
    }
}
