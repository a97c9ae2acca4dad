use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::battle::{
    evaluate_guess, summarize_battle, Arrangement, BattleConfig, BattleError, BattleSummary, Guess,
    Scoreboard, Side,
};
use crate::catalog::Algorithm;
use crate::digest::CanonicalHasher;
use crate::trace::{Cursor, Trace};

use super::protocol::{
    Action, ActionBody, Delivery, RejectReason, RoomEventKind, ServerMessage, UserId,
};
use super::Snapshot;

pub const DEFAULT_ROOM_CAPACITY: usize = 8;
/// Largest field the detail view will step through.
pub const MAX_DETAIL_SIZE: usize = 256;
pub const MAX_NAME_LEN: usize = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{reason:?}: {detail}")]
pub struct Rejection {
    pub reason: RejectReason,
    pub detail: String,
}

impl Rejection {
    pub fn new(reason: RejectReason, detail: impl Into<String>) -> Self {
        Self {
            reason,
            detail: detail.into(),
        }
    }
}

impl From<BattleError> for Rejection {
    fn from(e: BattleError) -> Self {
        let reason = match e {
            BattleError::UnknownAlgorithm(_) => RejectReason::UnknownAlgorithm,
            BattleError::SizeOutOfRange { .. } => RejectReason::OutOfRange,
        };
        Rejection::new(reason, e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Member {
    pub user_id: UserId,
    pub display_name: String,
    pub join_seq: u64,
}

/// Detail view: one algorithm, one field, a position in its trace.
///
/// Only the defining fields are serialized; the cursor is rebuilt from them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetailState {
    pub algorithm_id: String,
    pub arrangement: Arrangement,
    pub size: usize,
    pub position: usize,
    #[serde(skip)]
    cursor: Option<Cursor>,
}

impl DetailState {
    fn build(
        algorithm_id: &str,
        arrangement: Arrangement,
        size: usize,
        position: usize,
    ) -> Result<Self, Rejection> {
        let algorithm = Algorithm::from_id(algorithm_id)
            .map_err(|e| Rejection::new(RejectReason::UnknownAlgorithm, e.to_string()))?;
        if !(1..=MAX_DETAIL_SIZE).contains(&size) {
            return Err(Rejection::new(
                RejectReason::OutOfRange,
                format!("detail size {size} is outside 1..={MAX_DETAIL_SIZE}"),
            ));
        }
        let input = crate::battle::make_arrangement(arrangement, size)?;
        let trace = Arc::new(Trace::generate(algorithm, &input));
        let cursor = Cursor::at(trace, position)
            .map_err(|e| Rejection::new(RejectReason::OutOfRange, e.to_string()))?;
        Ok(Self {
            algorithm_id: algorithm_id.to_string(),
            arrangement,
            size,
            position,
            cursor: Some(cursor),
        })
    }

    pub fn cursor(&self) -> &Cursor {
        self.cursor
            .as_ref()
            .expect("detail cursor is materialized on construction and restore")
    }

    fn cursor_mut(&mut self) -> &mut Cursor {
        self.cursor
            .as_mut()
            .expect("detail cursor is materialized on construction and restore")
    }

    fn rematerialize(&mut self) -> Result<(), Rejection> {
        let rebuilt = Self::build(
            &self.algorithm_id,
            self.arrangement,
            self.size,
            self.position,
        )?;
        self.cursor = rebuilt.cursor;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "phase", rename_all = "snake_case")]
pub enum BattlePhase {
    Guessing,
    /// `elapsed` is the shared race clock in cost units.
    Racing {
        elapsed: u64,
        summary: BattleSummary,
    },
    Finished {
        summary: BattleSummary,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BattleState {
    pub config: BattleConfig,
    #[serde(flatten)]
    pub phase: BattlePhase,
    pub guesses: BTreeMap<UserId, Side>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "view", rename_all = "snake_case")]
pub enum View {
    Lobby,
    Detail(DetailState),
    Battle(BattleState),
}

/// The shared state of one room. Every replica that applies the same action
/// log reaches the same `RoomState`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoomState {
    pub room_id: String,
    pub capacity: usize,
    pub members: Vec<Member>,
    pub controller: Option<UserId>,
    pub view: View,
    pub log_seq: u64,
    pub pending_control_requests: Vec<UserId>,
    pub scoreboard: Scoreboard,
    pub next_join_seq: u64,
}

/// Result of one successfully applied action.
struct Applied {
    /// Messages other than the `ActionApplied` broadcast.
    extra: Vec<Delivery>,
}

impl RoomState {
    pub fn create(room_id: &str) -> Self {
        Self::with_capacity(room_id, DEFAULT_ROOM_CAPACITY)
    }

    pub fn with_capacity(room_id: &str, capacity: usize) -> Self {
        Self {
            room_id: room_id.to_string(),
            capacity: capacity.max(1),
            members: Vec::new(),
            controller: None,
            view: View::Lobby,
            log_seq: 0,
            pending_control_requests: Vec::new(),
            scoreboard: Scoreboard::new(),
            next_join_seq: 1,
        }
    }

    pub fn is_member(&self, user: &str) -> bool {
        self.members.iter().any(|m| m.user_id == user)
    }

    pub fn is_controller(&self, user: &str) -> bool {
        self.controller.as_deref() == Some(user)
    }

    pub fn member_ids(&self) -> Vec<UserId> {
        self.members.iter().map(|m| m.user_id.clone()).collect()
    }

    fn others(&self, user: &str) -> Vec<UserId> {
        self.members
            .iter()
            .filter(|m| m.user_id != user)
            .map(|m| m.user_id.clone())
            .collect()
    }

    pub fn is_full(&self) -> bool {
        self.members.len() >= self.capacity
    }

    /// Member with the smallest `join_seq`, skipping `except`.
    fn longest_tenured(&self, except: &str) -> Option<UserId> {
        self.members
            .iter()
            .filter(|m| m.user_id != except)
            .min_by_key(|m| m.join_seq)
            .map(|m| m.user_id.clone())
    }

    /// Applies a request from `actor`. Legal requests are logged and
    /// broadcast; illegal ones leave the room untouched and are answered
    /// with `Rejected` to the actor alone.
    pub fn handle(&mut self, actor: &str, body: ActionBody) -> Vec<Delivery> {
        let echo = body.clone();
        let result = match body {
            ActionBody::Leave => self.member_leave(actor),
            body => self.commit(actor, body),
        };
        result.unwrap_or_else(|rejection| {
            vec![Delivery::to_one(
                actor,
                ServerMessage::Rejected {
                    reason: rejection.reason,
                    detail: rejection.detail,
                    body: Some(echo),
                },
            )]
        })
    }

    /// Removes `user`. A departing controller first hands the token to the
    /// remaining member with the smallest `join_seq`, as its own logged
    /// `GrantControl`, so every replica sees the succession explicitly.
    pub fn member_leave(&mut self, user: &str) -> Result<Vec<Delivery>, Rejection> {
        if !self.is_member(user) {
            return Err(Rejection::new(RejectReason::NotMember, "not a member"));
        }
        let mut out = Vec::new();
        if self.is_controller(user) {
            if let Some(successor) = self.longest_tenured(user) {
                out.extend(self.commit(user, ActionBody::GrantControl { to: successor })?);
            }
        }
        out.extend(self.commit(user, ActionBody::Leave)?);
        Ok(out)
    }

    /// Applies one action atomically and produces its deliveries.
    fn commit(&mut self, actor: &str, body: ActionBody) -> Result<Vec<Delivery>, Rejection> {
        let mut next = self.clone();
        let applied = next.apply_body(actor, &body)?;
        next.log_seq += 1;
        let action = Action {
            seq: next.log_seq,
            actor: actor.to_string(),
            body,
        };
        *self = next;

        let mut out = Vec::with_capacity(applied.extra.len() + 1);
        match &action.body {
            ActionBody::Join { .. } => {
                // The joiner bootstraps from a snapshot that already contains
                // its own join; everyone else gets the action.
                out.push(Delivery::to_one(
                    actor,
                    ServerMessage::Welcome {
                        user_id: actor.to_string(),
                        snapshot: self.snapshot(),
                    },
                ));
                out.push(Delivery {
                    to: self.others(actor),
                    message: ServerMessage::ActionApplied { action },
                });
            }
            _ => out.push(Delivery {
                to: self.member_ids(),
                message: ServerMessage::ActionApplied { action },
            }),
        }
        out.extend(applied.extra);
        Ok(out)
    }

    /// Re-applies an action received from the authoritative log.
    pub fn apply_action(&mut self, action: &Action) -> Result<(), ApplyError> {
        if action.seq != self.log_seq + 1 {
            return Err(ApplyError::OutOfSequence {
                expected: self.log_seq + 1,
                got: action.seq,
            });
        }
        let mut next = self.clone();
        next.apply_body(&action.actor, &action.body)
            .map_err(|rejection| ApplyError::Rejected {
                seq: action.seq,
                rejection,
            })?;
        next.log_seq = action.seq;
        *self = next;
        Ok(())
    }

    fn require_member(&self, actor: &str) -> Result<(), Rejection> {
        if self.is_member(actor) {
            Ok(())
        } else {
            Err(Rejection::new(RejectReason::NotMember, "not a member"))
        }
    }

    fn require_controller(&self, actor: &str) -> Result<(), Rejection> {
        self.require_member(actor)?;
        if self.is_controller(actor) {
            Ok(())
        } else {
            Err(Rejection::new(
                RejectReason::NotController,
                "only the member in control can do this",
            ))
        }
    }

    fn detail_mut(&mut self) -> Result<&mut DetailState, Rejection> {
        match &mut self.view {
            View::Detail(d) => Ok(d),
            _ => Err(Rejection::new(
                RejectReason::BadPhase,
                "not in the detail view",
            )),
        }
    }

    fn battle_mut(&mut self) -> Result<&mut BattleState, Rejection> {
        match &mut self.view {
            View::Battle(b) => Ok(b),
            _ => Err(Rejection::new(
                RejectReason::BadPhase,
                "not in the battle view",
            )),
        }
    }

    fn apply_body(&mut self, actor: &str, body: &ActionBody) -> Result<Applied, Rejection> {
        let mut extra = Vec::new();
        match body {
            ActionBody::Join { .. } => {}
            b if b.requires_control() => self.require_controller(actor)?,
            _ => self.require_member(actor)?,
        }

        match body {
            ActionBody::Join { name } => {
                if self.is_member(actor) {
                    return Err(Rejection::new(
                        RejectReason::AlreadyMember,
                        "already a member",
                    ));
                }
                validate_name(name)?;
                if self.is_full() {
                    return Err(Rejection::new(
                        RejectReason::RoomFull,
                        format!("room holds at most {} members", self.capacity),
                    ));
                }
                self.members.push(Member {
                    user_id: actor.to_string(),
                    display_name: name.trim().to_string(),
                    join_seq: self.next_join_seq,
                });
                self.next_join_seq += 1;
                if self.controller.is_none() {
                    self.controller = Some(actor.to_string());
                }
                extra.push(Delivery {
                    to: self.others(actor),
                    message: ServerMessage::RoomEvent {
                        event: RoomEventKind::Joined,
                        user_id: actor.to_string(),
                    },
                });
            }
            ActionBody::Leave => {
                if self.is_controller(actor) {
                    self.controller = self.longest_tenured(actor);
                }
                self.members.retain(|m| m.user_id != actor);
                self.pending_control_requests.retain(|u| u != actor);
                if let Some(c) = &self.controller {
                    let c = c.clone();
                    self.pending_control_requests.retain(|u| *u != c);
                }
                extra.push(Delivery {
                    to: self.member_ids(),
                    message: ServerMessage::RoomEvent {
                        event: RoomEventKind::Left,
                        user_id: actor.to_string(),
                    },
                });
            }
            ActionBody::RequestControl => {
                if self.is_controller(actor) {
                    return Err(Rejection::new(
                        RejectReason::AlreadyController,
                        "already in control",
                    ));
                }
                if self.pending_control_requests.iter().any(|u| u == actor) {
                    return Err(Rejection::new(
                        RejectReason::AlreadyRequested,
                        "request already pending",
                    ));
                }
                self.pending_control_requests.push(actor.to_string());
                let controller = self
                    .controller
                    .clone()
                    .expect("non-empty room has a controller");
                extra.push(Delivery::to_one(
                    &controller,
                    ServerMessage::ControlRequested {
                        by: actor.to_string(),
                    },
                ));
            }
            ActionBody::GrantControl { to } => {
                if to == actor || !self.is_member(to) {
                    return Err(Rejection::new(
                        RejectReason::InvalidTarget,
                        format!("cannot grant control to `{to}`"),
                    ));
                }
                self.transfer_control(to);
            }
            ActionBody::ReleaseControl => {
                let successor = self
                    .pending_control_requests
                    .first()
                    .cloned()
                    .or_else(|| self.longest_tenured(actor))
                    .ok_or_else(|| {
                        Rejection::new(RejectReason::NoSuccessor, "nobody to take control")
                    })?;
                self.transfer_control(&successor);
            }
            ActionBody::EnterDetail {
                algorithm_id,
                arrangement,
                size,
            } => {
                self.view = View::Detail(DetailState::build(algorithm_id, *arrangement, *size, 0)?);
            }
            ActionBody::SelectAlgorithm { algorithm_id } => {
                let d = self.detail_mut()?;
                *d = DetailState::build(algorithm_id, d.arrangement, d.size, 0)?;
            }
            ActionBody::StepForward => {
                let d = self.detail_mut()?;
                d.cursor_mut()
                    .step_forward()
                    .map_err(|e| Rejection::new(RejectReason::OutOfRange, e.to_string()))?;
                d.position = d.cursor().position();
            }
            ActionBody::StepBackward => {
                let d = self.detail_mut()?;
                d.cursor_mut()
                    .step_backward()
                    .map_err(|e| Rejection::new(RejectReason::OutOfRange, e.to_string()))?;
                d.position = d.cursor().position();
            }
            ActionBody::Seek { position } => {
                let d = self.detail_mut()?;
                d.cursor_mut()
                    .seek(*position)
                    .map_err(|e| Rejection::new(RejectReason::OutOfRange, e.to_string()))?;
                d.position = d.cursor().position();
            }
            ActionBody::EnterBattle { config } => {
                config.resolve()?;
                self.view = View::Battle(BattleState {
                    config: config.clone(),
                    phase: BattlePhase::Guessing,
                    guesses: BTreeMap::new(),
                });
            }
            ActionBody::SubmitGuess { side } => {
                let b = self.battle_mut()?;
                if b.phase != BattlePhase::Guessing {
                    return Err(Rejection::new(
                        RejectReason::BadPhase,
                        "guesses close when the race starts",
                    ));
                }
                b.guesses.insert(actor.to_string(), *side);
            }
            ActionBody::StartRace => {
                let b = self.battle_mut()?;
                if b.phase != BattlePhase::Guessing {
                    return Err(Rejection::new(
                        RejectReason::BadPhase,
                        "race already started",
                    ));
                }
                let summary = summarize_battle(&b.config)?;
                b.phase = BattlePhase::Racing {
                    elapsed: 0,
                    summary,
                };
                extra.extend(self.finish_race_if_done());
            }
            ActionBody::AdvanceRace { ticks } => {
                if *ticks == 0 {
                    return Err(Rejection::new(
                        RejectReason::OutOfRange,
                        "ticks must be positive",
                    ));
                }
                let b = self.battle_mut()?;
                match &mut b.phase {
                    BattlePhase::Racing { elapsed, summary } => {
                        *elapsed = elapsed.saturating_add(*ticks).min(summary.duration());
                    }
                    _ => {
                        return Err(Rejection::new(
                            RejectReason::BadPhase,
                            "no race in progress",
                        ))
                    }
                }
                extra.extend(self.finish_race_if_done());
            }
            ActionBody::ResetScoreboard => {
                self.scoreboard = Scoreboard::new();
                extra.push(Delivery {
                    to: self.member_ids(),
                    message: ServerMessage::ScoreUpdate {
                        scoreboard: Scoreboard::new(),
                    },
                });
            }
            ActionBody::ExitToLobby => {
                if self.view == View::Lobby {
                    return Err(Rejection::new(
                        RejectReason::BadPhase,
                        "already in the lobby",
                    ));
                }
                self.view = View::Lobby;
            }
        }
        Ok(Applied { extra })
    }

    fn transfer_control(&mut self, to: &str) {
        self.controller = Some(to.to_string());
        self.pending_control_requests.retain(|u| u != to);
    }

    /// Ends a race whose clock has reached both finishing times and pays
    /// out one point per correct guess.
    fn finish_race_if_done(&mut self) -> Option<Delivery> {
        let View::Battle(b) = &mut self.view else {
            return None;
        };
        let BattlePhase::Racing { elapsed, summary } = &b.phase else {
            return None;
        };
        if *elapsed < summary.duration() {
            return None;
        }
        let summary = summary.clone();
        for (user, side) in &b.guesses {
            let guess = Guess {
                user_id: user.clone(),
                predicted: *side,
            };
            self.scoreboard
                .apply_score(user, evaluate_guess(&guess, summary.winner));
        }
        b.phase = BattlePhase::Finished { summary };
        Some(Delivery {
            to: self.member_ids(),
            message: ServerMessage::ScoreUpdate {
                scoreboard: self.scoreboard.clone(),
            },
        })
    }

    /// SHA-256 of the canonical JSON encoding. Maps (scoreboard, guesses)
    /// serialize in key order; everything else keeps its order.
    pub fn state_digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("room state serializes");
        let mut h = CanonicalHasher::new("sortlab/room/v1");
        h.bytes(&json);
        if let View::Detail(d) = &self.view {
            h.str(&d.cursor().state_digest());
        }
        h.finish()
    }

    pub fn snapshot(&self) -> Snapshot {
        Snapshot {
            log_seq: self.log_seq,
            state: self.clone(),
        }
    }

    /// Checks the structural invariants of the room.
    pub fn check_invariants(&self) -> Result<(), String> {
        match (&self.controller, self.members.is_empty()) {
            (None, true) => {}
            (Some(c), false) if self.is_member(c) => {}
            (c, _) => return Err(format!("controller {c:?} inconsistent with members")),
        }
        let mut ids: Vec<&str> = self.members.iter().map(|m| m.user_id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err("duplicate member".into());
        }
        if self.members.len() > self.capacity {
            return Err("room over capacity".into());
        }
        if self
            .members
            .windows(2)
            .any(|w| w[0].join_seq >= w[1].join_seq)
            || self
                .members
                .iter()
                .any(|m| m.join_seq >= self.next_join_seq)
        {
            return Err("join sequence numbers out of order".into());
        }
        let mut pending = self.pending_control_requests.clone();
        pending.sort_unstable();
        pending.dedup();
        if pending.len() != self.pending_control_requests.len() {
            return Err("duplicate control request".into());
        }
        for u in &self.pending_control_requests {
            if !self.is_member(u) || self.is_controller(u) {
                return Err(format!("invalid pending request from `{u}`"));
            }
        }
        if let View::Battle(b) = &self.view {
            if let BattlePhase::Racing { elapsed, summary } = &b.phase {
                if *elapsed > summary.duration() {
                    return Err("race clock past finish".into());
                }
            }
        }
        Ok(())
    }

    /// Rebuilds derived data after deserialization.
    pub(super) fn rematerialize(&mut self) -> Result<(), Rejection> {
        match &mut self.view {
            View::Detail(d) => d.rematerialize(),
            View::Battle(b) => {
                b.config.resolve()?;
                Ok(())
            }
            View::Lobby => Ok(()),
        }
    }
}

fn validate_name(name: &str) -> Result<(), Rejection> {
    let trimmed = name.trim();
    if trimmed.is_empty()
        || trimmed.chars().count() > MAX_NAME_LEN
        || trimmed.chars().any(char::is_control)
    {
        return Err(Rejection::new(
            RejectReason::InvalidName,
            format!("names must be 1 to {MAX_NAME_LEN} printable characters"),
        ));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApplyError {
    #[error("expected action {expected}, got {got}")]
    OutOfSequence { expected: u64, got: u64 },
    #[error("action {seq} does not apply: {rejection}")]
    Rejected { seq: u64, rejection: Rejection },
}
