use serde::{Deserialize, Serialize};

use crate::battle::{Arrangement, BattleConfig, Scoreboard, Side};

use super::Snapshot;

pub type UserId = String;

/// Everything a member can ask the room to do.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionBody {
    EnterDetail {
        algorithm_id: String,
        arrangement: Arrangement,
        size: usize,
    },
    StepForward,
    StepBackward,
    Seek {
        position: usize,
    },
    SelectAlgorithm {
        algorithm_id: String,
    },
    EnterBattle {
        config: BattleConfig,
    },
    StartRace,
    AdvanceRace {
        ticks: u64,
    },
    ExitToLobby,
    ResetScoreboard,
    SubmitGuess {
        side: Side,
    },
    RequestControl,
    GrantControl {
        to: UserId,
    },
    ReleaseControl,
    Join {
        name: String,
    },
    Leave,
}

impl ActionBody {
    /// Actions that change the shared experiment and therefore need the
    /// control token.
    pub fn requires_control(&self) -> bool {
        !matches!(
            self,
            ActionBody::SubmitGuess { .. }
                | ActionBody::RequestControl
                | ActionBody::Join { .. }
                | ActionBody::Leave
        )
    }
}

/// An action as applied by the room, stamped with its position in the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Action {
    pub seq: u64,
    pub actor: UserId,
    pub body: ActionBody,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    NotMember,
    NotController,
    BadPhase,
    UnknownAlgorithm,
    OutOfRange,
    RoomFull,
    AlreadyMember,
    AlreadyController,
    AlreadyRequested,
    InvalidTarget,
    NoSuccessor,
    InvalidName,
    // Raised by the server before the room sees the message.
    InvalidRoom,
    NotJoined,
    AlreadyJoined,
    ServerFull,
    MalformedMessage,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RoomEventKind {
    Joined,
    Left,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ClientMessage {
    Hello { name: String, room_id: String },
    ActionRequest { body: ActionBody },
    Ping,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
#[allow(clippy::large_enum_variant)]
pub enum ServerMessage {
    Welcome {
        user_id: UserId,
        snapshot: Snapshot,
    },
    ActionApplied {
        action: Action,
    },
    Rejected {
        reason: RejectReason,
        #[serde(default)]
        detail: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        body: Option<ActionBody>,
    },
    ControlRequested {
        by: UserId,
    },
    RoomEvent {
        event: RoomEventKind,
        user_id: UserId,
    },
    ScoreUpdate {
        scoreboard: Scoreboard,
    },
    Pong,
}

/// An outbound message and the members it is addressed to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Delivery {
    pub to: Vec<UserId>,
    pub message: ServerMessage,
}

impl Delivery {
    pub fn to_one(user: &str, message: ServerMessage) -> Self {
        Self {
            to: vec![user.to_string()],
            message,
        }
    }
}
