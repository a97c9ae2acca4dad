//! Transport-free room state machine.
//!
//! A room is advanced only through [`RoomState::handle`], one request at a
//! time. Each accepted request becomes an [`Action`] with the next sequence
//! number; replicas that apply the same actions in order end in the same
//! state, which [`RoomState::state_digest`] makes checkable.

mod protocol;
mod replica;
mod room;
mod snapshot;

pub use protocol::{
    Action, ActionBody, ClientMessage, Delivery, RejectReason, RoomEventKind, ServerMessage, UserId,
};
pub use replica::{Replica, ReplicaError};
pub use room::{
    ApplyError, BattlePhase, BattleState, DetailState, Member, Rejection, RoomState, View,
    DEFAULT_ROOM_CAPACITY, MAX_DETAIL_SIZE, MAX_NAME_LEN,
};
pub use snapshot::{restore, CorruptSnapshot, Snapshot};

/// An empty room in the lobby.
pub fn create_room(room_id: &str) -> RoomState {
    RoomState::create(room_id)
}
