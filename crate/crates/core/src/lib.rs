//! Engine behind the collaborative sorting lab: instrumented sorting traces,
//! two-algorithm battles with guessing and scoring, and the room state
//! machine that keeps every participant on the same experiment state.

pub mod battle;
pub mod catalog;
pub mod digest;
pub mod element;
pub mod session;
pub mod trace;
pub mod wire;

pub use battle::{run_battle, BattleConfig, BattleResult, Scoreboard, Side, Winner};
pub use catalog::{list_algorithms, Algorithm, AlgorithmSpec, UnknownAlgorithm};
pub use element::{ElementArray, ElementError, MAX_ELEMENTS};
pub use session::{create_room, RoomState, Snapshot};
pub use trace::{generate_trace, Cursor, CursorError, Trace, TraceError, TraceStep};
