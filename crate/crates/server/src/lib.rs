//! Websocket host for shared sorting-lab rooms.
//!
//! [`Hub`] does all routing and is usable without a network; [`bind`] and
//! [`serve`] put it behind a websocket endpoint at `/ws`, optionally serving
//! a static UI bundle for every other path.

pub mod config;
pub mod hub;
mod net;
pub mod store;

pub use config::{ConfigError, ServerConfig};
pub use hub::{ConnId, ConnectionRecord, Hub, HubConfig, LogEntry, Outbound};
pub use net::{bind, serve, BoundServer, ServeError};
pub use store::ScoreStore;
