use std::net::SocketAddr;
use std::path::PathBuf;
use std::time::Duration;

use sortlab_core::session::DEFAULT_ROOM_CAPACITY;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("heartbeat timeout must exceed the interval, and the interval must be positive")]
    Heartbeat,
    #[error("{0} must be at least 1")]
    Capacity(&'static str),
}

#[derive(Debug, Clone)]
pub struct ServerConfig {
    pub bind: SocketAddr,
    pub max_rooms: usize,
    pub room_capacity: usize,
    pub heartbeat_interval: Duration,
    pub heartbeat_timeout: Duration,
    pub scoreboard_dir: Option<PathBuf>,
    pub ui_dir: Option<PathBuf>,
    /// Per-room action logs, replayable with `sortlab replay`.
    pub log_dir: Option<PathBuf>,
}

impl Default for ServerConfig {
    fn default() -> Self {
        Self {
            bind: SocketAddr::from(([127, 0, 0, 1], 7878)),
            max_rooms: 64,
            room_capacity: DEFAULT_ROOM_CAPACITY,
            heartbeat_interval: Duration::from_secs(5),
            heartbeat_timeout: Duration::from_secs(15),
            scoreboard_dir: None,
            ui_dir: None,
            log_dir: None,
        }
    }
}

impl ServerConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.heartbeat_interval.is_zero() || self.heartbeat_timeout <= self.heartbeat_interval {
            return Err(ConfigError::Heartbeat);
        }
        if self.max_rooms == 0 {
            return Err(ConfigError::Capacity("max_rooms"));
        }
        if self.room_capacity == 0 {
            return Err(ConfigError::Capacity("room_capacity"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        assert_eq!(ServerConfig::default().validate(), Ok(()));
    }

    #[test]
    fn rejects_bad_heartbeats_and_capacities() {
        let mut c = ServerConfig {
            heartbeat_timeout: Duration::from_secs(5),
            ..Default::default()
        };
        assert_eq!(c.validate(), Err(ConfigError::Heartbeat));
        c.heartbeat_interval = Duration::ZERO;
        assert_eq!(c.validate(), Err(ConfigError::Heartbeat));
        let c = ServerConfig {
            room_capacity: 0,
            ..Default::default()
        };
        assert_eq!(c.validate(), Err(ConfigError::Capacity("room_capacity")));
        let c = ServerConfig {
            max_rooms: 0,
            ..Default::default()
        };
        assert_eq!(c.validate(), Err(ConfigError::Capacity("max_rooms")));
    }
}
