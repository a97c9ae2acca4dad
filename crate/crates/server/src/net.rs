//! Websocket transport around the [`Hub`].
//!
//! One mutex guards the hub and the per-connection writer channels, so every
//! batch is applied and queued atomically; per-room order on the wire follows
//! from the FIFO writer queues. Disk writes happen on a separate thread fed
//! in the same order.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::future::Future;
use std::io::{self, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{mpsc as std_mpsc, Arc, Mutex, MutexGuard};
use std::thread;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures_util::{SinkExt, StreamExt};
use sortlab_core::wire;
use thiserror::Error;
use tokio::net::TcpListener;
use tokio::sync::mpsc;
use tower_http::services::ServeDir;
use tracing::{info, warn};

use crate::config::{ConfigError, ServerConfig};
use crate::hub::{ConnId, Hub, HubConfig, LogEntry, Outbound};
use crate::store::ScoreStore;

#[derive(Debug, Error)]
pub enum ServeError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot bind {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

enum Outgoing {
    Text(String),
    Close,
}

enum PersistJob {
    Log(LogEntry),
    Flush(String, sortlab_core::Scoreboard),
}

struct Shared {
    hub: Hub,
    writers: HashMap<ConnId, mpsc::UnboundedSender<Outgoing>>,
    persist: Option<std_mpsc::Sender<PersistJob>>,
}

impl Shared {
    fn dispatch(&mut self, out: Outbound) {
        for (conn, message) in out.deliveries {
            if let Some(w) = self.writers.get(&conn) {
                let _ = w.send(Outgoing::Text(wire::encode_server(&message)));
            }
        }
        for conn in out.close {
            if let Some(w) = self.writers.remove(&conn) {
                let _ = w.send(Outgoing::Close);
            }
        }
        if let Some(p) = &self.persist {
            for entry in out.log {
                let _ = p.send(PersistJob::Log(entry));
            }
            for (room, board) in out.flush {
                let _ = p.send(PersistJob::Flush(room, board));
            }
        }
    }
}

type AppState = Arc<Mutex<Shared>>;

fn lock(state: &AppState) -> MutexGuard<'_, Shared> {
    state.lock().unwrap_or_else(|e| e.into_inner())
}

/// A server bound to its listening socket but not yet accepting.
pub struct BoundServer {
    listener: TcpListener,
    config: ServerConfig,
}

pub async fn bind(config: ServerConfig) -> Result<BoundServer, ServeError> {
    config.validate()?;
    let listener = TcpListener::bind(config.bind)
        .await
        .map_err(|source| ServeError::Bind {
            addr: config.bind,
            source,
        })?;
    Ok(BoundServer { listener, config })
}

/// Runs until ctrl-c.
pub async fn serve(config: ServerConfig) -> Result<(), ServeError> {
    let server = bind(config).await?;
    info!(addr = %server.local_addr()?, "listening");
    server
        .run_until(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

impl BoundServer {
    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    pub async fn run_until(
        self,
        shutdown: impl Future<Output = ()> + Send + 'static,
    ) -> Result<(), ServeError> {
        let config = self.config;
        let store = ScoreStore::new(config.scoreboard_dir.clone());
        let (persist_tx, persist_rx) = std_mpsc::channel();
        let persister = spawn_persister(persist_rx, store.clone(), config.log_dir.clone());

        let state: AppState = Arc::new(Mutex::new(Shared {
            hub: Hub::new(HubConfig::from(&config), store),
            writers: HashMap::new(),
            persist: Some(persist_tx),
        }));

        let reaper = {
            let state = state.clone();
            let period = config.heartbeat_interval;
            tokio::spawn(async move {
                let mut tick = tokio::time::interval(period);
                loop {
                    tick.tick().await;
                    let mut s = lock(&state);
                    let out = s.hub.reap(Instant::now());
                    s.dispatch(out);
                }
            })
        };

        let mut app = Router::new()
            .route("/ws", get(upgrade))
            .with_state(state.clone());
        if let Some(dir) = &config.ui_dir {
            app = app.fallback_service(ServeDir::new(dir));
        }

        let result = axum::serve(self.listener, app)
            .with_graceful_shutdown(shutdown)
            .await;
        reaper.abort();

        {
            let mut s = lock(&state);
            let out = s.hub.flush_all();
            s.dispatch(out);
            for (_, w) in s.writers.drain() {
                let _ = w.send(Outgoing::Close);
            }
            s.persist = None;
        }
        let _ = persister.join();
        result.map_err(ServeError::Io)
    }
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, state))
}

async fn connection(socket: WebSocket, state: AppState) {
    let (mut sink, mut stream) = socket.split();
    let (tx, mut rx) = mpsc::unbounded_channel();
    let conn = {
        let mut s = lock(&state);
        let conn = s.hub.connect(Instant::now());
        s.writers.insert(conn, tx);
        conn
    };

    let mut writer = tokio::spawn(async move {
        while let Some(item) = rx.recv().await {
            let sent = match item {
                Outgoing::Text(text) => sink.send(Message::Text(text.into())).await,
                Outgoing::Close => {
                    let _ = sink.send(Message::Close(None)).await;
                    break;
                }
            };
            if sent.is_err() {
                break;
            }
        }
    });

    loop {
        let next = tokio::select! {
            next = stream.next() => next,
            _ = &mut writer => break,
        };
        let Some(Ok(message)) = next else { break };
        let mut s = lock(&state);
        let out = match message {
            Message::Text(text) => s.hub.receive_text(conn, text.as_str(), Instant::now()),
            Message::Binary(bytes) => {
                let text = String::from_utf8_lossy(&bytes).into_owned();
                s.hub.receive_text(conn, &text, Instant::now())
            }
            Message::Ping(_) | Message::Pong(_) => {
                s.hub.touch(conn, Instant::now());
                continue;
            }
            Message::Close(_) => break,
        };
        s.dispatch(out);
    }

    let mut s = lock(&state);
    let out = s.hub.disconnect(conn);
    s.dispatch(out);
    s.writers.remove(&conn);
}

fn spawn_persister(
    jobs: std_mpsc::Receiver<PersistJob>,
    store: ScoreStore,
    log_dir: Option<PathBuf>,
) -> thread::JoinHandle<()> {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    thread::spawn(move || {
        let mut logs: HashMap<(String, u64), File> = HashMap::new();
        for job in jobs {
            match job {
                PersistJob::Flush(room, board) => {
                    if let Err(e) = store.persist_scoreboard(&room, &board) {
                        warn!(room, error = %e, "scoreboard flush failed");
                    }
                }
                PersistJob::Log(entry) => {
                    let Some(dir) = &log_dir else { continue };
                    let key = (entry.room_id.clone(), entry.instance);
                    if !logs.contains_key(&key) {
                        let path = dir.join(format!(
                            "{}-{}-{}.log",
                            entry.room_id, started, entry.instance
                        ));
                        match fs::create_dir_all(dir)
                            .and_then(|_| OpenOptions::new().create(true).append(true).open(&path))
                        {
                            Ok(f) => {
                                logs.insert(key.clone(), f);
                            }
                            Err(e) => {
                                warn!(path = %path.display(), error = %e, "cannot open action log");
                                continue;
                            }
                        }
                    }
                    let f = logs.get_mut(&key).expect("log file open");
                    if let Err(e) = writeln!(f, "{}", entry.line) {
                        warn!(error = %e, "action log write failed");
                    }
                }
            }
        }
    })
}
