//! `sortlab`: run the lab server and drive the engines from a terminal.
//!
//! Exit codes: 0 success, 1 runtime or verification failure, 2 usage error.

use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use sortlab_core::battle::{
    make_arrangement, Arrangement, BattleConfig, Winner, DEFAULT_BATTLE_SIZE,
};
use sortlab_core::session::RoomState;
use sortlab_core::trace::dump;
use sortlab_core::wire::{self, LogLine};
use sortlab_core::{run_battle, Algorithm, ElementArray, Trace};
use sortlab_server::ServerConfig;

#[derive(Parser)]
#[command(
    name = "sortlab",
    version,
    about = "Sorting-algorithm lab: traces, battles and shared rooms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Lines,
}

#[derive(Clone, Copy, ValueEnum)]
enum ArrangementKind {
    Random,
    Reversed,
    Sorted,
}

#[derive(Clone, Copy, ValueEnum)]
enum Script {
    Default,
}

#[derive(Subcommand)]
enum Command {
    /// Print the step trace of one algorithm.
    Trace {
        #[arg(long)]
        algo: String,
        /// Comma-separated permutation of 1..=n.
        #[arg(long, conflicts_with_all = ["size", "seed"])]
        input: Option<String>,
        /// Random input of this size (with --seed).
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Race two algorithms on one arrangement.
    Battle {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        #[arg(long, value_enum, default_value_t = ArrangementKind::Random)]
        arrangement: ArrangementKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BATTLE_SIZE)]
        size: usize,
        /// Write the full result document (JSON) here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the classroom battle script and print a summary table.
    Tasks {
        #[arg(long, value_enum, default_value_t = Script::Default)]
        script: Script,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Replay an action log into a fresh room.
    Replay {
        #[arg(long)]
        log: PathBuf,
        /// Compare recorded digests after every action.
        #[arg(long)]
        verify: bool,
        /// Room id for logs without a baseline or room field.
        #[arg(long, default_value = "room")]
        room: String,
    },
    /// Run the websocket server.
    Serve {
        #[arg(long, default_value_t = 7878)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: IpAddr,
        #[arg(long, default_value_t = 64)]
        max_rooms: usize,
        #[arg(long, default_value_t = sortlab_core::session::DEFAULT_ROOM_CAPACITY)]
        room_capacity: usize,
        /// Seconds between client pings.
        #[arg(long, default_value_t = 5)]
        heartbeat_interval: u64,
        /// Seconds of silence before a connection is dropped.
        #[arg(long, default_value_t = 15)]
        heartbeat_timeout: u64,
        #[arg(long)]
        scoreboard_dir: Option<PathBuf>,
        #[arg(long)]
        ui_dir: Option<PathBuf>,
        /// Write one replayable action log per room here.
        #[arg(long)]
        log_dir: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

fn runtime(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Trace {
            algo,
            input,
            size,
            seed,
            format,
        } => cmd_trace(&algo, input.as_deref(), size, seed, format),
        Command::Battle {
            left,
            right,
            arrangement,
            seed,
            size,
            out,
        } => cmd_battle(&left, &right, arrangement_of(arrangement, seed), size, out),
        Command::Tasks { script, seed } => cmd_tasks(script, seed),
        Command::Replay { log, verify, room } => cmd_replay(&log, verify, &room),
        Command::Serve {
            port,
            bind,
            max_rooms,
            room_capacity,
            heartbeat_interval,
            heartbeat_timeout,
            scoreboard_dir,
            ui_dir,
            log_dir,
        } => cmd_serve(ServerConfig {
            bind: SocketAddr::new(bind, port),
            max_rooms,
            room_capacity,
            heartbeat_interval: Duration::from_secs(heartbeat_interval),
            heartbeat_timeout: Duration::from_secs(heartbeat_timeout),
            scoreboard_dir,
            ui_dir,
            log_dir,
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sortlab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn arrangement_of(kind: ArrangementKind, seed: u64) -> Arrangement {
    match kind {
        ArrangementKind::Random => Arrangement::Random { seed },
        ArrangementKind::Reversed => Arrangement::Reversed,
        ArrangementKind::Sorted => Arrangement::Sorted,
    }
}

fn cmd_trace(
    algo: &str,
    input: Option<&str>,
    size: Option<usize>,
    seed: u64,
    format: Format,
) -> Result<(), Failure> {
    let algorithm = Algorithm::from_id(algo).map_err(|e| usage(format!("--algo: {e}")))?;
    let input = match (input, size) {
        (Some(text), _) => {
            let values = if text.trim().is_empty() {
                Vec::new()
            } else {
                text.split(',')
                    .map(|v| v.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| usage(format!("--input: {e}")))?
            };
            ElementArray::new(values).map_err(|e| usage(format!("--input: {e}")))?
        }
        (None, Some(size)) => make_arrangement(Arrangement::Random { seed }, size)
            .map_err(|e| usage(format!("--size: {e}")))?,
        (None, None) => return Err(usage("one of --input or --size is required")),
    };
    let trace = Trace::generate(algorithm, &input);
    match format {
        Format::Text => print!("{}", dump::format_text(&trace)),
        Format::Lines => print!("{}", dump::format_lines(&trace)),
    }
    Ok(())
}

fn winner_name(config: &BattleConfig, winner: Winner) -> String {
    match winner {
        Winner::Left => format!("left ({})", config.left),
        Winner::Right => format!("right ({})", config.right),
        Winner::Draw => "draw".to_string(),
    }
}

fn arrangement_label(a: Arrangement) -> String {
    match a {
        Arrangement::Random { seed } => format!("random(seed={seed})"),
        other => other.name().to_string(),
    }
}

fn cmd_battle(
    left: &str,
    right: &str,
    arrangement: Arrangement,
    size: usize,
    out: Option<PathBuf>,
) -> Result<(), Failure> {
    let config = BattleConfig::new(left, right, arrangement, size);
    let result = run_battle(&config).map_err(|e| usage(e.to_string()))?;
    println!(
        "arrangement {} size {}",
        arrangement_label(arrangement),
        size
    );
    println!("left  {:<10} cost {}", config.left, result.left_cost);
    println!("right {:<10} cost {}", config.right, result.right_cost);
    println!("winner {}", winner_name(&config, result.winner));
    if let Some(path) = out {
        fs::write(&path, result.to_document() + "\n")
            .map_err(|e| runtime(format!("--out {}: {e}", path.display())))?;
    }
    Ok(())
}

fn default_script(seed: u64) -> Vec<BattleConfig> {
    let size = DEFAULT_BATTLE_SIZE;
    vec![
        BattleConfig::new("merge", "insertion", Arrangement::Random { seed }, size),
        BattleConfig::new("merge", "radix", Arrangement::Random { seed }, size),
        BattleConfig::new("insertion", "radix", Arrangement::Sorted, size),
    ]
}

fn cmd_tasks(script: Script, seed: u64) -> Result<(), Failure> {
    let battles = match script {
        Script::Default => default_script(seed),
    };
    println!(
        "{:<4} {:<10} {:<10} {:<16} {:>5} {:>10} {:>10}  winner",
        "task", "left", "right", "arrangement", "size", "left_cost", "right_cost"
    );
    for (k, config) in battles.iter().enumerate() {
        let r = run_battle(config).map_err(|e| runtime(e.to_string()))?;
        println!(
            "{:<4} {:<10} {:<10} {:<16} {:>5} {:>10} {:>10}  {}",
            k + 1,
            config.left,
            config.right,
            arrangement_label(config.arrangement),
            config.size,
            r.left_cost,
            r.right_cost,
            winner_name(config, r.winner)
        );
    }
    Ok(())
}

fn cmd_replay(path: &PathBuf, verify: bool, default_room: &str) -> Result<(), Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| usage(format!("--log {}: {e}", path.display())))?;
    let mut state: Option<RoomState> = None;
    let mut applied = 0usize;
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |e: String| usage(format!("{}:{}: {e}", path.display(), n + 1));
        match wire::decode_log_line(line).map_err(|e| malformed(e.to_string()))? {
            LogLine::Snapshot(base) => {
                if state.is_some() {
                    return Err(malformed("baseline must be the first line".into()));
                }
                state = Some(
                    base.snapshot
                        .restore()
                        .map_err(|e| malformed(e.to_string()))?,
                );
            }
            LogLine::ActionApplied(record) => {
                let room = state.get_or_insert_with(|| {
                    RoomState::create(record.room.as_deref().unwrap_or(default_room))
                });
                let seq = record.action.seq;
                room.apply_action(&record.action)
                    .map_err(|e| runtime(format!("diverged at seq {seq}: {e}")))?;
                if verify {
                    if let Some(expected) = &record.digest {
                        if *expected != room.state_digest() {
                            return Err(runtime(format!("diverged at seq {seq}: digest mismatch")));
                        }
                    }
                }
                applied += 1;
            }
        }
    }
    let state = state.unwrap_or_else(|| RoomState::create(default_room));
    println!("actions {applied}");
    println!("seq {}", state.log_seq);
    println!("digest {}", state.state_digest());
    Ok(())
}

fn cmd_serve(config: ServerConfig) -> Result<(), Failure> {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .with_writer(std::io::stderr)
        .init();
    config.validate().map_err(|e| usage(e.to_string()))?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| runtime(e.to_string()))?;
    rt.block_on(async {
        let server = sortlab_server::bind(config)
            .await
            .map_err(|e| runtime(e.to_string()))?;
        let addr = server.local_addr().map_err(|e| runtime(e.to_string()))?;
        println!("listening on {addr}");
        server
            .run_until(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| runtime(e.to_string()))
    })
}
