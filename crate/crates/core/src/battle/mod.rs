//! Battle view: two algorithms race on the same field, users guess the
//! winner in advance and collect points on a shared scoreboard.
//!
//! "Faster" means a lower total trace cost, so a race is fully determined by
//! its configuration.

mod arrangement;
mod scoring;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{Algorithm, UnknownAlgorithm};
use crate::element::ElementArray;
use crate::trace::{trace_cost, Trace};

pub use arrangement::{make_arrangement, Arrangement, XorShift64Star};
pub use scoring::{evaluate_guess, Guess, Scoreboard};

pub const MIN_BATTLE_SIZE: usize = 2;
pub const MAX_BATTLE_SIZE: usize = 1000;
/// The battle image is cut into this many stripes unless configured otherwise.
pub const DEFAULT_BATTLE_SIZE: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BattleError {
    #[error(transparent)]
    UnknownAlgorithm(#[from] UnknownAlgorithm),
    #[error("size {size} is outside {min}..={max}")]
    SizeOutOfRange { size: usize, min: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Winner {
    Left,
    Right,
    Draw,
}

impl Winner {
    pub fn from_costs(left_cost: u64, right_cost: u64) -> Self {
        match left_cost.cmp(&right_cost) {
            std::cmp::Ordering::Less => Winner::Left,
            std::cmp::Ordering::Greater => Winner::Right,
            std::cmp::Ordering::Equal => Winner::Draw,
        }
    }

    pub fn side(self) -> Option<Side> {
        match self {
            Winner::Left => Some(Side::Left),
            Winner::Right => Some(Side::Right),
            Winner::Draw => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BattleConfig {
    pub left: String,
    pub right: String,
    pub arrangement: Arrangement,
    #[serde(default = "default_size")]
    pub size: usize,
}

fn default_size() -> usize {
    DEFAULT_BATTLE_SIZE
}

impl BattleConfig {
    pub fn new(left: &str, right: &str, arrangement: Arrangement, size: usize) -> Self {
        Self {
            left: left.to_string(),
            right: right.to_string(),
            arrangement,
            size,
        }
    }

    /// Resolves both algorithms and builds the shared input field.
    pub fn resolve(&self) -> Result<(Algorithm, Algorithm, ElementArray), BattleError> {
        let left = Algorithm::from_id(&self.left)?;
        let right = Algorithm::from_id(&self.right)?;
        if !(MIN_BATTLE_SIZE..=MAX_BATTLE_SIZE).contains(&self.size) {
            return Err(BattleError::SizeOutOfRange {
                size: self.size,
                min: MIN_BATTLE_SIZE,
                max: MAX_BATTLE_SIZE,
            });
        }
        let input = make_arrangement(self.arrangement, self.size)?;
        Ok((left, right, input))
    }
}

/// One step of either contestant, placed on the shared race clock.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimelineEntry {
    pub side: Side,
    pub step_index: usize,
    pub cumulative_cost: u64,
}

/// Costs and winner of a race, without the timeline.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BattleSummary {
    pub left_cost: u64,
    pub right_cost: u64,
    pub left_steps: usize,
    pub right_steps: usize,
    pub winner: Winner,
}

impl BattleSummary {
    /// Race time at which both contestants have finished.
    pub fn duration(&self) -> u64 {
        self.left_cost.max(self.right_cost)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BattleResult {
    pub config: BattleConfig,
    pub left_cost: u64,
    pub right_cost: u64,
    pub winner: Winner,
    pub timeline: Vec<TimelineEntry>,
}

impl BattleResult {
    pub fn summary(&self) -> BattleSummary {
        let count = |side| self.timeline.iter().filter(|e| e.side == side).count();
        BattleSummary {
            left_cost: self.left_cost,
            right_cost: self.right_cost,
            left_steps: count(Side::Left),
            right_steps: count(Side::Right),
            winner: self.winner,
        }
    }

    /// Serializes the result as a versioned JSON document.
    pub fn to_document(&self) -> String {
        #[derive(Serialize)]
        struct Document<'a> {
            v: u32,
            #[serde(rename = "type")]
            kind: &'static str,
            #[serde(flatten)]
            result: &'a BattleResult,
        }
        serde_json::to_string_pretty(&Document {
            v: crate::wire::PROTOCOL_VERSION,
            kind: "battle_result",
            result: self,
        })
        .expect("battle result serializes")
    }
}

/// Races both algorithms on the configured input and interleaves their steps
/// on a common clock.
pub fn run_battle(config: &BattleConfig) -> Result<BattleResult, BattleError> {
    let (left, right, input) = config.resolve()?;
    let left_trace = Trace::generate(left, &input);
    let right_trace = Trace::generate(right, &input);
    let timeline = interleave(&left_trace, &right_trace);
    Ok(BattleResult {
        config: config.clone(),
        left_cost: left_trace.total_cost(),
        right_cost: right_trace.total_cost(),
        winner: Winner::from_costs(left_trace.total_cost(), right_trace.total_cost()),
        timeline,
    })
}

/// Costs and winner only; does not keep the traces in memory.
pub fn summarize_battle(config: &BattleConfig) -> Result<BattleSummary, BattleError> {
    let (left, right, input) = config.resolve()?;
    let l = trace_cost(left, &input);
    let r = trace_cost(right, &input);
    Ok(BattleSummary {
        left_cost: l.total_cost,
        right_cost: r.total_cost,
        left_steps: l.steps,
        right_steps: r.steps,
        winner: Winner::from_costs(l.total_cost, r.total_cost),
    })
}

fn side_entries(side: Side, trace: &Trace) -> impl Iterator<Item = TimelineEntry> + '_ {
    trace
        .steps()
        .iter()
        .enumerate()
        .scan(0u64, move |acc, (step_index, step)| {
            *acc += step.cost;
            Some(TimelineEntry {
                side,
                step_index,
                cumulative_cost: *acc,
            })
        })
}

fn interleave(left: &Trace, right: &Trace) -> Vec<TimelineEntry> {
    let mut timeline: Vec<TimelineEntry> = side_entries(Side::Left, left)
        .chain(side_entries(Side::Right, right))
        .collect();
    timeline.sort_by_key(|e| (e.cumulative_cost, e.side, e.step_index));
    timeline
}

/// Stripe index shown at every position: value `v` is stripe `v - 1`, so a
/// sorted field shows the image intact.
pub fn stripe_mapping(array: &ElementArray) -> Vec<usize> {
    array.values().iter().map(|&v| v as usize - 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(l: &str, r: &str, a: Arrangement, size: usize) -> BattleConfig {
        BattleConfig::new(l, r, a, size)
    }

    #[test]
    fn insertion_beats_merge_on_sorted() {
        let r = run_battle(&cfg("insertion", "merge", Arrangement::Sorted, 100)).unwrap();
        assert_eq!(r.left_cost, 99);
        assert!(r.right_cost > 99);
        assert_eq!(r.winner, Winner::Left);
    }

    #[test]
    fn merge_beats_insertion_on_reversed() {
        let r = run_battle(&cfg("merge", "insertion", Arrangement::Reversed, 100)).unwrap();
        assert_eq!(r.winner, Winner::Left);
    }

    #[test]
    fn insertion_beats_radix_on_sorted() {
        let r = run_battle(&cfg("insertion", "radix", Arrangement::Sorted, 100)).unwrap();
        assert_eq!(r.winner, Winner::Left);
    }

    #[test]
    fn mirror_match_is_a_draw() {
        for a in [
            Arrangement::Sorted,
            Arrangement::Reversed,
            Arrangement::Random { seed: 9 },
        ] {
            let r = run_battle(&cfg("quick", "quick", a, 50)).unwrap();
            assert_eq!(r.winner, Winner::Draw);
        }
    }

    #[test]
    fn config_errors() {
        assert!(matches!(
            run_battle(&cfg("nosuch", "merge", Arrangement::Sorted, 10)),
            Err(BattleError::UnknownAlgorithm(_))
        ));
        assert!(matches!(
            run_battle(&cfg("merge", "merge", Arrangement::Sorted, 1)),
            Err(BattleError::SizeOutOfRange { .. })
        ));
        assert!(matches!(
            run_battle(&cfg("merge", "merge", Arrangement::Sorted, 1001)),
            Err(BattleError::SizeOutOfRange { .. })
        ));
    }

    #[test]
    fn timeline_order_and_completeness() {
        let r = run_battle(&cfg("heap", "shell", Arrangement::Random { seed: 3 }, 40)).unwrap();
        for w in r.timeline.windows(2) {
            let key = |e: &TimelineEntry| (e.cumulative_cost, e.side, e.step_index);
            assert!(key(&w[0]) < key(&w[1]));
        }
        let summary = summarize_battle(&r.config).unwrap();
        assert_eq!(r.summary(), summary);
        for (side, cost) in [(Side::Left, r.left_cost), (Side::Right, r.right_cost)] {
            let last = r.timeline.iter().rfind(|e| e.side == side).unwrap();
            assert_eq!(last.cumulative_cost, cost);
        }
    }

    #[test]
    fn stripes() {
        let a = |v: &[u32]| ElementArray::new(v.to_vec()).unwrap();
        assert_eq!(stripe_mapping(&a(&[1, 2, 3])), vec![0, 1, 2]);
        assert_eq!(stripe_mapping(&a(&[3, 1, 2])), vec![2, 0, 1]);
        let sorted = make_arrangement(Arrangement::Sorted, 100).unwrap();
        assert_eq!(stripe_mapping(&sorted), (0..100).collect::<Vec<_>>());
    }

    #[test]
    fn document_is_tagged() {
        let r = run_battle(&cfg("merge", "radix", Arrangement::Random { seed: 7 }, 10)).unwrap();
        let doc: serde_json::Value = serde_json::from_str(&r.to_document()).unwrap();
        assert_eq!(doc["type"], "battle_result");
        assert_eq!(doc["v"], 1);
        assert_eq!(doc["config"]["arrangement"]["kind"], "random");
        let back: BattleResult = serde_json::from_value(doc).unwrap();
        assert_eq!(back, r);
    }
}
