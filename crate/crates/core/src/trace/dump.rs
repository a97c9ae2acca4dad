//! Text renderings of a trace.
//!
//! The `lines` format is the machine format used by golden files. It is
//! tab-separated, one record per line, every line terminated by `\n`:
//!
//! ```text
//! trace<TAB>{algorithm_id}<TAB>{n}<TAB>{v1,v2,...,vn}
//! {index}<TAB>{kind}<TAB>{args}<TAB>{code_line}<TAB>{cost}
//! ```
//!
//! `kind` and `args` (comma-separated, no spaces) are one of
//!
//! | kind        | args                      |
//! |-------------|---------------------------|
//! | `compare`   | `i,j,lt` / `i,j,eq` / `i,j,gt` |
//! | `swap`      | `i,j`                     |
//! | `write`     | `i,new_value,old_value`   |
//! | `highlight` | `start,end` (half-open)   |

use std::fmt::Write as _;

use thiserror::Error;

use super::{CompareOutcome, Cursor, Region, StepKind, Trace, TraceError, TraceStep};
use crate::catalog::Algorithm;
use crate::element::ElementArray;

#[derive(Debug, Error)]
pub enum DumpParseError {
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error(transparent)]
    Trace(#[from] TraceError),
}

fn outcome_code(o: CompareOutcome) -> &'static str {
    match o {
        CompareOutcome::Less => "lt",
        CompareOutcome::Equal => "eq",
        CompareOutcome::Greater => "gt",
    }
}

fn join(values: &[u32]) -> String {
    values
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

pub fn format_lines(trace: &Trace) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "trace\t{}\t{}\t{}",
        trace.algorithm_id(),
        trace.initial().len(),
        join(trace.initial().values())
    );
    for (index, step) in trace.steps().iter().enumerate() {
        let (kind, args) = match step.kind {
            StepKind::Compare { i, j, outcome } => {
                ("compare", format!("{i},{j},{}", outcome_code(outcome)))
            }
            StepKind::Swap { i, j } => ("swap", format!("{i},{j}")),
            StepKind::Write {
                i,
                new_value,
                old_value,
            } => ("write", format!("{i},{new_value},{old_value}")),
            StepKind::Highlight { region } => {
                ("highlight", format!("{},{}", region.start, region.end))
            }
        };
        let _ = writeln!(
            out,
            "{index}\t{kind}\t{args}\t{}\t{}",
            step.code_line, step.cost
        );
    }
    out
}

/// Human-readable listing with array values and the pseudo-code line of
/// every step.
pub fn format_text(trace: &Trace) -> String {
    let spec = trace.algorithm().spec();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{} ({}), n = {}, initial {}",
        spec.display_name,
        spec.id,
        trace.initial().len(),
        trace.initial()
    );
    let mut cursor = Cursor::new(std::sync::Arc::new(trace.clone()));
    for index in 0..trace.len() {
        let before = cursor.current().to_vec();
        let step = *cursor.step_forward().expect("index < len");
        let what = match step.kind {
            StepKind::Compare { i, j, outcome } => {
                let sym = match outcome {
                    CompareOutcome::Less => "<",
                    CompareOutcome::Equal => "=",
                    CompareOutcome::Greater => ">",
                };
                format!("compare A[{i}]={} {sym} A[{j}]={}", before[i], before[j])
            }
            StepKind::Swap { i, j } => {
                format!("swap    A[{i}]={} <-> A[{j}]={}", before[i], before[j])
            }
            StepKind::Write {
                i,
                new_value,
                old_value,
            } => format!("write   A[{i}] := {new_value} (was {old_value})"),
            StepKind::Highlight { region } => {
                format!("focus   A[{}..{})", region.start, region.end)
            }
        };
        let _ = writeln!(
            out,
            "{index:>6}  {what:<36} cost {}  | {:>2}: {}",
            step.cost,
            step.code_line,
            spec.pseudo_code[step.code_line].trim_start()
        );
    }
    let _ = writeln!(
        out,
        "{} steps, total cost {}, final {}",
        trace.len(),
        trace.total_cost(),
        ElementArray::new(cursor.current().to_vec())
            .map(|a| a.to_string())
            .unwrap_or_else(|_| format!("{:?}", cursor.current()))
    );
    out
}

pub fn parse_lines(text: &str) -> Result<Trace, DumpParseError> {
    let syntax = |line: usize, reason: &str| DumpParseError::Syntax {
        line,
        reason: reason.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
    let fields: Vec<&str> = header.split('\t').collect();
    if fields.len() != 4 || fields[0] != "trace" {
        return Err(syntax(1, "malformed header"));
    }
    let algorithm = Algorithm::from_id(fields[1]).map_err(TraceError::from)?;
    let n: usize = fields[2].parse().map_err(|_| syntax(1, "bad n"))?;
    let values = parse_numbers(fields[3]).ok_or_else(|| syntax(1, "bad values"))?;
    if values.len() != n {
        return Err(syntax(1, "n does not match value count"));
    }
    let initial = ElementArray::new(values).map_err(TraceError::from)?;

    let mut steps = Vec::new();
    for (k, line) in lines {
        let lineno = k + 1;
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(syntax(lineno, "expected 5 fields"));
        }
        if f[0].parse::<usize>().ok() != Some(steps.len()) {
            return Err(syntax(lineno, "step index out of sequence"));
        }
        let args: Vec<&str> = f[2].split(',').collect();
        let num = |idx: usize| -> Result<usize, DumpParseError> {
            args.get(idx)
                .and_then(|a| a.parse().ok())
                .ok_or_else(|| syntax(lineno, "bad argument"))
        };
        let kind = match (f[1], args.len()) {
            ("compare", 3) => StepKind::Compare {
                i: num(0)?,
                j: num(1)?,
                outcome: match args[2] {
                    "lt" => CompareOutcome::Less,
                    "eq" => CompareOutcome::Equal,
                    "gt" => CompareOutcome::Greater,
                    _ => return Err(syntax(lineno, "bad compare outcome")),
                },
            },
            ("swap", 2) => StepKind::Swap {
                i: num(0)?,
                j: num(1)?,
            },
            ("write", 3) => StepKind::Write {
                i: num(0)?,
                new_value: num(1)? as u32,
                old_value: num(2)? as u32,
            },
            ("highlight", 2) => StepKind::Highlight {
                region: Region {
                    start: num(0)?,
                    end: num(1)?,
                },
            },
            _ => return Err(syntax(lineno, "unknown step kind")),
        };
        let code_line = f[3].parse().map_err(|_| syntax(lineno, "bad code line"))?;
        let cost = f[4].parse().map_err(|_| syntax(lineno, "bad cost"))?;
        steps.push(TraceStep {
            kind,
            code_line,
            cost,
        });
    }
    Ok(Trace::from_parts(algorithm, initial, steps)?)
}

fn parse_numbers(s: &str) -> Option<Vec<u32>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.parse().ok()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bubble_two_elements_lines() {
        let t = Trace::generate(Algorithm::Bubble, &ElementArray::new(vec![2, 1]).unwrap());
        assert_eq!(
            format_lines(&t),
            "trace\tbubble\t2\t2,1\n0\tcompare\t0,1,gt\t3\t1\n1\tswap\t0,1\t4\t2\n"
        );
    }

    #[test]
    fn header_only_for_singleton() {
        let t = Trace::generate(Algorithm::Insertion, &ElementArray::new(vec![1]).unwrap());
        assert_eq!(format_lines(&t), "trace\tinsertion\t1\t1\n");
        let t = Trace::generate(Algorithm::Insertion, &ElementArray::new(vec![]).unwrap());
        assert_eq!(format_lines(&t), "trace\tinsertion\t0\t\n");
    }

    #[test]
    fn text_mentions_code_lines() {
        let t = Trace::generate(Algorithm::Bubble, &ElementArray::new(vec![2, 1]).unwrap());
        let text = format_text(&t);
        assert!(text.contains("compare A[0]=2 > A[1]=1"));
        assert!(text.contains("swap A[j] and A[j + 1]"));
        assert!(text.contains("2 steps, total cost 3, final [1,2]"));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_lines("").is_err());
        assert!(parse_lines("trace\tbubble\t2\t2,1\n0\tfly\t0\t0\t0\n").is_err());
        assert!(parse_lines("trace\tbubble\t2\t2,1\n5\tswap\t0,1\t4\t2\n").is_err());
    }

    fn permutation(max: usize) -> impl Strategy<Value = Vec<u32>> {
        (0..=max).prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
    }

    proptest! {
        #[test]
        fn lines_round_trip(values in permutation(24), algo in 0usize..9) {
            let t = Trace::generate(Algorithm::ALL[algo], &ElementArray::new(values).unwrap());
            let parsed = parse_lines(&format_lines(&t)).unwrap();
            prop_assert_eq!(parsed, t);
        }
    }
}
