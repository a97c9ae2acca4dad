//! Trace invariants checked by an independent replayer.

use proptest::prelude::*;
use sortlab_core::trace::{CompareOutcome, StepKind};
use sortlab_core::{list_algorithms, Algorithm, ElementArray, Trace};

/// Replays a trace with its own step semantics and checks every invariant
/// along the way. Returns the final array.
fn replay_checked(trace: &Trace) -> Vec<u32> {
    let n = trace.initial().len();
    let lines = trace.algorithm().spec().pseudo_code.len();
    let mut a = trace.initial().values().to_vec();
    let mut cost = 0;
    for (k, step) in trace.steps().iter().enumerate() {
        assert!(step.code_line < lines, "step {k}: bad line");
        match step.kind {
            StepKind::Compare { i, j, outcome } => {
                assert!(i < n && j < n);
                let truth = if a[i] < a[j] {
                    CompareOutcome::Less
                } else if a[i] > a[j] {
                    CompareOutcome::Greater
                } else {
                    CompareOutcome::Equal
                };
                assert_eq!(outcome, truth, "step {k}: dishonest compare");
                assert_eq!(step.cost, 1);
            }
            StepKind::Swap { i, j } => {
                a.swap(i, j);
                assert_eq!(step.cost, 2);
            }
            StepKind::Write {
                i,
                new_value,
                old_value,
            } => {
                assert_eq!(a[i], old_value);
                a[i] = new_value;
                assert_eq!(step.cost, 1);
            }
            StepKind::Highlight { region } => {
                assert!(region.start < region.end && region.end <= n);
                assert_eq!(step.cost, 0);
            }
        }
        cost += step.cost;
        let mut seen = vec![false; n + 1];
        for &v in &a {
            assert!(
                v >= 1 && v as usize <= n && !seen[v as usize],
                "step {k}: not a permutation"
            );
            seen[v as usize] = true;
        }
    }
    assert_eq!(cost, trace.total_cost());
    a
}

fn inversions(v: &[u32]) -> usize {
    let mut count = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                count += 1;
            }
        }
    }
    count
}

fn permutations(n: usize) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, rest: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..rest.len() {
            let v = rest.remove(k);
            prefix.push(v);
            go(prefix, rest, out);
            prefix.pop();
            rest.insert(k, v);
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut (1..=n as u32).collect(), &mut out);
    out
}

#[test]
fn exhaustive_small_permutations() {
    for n in 0..=6 {
        for p in permutations(n) {
            let input = ElementArray::new(p.clone()).unwrap();
            for algo in Algorithm::ALL {
                let t = Trace::generate(algo, &input);
                let end = replay_checked(&t);
                assert_eq!(end, (1..=n as u32).collect::<Vec<_>>(), "{algo} on {p:?}");
            }
        }
    }
}

#[test]
fn adjacent_swap_sorts_swap_once_per_inversion() {
    for n in 0..=6 {
        for p in permutations(n) {
            let input = ElementArray::new(p.clone()).unwrap();
            for algo in [Algorithm::Bubble, Algorithm::Insertion, Algorithm::Gnome] {
                let swaps = Trace::generate(algo, &input)
                    .steps()
                    .iter()
                    .filter(|s| matches!(s.kind, StepKind::Swap { .. }))
                    .count();
                assert_eq!(swaps, inversions(&p), "{algo} on {p:?}");
            }
        }
    }
}

#[test]
fn merge_small_example() {
    let t = Trace::generate(
        Algorithm::Merge,
        &ElementArray::new(vec![2, 1, 4, 3]).unwrap(),
    );
    assert_eq!(replay_checked(&t), vec![1, 2, 3, 4]);
}

#[test]
fn every_algorithm_uses_several_code_lines() {
    let input = ElementArray::new(vec![5, 2, 9, 1, 7, 3, 10, 4, 8, 6]).unwrap();
    for spec in list_algorithms() {
        let t = Trace::generate(Algorithm::from_id(spec.id).unwrap(), &input);
        let mut used: Vec<_> = t.steps().iter().map(|s| s.code_line).collect();
        used.sort_unstable();
        used.dedup();
        assert!(used.len() >= 2, "{}", spec.id);
    }
}

fn permutation(max: usize) -> impl Strategy<Value = Vec<u32>> {
    (0..=max).prop_flat_map(|n| Just((1..=n as u32).collect::<Vec<_>>()).prop_shuffle())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn random_inputs_sort_and_stay_permutations(values in permutation(128), algo in 0usize..9) {
        let input = ElementArray::new(values).unwrap();
        let t = Trace::generate(Algorithm::ALL[algo], &input);
        let end = replay_checked(&t);
        prop_assert!(end.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn generation_is_deterministic(values in permutation(64), algo in 0usize..9) {
        let input = ElementArray::new(values).unwrap();
        let a = Trace::generate(Algorithm::ALL[algo], &input);
        let b = Trace::generate(Algorithm::ALL[algo], &input);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn forward_then_backward_restores(values in permutation(48), algo in 0usize..9, frac in 0.0f64..=1.0) {
        let input = ElementArray::new(values.clone()).unwrap();
        let mut c = Trace::generate(Algorithm::ALL[algo], &input).into_cursor();
        let k = (c.len() as f64 * frac) as usize;
        for _ in 0..k { c.step_forward().unwrap(); }
        let mut fresh = c.clone();
        fresh.seek(0).unwrap();
        let mut stepped = fresh.clone();
        for _ in 0..k { stepped.step_forward().unwrap(); }
        prop_assert_eq!(stepped.current(), c.current());
        for _ in 0..k { c.step_backward().unwrap(); }
        prop_assert_eq!(c.current(), &values[..]);
        prop_assert_eq!(c.position(), 0);
    }
}
