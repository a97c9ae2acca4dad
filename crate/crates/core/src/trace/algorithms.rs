//! The nine catalog algorithms, written against [`Tracer`] so that each
//! comparison and each movement on the sorting field becomes a step.

use std::cmp::Ordering;

use super::{StepSink, Tracer};
use crate::catalog::lines;

pub(super) fn bubble<S: StepSink>(t: &mut Tracer<'_, S>) {
    let n = t.len();
    for pass in 0..n.saturating_sub(1) {
        let mut swapped = false;
        for j in 0..n - 1 - pass {
            if t.compare(j, j + 1, lines::bubble::COMPARE) == Ordering::Greater {
                t.swap(j, j + 1, lines::bubble::SWAP);
                swapped = true;
            }
        }
        if !swapped {
            break;
        }
    }
}

pub(super) fn selection<S: StepSink>(t: &mut Tracer<'_, S>) {
    let n = t.len();
    for i in 0..n.saturating_sub(1) {
        let mut min = i;
        for j in i + 1..n {
            if t.compare(j, min, lines::selection::COMPARE) == Ordering::Less {
                min = j;
            }
        }
        if min != i {
            t.swap(i, min, lines::selection::SWAP);
        }
    }
}

pub(super) fn insertion<S: StepSink>(t: &mut Tracer<'_, S>) {
    for i in 1..t.len() {
        let mut j = i;
        while j > 0 && t.compare(j - 1, j, lines::insertion::COMPARE) == Ordering::Greater {
            t.swap(j - 1, j, lines::insertion::SWAP);
            j -= 1;
        }
    }
}

pub(super) fn gnome<S: StepSink>(t: &mut Tracer<'_, S>) {
    let n = t.len();
    let mut pos = 0;
    while pos < n {
        if pos == 0 || t.compare(pos - 1, pos, lines::gnome::COMPARE) != Ordering::Greater {
            pos += 1;
        } else {
            t.swap(pos - 1, pos, lines::gnome::SWAP);
            pos -= 1;
        }
    }
}

pub(super) fn shell<S: StepSink>(t: &mut Tracer<'_, S>) {
    let n = t.len();
    let mut gap = n / 2;
    while gap > 0 {
        for i in gap..n {
            let mut j = i;
            while j >= gap && t.compare(j - gap, j, lines::shell::COMPARE) == Ordering::Greater {
                t.swap(j - gap, j, lines::shell::SWAP);
                j -= gap;
            }
        }
        gap /= 2;
    }
}

pub(super) fn merge<S: StepSink>(t: &mut Tracer<'_, S>) {
    merge_range(t, 0, t.len());
}

fn merge_range<S: StepSink>(t: &mut Tracer<'_, S>, lo: usize, hi: usize) {
    if hi - lo < 2 {
        return;
    }
    let mid = (lo + hi) / 2;
    merge_range(t, lo, mid);
    merge_range(t, mid, hi);

    t.highlight(lo, hi, lines::merge::RANGE);
    // The runs stay untouched on the field while the buffer is filled, so
    // every comparison reads the elements at their current positions.
    let mut buffer = Vec::with_capacity(hi - lo);
    let (mut i, mut j) = (lo, mid);
    while i < mid && j < hi {
        if t.compare(i, j, lines::merge::COMPARE) == Ordering::Greater {
            buffer.push(t.values()[j]);
            j += 1;
        } else {
            buffer.push(t.values()[i]);
            i += 1;
        }
    }
    buffer.extend_from_slice(&t.values()[i..mid]);
    buffer.extend_from_slice(&t.values()[j..hi]);
    t.place(lo, &buffer, lines::merge::PLACE);
}

pub(super) fn quick<S: StepSink>(t: &mut Tracer<'_, S>) {
    if t.len() > 1 {
        quick_range(t, 0, t.len() - 1);
    }
}

fn quick_range<S: StepSink>(t: &mut Tracer<'_, S>, lo: usize, hi: usize) {
    if lo >= hi {
        return;
    }
    t.highlight(lo, hi + 1, lines::quick::RANGE);
    let mut i = lo;
    for j in lo..hi {
        if t.compare(j, hi, lines::quick::COMPARE) == Ordering::Less {
            if i != j {
                t.swap(i, j, lines::quick::SWAP);
            }
            i += 1;
        }
    }
    if i != hi {
        t.swap(i, hi, lines::quick::PIVOT_SWAP);
    }
    if i > lo {
        quick_range(t, lo, i - 1);
    }
    quick_range(t, i + 1, hi);
}

pub(super) fn heap<S: StepSink>(t: &mut Tracer<'_, S>) {
    let n = t.len();
    for start in (0..n / 2).rev() {
        sift_down(t, start, n);
    }
    for end in (1..n).rev() {
        t.swap(0, end, lines::heap::EXTRACT);
        sift_down(t, 0, end);
    }
}

fn sift_down<S: StepSink>(t: &mut Tracer<'_, S>, mut root: usize, end: usize) {
    while 2 * root + 1 < end {
        let mut child = 2 * root + 1;
        if child + 1 < end
            && t.compare(child, child + 1, lines::heap::CHILD_COMPARE) == Ordering::Less
        {
            child += 1;
        }
        if t.compare(root, child, lines::heap::ROOT_COMPARE) == Ordering::Less {
            t.swap(root, child, lines::heap::SIFT_SWAP);
            root = child;
        } else {
            return;
        }
    }
}

/// LSD radix sort, base 10.
pub(super) fn radix<S: StepSink>(t: &mut Tracer<'_, S>) {
    let n = t.len();
    if n < 2 {
        return;
    }
    let max = t.values().iter().copied().max().unwrap_or(0);
    let mut divisor = 1u32;
    loop {
        t.highlight(0, n, lines::radix::PASS);
        let mut buckets: [Vec<u32>; 10] = Default::default();
        for &x in t.values() {
            buckets[((x / divisor) % 10) as usize].push(x);
        }
        let collected: Vec<u32> = buckets.concat();
        t.place(0, &collected, lines::radix::PLACE);
        match divisor.checked_mul(10) {
            Some(next) if max / next > 0 => divisor = next,
            _ => break,
        }
    }
}
