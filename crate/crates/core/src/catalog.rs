//! The fixed set of sorting algorithms offered by the detail and battle views.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown algorithm `{0}`")]
pub struct UnknownAlgorithm(pub String);

/// Static description of one catalog entry, shown next to the visualization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AlgorithmSpec {
    pub id: &'static str,
    pub display_name: &'static str,
    pub description: &'static str,
    pub pseudo_code: &'static [&'static str],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Bubble,
    Selection,
    Insertion,
    Gnome,
    Shell,
    Merge,
    Quick,
    Heap,
    Radix,
}

impl Algorithm {
    /// Catalog order.
    pub const ALL: [Algorithm; 9] = [
        Algorithm::Bubble,
        Algorithm::Selection,
        Algorithm::Insertion,
        Algorithm::Gnome,
        Algorithm::Shell,
        Algorithm::Merge,
        Algorithm::Quick,
        Algorithm::Heap,
        Algorithm::Radix,
    ];

    pub fn id(self) -> &'static str {
        self.spec().id
    }

    pub fn from_id(id: &str) -> Result<Self, UnknownAlgorithm> {
        Self::ALL
            .into_iter()
            .find(|a| a.id() == id)
            .ok_or_else(|| UnknownAlgorithm(id.to_string()))
    }

    pub fn spec(self) -> &'static AlgorithmSpec {
        match self {
            Algorithm::Bubble => &BUBBLE,
            Algorithm::Selection => &SELECTION,
            Algorithm::Insertion => &INSERTION,
            Algorithm::Gnome => &GNOME,
            Algorithm::Shell => &SHELL,
            Algorithm::Merge => &MERGE,
            Algorithm::Quick => &QUICK,
            Algorithm::Heap => &HEAP,
            Algorithm::Radix => &RADIX,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_id(s)
    }
}

/// All nine catalog entries in stable order.
pub fn list_algorithms() -> Vec<&'static AlgorithmSpec> {
    Algorithm::ALL.iter().map(|a| a.spec()).collect()
}

// Line numbers referenced by the generators live next to the text they index.

pub(crate) mod lines {
    pub mod bubble {
        pub const COMPARE: usize = 3;
        pub const SWAP: usize = 4;
    }
    pub mod selection {
        pub const COMPARE: usize = 3;
        pub const SWAP: usize = 6;
    }
    pub mod insertion {
        pub const COMPARE: usize = 2;
        pub const SWAP: usize = 3;
    }
    pub mod gnome {
        pub const COMPARE: usize = 2;
        pub const SWAP: usize = 5;
    }
    pub mod shell {
        pub const COMPARE: usize = 4;
        pub const SWAP: usize = 5;
    }
    pub mod merge {
        pub const RANGE: usize = 4;
        pub const COMPARE: usize = 7;
        pub const PLACE: usize = 10;
    }
    pub mod quick {
        pub const RANGE: usize = 2;
        pub const COMPARE: usize = 5;
        pub const SWAP: usize = 6;
        pub const PIVOT_SWAP: usize = 8;
    }
    pub mod heap {
        pub const EXTRACT: usize = 2;
        pub const CHILD_COMPARE: usize = 7;
        pub const ROOT_COMPARE: usize = 8;
        pub const SIFT_SWAP: usize = 9;
    }
    pub mod radix {
        pub const PASS: usize = 1;
        pub const PLACE: usize = 6;
    }
}

static BUBBLE: AlgorithmSpec = AlgorithmSpec {
    id: "bubble",
    display_name: "Bubble Sort",
    description: "Repeatedly walks the field and swaps neighbouring elements that are out of \
                  order. After each pass the largest remaining element has bubbled to the end. \
                  A pass without any swap means the field is sorted.",
    pseudo_code: &[
        "for pass := 0 to n - 2 do",
        "  swapped := false",
        "  for j := 0 to n - 2 - pass do",
        "    if A[j] > A[j + 1] then",
        "      swap A[j] and A[j + 1]",
        "      swapped := true",
        "  if not swapped then stop",
    ],
};

static SELECTION: AlgorithmSpec = AlgorithmSpec {
    id: "selection",
    display_name: "Selection Sort",
    description: "Searches the unsorted part for its smallest element and swaps it to the front \
                  of that part. The sorted prefix grows by one element per round.",
    pseudo_code: &[
        "for i := 0 to n - 2 do",
        "  min := i",
        "  for j := i + 1 to n - 1 do",
        "    if A[j] < A[min] then",
        "      min := j",
        "  if min != i then",
        "    swap A[i] and A[min]",
    ],
};

static INSERTION: AlgorithmSpec = AlgorithmSpec {
    id: "insertion",
    display_name: "Insertion Sort",
    description: "Takes the next element and moves it left past every larger neighbour until \
                  it sits in its place within the sorted prefix. Very fast on nearly sorted \
                  input, quadratic on reversed input.",
    pseudo_code: &[
        "for i := 1 to n - 1 do",
        "  j := i",
        "  while j > 0 and A[j - 1] > A[j] do",
        "    swap A[j - 1] and A[j]",
        "    j := j - 1",
    ],
};

static GNOME: AlgorithmSpec = AlgorithmSpec {
    id: "gnome",
    display_name: "Gnome Sort",
    description: "A single position walks forward while neighbours are in order. On an \
                  inversion it swaps the pair and steps back, like a garden gnome sorting \
                  flower pots.",
    pseudo_code: &[
        "pos := 0",
        "while pos < n do",
        "  if pos = 0 or A[pos - 1] <= A[pos] then",
        "    pos := pos + 1",
        "  else",
        "    swap A[pos - 1] and A[pos]",
        "    pos := pos - 1",
    ],
};

static SHELL: AlgorithmSpec = AlgorithmSpec {
    id: "shell",
    display_name: "Shell Sort",
    description: "Insertion sort over elements that are `gap` apart, with the gap halved after \
                  every round. Early rounds move elements over long distances so the final \
                  gap-1 round has little left to do.",
    pseudo_code: &[
        "gap := n / 2",
        "while gap > 0 do",
        "  for i := gap to n - 1 do",
        "    j := i",
        "    while j >= gap and A[j - gap] > A[j] do",
        "      swap A[j - gap] and A[j]",
        "      j := j - gap",
        "  gap := gap / 2",
    ],
};

static MERGE: AlgorithmSpec = AlgorithmSpec {
    id: "merge",
    display_name: "Merge Sort",
    description: "Splits the field in halves, sorts both halves recursively and merges the two \
                  sorted runs by repeatedly taking the smaller front element. Always needs about \
                  n log n comparisons.",
    pseudo_code: &[
        "mergeSort(A, lo, hi):",
        "  if hi - lo < 2 then return",
        "  mid := (lo + hi) / 2",
        "  mergeSort(A, lo, mid); mergeSort(A, mid, hi)",
        "  merge runs A[lo..mid) and A[mid..hi):",
        "    i := lo; j := mid; B := empty buffer",
        "    while i < mid and j < hi do",
        "      if A[i] > A[j] then append A[j] to B; j := j + 1",
        "      else append A[i] to B; i := i + 1",
        "    append the rest of both runs to B",
        "  move every element of B to its place in A[lo..hi)",
    ],
};

static QUICK: AlgorithmSpec = AlgorithmSpec {
    id: "quick",
    display_name: "Quick Sort",
    description: "Picks the last element as pivot and partitions the range so that smaller \
                  elements come first, then places the pivot between both parts and sorts \
                  them recursively.",
    pseudo_code: &[
        "quickSort(A, lo, hi):",
        "  if lo >= hi then return",
        "  pivot := A[hi]",
        "  i := lo",
        "  for j := lo to hi - 1 do",
        "    if A[j] < pivot then",
        "      swap A[i] and A[j]",
        "      i := i + 1",
        "  swap A[i] and A[hi]",
        "  quickSort(A, lo, i - 1); quickSort(A, i + 1, hi)",
    ],
};

static HEAP: AlgorithmSpec = AlgorithmSpec {
    id: "heap",
    display_name: "Heap Sort",
    description: "Arranges the field as a binary max-heap, then repeatedly swaps the root (the \
                  largest element) to the end and restores the heap on the remaining prefix.",
    pseudo_code: &[
        "for start := n / 2 - 1 down to 0 do siftDown(A, start, n)",
        "for end := n - 1 down to 1 do",
        "  swap A[0] and A[end]",
        "  siftDown(A, 0, end)",
        "siftDown(A, root, end):",
        "  while 2 * root + 1 < end do",
        "    child := 2 * root + 1",
        "    if child + 1 < end and A[child] < A[child + 1] then child := child + 1",
        "    if A[root] < A[child] then",
        "      swap A[root] and A[child]; root := child",
        "    else return",
    ],
};

static RADIX: AlgorithmSpec = AlgorithmSpec {
    id: "radix",
    display_name: "Radix Sort",
    description: "Never compares elements. Distributes the field into ten buckets by one \
                  decimal digit at a time, starting with the least significant digit, and \
                  collects the buckets in order after every pass.",
    pseudo_code: &[
        "m := number of decimal digits of max(A)",
        "for d := 0 to m - 1 do",
        "  bucket[0..9] := empty lists",
        "  for each element x of A in order do",
        "    append x to bucket[(x / 10^d) mod 10]",
        "  B := bucket[0] ++ bucket[1] ++ ... ++ bucket[9]",
        "  move every element of B to its place in A",
    ],
};

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn nine_algorithms_in_stable_order() {
        let first = list_algorithms();
        assert_eq!(first.len(), 9);
        assert_eq!(first, list_algorithms());
        let ids: Vec<_> = first.iter().map(|s| s.id).collect();
        for named in ["merge", "insertion", "radix"] {
            assert!(ids.contains(&named));
        }
    }

    #[test]
    fn ids_unique_and_pseudo_code_sized() {
        let ids: HashSet<_> = list_algorithms().iter().map(|s| s.id).collect();
        assert_eq!(ids.len(), 9);
        for spec in list_algorithms() {
            assert!((5..=15).contains(&spec.pseudo_code.len()), "{}", spec.id);
        }
    }

    #[test]
    fn id_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(Algorithm::from_id(a.id()), Ok(a));
        }
        assert_eq!(
            Algorithm::from_id("nosuch"),
            Err(UnknownAlgorithm("nosuch".into()))
        );
    }
}
