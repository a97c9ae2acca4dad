use serde::{Deserialize, Serialize};

use crate::element::{ElementArray, MAX_ELEMENTS};

use super::BattleError;

/// How the battle field is laid out before the race.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Arrangement {
    Random { seed: u64 },
    Reversed,
    Sorted,
}

impl Arrangement {
    pub fn name(&self) -> &'static str {
        match self {
            Arrangement::Random { .. } => "random",
            Arrangement::Reversed => "reversed",
            Arrangement::Sorted => "sorted",
        }
    }
}

/// xorshift64* seeded through one round of splitmix64.
///
/// ```text
/// seed step:  z = seed + 0x9E3779B97F4A7C15
///             z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///             z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///             state = z ^ (z >> 31)        (0 is replaced by 0x9E3779B97F4A7C15)
/// next:       x ^= x >> 12; x ^= x << 25; x ^= x >> 27; state = x
///             return x * 0x2545F4914F6CDD1D
/// ```
///
/// All arithmetic wraps modulo 2^64. Any implementation following these
/// lines reproduces the same stream, so every client can rebuild a battle
/// field from its seed.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        let mut z = seed.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        if z == 0 {
            z = 0x9E37_79B9_7F4A_7C15;
        }
        Self { state: z }
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.state;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        self.state = x;
        x.wrapping_mul(0x2545_F491_4F6C_DD1D)
    }

    /// Uniform-ish index in `0..bound` via the high half of a 128-bit product.
    pub fn below(&mut self, bound: u64) -> u64 {
        ((u128::from(self.next_u64()) * u128::from(bound)) >> 64) as u64
    }
}

/// Builds the input array for `arrangement`.
///
/// `Random` starts from `[1..=size]` and runs Fisher-Yates from the last
/// position down to 1, swapping position `i` with `below(i + 1)`.
pub fn make_arrangement(
    arrangement: Arrangement,
    size: usize,
) -> Result<ElementArray, BattleError> {
    if size > MAX_ELEMENTS {
        return Err(BattleError::SizeOutOfRange {
            size,
            min: 0,
            max: MAX_ELEMENTS,
        });
    }
    let mut values: Vec<u32> = (1..=size as u32).collect();
    match arrangement {
        Arrangement::Sorted => {}
        Arrangement::Reversed => values.reverse(),
        Arrangement::Random { seed } => {
            let mut rng = XorShift64Star::new(seed);
            for i in (1..size).rev() {
                let j = rng.below(i as u64 + 1) as usize;
                values.swap(i, j);
            }
        }
    }
    Ok(ElementArray::new(values).expect("arrangements are permutations"))
}
