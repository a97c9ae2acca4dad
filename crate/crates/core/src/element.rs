use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest array the trace engine accepts.
pub const MAX_ELEMENTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElementError {
    #[error("array of {0} elements exceeds the limit of {MAX_ELEMENTS}")]
    TooLarge(usize),
    #[error("value {value} at position {position} is outside 1..={n}")]
    OutOfRange {
        position: usize,
        value: u32,
        n: usize,
    },
    #[error("value {value} appears more than once")]
    Duplicate { value: u32 },
}

/// The sorting field: a permutation of `1..=n`.
///
/// Values are unitless ranks, so every element maps to exactly one sphere size
/// in the detail view and one image stripe in the battle view.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ElementArray(Vec<u32>);

impl ElementArray {
    pub fn new(values: Vec<u32>) -> Result<Self, ElementError> {
        let n = values.len();
        if n > MAX_ELEMENTS {
            return Err(ElementError::TooLarge(n));
        }
        let mut seen = vec![false; n];
        for (position, &value) in values.iter().enumerate() {
            if value == 0 || value as usize > n {
                return Err(ElementError::OutOfRange { position, value, n });
            }
            let slot = &mut seen[value as usize - 1];
            if *slot {
                return Err(ElementError::Duplicate { value });
            }
            *slot = true;
        }
        Ok(Self(values))
    }

    /// `[1, 2, ..., n]`.
    pub fn identity(n: usize) -> Result<Self, ElementError> {
        if n > MAX_ELEMENTS {
            return Err(ElementError::TooLarge(n));
        }
        Ok(Self((1..=n as u32).collect()))
    }

    pub fn values(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_sorted(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }
}

impl<'de> Deserialize<'de> for ElementArray {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let values = Vec::<u32>::deserialize(deserializer)?;
        ElementArray::new(values).map_err(serde::de::Error::custom)
    }
}

impl TryFrom<Vec<u32>> for ElementArray {
    type Error = ElementError;

    fn try_from(values: Vec<u32>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

impl AsRef<[u32]> for ElementArray {
    fn as_ref(&self) -> &[u32] {
        &self.0
    }
}

impl fmt::Display for ElementArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_permutations() {
        assert!(ElementArray::new(vec![]).is_ok());
        assert!(ElementArray::new(vec![3, 1, 2]).is_ok());
        assert!(ElementArray::identity(5).unwrap().is_sorted());
    }

    #[test]
    fn rejects_non_permutations() {
        assert_eq!(
            ElementArray::new(vec![1, 1]),
            Err(ElementError::Duplicate { value: 1 })
        );
        assert_eq!(
            ElementArray::new(vec![0, 1]),
            Err(ElementError::OutOfRange {
                position: 0,
                value: 0,
                n: 2
            })
        );
        assert!(matches!(
            ElementArray::new(vec![1, 3]),
            Err(ElementError::OutOfRange { value: 3, .. })
        ));
        assert!(matches!(
            ElementArray::identity(MAX_ELEMENTS + 1),
            Err(ElementError::TooLarge(_))
        ));
    }

    #[test]
    fn deserialize_validates() {
        assert!(serde_json::from_str::<ElementArray>("[2,1]").is_ok());
        assert!(serde_json::from_str::<ElementArray>("[2,2]").is_err());
    }
}
