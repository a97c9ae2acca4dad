use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Side, Winner};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guess {
    pub user_id: String,
    pub predicted: Side,
}

/// A guess is right only if it names the winner. A draw has no winner, so
/// nobody scores.
pub fn evaluate_guess(guess: &Guess, winner: Winner) -> bool {
    winner.side() == Some(guess.predicted)
}

/// Points per user. Points only ever go up, one at a time.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Scoreboard(BTreeMap<String, u64>);

impl Scoreboard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn points(&self, user_id: &str) -> u64 {
        self.0.get(user_id).copied().unwrap_or(0)
    }

    pub fn apply_score(&mut self, user_id: &str, correct: bool) {
        if correct {
            *self.0.entry(user_id.to_string()).or_insert(0) += 1;
        }
    }

    /// Combines two boards keeping the higher count per user.
    pub fn merge_max(&mut self, other: &Scoreboard) {
        for (user, &points) in &other.0 {
            let slot = self.0.entry(user.clone()).or_insert(0);
            *slot = (*slot).max(points);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, u64)> for Scoreboard {
    fn from_iter<I: IntoIterator<Item = (String, u64)>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn guess(side: Side) -> Guess {
        Guess {
            user_id: "alice".into(),
            predicted: side,
        }
    }

    #[test]
    fn guess_evaluation() {
        assert!(evaluate_guess(&guess(Side::Left), Winner::Left));
        assert!(!evaluate_guess(&guess(Side::Left), Winner::Right));
        assert!(!evaluate_guess(&guess(Side::Right), Winner::Draw));
        assert!(!evaluate_guess(&guess(Side::Left), Winner::Draw));
    }

    #[test]
    fn scoring_examples() {
        let mut sb = Scoreboard::new();
        sb.apply_score("alice", true);
        assert_eq!(sb, [("alice".to_string(), 1)].into_iter().collect());

        let mut sb: Scoreboard = [("alice".to_string(), 2)].into_iter().collect();
        sb.apply_score("alice", false);
        assert_eq!(sb.points("alice"), 2);
        assert_eq!(sb.len(), 1);

        sb.apply_score("bob", true);
        assert_eq!(
            sb,
            [("alice".to_string(), 2), ("bob".to_string(), 1)]
                .into_iter()
                .collect()
        );
    }

    #[test]
    fn merge_keeps_maximum() {
        let mut a: Scoreboard = [("alice".to_string(), 3), ("bob".to_string(), 1)]
            .into_iter()
            .collect();
        let b: Scoreboard = [("alice".to_string(), 1), ("carol".to_string(), 4)]
            .into_iter()
            .collect();
        a.merge_max(&b);
        assert_eq!(a.points("alice"), 3);
        assert_eq!(a.points("bob"), 1);
        assert_eq!(a.points("carol"), 4);
    }

    proptest! {
        #[test]
        fn points_never_decrease(events in proptest::collection::vec((0u8..4, any::<bool>()), 0..200)) {
            let mut sb = Scoreboard::new();
            for (user, correct) in events {
                let user = format!("u{user}");
                let before = sb.points(&user);
                sb.apply_score(&user, correct);
                prop_assert_eq!(sb.points(&user), before + u64::from(correct));
            }
        }
    }
}
