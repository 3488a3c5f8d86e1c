use std::collections::BTreeMap;

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "values", rename_all = "lowercase")]
pub enum VoteOutcome<T> {
    Winner(T),
    /// Values tied for first place; empty when there were no votes.
    Inconclusive(Vec<T>),
}

impl<T> VoteOutcome<T> {
    pub fn winner(&self) -> Option<&T> {
        match self {
            VoteOutcome::Winner(w) => Some(w),
            VoteOutcome::Inconclusive(_) => None,
        }
    }
}

/// The strictly most frequent value, or every value tied for the top count.
pub fn majority_vote<T: Ord + Clone>(votes: &[T]) -> VoteOutcome<T> {
    let mut counts: BTreeMap<&T, usize> = BTreeMap::new();
    for v in votes {
        *counts.entry(v).or_insert(0) += 1;
    }
    let top = counts.values().copied().max().unwrap_or(0);
    let mut leaders: Vec<T> = counts
        .into_iter()
        .filter(|(_, c)| *c == top)
        .map(|(v, _)| v.clone())
        .collect();
    if leaders.len() == 1 {
        VoteOutcome::Winner(leaders.remove(0))
    } else {
        VoteOutcome::Inconclusive(leaders)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(majority_vote(&["c", "c", "i"]), VoteOutcome::Winner("c"));
        assert_eq!(majority_vote(&["c", "i", "u"]), VoteOutcome::Inconclusive(vec!["c", "i", "u"]));
        assert_eq!(majority_vote::<u8>(&[]), VoteOutcome::Inconclusive(vec![]));
        assert_eq!(majority_vote(&[1, 2, 2, 1, 3]), VoteOutcome::Inconclusive(vec![1, 2]));
    }
}
