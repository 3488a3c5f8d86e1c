//! Evaluation of campaign output: gold-standard matching, review
//! aggregation and annotation statistics.

mod gold;
mod review;
mod stats;
mod vote;

pub use gold::{
    evaluate_gold, largest_remainder_percentages, load_gold, parse_gold_csv, read_gold, round_half_up_percent, GoldReport,
    GoldStandard, GoldSummary, MatchKind, MatchVerdict,
};
pub use review::{decide, decisions_for, finalize_reviews, review, FinalizeReport, Policy, ReviewDecision, Verdict};
pub use stats::{compute_stats, domain_stats, CampaignStats, Context, StatsCell, UserCounts};
pub use vote::{majority_vote, VoteOutcome};
