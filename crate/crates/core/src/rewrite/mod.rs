//! Rewrite engine: rules, match finding, simplification strategies and
//! conditional-error propagation.

mod push;
mod rules;
mod simplify;
mod soundness;
mod trace;

use thiserror::Error;

use crate::diagram::V;

pub use push::push_error;
pub use rules::{apply, find_matches, MatchSite, Rule, RuleId};
pub use simplify::{measure, simplify, Strategy};
pub use soundness::{check_rule_soundness, random_instance, SoundnessFailure, SoundnessReport};
pub use trace::{RewriteTrace, TraceStep};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RewriteError {
    #[error("invalid match site: {0}")]
    InvalidSite(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("unknown strategy `{0}`")]
    UnknownStrategy(String),
    #[error("vertex {0} is not a conditional π spider of degree 2")]
    NotConditionalPi(V),
    #[error("trace step {step} does not reproduce hash {expected}")]
    HashMismatch { step: usize, expected: String },
}
