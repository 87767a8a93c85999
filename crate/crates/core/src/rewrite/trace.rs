use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{apply, MatchSite, RewriteError, RuleId};
use crate::diagram::{Diagram, V};

/// One applied rewrite and the hash of the diagram it produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub site: MatchSite,
    pub hash: String,
}

#[derive(Serialize, Deserialize)]
struct StepJson {
    rule: String,
    anchors: Vec<V>,
    hash: String,
}

impl Serialize for TraceStep {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        StepJson {
            rule: self.site.rule.to_string(),
            anchors: self.site.anchors.clone(),
            hash: self.hash.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TraceStep {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = StepJson::deserialize(d)?;
        let rule: RuleId = raw.rule.parse().map_err(serde::de::Error::custom)?;
        Ok(TraceStep {
            site: MatchSite {
                rule,
                anchors: raw.anchors,
                edges: Vec::new(),
            },
            hash: raw.hash,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewriteTrace {
    pub steps: Vec<TraceStep>,
}

impl RewriteTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Records `site` as having produced `after`.
    pub fn record(&mut self, site: MatchSite, after: &Diagram) {
        self.steps.push(TraceStep {
            site,
            hash: after.hash(),
        });
    }

    pub fn extend(&mut self, other: RewriteTrace) {
        self.steps.extend(other.steps);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("trace serializes")
    }

    /// Applies every step to `initial`, checking each hash on the way.
    pub fn replay(&self, initial: &Diagram) -> Result<Diagram, RewriteError> {
        let mut d = initial.clone();
        for (i, step) in self.steps.iter().enumerate() {
            d = apply(&d, &step.site)?;
            if d.hash() != step.hash {
                return Err(RewriteError::HashMismatch {
                    step: i,
                    expected: step.hash.clone(),
                });
            }
        }
        Ok(d)
    }
}
