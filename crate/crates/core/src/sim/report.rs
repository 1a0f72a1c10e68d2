use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::audit::Violation;
use crate::dialogue::{CommunicativeFunction, Level, PersuasiveTechnique};
use crate::session::Transcript;

/// Violations kept verbatim in a report; the rest are only counted.
const SAMPLE_LIMIT: usize = 20;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelHistogram {
    pub low: u64,
    pub medium: u64,
    pub high: u64,
}

impl LevelHistogram {
    fn add(&mut self, level: Level) {
        match level {
            Level::Low => self.low += 1,
            Level::Medium => self.medium += 1,
            Level::High => self.high += 1,
        }
    }

    fn merge(&mut self, other: &Self) {
        self.low += other.low;
        self.medium += other.medium;
        self.high += other.high;
    }

    pub fn total(&self) -> u64 {
        self.low + self.medium + self.high
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicOutcome {
    pub knowledge: LevelHistogram,
    pub intention: LevelHistogram,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchReport {
    pub runs: u64,
    pub profiles: BTreeMap<String, u64>,
    pub ethical_profiles: BTreeMap<String, u64>,
    /// Argument acts per technique.
    pub techniques: BTreeMap<String, u64>,
    pub arguments: u64,
    pub exceptions: u64,
    pub substitutions: u64,
    pub violations: u64,
    pub violation_samples: Vec<String>,
    pub per_topic: BTreeMap<String, TopicOutcome>,
}

impl BatchReport {
    pub fn record(
        &mut self,
        profile_id: &str,
        transcript: &Transcript,
        final_levels: impl IntoIterator<Item = (String, Level, Level)>,
        violations: &[Violation],
    ) {
        self.runs += 1;
        *self.profiles.entry(profile_id.to_string()).or_default() += 1;
        *self
            .ethical_profiles
            .entry(transcript.header.ethical_profile.as_str().to_string())
            .or_default() += 1;
        for act in transcript.acts() {
            match act.function {
                CommunicativeFunction::Argument => {
                    self.arguments += 1;
                    if let Some(t) = act.technique {
                        *self.techniques.entry(t.as_str().to_string()).or_default() += 1;
                    }
                }
                CommunicativeFunction::Exception => self.exceptions += 1,
                CommunicativeFunction::Substitution => self.substitutions += 1,
                _ => {}
            }
        }
        for (topic, knowledge, intention) in final_levels {
            let o = self.per_topic.entry(topic).or_default();
            o.knowledge.add(knowledge);
            o.intention.add(intention);
        }
        self.violations += violations.len() as u64;
        for v in violations {
            if self.violation_samples.len() < SAMPLE_LIMIT {
                self.violation_samples.push(v.to_string());
            }
        }
    }

    /// Adds another report's counters. Samples are kept up to the limit.
    pub fn merge(&mut self, other: &BatchReport) {
        self.runs += other.runs;
        for (k, v) in &other.profiles {
            *self.profiles.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.ethical_profiles {
            *self.ethical_profiles.entry(k.clone()).or_default() += v;
        }
        for (k, v) in &other.techniques {
            *self.techniques.entry(k.clone()).or_default() += v;
        }
        self.arguments += other.arguments;
        self.exceptions += other.exceptions;
        self.substitutions += other.substitutions;
        self.violations += other.violations;
        for s in &other.violation_samples {
            if self.violation_samples.len() < SAMPLE_LIMIT {
                self.violation_samples.push(s.clone());
            }
        }
        for (topic, o) in &other.per_topic {
            let mine = self.per_topic.entry(topic.clone()).or_default();
            mine.knowledge.merge(&o.knowledge);
            mine.intention.merge(&o.intention);
        }
    }

    pub fn technique_share(&self, t: PersuasiveTechnique) -> f64 {
        if self.arguments == 0 {
            return 0.0;
        }
        self.techniques.get(t.as_str()).copied().unwrap_or(0) as f64 / self.arguments as f64
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn summary_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "runs            {}", self.runs);
        for (k, v) in &self.profiles {
            let _ = writeln!(s, "  profile {k:<14} {v}");
        }
        for (k, v) in &self.ethical_profiles {
            let _ = writeln!(s, "  ethical {k:<14} {v}");
        }
        let _ = writeln!(s, "arguments       {}", self.arguments);
        for t in PersuasiveTechnique::ALL {
            let n = self.techniques.get(t.as_str()).copied().unwrap_or(0);
            let _ = writeln!(s, "  {:<22} {n:>6}  {:.3}", t.as_str(), self.technique_share(t));
        }
        let _ = writeln!(s, "exceptions      {}", self.exceptions);
        let _ = writeln!(s, "substitutions   {}", self.substitutions);
        let _ = writeln!(s, "violations      {}", self.violations);
        let _ = writeln!(s);
        let _ = writeln!(s, "{:<14} {:>24}   {:>24}", "topic", "knowledge low/med/high", "intention low/med/high");
        for (topic, o) in &self.per_topic {
            let _ = writeln!(
                s,
                "{topic:<14} {:>24}   {:>24}",
                format!("{}/{}/{}", o.knowledge.low, o.knowledge.medium, o.knowledge.high),
                format!("{}/{}/{}", o.intention.low, o.intention.medium, o.intention.high),
            );
        }
        for v in &self.violation_samples {
            let _ = writeln!(s, "! {v}");
        }
        s
    }
}
